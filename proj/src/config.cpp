#include "iemo/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

namespace iemo {

using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

namespace {

std::string path(std::string_view prefix, std::string_view key) {
    if (prefix.empty()) return std::string(key);
    return std::string(prefix) + "." + std::string(key);
}

std::size_t get_count(const json& j, std::string_view key, std::string_view prefix) {
    const auto& v = j.at(std::string(key));
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(path(prefix, key), "expected a non-negative integer");
    return v.get<std::size_t>();
}

double get_real(const json& j, std::string_view key, std::string_view prefix) {
    const auto& v = j.at(std::string(key));
    if (!v.is_number()) throw ConfigError(path(prefix, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(prefix, key), "expected a finite number");
    return x;
}

bool get_bool(const json& j, std::string_view key, std::string_view prefix) {
    const auto& v = j.at(std::string(key));
    if (!v.is_boolean()) throw ConfigError(path(prefix, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& j, std::string_view key, std::string_view prefix) {
    const auto& v = j.at(std::string(key));
    if (!v.is_string()) throw ConfigError(path(prefix, key), "expected a string");
    return v.get<std::string>();
}

ProblemSpec parse_problem(const json& j, std::string_view prefix) {
    require_keys(j, {"family", "m", "n"}, prefix);
    if (!j.contains("family")) throw ConfigError(path(prefix, "family"), "required");
    if (!j.contains("m")) throw ConfigError(path(prefix, "m"), "required");
    Family family;
    try {
        family = parse_family(get_string(j, "family", prefix));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path(prefix, "family"), e.what());
    }
    const std::size_t m = get_count(j, "m", prefix);
    if (m < 2) throw ConfigError(path(prefix, "m"), "must be at least 2");
    const std::size_t n = j.contains("n") ? get_count(j, "n", prefix) : 0;
    try {
        return ProblemSpec::make(family, m, n);
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        const bool about_n = msg.find("n must") != std::string::npos || msg.find("WFG3") != std::string::npos ||
                             msg.find("distance variable") != std::string::npos;
        throw ConfigError(path(prefix, about_n ? "n" : "m"), msg);
    }
}

}  // namespace

void require_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view prefix) {
    if (!j.is_object()) throw ConfigError(prefix.empty() ? "config" : std::string(prefix), "expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || item.key() == a;
        if (!known) throw ConfigError(path(prefix, item.key()), "unknown key");
    }
}

RunConfig run_config_from_json(const json& j, std::string_view prefix) {
    require_keys(j,
                 {"algorithm", "problem", "N", "max_fe", "tau", "warmup_gens", "mu", "eta_step", "guidance", "seed",
                  "record_margin", "train", "variation", "moead"},
                 prefix);
    if (!j.contains("problem")) throw ConfigError(path(prefix, "problem"), "required");
    const ProblemSpec problem = parse_problem(j.at("problem"), path(prefix, "problem"));

    Algorithm algorithm = Algorithm::insga2;
    if (j.contains("algorithm")) {
        try {
            algorithm = parse_algorithm(get_string(j, "algorithm", prefix));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(path(prefix, "algorithm"), e.what());
        }
    }

    RunConfig cfg = RunConfig::defaults(algorithm, problem);
    if (j.contains("N")) {
        cfg.N = get_count(j, "N", prefix);
        if (cfg.N < 2) throw ConfigError(path(prefix, "N"), "must be at least 2");
        cfg.max_fe = 300 * cfg.N;
    }
    if (j.contains("max_fe")) cfg.max_fe = get_count(j, "max_fe", prefix);
    if (cfg.max_fe < cfg.N) throw ConfigError(path(prefix, "max_fe"), "must be at least N");
    if (j.contains("tau")) {
        cfg.tau = get_count(j, "tau", prefix);
        if (cfg.tau < 2) throw ConfigError(path(prefix, "tau"), "must be greater than 1");
        cfg.warmup_gens = 3 * cfg.tau;
    }
    if (j.contains("warmup_gens")) {
        cfg.warmup_gens = get_count(j, "warmup_gens", prefix);
        if (cfg.warmup_gens < 1) throw ConfigError(path(prefix, "warmup_gens"), "must be at least 1");
    }
    if (j.contains("mu")) cfg.elicitation.mu = get_count(j, "mu", prefix);
    if (cfg.elicitation.mu < 2 || cfg.elicitation.mu > cfg.N)
        throw ConfigError(path(prefix, "mu"), "must lie in [2, N]");
    if (j.contains("eta_step")) {
        cfg.elicitation.eta_step = get_real(j, "eta_step", prefix);
        if (!(cfg.elicitation.eta_step >= 0.0 && cfg.elicitation.eta_step <= 1.0))
            throw ConfigError(path(prefix, "eta_step"), "must lie in [0,1]");
    }
    if (j.contains("guidance")) cfg.guidance = get_bool(j, "guidance", prefix);
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_unsigned()) throw ConfigError(path(prefix, "seed"), "expected a non-negative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (j.contains("record_margin")) {
        cfg.record_margin = get_real(j, "record_margin", prefix);
        if (cfg.record_margin < 0.0) throw ConfigError(path(prefix, "record_margin"), "must be non-negative");
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        const auto p = path(prefix, "train");
        require_keys(t, {"learning_rate", "epochs", "hidden_dim", "sigma", "init_range"}, p);
        if (t.contains("learning_rate")) cfg.train.learning_rate = get_real(t, "learning_rate", p);
        if (t.contains("epochs")) cfg.train.epochs = get_count(t, "epochs", p);
        if (t.contains("hidden_dim")) cfg.train.hidden_dim = get_count(t, "hidden_dim", p);
        if (t.contains("sigma")) cfg.train.sigma = get_real(t, "sigma", p);
        if (t.contains("init_range")) cfg.train.init_range = get_real(t, "init_range", p);
        if (!(cfg.train.learning_rate > 0.0)) throw ConfigError(path(p, "learning_rate"), "must be positive");
        if (!(cfg.train.sigma > 0.0)) throw ConfigError(path(p, "sigma"), "must be positive");
    }
    if (j.contains("variation")) {
        const auto& v = j.at("variation");
        const auto p = path(prefix, "variation");
        require_keys(v, {"p_c", "eta_c", "p_m", "eta_m"}, p);
        if (v.contains("p_c")) cfg.variation.p_c = get_real(v, "p_c", p);
        if (v.contains("eta_c")) cfg.variation.eta_c = get_real(v, "eta_c", p);
        if (v.contains("p_m")) cfg.variation.p_m = get_real(v, "p_m", p);
        if (v.contains("eta_m")) cfg.variation.eta_m = get_real(v, "eta_m", p);
        try {
            cfg.variation.validate();
        } catch (const std::exception& e) {
            throw ConfigError(p, e.what());
        }
    }
    if (j.contains("moead")) {
        const auto& v = j.at("moead");
        const auto p = path(prefix, "moead");
        require_keys(v, {"neighborhood", "delta_nb", "replacement_cap"}, p);
        if (v.contains("neighborhood")) cfg.moead.neighborhood = get_count(v, "neighborhood", p);
        if (v.contains("delta_nb")) cfg.moead.delta_nb = get_real(v, "delta_nb", p);
        if (v.contains("replacement_cap")) cfg.moead.replacement_cap = get_count(v, "replacement_cap", p);
    }
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(prefix.empty() ? "config" : std::string(prefix), e.what());
    }
    return cfg;
}

json to_json(const RunConfig& cfg) {
    return json{
        {"algorithm", to_string(cfg.algorithm)},
        {"problem", {{"family", to_string(cfg.problem.family)}, {"m", cfg.problem.m}, {"n", cfg.problem.n}}},
        {"N", cfg.N},
        {"max_fe", cfg.max_fe},
        {"tau", cfg.tau},
        {"warmup_gens", cfg.warmup_gens},
        {"mu", cfg.elicitation.mu},
        {"eta_step", cfg.elicitation.eta_step},
        {"guidance", cfg.guidance},
        {"seed", cfg.seed},
        {"record_margin", cfg.record_margin},
        {"train",
         {{"learning_rate", cfg.train.learning_rate},
          {"epochs", cfg.train.epochs},
          {"hidden_dim", cfg.train.hidden_dim},
          {"sigma", cfg.train.sigma},
          {"init_range", cfg.train.init_range}}},
        {"variation",
         {{"p_c", cfg.variation.p_c},
          {"eta_c", cfg.variation.eta_c},
          {"p_m", cfg.variation.p_m},
          {"eta_m", cfg.variation.eta_m}}},
        {"moead",
         {{"neighborhood", cfg.moead.neighborhood},
          {"delta_nb", cfg.moead.delta_nb},
          {"replacement_cap", cfg.moead.replacement_cap}}},
    };
}

json to_json(const Solution& s) {
    json j{{"x", s.x}, {"f", s.f}};
    j["utility"] = s.utility ? json(*s.utility) : json(nullptr);
    return j;
}

json to_json(const Population& pop) {
    json members = json::array();
    for (const auto& s : pop.members) members.push_back(to_json(s));
    return members;
}

json to_json(const ComparisonRecord& r) { return json{{"fi", r.fi}, {"fj", r.fj}, {"c", r.c}}; }

ComparisonRecord comparison_record_from_json(const json& j) {
    return {j.at("fi").get<ObjectiveVector>(), j.at("fj").get<ObjectiveVector>(), j.at("c").get<int>()};
}

json to_json(const GenerationTrace& t) {
    json j{{"generation", t.generation}, {"fe", t.fe}, {"consulted", t.consulted}};
    j["best_psi"] = t.best_psi ? json(*t.best_psi) : json(nullptr);
    j["error"] = t.error ? json(*t.error) : json(nullptr);
    return j;
}

json to_json(const Consultation& c) {
    json records = json::array();
    for (const auto& r : c.records) records.push_back(to_json(r));
    return json{{"generation", c.generation}, {"fe", c.fe}, {"records", records}, {"flipped", c.flipped}};
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace iemo
