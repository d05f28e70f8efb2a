#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "iemo/config.hpp"
#include "iemo/dm.hpp"
#include "iemo/harness.hpp"
#include "iemo/seed.hpp"

namespace iemo {

using nlohmann::json;

ObjectiveVector OracleSpec::weight(std::size_t m) const {
    if (w_star) {
        if (w_star->size() != m) throw DimensionError("oracle w_star must have length m");
        return *w_star;
    }
    if (preference == Preference::biased) return biased_weight(m, preferred);
    return equal_weight(m);
}

std::string to_string(CampaignKind kind) {
    switch (kind) {
        case CampaignKind::runs: return "runs";
        case CampaignKind::working_example: return "working-example";
        case CampaignKind::ndcg: return "ndcg";
    }
    return "unknown";
}

namespace {

CampaignKind parse_kind(const std::string& s) {
    if (s == "runs") return CampaignKind::runs;
    if (s == "working-example") return CampaignKind::working_example;
    if (s == "ndcg") return CampaignKind::ndcg;
    throw ConfigError("kind", "expected runs, working-example or ndcg");
}

bool valid_label(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '='))
            return false;
    return true;
}

OracleSpec parse_oracle(const json& j, const std::string& prefix, std::size_t m) {
    require_keys(j, {"preference", "preferred", "w_star", "kappa"}, prefix);
    OracleSpec o;
    if (j.contains("preference")) {
        const auto& p = j.at("preference");
        if (p == "equal") o.preference = OracleSpec::Preference::equal;
        else if (p == "biased") o.preference = OracleSpec::Preference::biased;
        else throw ConfigError(prefix + ".preference", "expected equal or biased");
    }
    if (j.contains("preferred")) {
        const auto& p = j.at("preferred");
        if (!p.is_number_unsigned() || p.get<std::size_t>() >= m)
            throw ConfigError(prefix + ".preferred", "expected an objective index below m");
        o.preferred = p.get<std::size_t>();
    }
    if (j.contains("w_star") && !j.at("w_star").is_null()) {
        const auto& w = j.at("w_star");
        if (!w.is_array() || w.size() != m) throw ConfigError(prefix + ".w_star", "expected m positive numbers");
        ObjectiveVector v;
        for (const auto& x : w) {
            if (!x.is_number() || !(x.get<double>() > 0.0))
                throw ConfigError(prefix + ".w_star", "expected m positive numbers");
            v.push_back(x.get<double>());
        }
        o.w_star = v;
    }
    if (j.contains("kappa") && !j.at("kappa").is_null()) {
        const auto& k = j.at("kappa");
        if (!k.is_number() || !(k.get<double>() > 0.0))
            throw ConfigError(prefix + ".kappa", "expected a positive number or null (noiseless)");
        o.kappa = k.get<double>();
    }
    return o;
}

json oracle_json(const OracleSpec& o) {
    json j{{"preference", o.preference == OracleSpec::Preference::biased ? "biased" : "equal"},
           {"preferred", o.preferred}};
    j["w_star"] = o.w_star ? json(*o.w_star) : json(nullptr);
    j["kappa"] = std::isfinite(o.kappa) ? json(o.kappa) : json(nullptr);
    return j;
}

CellSpec parse_cell(const json& j, std::size_t index) {
    const std::string prefix = "cells[" + std::to_string(index) + "]";
    if (!j.is_object()) throw ConfigError(prefix, "expected an object");
    if (j.contains("seed")) throw ConfigError(prefix + ".seed", "per-run seeds derive from master_seed");
    json run = j;
    CellSpec cell;
    for (const char* key : {"label", "group"}) {
        if (!j.contains(key) || !j.at(key).is_string() || !valid_label(j.at(key).get<std::string>()))
            throw ConfigError(prefix + "." + key, "expected a non-empty name of letters, digits, '-', '_', '.', '='");
        run.erase(key);
    }
    cell.label = j.at("label").get<std::string>();
    cell.group = j.at("group").get<std::string>();
    run.erase("oracle");
    cell.run = run_config_from_json(run, prefix);
    if (j.contains("oracle")) cell.oracle = parse_oracle(j.at("oracle"), prefix + ".oracle", cell.run.problem.m);
    return cell;
}

std::size_t positive(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) throw ConfigError(key, "expected a positive integer");
    return v.get<std::size_t>();
}

}  // namespace

void Campaign::validate() const {
    if (replications < 1) throw ConfigError("replications", "must be at least 1");
    if (parallelism < 1) throw ConfigError("parallelism", "must be at least 1");
    if (kind == CampaignKind::runs && cells.empty()) throw ConfigError("cells", "a runs campaign needs cells");
    if (kind == CampaignKind::ndcg) {
        if (ndcg.m_list.empty()) throw ConfigError("ndcg.m_list", "must not be empty");
        for (std::size_t m : ndcg.m_list)
            if (m < 2) throw ConfigError("ndcg.m_list", "every m must be at least 2");
        if (ndcg.set_size < 2) throw ConfigError("ndcg.set_size", "must be at least 2");
        if (ndcg.k < 1 || ndcg.k > ndcg.set_size) throw ConfigError("ndcg.k", "must lie in [1, set_size]");
        if (ndcg.pairs < 1 || ndcg.pairs > ndcg.set_size * (ndcg.set_size - 1) / 2)
            throw ConfigError("ndcg.pairs", "must lie in [1, C(set_size, 2)]");
    }
}

Campaign campaign_from_json(const json& j) {
    require_keys(j, {"name", "kind", "master_seed", "replications", "parallelism", "output_dir", "cells", "ndcg"}, "");
    Campaign c;
    if (j.contains("name")) {
        if (!j.at("name").is_string() || !valid_label(j.at("name").get<std::string>()))
            throw ConfigError("name", "expected a non-empty name of letters, digits, '-', '_', '.', '='");
        c.name = j.at("name").get<std::string>();
    }
    if (j.contains("kind")) {
        if (!j.at("kind").is_string()) throw ConfigError("kind", "expected a string");
        c.kind = parse_kind(j.at("kind").get<std::string>());
    }
    if (j.contains("master_seed")) {
        if (!j.at("master_seed").is_number_unsigned()) throw ConfigError("master_seed", "expected a non-negative integer");
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    if (j.contains("replications")) c.replications = positive(j, "replications");
    if (j.contains("parallelism")) c.parallelism = positive(j, "parallelism");
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("output_dir", "expected a path string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("cells")) {
        if (!j.at("cells").is_array()) throw ConfigError("cells", "expected an array");
        for (std::size_t i = 0; i < j.at("cells").size(); ++i) c.cells.push_back(parse_cell(j.at("cells")[i], i));
    }
    if (j.contains("ndcg")) {
        const auto& n = j.at("ndcg");
        require_keys(n, {"m_list", "pairs", "set_size", "k"}, "ndcg");
        if (n.contains("m_list")) {
            if (!n.at("m_list").is_array()) throw ConfigError("ndcg.m_list", "expected an array of integers");
            c.ndcg.m_list.clear();
            for (const auto& m : n.at("m_list")) {
                if (!m.is_number_unsigned()) throw ConfigError("ndcg.m_list", "expected an array of integers");
                c.ndcg.m_list.push_back(m.get<std::size_t>());
            }
        }
        if (n.contains("pairs")) c.ndcg.pairs = positive(n, "pairs");
        if (n.contains("set_size")) c.ndcg.set_size = positive(n, "set_size");
        if (n.contains("k")) c.ndcg.k = positive(n, "k");
    }
    c.validate();
    return c;
}

json to_json(const Campaign& c) {
    json cells = json::array();
    for (const auto& cell : c.cells) {
        json j = to_json(cell.run);
        j.erase("seed");
        j["label"] = cell.label;
        j["group"] = cell.group;
        j["oracle"] = oracle_json(cell.oracle);
        cells.push_back(j);
    }
    return json{{"name", c.name},
                {"kind", to_string(c.kind)},
                {"master_seed", c.master_seed},
                {"replications", c.replications},
                {"parallelism", c.parallelism},
                {"output_dir", c.output_dir.string()},
                {"cells", cells},
                {"ndcg",
                 {{"m_list", c.ndcg.m_list}, {"pairs", c.ndcg.pairs}, {"set_size", c.ndcg.set_size}, {"k", c.ndcg.k}}}};
}

Campaign load_campaign(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open campaign file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    Campaign c = campaign_from_json(j);
    if (const char* out = std::getenv("IEMO_OUT"); out && *out) c.output_dir = out;
    return c;
}

std::string config_hash(const Campaign& campaign) {
    json j = to_json(campaign);
    j.erase("output_dir");
    j.erase("parallelism");
    return fnv1a_hex(j.dump());
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t cell, std::size_t rep) {
    return derive_seed(master, cell, rep);
}

// ---- presets ------------------------------------------------------------------

namespace {

CellSpec make_cell(Algorithm algorithm, Family family, std::size_t m, std::string label, std::string group) {
    CellSpec c;
    c.label = std::move(label);
    c.group = std::move(group);
    c.run = RunConfig::defaults(algorithm, ProblemSpec::make(family, m));
    return c;
}

std::string instance_name(Family family, std::size_t m) { return to_string(family) + "-m" + std::to_string(m); }

Campaign base(std::string name, std::size_t reps) {
    Campaign c;
    c.output_dir = std::filesystem::path("out") / name;
    c.name = std::move(name);
    c.replications = reps;
    return c;
}

std::string short_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"smoke",           "working-example", "ndcg-study",  "sensitivity-tau",
                                                "sensitivity-mu",  "sensitivity-eta", "noise-study", "main-comparison"};
    return names;
}

Campaign preset(std::string_view name) {
    if (name == "smoke") {
        Campaign c = base("smoke", 1);
        c.cells.push_back(make_cell(Algorithm::insga2, Family::dtlz2, 3, "insga2", "dtlz2-m3"));
        return c;
    }
    if (name == "working-example") {
        Campaign c = base("working-example", 100);
        c.kind = CampaignKind::working_example;
        return c;
    }
    if (name == "ndcg-study") {
        Campaign c = base("ndcg-study", 31);
        c.kind = CampaignKind::ndcg;
        return c;
    }
    if (name == "sensitivity-tau") {
        Campaign c = base("sensitivity-tau", 11);
        for (std::size_t tau : {5, 10, 20}) {
            auto cell = make_cell(Algorithm::insga2, Family::dtlz2, 3, "tau=" + std::to_string(tau), "dtlz2-m3");
            cell.run.tau = tau;
            cell.run.warmup_gens = 3 * tau;
            c.cells.push_back(cell);
        }
        return c;
    }
    if (name == "sensitivity-mu") {
        Campaign c = base("sensitivity-mu", 11);
        for (std::size_t mu : {5, 10, 20}) {
            auto cell = make_cell(Algorithm::insga2, Family::dtlz2, 3, "mu=" + std::to_string(mu), "dtlz2-m3");
            cell.run.elicitation.mu = mu;
            c.cells.push_back(cell);
        }
        return c;
    }
    if (name == "sensitivity-eta") {
        Campaign c = base("sensitivity-eta", 11);
        for (double eta : {0.1, 0.2, 0.4}) {
            auto cell = make_cell(Algorithm::imoead, Family::dtlz2, 3, "eta_step=" + short_real(eta), "dtlz2-m3");
            cell.run.elicitation.eta_step = eta;
            c.cells.push_back(cell);
        }
        return c;
    }
    if (name == "noise-study") {
        Campaign c = base("noise-study", 11);
        for (Family family : {Family::dtlz2, Family::mdtlz2}) {
            for (double kappa : {1.0, 10.0, 30.0, 50.0, 100.0, 200.0}) {
                auto cell = make_cell(Algorithm::imoead, family, 3, "kappa=" + short_real(kappa), instance_name(family, 3));
                cell.oracle.kappa = kappa;
                c.cells.push_back(cell);
            }
            c.cells.push_back(make_cell(Algorithm::imoead, family, 3, "noiseless", instance_name(family, 3)));
        }
        return c;
    }
    if (name == "main-comparison") {
        Campaign c = base("main-comparison", 11);
        struct Instance {
            Family family;
            std::size_t m;
        };
        const std::vector<Instance> instances{{Family::dtlz1, 3},    {Family::dtlz2, 3}, {Family::dtlz2inv, 3},
                                              {Family::mdtlz2, 3},   {Family::wfg3, 3},  {Family::dtlz1, 5},
                                              {Family::dtlz2, 5},    {Family::dtlz2inv, 5}, {Family::wfg3, 5}};
        for (const auto& inst : instances)
            for (auto pref : {OracleSpec::Preference::equal, OracleSpec::Preference::biased})
                for (Algorithm a : {Algorithm::insga2, Algorithm::imoead, Algorithm::ir2ibea}) {
                    const std::string group = instance_name(inst.family, inst.m) +
                                              (pref == OracleSpec::Preference::equal ? "-equal" : "-biased");
                    auto cell = make_cell(a, inst.family, inst.m, to_string(a), group);
                    cell.oracle.preference = pref;
                    c.cells.push_back(cell);
                }
        return c;
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace iemo
