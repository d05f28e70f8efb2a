#include "iemo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "iemo/config.hpp"
#include "iemo/dm.hpp"
#include "iemo/log.hpp"
#include "iemo/seed.hpp"

namespace iemo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

enum Stream : std::uint64_t { oracle_noise = 3, pf_sample = 4 };

std::string cell_dir(std::size_t index, const CellSpec& cell) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", index);
    return std::string(buf) + "_" + cell.group + "_" + cell.label;
}

fs::path result_file(const fs::path& out, std::size_t index, const CellSpec& cell, std::size_t rep) {
    return out / "results" / cell_dir(index, cell) / ("rep" + std::to_string(rep) + ".json");
}

fs::path trace_file(const fs::path& out, std::size_t index, const CellSpec& cell, std::size_t rep) {
    return out / "traces" / cell_dir(index, cell) / ("rep" + std::to_string(rep) + ".jsonl");
}

void write_text(const fs::path& file, const std::string& text) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

json read_json(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("missing file " + file.string());
    return json::parse(in);
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunRecord record_from_result(const json& j) {
    RunRecord r;
    r.cell = j.at("cell").get<std::size_t>();
    r.rep = j.at("rep").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = true;
    r.error = j.at("error").get<double>();
    r.best_psi = j.at("best_psi").get<double>();
    r.fe_used = j.at("fe_used").get<std::size_t>();
    r.generations = j.at("generations").get<std::size_t>();
    r.consultations = j.at("consultations").size();
    r.aborted = j.at("aborted").get<bool>();
    return r;
}

RunRecord execute(const Campaign& c, std::size_t index, std::size_t rep, const ObjectiveVector& golden,
                  const fs::path& out) {
    const CellSpec& cell = c.cells[index];
    const std::uint64_t seed = replication_seed(c.master_seed, index, rep);
    const auto tfile = trace_file(out, index, cell, rep);
    fs::create_directories(tfile.parent_path());
    std::ofstream trace(tfile, std::ios::binary);
    if (!trace) throw std::runtime_error("cannot write " + tfile.string());

    RunHooks hooks;
    hooks.golden_point = golden;
    hooks.on_generation = [&](const GenerationTrace& t, const Population&, const PreferenceModel*) {
        trace << to_json(t).dump() << '\n';
    };
    const RunResult result = run_cell(cell, seed, hooks);

    RunRecord r;
    r.cell = index;
    r.rep = rep;
    r.seed = seed;
    r.ok = true;
    r.error = result.trajectory.back().error.value();
    r.best_psi = result.trajectory.back().best_psi.value();
    r.fe_used = result.fe_used;
    r.generations = result.generations;
    r.consultations = result.consultation_log.size();
    r.aborted = result.aborted;

    json consultations = json::array();
    for (const auto& entry : result.consultation_log) consultations.push_back(to_json(entry));
    json j{{"cell", index},
           {"rep", rep},
           {"seed", seed},
           {"label", cell.label},
           {"group", cell.group},
           {"error", r.error},
           {"best_psi", r.best_psi},
           {"fe_used", r.fe_used},
           {"generations", r.generations},
           {"aborted", r.aborted},
           {"abort_reason", result.abort_reason},
           {"golden", golden},
           {"final_population", to_json(result.final_population)},
           {"consultations", consultations},
           {"weights", result.weights.vectors}};
    j["model"] = result.model ? result.model->to_json() : json(nullptr);
    write_text(result_file(out, index, cell, rep), j.dump() + "\n");
    return r;
}

std::string metrics_csv(const CampaignResult& res) {
    std::ostringstream s;
    s << "cell,label,group,algorithm,family,m,rep,seed,status,error,best_psi,fe_used,generations,consultations,aborted\n";
    for (const auto& r : res.rows) {
        const auto& cell = res.campaign.cells[r.cell];
        s << r.cell << ',' << cell.label << ',' << cell.group << ',' << to_string(cell.run.algorithm) << ','
          << to_string(cell.run.problem.family) << ',' << cell.run.problem.m << ',' << r.rep << ',' << r.seed << ','
          << (r.ok ? "ok" : "failed") << ',';
        if (r.ok)
            s << format_real(r.error) << ',' << format_real(r.best_psi) << ',' << r.fe_used << ',' << r.generations
              << ',' << r.consultations << ',' << (r.aborted ? 1 : 0);
        else
            s << ",,,,,";
        s << '\n';
    }
    return s.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void run_runs(CampaignResult& res, const CampaignOptions& options) {
    const Campaign& c = res.campaign;
    const fs::path& out = res.output_dir;

    std::vector<ObjectiveVector> golden;
    for (const auto& cell : c.cells) golden.push_back(golden_point(cell.run.problem, cell.oracle.weight(cell.run.problem.m)));

    const std::size_t total = c.cells.size() * c.replications;
    res.rows.assign(total, RunRecord{});
    std::vector<std::string> failure(total);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress;

    auto worker = [&] {
        for (std::size_t t = next++; t < total; t = next++) {
            const std::size_t index = t / c.replications;
            const std::size_t rep = t % c.replications;
            RunRecord& row = res.rows[t];
            row.cell = index;
            row.rep = rep;
            row.seed = replication_seed(c.master_seed, index, rep);
            try {
                const auto rfile = result_file(out, index, c.cells[index], rep);
                if (options.resume && fs::exists(rfile)) row = record_from_result(read_json(rfile));
                else row = execute(c, index, rep, golden[index], out);
            } catch (const std::exception& e) {
                row.ok = false;
                row.failure = e.what();
                failure[t] = c.cells[index].label + "/" + c.cells[index].group + " rep " + std::to_string(rep) +
                             ": " + e.what();
            }
            const std::size_t finished = ++done;
            if (!options.quiet) {
                std::lock_guard lock(progress);
                std::fprintf(stderr, "\r[%s] %zu/%zu runs", c.name.c_str(), finished, total);
                if (finished == total) std::fputc('\n', stderr);
            }
        }
    };
    const std::size_t workers = std::min(c.parallelism, total);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (const auto& f : failure)
        if (!f.empty()) res.failures.push_back(f);
    write_text(out / "metrics.csv", metrics_csv(res));
}

void run_working_example(CampaignResult& res, json& extra) {
    const auto study = working_example_study(res.campaign.replications, res.campaign.master_seed);
    std::ostringstream s;
    s << "init,u1,u2,u3,u4,ordered\n";
    for (std::size_t i = 0; i < study.scores.size(); ++i) {
        const auto& u = study.scores[i];
        s << i;
        for (double v : u) s << ',' << format_real(v);
        s << ',' << ((u[0] > u[1] && u[1] > u[2] && u[2] > u[3]) ? 1 : 0) << '\n';
    }
    write_text(res.output_dir / "working_example.csv", s.str());
    std::ostringstream r;
    r << "working example: " << study.ordered << " of " << study.initializations
      << " initializations rank u(x1) > u(x2) > u(x3) > u(x4)\n";
    write_text(res.output_dir / "report.txt", r.str());
    extra["seconds"] = study.seconds;
}

void run_ndcg(CampaignResult& res, json& extra) {
    const auto start = std::chrono::steady_clock::now();
    const auto rows = ndcg_study(res.campaign.ndcg, res.campaign.replications, res.campaign.master_seed);
    std::ostringstream table, summary, report;
    table << "m,rep,ndcg\n";
    summary << "m,median,q1,q3\n";
    report << "NDCG@" << res.campaign.ndcg.k << " over " << res.campaign.replications << " replications ("
           << res.campaign.ndcg.pairs << " training pairs, set size " << res.campaign.ndcg.set_size << ")\n";
    for (const auto& row : rows) {
        for (std::size_t rep = 0; rep < row.values.size(); ++rep)
            table << row.m << ',' << rep << ',' << format_real(row.values[rep]) << '\n';
        summary << row.m << ',' << format_real(row.median) << ',' << format_real(row.q1) << ','
                << format_real(row.q3) << '\n';
        char line[128];
        std::snprintf(line, sizeof line, "  m=%-3zu median %.4f  IQR [%.4f, %.4f]\n", row.m, row.median, row.q1, row.q3);
        report << line;
    }
    write_text(res.output_dir / "ndcg.csv", table.str());
    write_text(res.output_dir / "ndcg_summary.csv", summary.str());
    write_text(res.output_dir / "report.txt", report.str());
    extra["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RunResult run_cell(const CellSpec& cell, std::uint64_t seed, const RunHooks& hooks) {
    RunConfig cfg = cell.run;
    cfg.seed = seed;
    const std::size_t m = cfg.problem.m;
    DMOracle oracle(cell.oracle.weight(m), ObjectiveVector(m, 0.0), cell.oracle.kappa, derive_seed(seed, Stream::oracle_noise));
    RunHooks h = hooks;
    if (!h.golden_point) h.golden_point = golden_point(cfg.problem, oracle.w_star());
    if (!h.psi) {
        const DMOracle judge(oracle.w_star(), oracle.z_star(), DMOracle::noiseless, 0);
        h.psi = [judge](std::span<const double> f) { return judge.golden_value(f); };
    }
    return run(cfg, oracle, h);
}

CampaignResult run_campaign(const Campaign& campaign, const CampaignOptions& options) {
    campaign.validate();
    CampaignResult res;
    res.campaign = campaign;
    res.output_dir = campaign.output_dir;
    const fs::path& out = res.output_dir;
    fs::create_directories(out);

    const std::string hash = config_hash(campaign);
    const fs::path prov = out / "provenance.json";
    if (options.resume && fs::exists(prov)) {
        const auto old = read_json(prov);
        if (old.value("config_hash", std::string()) != hash)
            throw std::runtime_error("config hash mismatch with the existing results in " + out.string() +
                                     " (expected " + old.value("config_hash", std::string()) + ", got " + hash +
                                     "); use a fresh output directory");
    }
    if (!options.resume) {
        fs::remove_all(out / "results");
        fs::remove_all(out / "traces");
    }

    json p{{"name", campaign.name},
           {"kind", to_string(campaign.kind)},
           {"config_hash", hash},
           {"master_seed", campaign.master_seed},
           {"campaign", to_json(campaign)},
           {"started_at", timestamp()}};
    write_text(prov, p.dump(2) + "\n");

    json extra = json::object();
    switch (campaign.kind) {
        case CampaignKind::runs: run_runs(res, options); break;
        case CampaignKind::working_example: run_working_example(res, extra); break;
        case CampaignKind::ndcg: run_ndcg(res, extra); break;
    }
    if (campaign.kind == CampaignKind::runs) write_report(res);

    json seeds = json::array();
    for (const auto& r : res.rows) seeds.push_back({{"cell", r.cell}, {"rep", r.rep}, {"seed", r.seed}});
    p["seeds"] = seeds;
    p["failures"] = res.failures;
    p["finished_at"] = timestamp();
    for (const auto& item : extra.items()) p[item.key()] = item.value();
    write_text(prov, p.dump(2) + "\n");
    return res;
}

// ---- statistics and report ------------------------------------------------------

namespace {

struct GroupView {
    std::string name;
    std::vector<std::size_t> cells;
};

std::vector<GroupView> groups_of(const Campaign& c) {
    std::vector<GroupView> groups;
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupView& g) { return g.name == c.cells[i].group; });
        if (it == groups.end()) groups.push_back({c.cells[i].group, {i}});
        else it->cells.push_back(i);
    }
    return groups;
}

std::vector<double> errors_of(const CampaignResult& res, std::size_t cell) {
    std::vector<double> v;
    for (const auto& r : res.rows)
        if (r.cell == cell && r.ok) v.push_back(r.error);
    return v;
}

// E(P) of both cells over the replications where both succeeded.
std::pair<std::vector<double>, std::vector<double>> paired(const CampaignResult& res, std::size_t a, std::size_t b) {
    std::map<std::size_t, double> ea, eb;
    for (const auto& r : res.rows) {
        if (!r.ok) continue;
        if (r.cell == a) ea[r.rep] = r.error;
        if (r.cell == b) eb[r.rep] = r.error;
    }
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& [rep, e] : ea)
        if (auto it = eb.find(rep); it != eb.end()) {
            out.first.push_back(e);
            out.second.push_back(it->second);
        }
    return out;
}

}  // namespace

void write_report(const CampaignResult& res) {
    const Campaign& c = res.campaign;
    const fs::path& out = res.output_dir;
    fs::remove_all(out / "stats");
    fs::create_directories(out / "stats");

    std::ostringstream report;
    report << "campaign " << c.name << ": " << c.cells.size() << " cells x " << c.replications << " replications, master seed "
           << c.master_seed << "\n";
    if (!res.failures.empty()) {
        report << "failed runs (" << res.failures.size() << "):\n";
        for (const auto& f : res.failures) report << "  " << f << "\n";
    }

    json sk_groups = json::array();
    std::map<std::string, std::map<int, int>> distribution;
    std::ostringstream ranks;
    ranks << "group,label,mean,rank\n";

    for (const auto& g : groups_of(c)) {
        report << "\n[" << g.name << "]\n";
        char line[256];
        std::snprintf(line, sizeof line, "  %-20s %4s %12s %12s %12s\n", "label", "n", "median E(P)", "q1", "q3");
        report << line;
        std::vector<MetricSample> samples;
        for (std::size_t i : g.cells) {
            const auto v = errors_of(res, i);
            if (v.empty()) {
                std::snprintf(line, sizeof line, "  %-20s %4d %12s\n", c.cells[i].label.c_str(), 0, "-");
            } else {
                std::snprintf(line, sizeof line, "  %-20s %4zu %12.6g %12.6g %12.6g\n", c.cells[i].label.c_str(),
                              v.size(), median(v), quantile(v, 0.25), quantile(v, 0.75));
                samples.push_back({c.cells[i].label, v});
            }
            report << line;
        }

        std::ostringstream a12s, wil;
        a12s << "label";
        wil << "label";
        for (std::size_t i : g.cells) {
            a12s << ',' << c.cells[i].label;
            wil << ',' << c.cells[i].label;
        }
        a12s << '\n';
        wil << '\n';
        for (std::size_t i : g.cells) {
            a12s << c.cells[i].label;
            wil << c.cells[i].label;
            for (std::size_t j : g.cells) {
                const auto [a, b] = paired(res, i, j);
                const auto ei = errors_of(res, i);
                const auto ej = errors_of(res, j);
                a12s << ',' << (ei.empty() || ej.empty() ? std::string() : format_real(a12(ei, ej).value));
                wil << ',' << (a.empty() ? std::string() : format_real(wilcoxon_signed_rank(a, b)));
            }
            a12s << '\n';
            wil << '\n';
        }
        write_text(out / "stats" / (g.name + "_a12.csv"), a12s.str());
        write_text(out / "stats" / (g.name + "_wilcoxon.csv"), wil.str());

        if (samples.empty()) continue;
        const auto clusters = scott_knott(samples);
        json jc = json::array();
        report << "  Scott-Knott:";
        for (const auto& cl : clusters) {
            jc.push_back({{"label", cl.label}, {"mean", cl.mean}, {"rank", cl.rank}});
            ranks << g.name << ',' << cl.label << ',' << format_real(cl.mean) << ',' << cl.rank << '\n';
            ++distribution[cl.label][cl.rank];
            report << ' ' << cl.label << '=' << cl.rank;
        }
        report << '\n';
        sk_groups.push_back({{"group", g.name}, {"clusters", jc}});
    }

    json dist = json::object();
    for (const auto& [label, counts] : distribution) {
        json jc = json::object();
        for (const auto& [rank, n] : counts) jc[std::to_string(rank)] = n;
        dist[label] = jc;
    }
    report << "\nScott-Knott rank distribution (label: rank x count):\n";
    for (const auto& [label, counts] : distribution) {
        report << "  " << label << ':';
        for (const auto& [rank, n] : counts) report << ' ' << rank << 'x' << n;
        report << '\n';
    }
    write_text(out / "scott_knott.json", json{{"groups", sk_groups}, {"distribution", dist}}.dump(2) + "\n");
    write_text(out / "ranks.csv", ranks.str());
    write_text(out / "report.txt", report.str());
}

CampaignResult load_result(const fs::path& dir) {
    const auto prov = read_json(dir / "provenance.json");
    CampaignResult res;
    res.campaign = campaign_from_json(prov.at("campaign"));
    res.campaign.output_dir = dir;
    res.output_dir = dir;
    if (prov.contains("failures")) res.failures = prov.at("failures").get<std::vector<std::string>>();
    if (res.campaign.kind != CampaignKind::runs) return res;

    std::ifstream in(dir / "metrics.csv");
    if (!in) throw std::runtime_error("missing file " + (dir / "metrics.csv").string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 15) throw std::runtime_error("malformed metrics.csv row: " + line);
        RunRecord r;
        r.cell = std::stoul(f[0]);
        r.rep = std::stoul(f[6]);
        r.seed = std::stoull(f[7]);
        r.ok = f[8] == "ok";
        if (r.ok) {
            r.error = std::stod(f[9]);
            r.best_psi = std::stod(f[10]);
            r.fe_used = std::stoul(f[11]);
            r.generations = std::stoul(f[12]);
            r.consultations = std::stoul(f[13]);
            r.aborted = f[14] == "1";
        }
        if (r.cell >= res.campaign.cells.size()) throw std::runtime_error("metrics.csv refers to an unknown cell");
        res.rows.push_back(r);
    }
    return res;
}

std::vector<fs::path> export_plot_data(const fs::path& dir, std::string_view kind) {
    const CampaignResult res = load_result(dir);
    const Campaign& c = res.campaign;
    if (c.kind != CampaignKind::runs) throw std::invalid_argument("export: only runs campaigns have plot data");
    std::vector<fs::path> written;

    if (kind == "population") {
        for (std::size_t i = 0; i < c.cells.size(); ++i) {
            std::vector<RunRecord> ok;
            for (const auto& r : res.rows)
                if (r.cell == i && r.ok) ok.push_back(r);
            if (ok.empty()) continue;
            std::sort(ok.begin(), ok.end(), [](const RunRecord& a, const RunRecord& b) {
                return a.error < b.error || (a.error == b.error && a.rep < b.rep);
            });
            const RunRecord& chosen = ok[(ok.size() - 1) / 2];
            const auto j = read_json(result_file(dir, i, c.cells[i], chosen.rep));

            std::vector<ObjectiveVector> f;
            for (const auto& s : j.at("final_population")) f.push_back(s.at("f").get<ObjectiveVector>());
            const auto fronts = fast_nondominated_sort(f);
            const std::size_t m = c.cells[i].run.problem.m;

            std::ostringstream s;
            for (std::size_t k = 0; k < m; ++k) s << 'f' << (k + 1) << ',';
            s << "role\n";
            auto row = [&](const ObjectiveVector& v, const char* role) {
                for (double x : v) s << format_real(x) << ',';
                s << role << '\n';
            };
            for (std::size_t idx : fronts.front()) row(f[idx], "population");
            row(j.at("golden").get<ObjectiveVector>(), "golden");
            for (const auto& v : sample_pf(c.cells[i].run.problem, 500, derive_seed(c.master_seed, Stream::pf_sample, i)))
                row(v, "pf");
            const fs::path file = dir / "plots" / (cell_dir(i, c.cells[i]) + "_population.csv");
            write_text(file, s.str());
            written.push_back(file);
        }
        return written;
    }
    if (kind == "ranks") {
        const auto sk = read_json(dir / "scott_knott.json");
        std::ostringstream s;
        s << "label,group,rank\n";
        for (const auto& g : sk.at("groups"))
            for (const auto& cl : g.at("clusters"))
                s << cl.at("label").get<std::string>() << ',' << g.at("group").get<std::string>() << ','
                  << cl.at("rank").get<int>() << '\n';
        const fs::path file = dir / "plots" / "ranks.csv";
        write_text(file, s.str());
        written.push_back(file);
        return written;
    }
    throw std::invalid_argument("unknown export kind '" + std::string(kind) + "' (expected population or ranks)");
}

}  // namespace iemo
