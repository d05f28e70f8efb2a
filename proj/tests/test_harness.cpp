#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "iemo/config.hpp"
#include "iemo/harness.hpp"

using namespace iemo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("iemo_test_" + name);
    fs::remove_all(p);
    return p;
}

CellSpec tiny_cell(Algorithm a, const std::string& label) {
    CellSpec c;
    c.label = label;
    c.group = "dtlz2-m3";
    c.run = RunConfig::defaults(a, ProblemSpec::make(Family::dtlz2, 3));
    c.run.N = 20;
    c.run.max_fe = 20 * 25;
    c.run.tau = 5;
    c.run.warmup_gens = 10;
    c.run.elicitation.mu = 5;
    c.run.train.epochs = 60;
    c.run.moead.neighborhood = 5;
    return c;
}

Campaign tiny_campaign(const fs::path& out) {
    Campaign c;
    c.name = "tiny";
    c.replications = 3;
    c.master_seed = 17;
    c.output_dir = out;
    c.cells = {tiny_cell(Algorithm::insga2, "insga2"), tiny_cell(Algorithm::imoead, "imoead")};
    return c;
}

}  // namespace

TEST_CASE("campaign JSON round trip and strict parsing") {
    const Campaign c = tiny_campaign("x");
    const auto j = to_json(c);
    const Campaign back = campaign_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));

    auto bad = j;
    bad["cells"][0]["problem"]["colour"] = 1;
    try {
        campaign_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field().find("colour") != std::string::npos);
    }
    bad = j;
    bad["cells"][1]["problem"]["m"] = 1;
    try {
        campaign_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field().find("problem.m") != std::string::npos);
    }
    bad = j;
    bad["cells"][0]["seed"] = 5;
    CHECK_THROWS_AS(campaign_from_json(bad), ConfigError);
    bad = j;
    bad["replications"] = 0;
    CHECK_THROWS_AS(campaign_from_json(bad), ConfigError);
}

TEST_CASE("config hash ignores output location and parallelism only") {
    Campaign a = tiny_campaign("a");
    Campaign b = tiny_campaign("b");
    b.parallelism = 4;
    CHECK(config_hash(a) == config_hash(b));
    b.master_seed = 18;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("replication seeds are pure and distinct") {
    CHECK(replication_seed(1, 0, 0) == replication_seed(1, 0, 0));
    std::set<std::uint64_t> seen;
    for (std::size_t cell = 0; cell < 10; ++cell)
        for (std::size_t rep = 0; rep < 31; ++rep) seen.insert(replication_seed(1, cell, rep));
    CHECK(seen.size() == 310);
    CHECK(replication_seed(1, 0, 0) != replication_seed(2, 0, 0));
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const Campaign c = preset(name);
        CHECK_NOTHROW(c.validate());
        CHECK(c.name == name);
    }
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
    const Campaign tau = preset("sensitivity-tau");
    REQUIRE(tau.cells.size() == 3);
    CHECK(tau.cells[0].run.tau == 5);
    CHECK(tau.cells[2].run.warmup_gens == 60);
    const Campaign main = preset("main-comparison");
    CHECK(main.cells.size() == 9 * 2 * 3);
    CHECK(main.replications == 11);
    const Campaign noise = preset("noise-study");
    CHECK(noise.cells.size() == 14);
}

TEST_CASE("campaign runs are deterministic, resumable and parallel-invariant") {
    const fs::path a = scratch("det_a"), b = scratch("det_b"), p = scratch("det_p");
    Campaign c = tiny_campaign(a);
    const auto ra = run_campaign(c, {true, true});
    REQUIRE(ra.complete());
    CHECK(ra.rows.size() == 6);
    for (const auto& r : ra.rows) {
        CHECK(r.ok);
        CHECK(r.fe_used <= 500);
        CHECK(r.consultations >= 1);
    }
    c.output_dir = b;
    run_campaign(c, {true, true});
    CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
    CHECK(slurp(a / "results/000_dtlz2-m3_insga2/rep1.json") == slurp(b / "results/000_dtlz2-m3_insga2/rep1.json"));
    CHECK(slurp(a / "traces/001_dtlz2-m3_imoead/rep2.jsonl") == slurp(b / "traces/001_dtlz2-m3_imoead/rep2.jsonl"));

    c.output_dir = p;
    c.parallelism = 3;
    run_campaign(c, {true, true});
    CHECK(slurp(a / "metrics.csv") == slurp(p / "metrics.csv"));
    CHECK(slurp(a / "scott_knott.json") == slurp(p / "scott_knott.json"));

    // resume reuses stored results: a marker written into one of them survives
    const fs::path r0 = a / "results/000_dtlz2-m3_insga2/rep0.json";
    auto j = nlohmann::json::parse(slurp(r0));
    j["error"] = 123.0;
    std::ofstream(r0) << j.dump();
    c.output_dir = a;
    c.parallelism = 1;
    const auto resumed = run_campaign(c, {true, true});
    CHECK(resumed.rows[0].error == 123.0);
    const auto fresh = run_campaign(c, {false, true});
    CHECK(fresh.rows[0].error == ra.rows[0].error);

    Campaign other = c;
    other.master_seed = 99;
    CHECK_THROWS(run_campaign(other, {true, true}));

    // statistics: A12 matrix with diagonal 0.5 and a Scott-Knott entry per label
    const std::string a12 = slurp(a / "stats/dtlz2-m3_a12.csv");
    CHECK(a12.find("0.5") != std::string::npos);
    const auto sk = nlohmann::json::parse(slurp(a / "scott_knott.json"));
    REQUIRE(sk.at("groups").size() == 1);
    CHECK(sk["groups"][0]["clusters"].size() == 2);
    CHECK(sk.at("distribution").contains("insga2"));
    CHECK(fs::exists(a / "report.txt"));

    const auto loaded = load_result(a);
    CHECK(loaded.rows.size() == 6);
    CHECK(loaded.rows[3].error == fresh.rows[3].error);

    SUBCASE("plot export is idempotent") {
        const auto files = export_plot_data(a, "population");
        REQUIRE(files.size() == 2);
        const std::string first = slurp(files[0]);
        CHECK(first.rfind("f1,f2,f3,role", 0) == 0);
        CHECK(first.find(",golden") != std::string::npos);
        CHECK(first.find(",pf") != std::string::npos);
        export_plot_data(a, "population");
        CHECK(slurp(files[0]) == first);
        const auto ranks = export_plot_data(a, "ranks");
        REQUIRE(ranks.size() == 1);
        CHECK(slurp(ranks[0]).rfind("label,group,rank", 0) == 0);
        CHECK_THROWS(export_plot_data(a, "bogus"));
        CHECK_THROWS(export_plot_data(scratch("missing"), "population"));
    }
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(p);
}

TEST_CASE("A12 matrix diagonal") {
    const fs::path a = scratch("a12");
    Campaign c = tiny_campaign(a);
    c.replications = 2;
    run_campaign(c, {true, true});
    std::ifstream in(a / "stats/dtlz2-m3_a12.csv");
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "label,insga2,imoead");
    std::getline(in, line);
    CHECK(line.rfind("insga2,0.5,", 0) == 0);
    std::getline(in, line);
    CHECK(line.substr(line.rfind(',') + 1) == "0.5");
    fs::remove_all(a);
}

TEST_CASE("a failing cell is reported without losing the others") {
    const fs::path out = scratch("partial");
    Campaign c = tiny_campaign(out);
    c.replications = 1;
    fs::create_directories(out / "traces");
    std::ofstream(out / "traces/001_dtlz2-m3_imoead") << "in the way";
    const auto res = run_campaign(c, {true, true});
    CHECK_FALSE(res.complete());
    REQUIRE(res.failures.size() == 1);
    CHECK(res.failures[0].find("imoead") != std::string::npos);
    CHECK(res.rows[0].ok);
    CHECK_FALSE(res.rows[1].ok);
    CHECK(fs::exists(out / "results/000_dtlz2-m3_insga2/rep0.json"));
    const std::string csv = slurp(out / "metrics.csv");
    CHECK(csv.find(",failed,") != std::string::npos);
    const auto prov = nlohmann::json::parse(slurp(out / "provenance.json"));
    CHECK(prov.at("failures").size() == 1);
    fs::remove_all(out);
}

TEST_CASE("IEMO_OUT overrides the campaign output directory") {
    const fs::path dir = scratch("env");
    fs::create_directories(dir);
    Campaign c = tiny_campaign("somewhere/else");
    std::ofstream(dir / "c.json") << to_json(c).dump();
    ::setenv("IEMO_OUT", (dir / "o").c_str(), 1);
    const Campaign loaded = load_campaign(dir / "c.json");
    ::unsetenv("IEMO_OUT");
    CHECK(loaded.output_dir == dir / "o");
    CHECK(load_campaign(dir / "c.json").output_dir == "somewhere/else");
    fs::remove_all(dir);
}

TEST_CASE("working example study orders the four points") {
    const auto res = working_example_study(20, 3);
    CHECK(res.initializations == 20);
    CHECK(res.ordered >= 19);
    CHECK(res.scores.size() == 20);
    CHECK(working_example_records().size() == 3);
}

TEST_CASE("NDCG study output shape and range") {
    NdcgSettings s;
    s.m_list = {2, 4};
    s.pairs = 30;
    const auto rows = ndcg_study(s, 5, 7);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.values.size() == 5);
        for (double v : r.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(r.q1 <= r.median);
        CHECK(r.median <= r.q3);
    }
    CHECK(ndcg_study(s, 5, 7)[1].values == rows[1].values);
}
