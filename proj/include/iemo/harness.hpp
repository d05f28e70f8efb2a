#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iemo/algorithms.hpp"
#include "iemo/analysis.hpp"

namespace iemo {

struct OracleSpec {
    enum class Preference { equal, biased };
    Preference preference{Preference::equal};
    std::size_t preferred{0};
    std::optional<ObjectiveVector> w_star;  // overrides `preference` when set
    double kappa{std::numeric_limits<double>::infinity()};

    ObjectiveVector weight(std::size_t m) const;
};

struct CellSpec {
    std::string label;  // compared within its group (algorithm, setting, ...)
    std::string group;  // instance the labels are compared on
    RunConfig run;
    OracleSpec oracle;
};

enum class CampaignKind { runs, working_example, ndcg };

std::string to_string(CampaignKind kind);

struct NdcgSettings {
    std::vector<std::size_t> m_list{2, 3, 5, 8, 10};
    std::size_t pairs{50};
    std::size_t set_size{20};
    std::size_t k{20};
};

struct Campaign {
    std::string name{"campaign"};
    CampaignKind kind{CampaignKind::runs};
    std::uint64_t master_seed{1};
    std::size_t replications{1};
    std::size_t parallelism{1};
    std::filesystem::path output_dir{"out"};
    std::vector<CellSpec> cells;
    NdcgSettings ndcg;

    void validate() const;
};

/// Strict parse: unknown keys raise ConfigError naming the field.
Campaign campaign_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Campaign& campaign);
/// Reads a campaign file; IEMO_OUT, when set, replaces output_dir.
Campaign load_campaign(const std::filesystem::path& file);

/// Hash over everything that influences results (output_dir and parallelism excluded).
std::string config_hash(const Campaign& campaign);

/// Pure function of (master seed, cell index, replication index).
std::uint64_t replication_seed(std::uint64_t master, std::size_t cell, std::size_t rep);

const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for an unknown name.
Campaign preset(std::string_view name);

// ---- execution ----------------------------------------------------------------

struct RunRecord {
    std::size_t cell{0};
    std::size_t rep{0};
    std::uint64_t seed{0};
    bool ok{false};
    std::string failure;
    double error{0.0};  // E(P) of the final population
    double best_psi{0.0};
    std::size_t fe_used{0};
    std::size_t generations{0};
    std::size_t consultations{0};
    bool aborted{false};
};

struct CampaignResult {
    Campaign campaign;
    std::vector<RunRecord> rows;       // one per (cell, rep) in that order; runs kind only
    std::vector<std::string> failures; // "<cell label>/<group> rep k: reason"
    std::filesystem::path output_dir;

    bool complete() const { return failures.empty(); }
};

struct CampaignOptions {
    bool resume{true};  // reuse results/ files of a previous run with the same config hash
    bool quiet{false};
};

/// Runs every (cell, replication), writes traces, results, metric tables, statistics
/// and the report under campaign.output_dir. Throws on a config-hash mismatch when resuming.
CampaignResult run_campaign(const Campaign& campaign, const CampaignOptions& options = {});

/// Executes one replication of a cell with its simulated decision maker.
RunResult run_cell(const CellSpec& cell, std::uint64_t seed, const RunHooks& hooks = {});

// ---- studies ------------------------------------------------------------------

/// The four DTLZ1 objective vectors of the training walkthrough, best first.
std::vector<ObjectiveVector> working_example_points();
/// x1 > x2, x1 > x3, x2 > x4.
std::vector<ComparisonRecord> working_example_records();

struct WorkingExampleResult {
    std::size_t initializations{0};
    std::size_t ordered{0};  // runs with u(x1) > u(x2) > u(x3) > u(x4)
    std::vector<std::vector<double>> scores;
    double seconds{0.0};
};

WorkingExampleResult working_example_study(std::size_t initializations, std::uint64_t seed);

struct NdcgRow {
    std::size_t m{0};
    std::vector<double> values;  // one per replication
    double median{0.0};
    double q1{0.0};
    double q3{0.0};
};

/// Per m: draws `set_size` points uniformly from [0,1]^m, labels `pairs` distinct random
/// pairs with the noiseless equal-weight oracle, trains the ranking network and scores
/// NDCG@k of its ranking of the whole set against the oracle's.
std::vector<NdcgRow> ndcg_study(const NdcgSettings& settings, std::size_t replications, std::uint64_t seed);

// ---- reporting ----------------------------------------------------------------

/// Rewrites metrics.csv-derived statistics (stats/, scott_knott.json, ranks.csv, report.txt).
void write_report(const CampaignResult& result);
/// Rebuilds a CampaignResult from an output directory (provenance.json + metrics.csv).
CampaignResult load_result(const std::filesystem::path& dir);

/// kind "population": plots/<cell>_population.csv per cell from its median-E(P)
/// replication (columns f1..fm, role in {population, golden, pf}).
/// kind "ranks": plots/ranks.csv with one row per (label, group).
/// Returns the files written.
std::vector<std::filesystem::path> export_plot_data(const std::filesystem::path& dir, std::string_view kind);

/// %.17g
std::string format_real(double x);

}  // namespace iemo
