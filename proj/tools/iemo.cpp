#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "iemo/config.hpp"
#include "iemo/harness.hpp"
#include "iemo/log.hpp"
#include "iemo/service.hpp"

using namespace iemo;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> parallel;
    std::optional<std::string> out;
    bool fresh{false};
    bool quiet{false};
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--reps", o.reps, "replications per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory (overrides IEMO_OUT and the campaign)");
    cmd->add_flag("--fresh", o.fresh, "discard results of a previous run in the output directory");
    cmd->add_flag("--quiet", o.quiet, "no progress output");
}

int execute(Campaign c, const Overrides& o) {
    if (o.seed) c.master_seed = *o.seed;
    if (o.reps) c.replications = *o.reps;
    if (o.parallel) c.parallelism = *o.parallel;
    if (o.out) c.output_dir = *o.out;
    const auto result = run_campaign(c, {!o.fresh, o.quiet});
    std::ifstream report(result.output_dir / "report.txt");
    std::cout << report.rdbuf();
    std::cout << "results in " << result.output_dir.string() << "\n";
    if (!result.complete()) {
        std::cerr << result.failures.size() << " run(s) failed\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interactive preference-based evolutionary multi-objective optimization"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "log progress details");

    Overrides run_o;
    std::string campaign_file;
    auto* run_cmd = app.add_subcommand("run", "execute a campaign file");
    run_cmd->add_option("campaign", campaign_file, "campaign JSON file")->required()->check(CLI::ExistingFile);
    add_overrides(run_cmd, run_o);

    Overrides preset_o;
    std::string preset_name;
    bool preset_print = false;
    bool preset_list = false;
    auto* preset_cmd = app.add_subcommand("preset", "execute a built-in campaign");
    preset_cmd->add_option("name", preset_name, "preset name");
    preset_cmd->add_flag("--print", preset_print, "print the campaign JSON instead of running it");
    preset_cmd->add_flag("--list", preset_list, "list preset names");
    add_overrides(preset_cmd, preset_o);

    Overrides ndcg_o;
    std::vector<std::size_t> ndcg_m{2, 3, 5, 8, 10};
    std::size_t ndcg_pairs = 50;
    auto* ndcg_cmd = app.add_subcommand("ndcg", "ranking-quality study of the preference model");
    ndcg_cmd->add_option("--m", ndcg_m, "objective counts")->delimiter(',');
    ndcg_cmd->add_option("--pairs", ndcg_pairs, "training pairs")->check(CLI::PositiveNumber);
    add_overrides(ndcg_cmd, ndcg_o);

    std::string export_dir;
    std::string export_kind = "population";
    auto* export_cmd = app.add_subcommand("export", "write plot data from a finished campaign");
    export_cmd->add_option("dir", export_dir, "campaign output directory")->required();
    export_cmd->add_option("--kind", export_kind, "population or ranks")->check(CLI::IsMember({"population", "ranks"}));

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "recompute statistics and the report from metrics.csv");
    report_cmd->add_option("dir", report_dir, "campaign output directory")->required();

    ServiceOptions serve_o;
    std::string serve_static;
    auto* serve_cmd = app.add_subcommand("serve", "run the interactive session service");
    serve_cmd->add_option("--host", serve_o.host, "listen address");
    serve_cmd->add_option("--port", serve_o.port, "listen port (0 = any free port)");
    serve_cmd->add_option("--out", serve_o.root, "directory holding sessions/");
    serve_cmd->add_option("--static", serve_static, "static asset directory mounted at /");

    CLI11_PARSE(app, argc, argv);
    log::set_level(verbose ? log::Level::info : log::Level::warning);

    try {
        if (*run_cmd) return execute(load_campaign(campaign_file), run_o);

        if (*preset_cmd) {
            if (preset_list) {
                for (const auto& n : preset_names()) std::cout << n << "\n";
                return 0;
            }
            if (preset_name.empty()) throw CLI::RequiredError("name");
            Campaign c = preset(preset_name);
            if (const char* out = std::getenv("IEMO_OUT"); out && *out) c.output_dir = out;
            if (preset_print) {
                std::cout << to_json(c).dump(2) << "\n";
                return 0;
            }
            return execute(c, preset_o);
        }

        if (*ndcg_cmd) {
            Campaign c = preset("ndcg-study");
            c.ndcg.m_list = ndcg_m;
            c.ndcg.pairs = ndcg_pairs;
            if (const char* out = std::getenv("IEMO_OUT"); out && *out) c.output_dir = out;
            c.validate();
            return execute(c, ndcg_o);
        }

        if (*export_cmd) {
            for (const auto& f : export_plot_data(export_dir, export_kind)) std::cout << f.string() << "\n";
            return 0;
        }

        if (*report_cmd) {
            const auto res = load_result(report_dir);
            if (res.campaign.kind != CampaignKind::runs)
                throw std::invalid_argument("report: only runs campaigns carry a metrics table");
            write_report(res);
            std::ifstream report((res.output_dir / "report.txt"));
            std::cout << report.rdbuf();
            return 0;
        }

        if (*serve_cmd) {
            if (!serve_static.empty()) serve_o.static_dir = serve_static;
            SessionService service(serve_o);
            const int port = service.bind();
            std::cout << "listening on http://" << serve_o.host << ":" << port << "\n" << std::flush;
            service.listen();
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
