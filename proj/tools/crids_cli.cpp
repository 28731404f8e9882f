// crids: batch assessment and adaptation planning for on-site wastewater systems.
//
//   crids assess    --config study.json --out results/
//   crids plan      --config study.json --out results/
//   crids summarize results/report.csv --thresholds 0.1,0.5
//   crids synth     --out fixture/ --sites-count 1000

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crids/pipeline.hpp"
#include "crids/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config;
    std::string sites;
    std::string elevations;
    std::string layers_dir;
    std::string out = ".";
    std::string scenario_override;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "study configuration (JSON)");
    cmd->add_option("--sites", args.sites, "sites table, overrides the config");
    cmd->add_option("--elevations", args.elevations, "elevation samples, overrides the config");
    cmd->add_option("--layers-dir", args.layers_dir, "directory of <layer>.geojson files");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--scenario-override", args.scenario_override, "e.g. slr=1.837,ratio=0.345");
    cmd->add_option("--workers", args.workers, "worker threads (0 keeps the config value)");
}

crids::Config make_config(const CommonArgs& args) {
    crids::Config cfg = args.config.empty() ? crids::parse_config("{}", fs::current_path())
                                            : crids::load_config(args.config);
    if (!args.sites.empty()) cfg.sites = fs::absolute(args.sites);
    if (!args.elevations.empty()) cfg.elevations = fs::absolute(args.elevations);
    if (!args.layers_dir.empty()) cfg.layers_dir = fs::absolute(args.layers_dir);
    if (!args.scenario_override.empty()) crids::apply_scenario_override(cfg.scenario, args.scenario_override);
    if (args.workers > 0) cfg.workers = args.workers;
    return cfg;
}

std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        auto v = crids::parse_number(text.substr(start, end - start));
        if (!v) throw crids::ConfigError("bad threshold list: " + text);
        out.push_back(*v);
        start = end + 1;
    }
    return out;
}

int run_assess_cmd(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto result = crids::run_assess(cfg);
    crids::write_assessment(result, args.out);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& s : result.sites) {
        if (!s.ok()) std::cerr << "error: " << s.site.id << ": " << s.error << "\n";
    }
    std::cout << "assessed " << result.succeeded() << " of " << result.sites.size() << " sites -> "
              << (fs::path(args.out) / "report.csv").string() << "\n";
    return result.exit_status();
}

int run_plan_cmd(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto result = crids::run_plan(cfg);
    crids::write_plan(result, args.out);
    for (const auto& id : result.errored_sites) std::cerr << "skipped (assessment error): " << id << "\n";
    if (result.exit_status == crids::kExitInfeasible) {
        std::cerr << "infeasible: " << result.message << "\n";
        const auto& ids = result.plan.infeasible_sites;
        constexpr std::size_t kListed = 20;
        for (std::size_t i = 0; i < std::min(ids.size(), kListed); ++i) std::cerr << "  " << ids[i] << "\n";
        if (ids.size() > kListed) std::cerr << "  ... " << ids.size() - kListed << " more in plan.csv\n";
    } else {
        std::printf("planned %zu sites, total cost %s, objective %.6f\n", result.instance.site_count(),
                    crids::format_shortest(result.plan.total_cost).c_str(), result.plan.objective);
    }
    return result.exit_status;
}

int run_summarize_cmd(const std::string& report, const std::string& thresholds) {
    const auto table = crids::read_csv(report);
    const auto th = parse_thresholds(thresholds);
    std::cout << crids::summarize_report(table, th).text();
    return crids::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Composite resilience assessment and adaptation planning for decentralized wastewater systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", crids::kToolVersion);

    CommonArgs assess_args;
    auto* assess = app.add_subcommand("assess", "score every site and write report.csv + manifest.json");
    add_common(assess, assess_args);

    CommonArgs plan_args;
    auto* plan = app.add_subcommand("plan", "assess, then choose an adaptation option per site");
    add_common(plan, plan_args);

    std::string report;
    std::string thresholds = "0.1,0.5";
    auto* summarize = app.add_subcommand("summarize", "threshold shares and histogram of a report");
    summarize->add_option("report", report, "assessment report (report.csv)")->required();
    summarize->add_option("--thresholds", thresholds, "comma-separated thresholds");

    std::string synth_out;
    crids::SyntheticSpec spec;
    auto* synth = app.add_subcommand("synth", "write a generated study fixture");
    synth->add_option("--out", synth_out, "fixture directory")->required();
    synth->add_option("--sites-count", spec.site_count, "number of sites");
    synth->add_option("--seed", spec.seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*assess) return run_assess_cmd(assess_args);
        if (*plan) return run_plan_cmd(plan_args);
        if (*summarize) return run_summarize_cmd(report, thresholds);
        if (*synth) {
            const auto fx = crids::write_synthetic_fixture(synth_out, spec);
            std::cout << "wrote " << fx.config.string() << " (" << fx.below_low << " / " << fx.below_high
                      << " sites below the two thresholds)\n";
            return crids::kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "crids: " << e.what() << "\n";
        return crids::kExitIoError;
    }
    return crids::kExitOk;
}
