// ccf-sim: Monte Carlo and closed-form analysis of common-cause failures in a
// redundant digital protection system.
//
//   ccf-sim params            closed-form rates, gamma ratios, group failure rates
//   ccf-sim simulate          PFD campaign per rho value, CSV + summary output
//   ccf-sim orientation-sweep time-to-failure vs shock orientation, CSV + summary
//
// Exit codes: 0 success, 1 bad configuration or CLI usage, 2 internal failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ccfsim/campaign.hpp"
#include "ccfsim/config.hpp"
#include "ccfsim/report.hpp"

namespace {

using namespace ccfsim;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> histories;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    std::optional<std::string> rex_path;
    std::optional<std::string> variant;
    std::optional<std::string> rounding;
    bool paranoid = false;
};

std::string normalize_token(std::string s) {
    for (char& c : s)
        if (c == '-') c = '_';
    return s;
}

Config load_with_overrides(const std::string& config_path, const Overrides& ov) {
    Config cfg = load_config_file(config_path);
    if (ov.seed) cfg.run.master_seed = *ov.seed;
    if (ov.histories) {
        if (*ov.histories < 1) throw ConfigError("--histories must be >= 1");
        cfg.run.histories = *ov.histories;
    }
    if (ov.jobs) {
        if (*ov.jobs < 0) throw ConfigError("--jobs must be >= 0");
        cfg.run.jobs = *ov.jobs;
    }
    if (ov.out_dir) cfg.output.directory = *ov.out_dir;
    if (ov.rex_path) cfg.output.rex_path = *ov.rex_path;
    if (ov.variant) {
        const std::string v = normalize_token(*ov.variant);
        if (v == "coefficient_free")
            cfg.model.variant = atwood::SumVariant::CoefficientFree;
        else if (v == "binomial")
            cfg.model.variant = atwood::SumVariant::Binomial;
        else
            throw ConfigError("--variant must be coefficient-free or binomial, got '" +
                              *ov.variant + "'");
    }
    if (ov.rounding) {
        const std::string r = normalize_token(*ov.rounding);
        if (r == "continuous")
            cfg.model.rounding = Rounding::Continuous;
        else if (r == "paper")
            cfg.model.rounding = Rounding::Paper;
        else
            throw ConfigError("--rounding must be continuous or paper, got '" + *ov.rounding +
                              "'");
    }
    return cfg;
}

std::filesystem::path out_file(const Config& cfg, const std::string& name) {
    return std::filesystem::path(cfg.output.directory) / name;
}

int run_params(const std::string& config_path, const Overrides& ov) {
    const Config cfg = load_with_overrides(config_path, ov);
    const Topology topology(cfg.architecture);
    std::cout << render_params_report(topology, cfg);
    return 0;
}

int run_simulate(const std::string& config_path, const Overrides& ov) {
    const Config cfg = load_with_overrides(config_path, ov);
    const Topology topology(cfg.architecture);

    std::vector<SimulateRow> rows;
    std::string rex;
    for (double rho : cfg.sweep.rho_values) {
        Config point = cfg;
        point.model.rho = rho;
        CampaignParams params;
        params.history = build_history_params(topology, point);
        params.history.collect_rex = !cfg.output.rex_path.empty();
        params.history.paranoid_checks = ov.paranoid;
        params.histories = cfg.run.histories;
        params.master_seed = cfg.run.master_seed;
        params.jobs = cfg.run.jobs;

        const CampaignResult result = run_campaign(topology, params);
        SimulateRow row;
        char label[32];
        std::snprintf(label, sizeof label, "rho=%.4f", rho);
        row.label = label;
        row.rho = rho;
        row.mu = params.history.mu;
        row.omega = params.history.omega;
        row.pfd = result.pfd;
        row.histories = cfg.run.histories;
        rows.push_back(row);
        if (params.history.collect_rex) rex += render_rex_jsonl(result.histories);
    }

    const std::string csv = render_simulate_csv(rows);
    const std::string summary = render_simulate_summary(cfg, rows);
    write_file_atomic(out_file(cfg, "simulate.csv").string(), csv);
    write_file_atomic(out_file(cfg, "simulate_summary.txt").string(), summary);
    if (!cfg.output.rex_path.empty()) write_file_atomic(cfg.output.rex_path, rex);
    std::cout << summary;
    std::cout << "wrote " << out_file(cfg, "simulate.csv").string() << '\n';
    return 0;
}

int run_orientation_sweep(const std::string& config_path, const Overrides& ov) {
    const Config cfg = load_with_overrides(config_path, ov);
    const Topology topology(cfg.architecture);

    std::vector<OrientationRow> rows;
    std::string rex;
    double baseline_mean = 0.0;

    // Row 0 is the uniform baseline; directed rows follow the configured pairs.
    for (std::size_t i = 0; i <= cfg.sweep.orientation_pairs.size(); ++i) {
        Config point = cfg;
        point.run.stop = StopMode::FirstFailureUncapped;
        OrientationRow row;
        if (i == 0) {
            point.model.orientation.enabled = false;
            row.label = "uniform";
            row.p_a = 1.0;
            row.p_b = 0.0;
        } else {
            const auto& pair = cfg.sweep.orientation_pairs[i - 1];
            point.model.orientation.enabled = true;
            point.model.orientation.p_a = pair[0];
            char label[48];
            std::snprintf(label, sizeof label, "pa=%.4f_pb=%.4f", pair[0], pair[1]);
            row.label = label;
            row.p_a = pair[0];
            row.p_b = pair[1];
        }

        CampaignParams params;
        params.history = build_history_params(topology, point);
        params.history.collect_rex = !cfg.output.rex_path.empty();
        params.history.paranoid_checks = ov.paranoid;
        params.histories = cfg.run.histories;
        params.master_seed = cfg.run.master_seed;
        params.jobs = cfg.run.jobs;

        const CampaignResult result = run_campaign(topology, params);
        if (!result.time_to_failure)
            throw ConfigError("orientation sweep produced no failing history; "
                              "increase run.histories or check the model rates");
        row.ttf = *result.time_to_failure;
        row.combinations = result.combinations;
        if (i == 0) baseline_mean = row.ttf.time_to_failure.mean;
        row.relative_mttf = row.ttf.time_to_failure.mean / baseline_mean;
        rows.push_back(row);
        if (params.history.collect_rex) rex += render_rex_jsonl(result.histories);
    }

    const std::string csv = render_orientation_csv(rows);
    const std::string summary = render_orientation_summary(cfg, rows);
    write_file_atomic(out_file(cfg, "orientation.csv").string(), csv);
    write_file_atomic(out_file(cfg, "orientation_summary.txt").string(), summary);
    if (!cfg.output.rex_path.empty()) write_file_atomic(cfg.output.rex_path, rex);
    std::cout << summary;
    std::cout << "wrote " << out_file(cfg, "orientation.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Common-cause failure simulation for a redundant digital protection system"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t histories = 0;
    int jobs = 0;
    std::string out_dir, rex_path, variant, rounding;
    bool paranoid = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "TOML run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Override run.master_seed");
        cmd->add_option("--histories", histories, "Override run.histories");
        cmd->add_option("--jobs", jobs, "Worker threads (0 = hardware concurrency)");
        cmd->add_option("--out", out_dir, "Override output.directory");
        cmd->add_option("--rex", rex_path, "Write the JSONL event log to this path");
        cmd->add_option("--variant", variant, "Shock sum variant: coefficient-free | binomial");
        cmd->add_option("--rounding", rounding, "Delay rounding: continuous | paper");
        cmd->add_flag("--paranoid", paranoid,
                      "Cross-check incremental system state after every event");
    };

    CLI::App* params_cmd =
        app.add_subcommand("params", "Print closed-form rates and system figures");
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo PFD campaign over the rho sweep");
    CLI::App* sweep_cmd = app.add_subcommand(
        "orientation-sweep", "Time-to-failure campaigns: uniform baseline vs directed shocks");
    add_common(params_cmd);
    add_common(simulate_cmd);
    add_common(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* active = nullptr;
    for (CLI::App* cmd : {params_cmd, simulate_cmd, sweep_cmd})
        if (cmd->parsed()) active = cmd;
    if (active == nullptr) {
        std::cerr << "error: no subcommand\n";
        return 1;
    }

    Overrides ov;
    if (active->count("--seed") > 0) ov.seed = seed;
    if (active->count("--histories") > 0) ov.histories = histories;
    if (active->count("--jobs") > 0) ov.jobs = jobs;
    if (active->count("--out") > 0) ov.out_dir = out_dir;
    if (active->count("--rex") > 0) ov.rex_path = rex_path;
    if (active->count("--variant") > 0) ov.variant = variant;
    if (active->count("--rounding") > 0) ov.rounding = rounding;
    ov.paranoid = paranoid;

    try {
        if (active == params_cmd) return run_params(config_path, ov);
        if (active == simulate_cmd) return run_simulate(config_path, ov);
        return run_orientation_sweep(config_path, ov);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
