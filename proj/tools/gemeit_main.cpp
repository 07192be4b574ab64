#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "gemeit/config.hpp"
#include "gemeit/runner.hpp"

namespace {

std::string default_out_dir(const std::string& config_path) {
    const auto stem = std::filesystem::path(config_path).stem().string();
    return "runs/" + stem;
}

int do_run(const std::string& config_path, const std::string& out_dir,
           std::optional<std::uint64_t> seed, std::optional<double> tol, unsigned jobs) {
    gemeit::ExperimentConfig cfg = gemeit::parse_config_file(config_path);
    if (seed) cfg.seed = *seed;
    if (tol) cfg.solver.rel_tolerance = *tol;
    const std::string dir = out_dir.empty() ? default_out_dir(config_path) : out_dir;

    if (!cfg.sweep.parameter.empty()) {
        const auto outcome = gemeit::run_sweep(cfg, jobs);
        gemeit::write_sweep_artifacts(outcome, cfg, dir);
        std::string text;
        const int rc = gemeit::report_directory(dir, text);
        std::cout << text;
        std::cout << "artifacts written to " << dir << "\n";
        return rc;
    }
    const auto result = gemeit::run_experiment(cfg);
    gemeit::write_run_artifacts(result, dir);
    std::string text;
    const int rc = gemeit::report_directory(dir, text);
    std::cout << text;
    std::cout << "artifacts written to " << dir << "\n";
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D+time simulator of a GEM/EIT cold-atom memory with a heterodyne "
                 "analysis pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol_override;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config file")->required();
        cmd->add_option("--out", out_dir, "output directory (default runs/<config name>)");
        cmd->add_option("--seed", seed, "override the run seed");
        cmd->add_option("--tolerance-override", tol_override, "override solver.rel_tolerance");
        cmd->add_option("--jobs", jobs, "parallel sweep workers");
    };

    auto* run_cmd = app.add_subcommand("run", "execute a single run (or the embedded sweep)");
    add_common(run_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "execute a parameter sweep");
    add_common(sweep_cmd);
    auto* validate_cmd = app.add_subcommand("validate", "parse and validate a config");
    validate_cmd->add_option("config", config_path, "experiment config file")->required();
    auto* report_cmd = app.add_subcommand("report", "summarize a completed run directory");
    report_cmd->add_option("dir", report_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate_cmd)) {
            const auto cfg = gemeit::parse_config_file(config_path);
            std::cout << gemeit::render_config(cfg);
            std::cout << "# config OK\n";
            return 0;
        }
        if (app.got_subcommand(report_cmd)) {
            std::string text;
            const int rc = gemeit::report_directory(report_dir, text);
            std::cout << text;
            return rc;
        }
        if (app.got_subcommand(sweep_cmd)) {
            gemeit::ExperimentConfig cfg = gemeit::parse_config_file(config_path);
            if (cfg.sweep.parameter.empty()) {
                std::cerr << "error: config has no [sweep] section; use 'run' instead\n";
                return 2;
            }
        }
        return do_run(config_path, out_dir, seed, tol_override, jobs);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
