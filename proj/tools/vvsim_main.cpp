// vvsim command-line driver: batch experiment runner plus the reference
// golden-check suite. All output goes to files under --out (and stdout for the
// reference suite); runs are byte-stable for a fixed config and seed.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vvsim/experiments.hpp"
#include "vvsim/reference_suite.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vvsim - hybrid polarization/OAM photonic platform simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool exact = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment described by a config file");
    run->add_option("--config", config_path, "experiment config path")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    run->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_flag("--exact-probabilities", exact, "disable sampling, use expected values");

    std::string suite_out;
    std::string budget_config;
    CLI::App* suite =
        app.add_subcommand("reference-suite", "run every built-in golden check and print results");
    suite->add_option("--out", suite_out, "also write a JSON report to this directory");
    suite->add_option("--budget-config", budget_config,
                      "efficiency-chain overrides (key = value lines)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            vvsim::RunOptions options;
            options.out_dir = out_dir;
            if (seed_set) options.seed_override = seed;
            if (!format.empty()) options.format = format;
            options.exact_probabilities = exact;

            const auto written =
                vvsim::run_experiment(vvsim::ConfigFile::load(config_path), options);
            for (const auto& path : written) std::cout << "wrote " << path << "\n";
            return 0;
        }

        vvsim::EfficiencyChain chain;
        if (!budget_config.empty()) {
            std::ifstream in(budget_config);
            if (!in) {
                std::cerr << "cannot open '" << budget_config << "'\n";
                return 2;
            }
            std::ostringstream text;
            text << in.rdbuf();
            chain = vvsim::parse_chain_config(text.str());
        }
        const vvsim::ReferenceReport report = vvsim::reference_suite(chain);
        vvsim::print_reference_report(report, std::cout);
        if (!suite_out.empty()) {
            std::filesystem::create_directories(suite_out);
            std::ofstream out(std::filesystem::path(suite_out) / "reference_suite.json");
            out << vvsim::reference_report_json(report);
        }
        return report.all_pass ? 0 : 1;
    } catch (const vvsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
