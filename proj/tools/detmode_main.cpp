// Command-line front end: scenario JSON in, analysis report JSON out.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <detmode/detmode.hpp>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed_override;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("config", args.config_path, "Scenario JSON file")->required();
    cmd->add_option("--out", args.out_path,
                    "Report file (analyze/degree/multi) or output directory "
                    "for mode files (export-modes)");
    cmd->add_option("--seed", args.seed_override, "Override analysis.monte_carlo.seed");
    cmd->add_flag("--verbose", args.verbose, "Progress notes on stderr");
}

detmode::ScenarioConfig load_with_overrides(const CommonArgs& args) {
    if (args.verbose)
        std::cerr << "loading " << args.config_path << "\n";
    detmode::ScenarioConfig cfg = detmode::load_scenario(args.config_path);
    if (args.seed_override) {
        if (cfg.monte_carlo) {
            cfg.monte_carlo->seed = *args.seed_override;
            // Keep the echoed config reproducing this exact run.
            cfg.echo["analysis"]["monte_carlo"]["seed"] = *args.seed_override;
        } else if (args.verbose) {
            std::cerr << "note: --seed given but the config runs no Monte Carlo\n";
        }
    }
    return cfg;
}

/// Report to stdout or --out; exit code from the command.
int emit(const detmode::CommandResult& result, const std::string& out_path) {
    const std::string text = result.report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot open --out " << out_path << "\n";
            return 1;
        }
        out << text;
        if (!out) {
            std::cerr << "error: write failed for --out " << out_path << "\n";
            return 1;
        }
    }
    return result.exit_code;
}

int guarded(const std::function<int()>& run) {
    try {
        return run();
    } catch (const detmode::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const detmode::degenerate_error& e) {
        std::cerr << "degenerate scenario: " << e.what() << "\n";
        return 2;
    } catch (const detmode::crosscheck_error& e) {
        std::cerr << "cross-check failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detection-mode analysis of multimode Gaussian beams on "
                 "multipixel detectors"};
    app.require_subcommand(1);

    CommonArgs analyze_args, degree_args, multi_args, export_args;
    std::string export_format = "csv";

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Measurement mean/variance with the dual-path cross-check");
    add_common(analyze, analyze_args);

    CLI::App* degree_cmd =
        app.add_subcommand("degree", "Multimode degree of the configured state");
    add_common(degree_cmd, degree_args);

    CLI::App* multi = app.add_subcommand(
        "multi", "Squeezing plan for several simultaneous difference measurements");
    add_common(multi, multi_args);

    CLI::App* export_modes = app.add_subcommand(
        "export-modes", "Write the constituent mode profiles (v0, w0, w1, v1) to files");
    add_common(export_modes, export_args);
    export_modes->add_option("--format", export_format, "csv or pgm")
        ->check(CLI::IsMember({"csv", "pgm"}));

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed())
        return guarded([&] {
            return emit(detmode::run_analyze(load_with_overrides(analyze_args)),
                        analyze_args.out_path);
        });
    if (degree_cmd->parsed())
        return guarded([&] {
            return emit(detmode::run_degree(load_with_overrides(degree_args)),
                        degree_args.out_path);
        });
    if (multi->parsed())
        return guarded([&] {
            return emit(detmode::run_multi(load_with_overrides(multi_args)),
                        multi_args.out_path);
        });
    return guarded([&] {
        // Mode files land in --out (default current directory); the JSON
        // report itself goes to stdout.
        const std::filesystem::path dir =
            export_args.out_path.empty() ? std::filesystem::path(".")
                                         : std::filesystem::path(export_args.out_path);
        detmode::CommandResult result = detmode::run_export_modes(
            load_with_overrides(export_args), export_format, dir);
        std::cout << result.report.dump(2) << "\n";
        return result.exit_code;
    });
}
