// jcdyn.cpp — command-line front end: config-driven sweeps to CSV.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
// 4 partial completion (failed rows listed in failures.csv).

#include "CLI11.hpp"

#include "jcdyn/commands.hpp"
#include "jcdyn/config.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"driven, dissipative quantum-dot/cavity simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool normalize = false;
    std::string source = "oracle";

    app.add_option("--config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir,
                   "output directory (default: $JCDYN_OUT, then the config's "
                   "outputs.dir)");
    app.add_option("--threads", threads, "worker threads (0 = all available)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--normalize", normalize,
                 "rescale each spectrum to unit maximum");
    app.add_option("--source", source,
                   "sector matrix construction for block commands")
        ->check(CLI::IsMember({"oracle", "printed", "both"}));

    CLI::App* spectra =
        app.add_subcommand("spectra", "emission spectra over the temperature sweep");
    CLI::App* peaks =
        app.add_subcommand("peaks", "tracked peak centers and widths vs temperature");
    CLI::App* blocks = app.add_subcommand(
        "blocks", "transition-sector eigenvalues over the temperature sweep");
    CLI::App* ep_map = app.add_subcommand(
        "ep-map", "critical phonon rates (branch coalescences) over detuning");
    CLI::App* coeffs = app.add_subcommand(
        "coefficients", "bare-basis weights of the (-,-) branch vs phonon rate");

    std::vector<int> rungs = {1, 2, 3, 4};
    for (CLI::App* sub : {blocks, ep_map, coeffs})
        sub->add_option("--rungs", rungs, "rung indices n (comma separated)")
            ->delimiter(',');

    double delta_span = 1.0;
    int delta_steps = 21;
    ep_map->add_option("--delta-span", delta_span,
                       "detuning grid width in units of g (spans +-span/2)");
    ep_map->add_option("--delta-steps", delta_steps, "detuning grid points");

    double p_max = 2.0;
    int p_steps = 81;
    coeffs->add_option("--p-max", p_max, "largest P_theta in units of g");
    coeffs->add_option("--p-steps", p_steps, "phonon-rate grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        jcdyn::RunConfig cfg = jcdyn::load_config(config_path);

        jcdyn::CommandOptions opt;
        opt.threads = threads;
        opt.normalize = normalize;
        opt.source = source;
        if (!out_dir.empty()) {
            opt.out_dir = out_dir;
        } else if (const char* env = std::getenv("JCDYN_OUT"); env && *env) {
            opt.out_dir = env;
        } else {
            opt.out_dir = cfg.outputs.dir;
        }

        if (spectra->parsed()) return jcdyn::cmd_spectra(cfg, opt);
        if (peaks->parsed()) return jcdyn::cmd_peaks(cfg, opt);
        if (blocks->parsed()) return jcdyn::cmd_blocks(cfg, opt, rungs);
        if (ep_map->parsed()) {
            if (delta_steps < 1 || !(delta_span >= 0.0)) {
                std::cerr << "error: need delta-steps >= 1 and delta-span >= 0\n";
                return 2;
            }
            std::vector<double> grid(delta_steps);
            for (int i = 0; i < delta_steps; ++i)
                grid[i] = (delta_steps == 1)
                              ? 0.0
                              : -0.5 * delta_span +
                                    delta_span * i / (delta_steps - 1);
            return jcdyn::cmd_ep_map(cfg, opt, rungs, grid);
        }
        if (coeffs->parsed()) {
            if (p_steps < 2 || !(p_max > 0.0)) {
                std::cerr << "error: need p-steps >= 2 and p-max > 0\n";
                return 2;
            }
            std::vector<double> grid(p_steps);
            for (int i = 0; i < p_steps; ++i)
                grid[i] = p_max * i / (p_steps - 1);
            return jcdyn::cmd_coefficients(cfg, opt, rungs, grid);
        }
        return 2;
    } catch (const jcdyn::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
