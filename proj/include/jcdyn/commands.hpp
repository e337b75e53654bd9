// commands.hpp — configuration-driven sweep commands behind the CLI: full-model
// spectra and peak tracking over temperature, transition-sector eigenvalue
// maps, coalescence maps over detuning, and bare-coefficient sweeps.

#pragma once

#include "jcdyn/config.hpp"
#include "jcdyn/spectrum.hpp"
#include "jcdyn/subspaces.hpp"

#include <string>
#include <vector>

namespace jcdyn {

struct CommandOptions {
    std::string out_dir = "./out";
    int threads = 0;                // 0 = all hardware threads
    bool normalize = false;         // rescale each spectrum to unit maximum
    std::string source = "oracle";  // oracle | printed | both (sector commands)
};

// ---- sweep helpers (shared with the verification binaries) ----

// Uniform temperature grid over [sweep.T_min, sweep.T_max] with sweep.steps points.
std::vector<double> temperature_grid(const RunConfig& cfg);

// System parameters at temperature T: configured rates plus the thermal curves
// (omega_c, omega_x, P_theta evaluated at T).
SystemParams system_at(const RunConfig& cfg, double T);

// Emission spectrum at temperature T on the standard grid (centered between
// the bare lines, width numerics.omega_span_g * g).
Spectrum spectrum_at(const RunConfig& cfg, double T);

// All sweep spectra, computed in parallel. Throws std::runtime_error naming
// the first failing temperature if any point fails.
std::vector<SweepPoint> sweep_spectra(const RunConfig& cfg, int threads);

// ---- commands (return process exit codes: 0 ok, 3 solver failure,
//      4 partial completion with failures.csv) ----

int cmd_spectra(const RunConfig& cfg, const CommandOptions& opt);
int cmd_peaks(const RunConfig& cfg, const CommandOptions& opt);
int cmd_blocks(const RunConfig& cfg, const CommandOptions& opt,
               const std::vector<int>& rungs);
int cmd_ep_map(const RunConfig& cfg, const CommandOptions& opt,
               const std::vector<int>& rungs,
               const std::vector<double>& delta_over_g);
int cmd_coefficients(const RunConfig& cfg, const CommandOptions& opt,
                     const std::vector<int>& rungs,
                     const std::vector<double>& p_over_g);

}  // namespace jcdyn
