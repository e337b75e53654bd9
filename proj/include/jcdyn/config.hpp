// config.hpp — JSON run configuration: reference parameter set, strict
// key validation, resolved echo, and a stable content hash for output headers.

#pragma once

#include "jcdyn/operators.hpp"
#include "jcdyn/thermal.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcdyn {

// Configuration problems carry the offending field name in the message.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    double T_min = 10.0;  // K
    double T_max = 50.0;  // K
    int steps = 81;
};

struct NumericsSpec {
    int n_max = 8;                 // photon cutoff for full-model sweeps
    int omega_points = 2001;       // frequency samples per spectrum
    double omega_span_g = 6.0;     // grid width in units of g, centered between lines
    double min_prominence = 0.01;  // peak detection floor, fraction of max
    double tie_tol = 1e-6;         // label-assignment tie tolerance (fractional)
};

// Dimensionless parameter set for the transition-sector commands (rates in
// units of g). Kept separate from `system`: the sector figures are reported
// against scaled axes, with only Delta(T) taken from the thermal curves.
struct BlockScaling {
    double kappa_over_g = 0.33;
    double gamma_x_over_g = 0.003;
    double P_tilde_over_g = 1.5;       // phonon-rate ceiling, units of g
    double coeff_delta_over_g = 0.33;  // detuning used by cmd_coefficients
};

struct OutputSpec {
    std::string dir = "./out";
    std::vector<std::string> figures = {"spectra", "peaks", "blocks", "ep_map",
                                        "coefficients"};
};

struct RunConfig {
    SystemParams system;  // g, kappa, gamma_x, P_x, gamma_theta (meV);
                          // omega_x/omega_c/P_theta are set per temperature
    ThermalModel thermal;
    SweepSpec sweep;
    NumericsSpec numerics;
    BlockScaling blocks;
    OutputSpec outputs;

    void validate() const;        // throws ConfigError naming the field
    std::string to_json() const;  // fully resolved document, stable formatting
    std::uint64_t hash() const;   // FNV-1a 64 of to_json()
};

// Reference parameter set: g=0.3, kappa=0.1, gamma_x=0.001, P_x=0.06 meV, with
// the thermal curve constants carried by ThermalModel's own defaults.
RunConfig default_config();

// Parse JSON text / file and merge it over the defaults. Unknown keys are
// rejected by name; partial documents are fine (absent keys keep defaults).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace jcdyn
