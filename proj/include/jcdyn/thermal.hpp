// thermal.hpp — Temperature dependence of the cavity mode, the exciton line,
// and the phonon-assisted transfer rate; crossover location and regime bands.

#pragma once

namespace jcdyn {

// Phenomenological temperature model:
//   omega_c(T) = omega_c0 / (1 + a_idx * T)          (refractive-index drift)
//   omega_x(T) = E_g0 - alpha_v * T^2 / (T + beta_v) (Varshni band-gap shift)
//   P_theta(T) = P_tilde / (1 + A * exp(-B (T - T_prime)))  (S-shaped activation)
struct ThermalModel {
    double omega_c0 = 1043.27;    // cavity energy at T = 0 (meV)
    double a_idx    = 0.852e-5;   // refractive-index temperature coefficient (1/K)
    double E_g0     = 1044.5;     // exciton energy at T = 0 (meV)
    double alpha_v  = 0.7;        // Varshni slope (meV/K)
    double beta_v   = 590.0;      // Varshni offset temperature (K)
    double P_tilde  = 0.45;       // saturation value of the phonon rate (meV)
    double A        = 0.5;        // sigmoid amplitude (dimensionless)
    double B        = 0.2;        // sigmoid steepness (1/K)
    double T_prime  = 30.0;       // sigmoid midpoint (K)

    // Throws std::invalid_argument on non-physical parameters.
    void validate() const;
};

double cavity_energy(double T, const ThermalModel& m);   // meV, monotone decreasing
double exciton_energy(double T, const ThermalModel& m);  // meV, monotone decreasing
double phonon_rate(double T, const ThermalModel& m);     // meV, in (0, P_tilde)

// Crossing of the cavity and exciton curves.
struct ResonancePoint {
    double T0;      // K
    double omega0;  // meV, common energy at the crossing
};

// Bisection on [0, 300] K to |omega_c - omega_x| < 1e-9 meV.
// Throws std::runtime_error if the curves do not cross in the interval.
ResonancePoint resonance_temperature(const ThermalModel& m);

// Activation bands by the ratio r = P_theta / P_tilde:
//   I: r < 0.1, II: 0.1 <= r < 0.8, III: r >= 0.8.
// Boundary values belong to the higher band.
enum class Region { I, II, III };

Region classify_region(double P_theta, const ThermalModel& m);
const char* region_name(Region r);

// Temperature at which P_theta/P_tilde reaches `ratio` (closed-form sigmoid inverse).
double region_boundary_temperature(double ratio, const ThermalModel& m);

}  // namespace jcdyn
