// thermal.cpp — temperature-model formulas and the crossover root-finder.

#include "jcdyn/thermal.hpp"

#include <cmath>
#include <stdexcept>

namespace jcdyn {

void ThermalModel::validate() const {
    if (!(omega_c0 > 0.0)) throw std::invalid_argument("ThermalModel: omega_c0 must be > 0");
    if (!(beta_v > 0.0)) throw std::invalid_argument("ThermalModel: beta_v must be > 0");
    if (!(P_tilde >= 0.0)) throw std::invalid_argument("ThermalModel: P_tilde must be >= 0");
    if (!(A > 0.0)) throw std::invalid_argument("ThermalModel: A must be > 0");
    if (!(B > 0.0)) throw std::invalid_argument("ThermalModel: B must be > 0");
    if (!(a_idx >= 0.0)) throw std::invalid_argument("ThermalModel: a_idx must be >= 0");
    if (!(alpha_v >= 0.0)) throw std::invalid_argument("ThermalModel: alpha_v must be >= 0");
}

static void require_temperature(double T) {
    if (!(T >= 0.0)) throw std::invalid_argument("thermal: temperature must be >= 0 K");
}

double cavity_energy(double T, const ThermalModel& m) {
    require_temperature(T);
    return m.omega_c0 / (1.0 + m.a_idx * T);
}

double exciton_energy(double T, const ThermalModel& m) {
    require_temperature(T);
    return m.E_g0 - m.alpha_v * T * T / (T + m.beta_v);
}

double phonon_rate(double T, const ThermalModel& m) {
    require_temperature(T);
    return m.P_tilde / (1.0 + m.A * std::exp(-m.B * (T - m.T_prime)));
}

ResonancePoint resonance_temperature(const ThermalModel& m) {
    m.validate();
    const double lo = 0.0, hi = 300.0;
    auto f = [&m](double T) { return exciton_energy(T, m) - cavity_energy(T, m); };

    // Coarse scan for a sign change, then bisection.
    const int scan = 300;
    double a = lo, b = hi;
    double fa = f(a);
    bool bracketed = false;
    for (int i = 1; i <= scan; ++i) {
        double t  = lo + (hi - lo) * double(i) / double(scan);
        double ft = f(t);
        if (fa == 0.0 || fa * ft < 0.0) {
            b = t;
            bracketed = true;
            break;
        }
        a  = t;
        fa = ft;
    }
    if (!bracketed) {
        throw std::runtime_error("resonance_temperature: curves do not cross in [0, 300] K");
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (a + b);
        double fm  = f(mid);
        if (std::abs(fm) < 1e-9 && (b - a) < 1e-9) {
            return {mid, cavity_energy(mid, m)};
        }
        if (fa * fm <= 0.0) {
            b = mid;
        } else {
            a  = mid;
            fa = fm;
        }
    }
    double T0 = 0.5 * (a + b);
    if (std::abs(f(T0)) >= 1e-9) {
        throw std::runtime_error("resonance_temperature: bisection failed to converge");
    }
    return {T0, cavity_energy(T0, m)};
}

Region classify_region(double P_theta, const ThermalModel& m) {
    if (!(m.P_tilde > 0.0)) {
        throw std::invalid_argument("classify_region: P_tilde must be > 0");
    }
    if (P_theta < 0.0 || P_theta > m.P_tilde) {
        throw std::invalid_argument("classify_region: P_theta outside [0, P_tilde]");
    }
    const double r = P_theta / m.P_tilde;
    if (r >= 0.8) return Region::III;
    if (r >= 0.1) return Region::II;
    return Region::I;
}

const char* region_name(Region r) {
    switch (r) {
        case Region::I: return "I";
        case Region::II: return "II";
        case Region::III: return "III";
    }
    return "?";
}

double region_boundary_temperature(double ratio, const ThermalModel& m) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("region_boundary_temperature: ratio must be in (0, 1)");
    }
    // ratio = 1 / (1 + A e^{-B (T - T')})  =>  T = T' - ln((1/ratio - 1)/A) / B
    return m.T_prime - std::log((1.0 / ratio - 1.0) / m.A) / m.B;
}

}  // namespace jcdyn
