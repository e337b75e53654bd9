// spectrum.hpp — cavity emission spectra from the system generator, by two
// independent routes (eigenmode resolvent and explicit time-domain integration
// of the two-time correlation), plus peak detection, Lorentzian refinement,
// and peak tracking across a temperature sweep.

#pragma once

#include "jcdyn/liouville.hpp"

#include <string>
#include <vector>

namespace jcdyn {

// Sampled spectrum S(omega). Intensities are raw (unnormalized) unless a caller
// rescales and sets `normalized`.
struct Spectrum {
    std::vector<double> omega;
    std::vector<double> intensity;
    bool normalized = false;
};

// Uniform grid of `points` frequencies covering [center - span/2, center + span/2].
std::vector<double> default_omega_grid(double center, double span, int points = 2001);

struct SpectrumOptions {
    double eigvec_cond_limit = 1e8;  // eigenbasis condition beyond which the
                                     // resolvent route is distrusted
    double dt_scale = 0.1;           // time step = dt_scale / max|omega - omega_ref|
    double tail_tol = 1e-7;          // stop when |g(tau)| falls below this * |g(0)|
    int min_steps = 100;             // minimum correlation samples before stopping
    long max_steps = 2000000;        // hard cap; exceeded means no decay -> error
};

struct SpectrumResult {
    Spectrum s;
    bool via_timedomain = false;  // resolvent route was rejected and rerouted
    double eigvec_cond = 0.0;     // measured eigenvector condition number
};

// Stationary emission spectrum S(omega) = 2 Re Int_0^inf <a+(tau) a(0)> e^{i omega tau} dtau,
// evaluated from the spectral decomposition of the generator. If the eigenbasis
// is too ill-conditioned (near-defective generator), falls back to the
// time-domain route automatically.
SpectrumResult emission_spectrum(const Superoperator& L, const Mat& rho_ss,
                                 const std::vector<double>& omega,
                                 const SpectrumOptions& opt = {});

// Independent route: propagate v(tau) = e^{L tau} vec(a rho_ss) step by step in
// a rotating frame at the grid midpoint, then Fourier-integrate the correlation
// tail with composite Simpson weights. Shares no spectral decomposition with
// the resolvent route.
Spectrum emission_spectrum_timedomain(const Superoperator& L, const Mat& rho_ss,
                                      const std::vector<double>& omega,
                                      const SpectrumOptions& opt = {});

// Two-time correlation <a+(tau) a(0)> in the steady state, on an ascending
// tau grid (quantum regression: evolve a rho_ss and trace against a+).
std::vector<cplx> correlation(const Superoperator& L, const Mat& rho_ss,
                              const std::vector<double>& tau);

// ---- peak analysis ----

struct Peak {
    double center = 0.0;
    double height = 0.0;
    double fwhm = 0.0;
    double prominence = 0.0;
    bool fwhm_incomplete = false;  // a half-height crossing fell outside the grid
};

// Local maxima ranked by height (ties: lower center first), keeping at most
// `max_peaks` whose prominence exceeds min_prominence * max intensity.
// Width is the raw half-height crossing width, linearly interpolated.
// Throws std::runtime_error when no peak qualifies.
std::vector<Peak> find_peaks(const Spectrum& s, double min_prominence = 0.01,
                             int max_peaks = 2);

// Levenberg-Marquardt fit of b + h (w/2)^2 / ((x-c)^2 + (w/2)^2) in a window
// around the seed peak. `residual` is the rms misfit relative to the window
// maximum; fits with residual > 0.05 are flagged, not rejected.
struct FitResult {
    Peak peak;           // center/height/fwhm from the fit (height includes b)
    double background = 0.0;
    double residual = 0.0;
    bool converged = false;
    bool large_residual = false;
};
FitResult lorentzian_fit(const Spectrum& s, const Peak& seed);

// ---- sweep tracking ----

// One temperature sample of a sweep: the spectrum plus the bare line positions
// used to seed the labeling at the first point.
struct SweepPoint {
    double T = 0.0;
    Spectrum s;
    double omega_c = 0.0;
    double omega_x = 0.0;
};

// One labeled line at one temperature. Label "C" starts on the cavity-like
// line, "X" on the exciton-like line; afterwards labels follow continuity of
// the fitted centers. When only one peak is resolvable both labels collapse
// onto it and `merged` is set. `ambiguous` marks assignment ties (crossing
// region), broken by height priority.
struct TrackedPeak {
    double T = 0.0;
    std::string label;  // "C" or "X"
    double center = 0.0;
    double fwhm = 0.0;
    double height = 0.0;
    bool merged = false;
    bool ambiguous = false;
};

// Detect, refine (Lorentzian fit with raw half-height cross-check), and label
// up to two peaks per sweep point. Returns rows in sweep order, "C" before "X".
std::vector<TrackedPeak> track_peaks(const std::vector<SweepPoint>& points,
                                     double min_prominence = 0.01);

}  // namespace jcdyn
