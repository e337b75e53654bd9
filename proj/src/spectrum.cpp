// spectrum.cpp — emission spectra, peak analysis, sweep tracking.

#include "jcdyn/spectrum.hpp"
#include "jcdyn/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jcdyn {

namespace {

void check_inputs(const Superoperator& L, const Mat& rho_ss,
                  const std::vector<double>& omega) {
    const int d = L.space.dim;
    if (L.mat.rows() != d * d || L.mat.cols() != d * d)
        throw std::invalid_argument("spectrum: generator size does not match space");
    if (rho_ss.rows() != d || rho_ss.cols() != d)
        throw std::invalid_argument("spectrum: state size does not match space");
    if (omega.empty())
        throw std::invalid_argument("spectrum: empty frequency grid");
    for (double w : omega)
        if (!std::isfinite(w))
            throw std::invalid_argument("spectrum: non-finite frequency");
}

// Linear interpolation of the half-height crossing between samples i and i+1.
double cross_at(const std::vector<double>& x, const std::vector<double>& y,
                int i, double level) {
    double t = (level - y[i]) / (y[i + 1] - y[i]);
    return x[i] + t * (x[i + 1] - x[i]);
}

}  // namespace

// ---- grids ----

std::vector<double> default_omega_grid(double center, double span, int points) {
    if (!(span > 0.0) || !std::isfinite(span) || !std::isfinite(center))
        throw std::invalid_argument("default_omega_grid: need finite center, span > 0");
    if (points < 2)
        throw std::invalid_argument("default_omega_grid: need at least 2 points");
    std::vector<double> w(points);
    for (int i = 0; i < points; ++i)
        w[i] = center - 0.5 * span + span * i / (points - 1);
    return w;
}

// ---- resolvent route ----

SpectrumResult emission_spectrum(const Superoperator& L, const Mat& rho_ss,
                                 const std::vector<double>& omega,
                                 const SpectrumOptions& opt) {
    check_inputs(L, rho_ss, omega);

    Eigen::ComplexEigenSolver<Mat> es(L.mat, true);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("emission_spectrum: eigensolver did not converge");
    const Mat& V = es.eigenvectors();

    Eigen::BDCSVD<Mat> svd(V);
    const auto& sv = svd.singularValues();
    double smin = sv(sv.size() - 1);
    double cond = (smin > 0.0) ? sv(0) / smin
                               : std::numeric_limits<double>::infinity();

    SpectrumResult res;
    res.eigvec_cond = cond;
    if (cond > opt.eigvec_cond_limit) {
        // near-defective generator: mode weights are unreliable, reroute
        res.via_timedomain = true;
        res.s = emission_spectrum_timedomain(L, rho_ss, omega, opt);
        return res;
    }

    BareOperators ops = bare_operators(L.space);
    Mat a_dag = ops.a.adjoint();
    Vec rhs = vectorize(ops.a * rho_ss);
    if (rhs.norm() <= 1e-12 * ops.a.norm() * rho_ss.norm()) {
        // dark state: the correlation vector is numerical dust and mode
        // weights would be noise ratios; the emission is identically zero
        res.s.omega = omega;
        res.s.intensity.assign(omega.size(), 0.0);
        return res;
    }
    Vec c = Eigen::PartialPivLU<Mat>(V).solve(rhs);

    const int d = L.space.dim;
    const int nmode = static_cast<int>(c.size());
    double cmax = c.cwiseAbs().maxCoeff();
    std::vector<cplx> w_k(nmode), lam(nmode);
    std::vector<char> keep(nmode, 0);
    for (int k = 0; k < nmode; ++k) {
        if (std::abs(c(k)) <= 1e-13 * cmax) continue;  // null projections
        keep[k] = 1;
        lam[k] = es.eigenvalues()(k);
        w_k[k] = c(k) * trace_of_product(a_dag, unvectorize(V.col(k), d));
    }

    res.s.omega = omega;
    res.s.intensity.resize(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) {
        cplx acc = 0.0;
        const cplx iw(0.0, omega[i]);
        for (int k = 0; k < nmode; ++k)
            if (keep[k]) acc += w_k[k] / (iw - lam[k]);
        res.s.intensity[i] = 2.0 * acc.real();
    }
    return res;
}

// ---- time-domain route ----

Spectrum emission_spectrum_timedomain(const Superoperator& L, const Mat& rho_ss,
                                      const std::vector<double>& omega,
                                      const SpectrumOptions& opt) {
    check_inputs(L, rho_ss, omega);
    if (omega.size() < 2)
        throw std::invalid_argument(
            "emission_spectrum_timedomain: need at least 2 grid points");

    Spectrum out;
    out.omega = omega;
    out.intensity.assign(omega.size(), 0.0);

    BareOperators ops = bare_operators(L.space);
    Mat a_dag = ops.a.adjoint();
    const int d = L.space.dim;
    Vec v = vectorize(ops.a * rho_ss);

    cplx g0 = trace_of_product(a_dag, unvectorize(v, d));
    if (std::abs(g0) == 0.0) return out;  // dark state: nothing radiates

    const double w_ref = 0.5 * (omega.front() + omega.back());
    double half_span = 0.0;
    for (double w : omega) half_span = std::max(half_span, std::abs(w - w_ref));
    if (half_span == 0.0)
        throw std::invalid_argument(
            "emission_spectrum_timedomain: degenerate frequency grid");
    const double dt = opt.dt_scale / half_span;

    // single-step propagator in the rotating frame of the grid center
    Mat gen = L.mat;
    for (int i = 0; i < gen.rows(); ++i) gen(i, i) -= cplx(0.0, w_ref);
    Mat E = (gen * dt).exp();

    std::vector<cplx> g;
    g.push_back(g0);
    const double floor_abs = opt.tail_tol * std::abs(g0);
    while (true) {
        v = E * v;
        g.push_back(trace_of_product(a_dag, unvectorize(v, d)));
        long j = static_cast<long>(g.size()) - 1;
        if (j >= opt.min_steps && (j % 2 == 0) && std::abs(g.back()) < floor_abs)
            break;
        if (j >= opt.max_steps)
            throw std::runtime_error(
                "emission_spectrum_timedomain: correlation tail did not decay");
    }

    // composite Simpson weights over the even number of panels
    const std::size_t ns = g.size();
    std::vector<double> quad(ns, 0.0);
    quad[0] = quad[ns - 1] = dt / 3.0;
    for (std::size_t j = 1; j + 1 < ns; ++j)
        quad[j] = (j % 2 == 1) ? 4.0 * dt / 3.0 : 2.0 * dt / 3.0;

    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double dw = omega[i] - w_ref;
        const cplx step = std::exp(cplx(0.0, -dw * dt));
        cplx phase = 1.0, acc = 0.0;
        for (std::size_t j = 0; j < ns; ++j) {
            acc += quad[j] * g[j] * phase;
            phase *= step;
        }
        out.intensity[i] = 2.0 * acc.real();
    }
    return out;
}

// ---- two-time correlation ----

std::vector<cplx> correlation(const Superoperator& L, const Mat& rho_ss,
                              const std::vector<double>& tau) {
    check_inputs(L, rho_ss, tau.empty() ? std::vector<double>{0.0} : tau);
    if (tau.empty())
        throw std::invalid_argument("correlation: empty tau grid");
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < 0.0)
            throw std::invalid_argument("correlation: tau must be >= 0");
        if (i > 0 && tau[i] < tau[i - 1])
            throw std::invalid_argument("correlation: tau grid must be ascending");
    }

    BareOperators ops = bare_operators(L.space);
    Mat a_dag = ops.a.adjoint();
    const int d = L.space.dim;
    Vec v = vectorize(ops.a * rho_ss);

    // reuse one propagator when the grid is (numerically) uniform
    bool uniform = tau.size() >= 3;
    double dt0 = tau.size() >= 2 ? tau[1] - tau[0] : 0.0;
    for (std::size_t i = 2; i < tau.size() && uniform; ++i)
        if (std::abs((tau[i] - tau[i - 1]) - dt0) > 1e-12 * std::max(1.0, dt0))
            uniform = false;

    std::vector<cplx> out;
    out.reserve(tau.size());
    Mat E;
    if (uniform && dt0 > 0.0) E = (L.mat * dt0).exp();
    double t_cur = 0.0;
    for (double t : tau) {
        double dt = t - t_cur;
        if (dt > 0.0) {
            if (uniform && std::abs(dt - dt0) <= 1e-12 * std::max(1.0, dt0))
                v = E * v;
            else
                v = (L.mat * dt).exp() * v;
            t_cur = t;
        }
        out.push_back(trace_of_product(a_dag, unvectorize(v, d)));
    }
    return out;
}

// ---- peak detection ----

std::vector<Peak> find_peaks(const Spectrum& s, double min_prominence,
                             int max_peaks) {
    const std::vector<double>& x = s.omega;
    const std::vector<double>& y = s.intensity;
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("find_peaks: need at least 3 samples");
    if (max_peaks < 1)
        throw std::invalid_argument("find_peaks: max_peaks must be >= 1");

    const int n = static_cast<int>(x.size());
    double top = *std::max_element(y.begin(), y.end());
    if (!(top > 0.0))
        throw std::runtime_error("find_peaks: spectrum has no positive signal");

    std::vector<Peak> found;
    for (int i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        // prominence: descend each side until a higher sample or the edge
        double lmin = y[i], rmin = y[i];
        for (int j = i - 1; j >= 0 && y[j] <= y[i]; --j) lmin = std::min(lmin, y[j]);
        for (int j = i + 1; j < n && y[j] <= y[i]; ++j) rmin = std::min(rmin, y[j]);
        double prom = y[i] - std::max(lmin, rmin);
        if (prom < min_prominence * top) continue;

        Peak p;
        p.center = x[i];
        p.height = y[i];
        p.prominence = prom;

        const double level = 0.5 * y[i];
        double left = std::numeric_limits<double>::quiet_NaN();
        double right = left;
        for (int j = i; j > 0; --j)
            if (y[j - 1] < level && y[j] >= level) {
                left = cross_at(x, y, j - 1, level);
                break;
            }
        for (int j = i; j + 1 < n; ++j)
            if (y[j] >= level && y[j + 1] < level) {
                right = cross_at(x, y, j, level);
                break;
            }
        if (std::isnan(left) && std::isnan(right)) {
            p.fwhm = 0.0;
            p.fwhm_incomplete = true;
        } else if (std::isnan(left)) {
            p.fwhm = 2.0 * (right - x[i]);
            p.fwhm_incomplete = true;
        } else if (std::isnan(right)) {
            p.fwhm = 2.0 * (x[i] - left);
            p.fwhm_incomplete = true;
        } else {
            p.fwhm = right - left;
        }
        found.push_back(p);
    }
    if (found.empty())
        throw std::runtime_error("find_peaks: no peak above the prominence floor");

    std::stable_sort(found.begin(), found.end(), [](const Peak& a, const Peak& b) {
        if (a.height != b.height) return a.height > b.height;
        return a.center < b.center;
    });
    if (static_cast<int>(found.size()) > max_peaks) found.resize(max_peaks);
    return found;
}

// ---- Lorentzian refinement ----

FitResult lorentzian_fit(const Spectrum& s, const Peak& seed) {
    const std::vector<double>& xs = s.omega;
    const std::vector<double>& ys = s.intensity;
    FitResult fr;
    fr.peak = seed;
    if (xs.size() != ys.size() || xs.size() < 5) return fr;  // not converged

    const double dx_grid =
        (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    const double halfwin =
        std::max(3.0 * std::max(seed.fwhm, 0.0), 5.0 * std::abs(dx_grid));
    std::vector<double> x, y;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - seed.center) <= halfwin) {
            x.push_back(xs[i]);
            y.push_back(ys[i]);
        }
    const int n = static_cast<int>(x.size());
    if (n < 5) return fr;

    double ymax = *std::max_element(y.begin(), y.end());
    double ymin = *std::min_element(y.begin(), y.end());

    // parameters: background b, amplitude h, center c, full width w
    double b = ymin;
    double h = std::max(seed.height - ymin, 1e-12 * std::max(ymax, 1.0));
    double c = seed.center;
    double w = (seed.fwhm > 0.0) ? seed.fwhm : 2.0 * std::abs(dx_grid);

    auto ssr_of = [&](double b_, double h_, double c_, double w_) {
        double u = 0.25 * w_ * w_, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            double dxi = x[i] - c_;
            double r = b_ + h_ * u / (dxi * dxi + u) - y[i];
            ss += r * r;
        }
        return ss;
    };

    double ssr = ssr_of(b, h, c, w);
    double lm = 1e-3;
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        const double u = 0.25 * w * w;
        for (int i = 0; i < n; ++i) {
            const double dxi = x[i] - c;
            const double den = dxi * dxi + u;
            const double r = b + h * u / den - y[i];
            Eigen::Vector4d J;
            J(0) = 1.0;
            J(1) = u / den;
            J(2) = 2.0 * h * u * dxi / (den * den);
            J(3) = 0.5 * w * h * dxi * dxi / (den * den);
            jtj += J * J.transpose();
            jtr += J * r;
        }
        bool accepted = false;
        for (int trial = 0; trial < 50 && !accepted; ++trial) {
            Eigen::Matrix4d A = jtj;
            for (int kdi = 0; kdi < 4; ++kdi)
                A(kdi, kdi) += lm * std::max(jtj(kdi, kdi), 1e-300);
            Eigen::Vector4d delta = A.ldlt().solve(-jtr);
            double bn = b + delta(0), hn = h + delta(1);
            double cn = c + delta(2), wn = w + delta(3);
            double ssr_n = ssr_of(bn, hn, cn, wn);
            if (std::isfinite(ssr_n) && ssr_n <= ssr) {
                double rel_move = std::abs(delta(2)) / std::max(std::abs(w), 1e-300) +
                                  std::abs(delta(3)) / std::max(std::abs(w), 1e-300);
                converged = (ssr - ssr_n <= 1e-14 * std::max(ssr, 1e-300)) ||
                            rel_move < 1e-12;
                b = bn;
                h = hn;
                c = cn;
                w = wn;
                ssr = ssr_n;
                lm = std::max(lm / 3.0, 1e-12);
                accepted = true;
            } else {
                lm *= 4.0;
            }
        }
        if (!accepted) break;  // stuck: report the best point reached
    }

    w = std::abs(w);
    if (h <= 0.0 || !std::isfinite(b + h + c + w)) return fr;  // degenerate fit

    fr.background = b;
    fr.peak.center = c;
    fr.peak.height = b + h;
    fr.peak.fwhm = w;
    fr.peak.fwhm_incomplete = false;
    fr.peak.prominence = seed.prominence;
    fr.residual = std::sqrt(ssr / n) / std::max(ymax, 1e-300);
    fr.converged = converged;
    fr.large_residual = fr.residual > 0.05;
    return fr;
}

// ---- sweep tracking ----

namespace {

// Refined view of one detected peak: Lorentzian fit when it is trustworthy
// (converged, small residual, center within the raw width), else the raw
// half-height measurement.
Peak refine_peak(const Spectrum& s, const Peak& raw) {
    FitResult fit = lorentzian_fit(s, raw);
    if (!fit.converged || fit.large_residual) return raw;
    double tol = std::max(raw.fwhm, 1e-12);
    if (std::abs(fit.peak.center - raw.center) > tol) return raw;
    return fit.peak;
}

}  // namespace

std::vector<TrackedPeak> track_peaks(const std::vector<SweepPoint>& points,
                                     double min_prominence) {
    if (points.empty())
        throw std::invalid_argument("track_peaks: empty sweep");

    std::vector<TrackedPeak> rows;
    double prev_c = 0.0, prev_x = 0.0;       // last known line centers
    double prev_hc = 0.0, prev_hx = 0.0;     // last known heights
    bool have_prev = false;

    for (const SweepPoint& pt : points) {
        std::vector<Peak> raw = find_peaks(pt.s, min_prominence, 2);
        std::vector<Peak> ref;
        ref.reserve(raw.size());
        for (const Peak& p : raw) ref.push_back(refine_peak(pt.s, p));

        TrackedPeak row_c, row_x;
        row_c.T = row_x.T = pt.T;
        row_c.label = "C";
        row_x.label = "X";

        if (ref.size() == 1) {
            const Peak& p = ref[0];
            for (TrackedPeak* r : {&row_c, &row_x}) {
                r->center = p.center;
                r->fwhm = p.fwhm;
                r->height = p.height;
                r->merged = true;
            }
            prev_c = prev_x = p.center;
            prev_hc = prev_hx = p.height;
        } else {
            const Peak& p0 = ref[0];
            const Peak& p1 = ref[1];
            double ref_c = have_prev ? prev_c : pt.omega_c;
            double ref_x = have_prev ? prev_x : pt.omega_x;
            double cost_id = std::abs(p0.center - ref_c) + std::abs(p1.center - ref_x);
            double cost_sw = std::abs(p1.center - ref_c) + std::abs(p0.center - ref_x);
            double span = std::abs(pt.s.omega.back() - pt.s.omega.front());
            bool tie = std::abs(cost_id - cost_sw) <= 1e-9 + 1e-6 * span;

            const Peak* pc = (cost_id <= cost_sw) ? &p0 : &p1;
            const Peak* px = (cost_id <= cost_sw) ? &p1 : &p0;
            if (tie && have_prev) {
                // crossing region: keep the taller line on the previously
                // taller track
                const Peak* tall = (p0.height >= p1.height) ? &p0 : &p1;
                const Peak* small = (tall == &p0) ? &p1 : &p0;
                if (prev_hc >= prev_hx) {
                    pc = tall;
                    px = small;
                } else {
                    pc = small;
                    px = tall;
                }
                row_c.ambiguous = row_x.ambiguous = true;
            }
            row_c.center = pc->center;
            row_c.fwhm = pc->fwhm;
            row_c.height = pc->height;
            row_x.center = px->center;
            row_x.fwhm = px->fwhm;
            row_x.height = px->height;
            prev_c = pc->center;
            prev_x = px->center;
            prev_hc = pc->height;
            prev_hx = px->height;
        }
        have_prev = true;
        rows.push_back(row_c);
        rows.push_back(row_x);
    }
    return rows;
}

}  // namespace jcdyn
