// subspaces.cpp — transition-sector blocks, branch tracking, coalescence search.

#include "jcdyn/subspaces.hpp"
#include "jcdyn/liouville.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace jcdyn {

namespace {

constexpr int kMaxBisectDepth = 12;   // adaptive continuity subdivision limit
constexpr double kStepFraction = 0.45;  // max eigenvalue move per step, vs min gap

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("SubspaceParams: ") + name +
                                    " must be finite");
}

void require_rate(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0)
        throw std::invalid_argument(std::string("SubspaceParams: ") + name +
                                    " must be non-negative");
}

// ---- eigen solve ----

std::vector<cplx> eig_values(const Mat& M, Mat* vectors = nullptr) {
    Eigen::ComplexEigenSolver<Mat> es(M, vectors != nullptr);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("subspaces: eigensolver did not converge");
    std::vector<cplx> v(M.rows());
    for (int i = 0; i < M.rows(); ++i) v[i] = es.eigenvalues()(i);
    if (vectors) *vectors = es.eigenvectors();
    return v;
}

// Candidate enumeration order: ascending (Re, Im). Used by every matching step
// so that exact ties resolve the same way on every run.
std::vector<int> sorted_order(const std::vector<cplx>& v) {
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[a].real() != v[b].real()) return v[a].real() < v[b].real();
        return v[a].imag() < v[b].imag();
    });
    return order;
}

// Least-total-cost injective assignment of m slots onto k candidates (k <= 4,
// exhaustive). Candidates are tried in `order`; the first minimum encountered
// wins, which implements the Re-then-Im tie-break.
std::vector<int> assign_min_cost(int m, int k, const std::vector<int>& order,
                                 const std::function<double(int, int)>& cost) {
    std::vector<int> pick(m, -1), best(m, -1);
    std::vector<char> used(k, 0);
    double best_cost = std::numeric_limits<double>::infinity();
    std::function<void(int, double)> rec = [&](int slot, double acc) {
        if (acc >= best_cost) return;
        if (slot == m) {
            best_cost = acc;
            best = pick;
            return;
        }
        for (int oi = 0; oi < k; ++oi) {
            int ci = order[oi];
            if (used[ci]) continue;
            used[ci] = 1;
            pick[slot] = ci;
            rec(slot + 1, acc + cost(slot, ci));
            used[ci] = 0;
        }
    };
    rec(0, 0.0);
    return best;
}

// ---- sector model: block(P_theta) = M0 + P_theta * M1 (both constructions are
// affine in the incoherent excitation rate) ----

struct SectorModel {
    Mat M0, M1;
    Mat at(double P) const { return M0 + P * M1; }
    int size() const { return static_cast<int>(M0.rows()); }
};

Mat block_at(const SubspaceParams& p, double P, MatrixSource source) {
    SubspaceParams q = p;
    q.P_theta = P;
    if (source == MatrixSource::printed) return Mat(ngl_matrix(q));
    return oracle_block(q);
}

SectorModel make_model(const SubspaceParams& p, MatrixSource source) {
    Mat a = block_at(p, 0.0, source);
    Mat b = block_at(p, 1.0, source);
    return {a, b - a};
}

// ---- continuity tracking ----

// Slots 0..m-1 carry the canonical labels; any extra slots (the literature block
// is always 4x4, even for n = 1) ride along unlabeled so the permutation
// matching always acts on the full eigenvalue set.
struct TrackState {
    std::vector<cplx> lam;
    bool ambiguous = false;
};

std::vector<double> seed_targets(const SubspaceParams& p) {
    double rn = std::sqrt(p.g * p.g * p.n + 0.25 * p.Delta * p.Delta);
    if (p.n == 1)
        return {0.5 * p.Delta + rn, 0.5 * p.Delta - rn};
    double rm = std::sqrt(p.g * p.g * (p.n - 1) + 0.25 * p.Delta * p.Delta);
    std::vector<double> t;
    for (BranchLabel l : canonical_labels(p.n)) t.push_back(l.s * rn - l.sp * rm);
    return t;
}

TrackState seed_state(const SectorModel& mod, const SubspaceParams& p) {
    std::vector<cplx> cand = eig_values(mod.at(0.0));
    int k = static_cast<int>(cand.size());
    std::vector<double> targets = seed_targets(p);
    int m = static_cast<int>(targets.size());
    std::vector<int> order = sorted_order(cand);
    std::vector<int> pick =
        assign_min_cost(m, k, order, [&](int slot, int ci) {
            return std::abs(cand[ci].imag() - targets[slot]);
        });
    TrackState st;
    st.lam.resize(k);
    std::vector<char> used(k, 0);
    for (int s = 0; s < m; ++s) {
        st.lam[s] = cand[pick[s]];
        used[pick[s]] = 1;
    }
    int slot = m;
    for (int oi = 0; oi < k; ++oi)  // leftovers in sorted order
        if (!used[order[oi]]) st.lam[slot++] = cand[order[oi]];
    return st;
}

// One matched update of st.lam to the eigenvalues at P = Pb; bisects the
// interval while any branch would move farther than a fraction of the smallest
// inter-branch gap, and flags ambiguity once the depth budget is exhausted
// (genuine coalescences cannot be tracked through).
void advance(const SectorModel& mod, TrackState& st, double Pa, double Pb,
             int depth) {
    std::vector<cplx> cand = eig_values(mod.at(Pb));
    int k = static_cast<int>(cand.size());
    std::vector<int> order = sorted_order(cand);
    std::vector<int> perm =
        assign_min_cost(k, k, order, [&](int slot, int ci) {
            return std::abs(st.lam[slot] - cand[ci]);
        });
    double move = 0.0;
    for (int i = 0; i < k; ++i)
        move = std::max(move, std::abs(st.lam[i] - cand[perm[i]]));
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            gap = std::min(gap, std::abs(st.lam[i] - st.lam[j]));
    if (move > kStepFraction * gap) {
        double width = Pb - Pa;
        if (depth < kMaxBisectDepth && width > 1e-15 * (1.0 + std::abs(Pb))) {
            double mid = 0.5 * (Pa + Pb);
            advance(mod, st, Pa, mid, depth + 1);
            advance(mod, st, mid, Pb, depth + 1);
            return;
        }
        st.ambiguous = true;
    }
    for (int i = 0; i < k; ++i) st.lam[i] = cand[perm[i]];
}

// Endpoint snapshot: recompute the eigensystem, align it with the tracked
// values, and keep only the labeled slots.
TransitionEigen snapshot(const SectorModel& mod, const TrackState& st,
                         const SubspaceParams& p, double P, MatrixSource source) {
    Mat vecs;
    std::vector<cplx> cand = eig_values(mod.at(P), &vecs);
    int k = static_cast<int>(cand.size());
    std::vector<int> order = sorted_order(cand);
    std::vector<int> perm =
        assign_min_cost(k, k, order, [&](int slot, int ci) {
            return std::abs(st.lam[slot] - cand[ci]);
        });
    TransitionEigen out;
    out.n = p.n;
    out.source = source;
    out.labels = canonical_labels(p.n);
    int m = static_cast<int>(out.labels.size());
    out.lambda.resize(m);
    out.vecs.resize(vecs.rows(), m);
    for (int s = 0; s < m; ++s) {
        out.lambda[s] = cand[perm[s]];
        out.vecs.col(s) = vecs.col(perm[s]);
    }
    out.ambiguous = st.ambiguous;
    return out;
}

}  // namespace

// ---- parameters ----

void SubspaceParams::validate() const {
    if (n < 1)
        throw std::invalid_argument("SubspaceParams: n must be >= 1");
    require_rate(g, "g");
    require_rate(kappa, "kappa");
    require_rate(gamma_x, "gamma_x");
    require_rate(P_theta, "P_theta");
    require_finite(Delta, "Delta");
}

// ---- literature-form block ----

Eigen::Matrix4cd ngl_matrix(const SubspaceParams& p) {
    p.validate();
    const cplx iu(0.0, 1.0);
    const double n = p.n;
    const double wn = p.g * std::sqrt(n);        // Omega_n
    const double wm = p.g * std::sqrt(n - 1.0);  // Omega_{n-1}
    const cplx z(-n * p.P_theta, 4.0 * p.Delta);
    Eigen::Matrix4cd M;
    M(0, 0) = 0.5 * (p.kappa - (2.0 * n - 1.0) * p.P_theta);
    M(0, 1) = -iu * wm;
    M(0, 2) = iu * wn;
    M(0, 3) = 0.0;
    M(1, 0) = -iu * wm;
    M(1, 1) = 0.5 * (p.gamma_x + z);
    M(1, 2) = 0.0;
    M(1, 3) = iu * wn;
    M(2, 0) = iu * wn;
    M(2, 1) = 0.0;
    M(2, 2) = 0.5 * (2.0 * p.kappa + p.P_theta + std::conj(z) - p.gamma_x);
    M(2, 3) = -iu * wm;
    M(3, 0) = std::sqrt(n * (n - 1.0)) * p.P_theta;
    M(3, 1) = iu * wn;
    M(3, 2) = -iu * wm;
    M(3, 3) = 0.5 * p.kappa;
    return M;
}

// ---- generator restriction ----

Mat oracle_block(const SubspaceParams& p, int n_max) {
    p.validate();
    if (n_max < 0) n_max = p.n + 1;
    if (n_max < p.n)
        throw std::invalid_argument("oracle_block: n_max must cover rung n");
    HilbertSpace hs(n_max);
    SystemParams sp;
    sp.g = p.g;
    sp.kappa = p.kappa;
    sp.gamma_x = p.gamma_x;
    sp.P_theta = p.P_theta;
    sp.omega_c = 0.0;      // cavity frame built in: Im(lambda) = omega - omega_c
    sp.omega_x = p.Delta;
    Superoperator L = no_gain_liouvillian(hs, sp);

    const int dim = hs.dim;
    std::vector<int> idx;  // vectorized positions, column stacking col*dim + row
    const int r_ph = hs.index(p.n, 0);      // |n, 0>
    const int r_xc = hs.index(p.n - 1, 1);  // |n-1, 1>
    const int c_ph = hs.index(p.n - 1, 0);  // <n-1, 0|
    idx.push_back(c_ph * dim + r_ph);
    idx.push_back(c_ph * dim + r_xc);
    if (p.n >= 2) {
        const int c_xc = hs.index(p.n - 2, 1);  // <n-2, 1|
        idx.push_back(c_xc * dim + r_ph);
        idx.push_back(c_xc * dim + r_xc);
    }
    const int k = static_cast<int>(idx.size());

    Mat M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M(i, j) = L.mat(idx[i], idx[j]);

    // The sector must be an invariant subspace: applying the generator to a
    // vector supported on it must not produce components outside it.
    std::vector<char> inside(L.mat.rows(), 0);
    for (int i : idx) inside[i] = 1;
    const double scale = std::max(1.0, L.mat.cwiseAbs().maxCoeff());
    double leak = 0.0;
    for (int r = 0; r < L.mat.rows(); ++r) {
        if (inside[r]) continue;
        for (int j = 0; j < k; ++j)
            leak = std::max(leak, std::abs(L.mat(r, idx[j])));
    }
    if (leak > 1e-12 * scale)
        throw std::logic_error("oracle_block: sector coupling leak detected");
    return -M;
}

// ---- labels ----

std::string label_name(BranchLabel l) {
    std::string s;
    s += (l.s < 0) ? '-' : '+';
    s += (l.sp < 0) ? '-' : '+';
    return s;
}

std::vector<BranchLabel> canonical_labels(int n) {
    if (n < 1) throw std::invalid_argument("canonical_labels: n must be >= 1");
    if (n == 1) return {{-1, -1}, {-1, +1}};
    return {{-1, -1}, {-1, +1}, {+1, -1}, {+1, +1}};
}

// ---- labeled eigensystems ----

TransitionEigen ngl_eigen(const SubspaceParams& p, MatrixSource source) {
    p.validate();
    SectorModel mod = make_model(p, source);
    TrackState st = seed_state(mod, p);
    if (p.P_theta > 0.0) {
        const int panels = 64;  // coarse steps; advance() subdivides as needed
        for (int i = 0; i < panels; ++i) {
            double a = p.P_theta * i / panels;
            double b = p.P_theta * (i + 1) / panels;
            advance(mod, st, a, b, 0);
        }
    }
    return snapshot(mod, st, p, p.P_theta, source);
}

std::vector<TransitionEigen> track_branches(const SubspaceParams& p,
                                            const std::vector<double>& P_grid,
                                            MatrixSource source) {
    p.validate();
    if (P_grid.empty())
        throw std::invalid_argument("track_branches: empty grid");
    for (std::size_t i = 0; i < P_grid.size(); ++i) {
        if (!std::isfinite(P_grid[i]) || P_grid[i] < 0.0)
            throw std::invalid_argument("track_branches: grid values must be >= 0");
        if (i > 0 && P_grid[i] <= P_grid[i - 1])
            throw std::invalid_argument("track_branches: grid must be increasing");
    }
    SectorModel mod = make_model(p, source);
    TrackState st = seed_state(mod, p);
    std::vector<TransitionEigen> out;
    out.reserve(P_grid.size());
    double prev = 0.0;
    for (double P : P_grid) {
        if (P > prev) advance(mod, st, prev, P, 0);
        prev = P;
        out.push_back(snapshot(mod, st, p, P, source));
    }
    return out;
}

// ---- bare-basis coefficients ----

double BareCoefficients::c_sq(int alpha, int beta) const {
    if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1)
        throw std::invalid_argument("BareCoefficients: indices must be 0 or 1");
    return std::norm(C[alpha][beta]);
}

BareCoefficients bare_coefficients(const TransitionEigen& e) {
    int slot = -1;
    for (std::size_t i = 0; i < e.labels.size(); ++i)
        if (e.labels[i] == BranchLabel{-1, -1}) slot = static_cast<int>(i);
    if (slot < 0)
        throw std::invalid_argument("bare_coefficients: no (-,-) branch present");
    Vec v = e.vecs.col(slot);
    double nrm = v.norm();
    if (nrm == 0.0)
        throw std::invalid_argument("bare_coefficients: zero eigenvector");
    v /= nrm;

    BareCoefficients bc;
    bc.n = e.n;
    bc.C[0][0] = v(0);
    bc.C[1][0] = v(1);
    if (v.size() >= 4) {
        bc.C[0][1] = v(2);
        bc.C[1][1] = v(3);
    }
    // gauge: rotate the global phase so the largest component is real positive
    cplx big = bc.C[0][0];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (std::abs(bc.C[a][b]) > std::abs(big)) big = bc.C[a][b];
    cplx phase = big / std::abs(big);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) bc.C[a][b] /= phase;
    return bc;
}

// ---- coalescence search ----

ExceptionalPoint exceptional_point(const SubspaceParams& base, double P_lo,
                                   double P_hi) {
    base.validate();
    if (!(P_lo >= 0.0) || !(P_hi > P_lo) || !std::isfinite(P_hi))
        throw std::invalid_argument(
            "exceptional_point: need 0 <= P_lo < P_hi, finite");
    SectorModel mod = make_model(base, MatrixSource::oracle);
    TrackState st = seed_state(mod, base);
    const int m = static_cast<int>(canonical_labels(base.n).size());

    // coarse scan of the (-,-) branch's distance to its nearest partner
    const int coarse = 200;
    double best_gap = std::numeric_limits<double>::infinity();
    double best_P = P_lo;
    int best_j = 0, partner_slot = 1;
    cplx mu;
    double prev = 0.0;
    std::vector<double> grid(coarse);
    for (int j = 0; j < coarse; ++j)
        grid[j] = P_lo + (P_hi - P_lo) * j / (coarse - 1);
    for (int j = 0; j < coarse; ++j) {
        if (grid[j] > prev) advance(mod, st, prev, grid[j], 0);
        prev = grid[j];
        for (int o = 1; o < m; ++o) {
            double d = std::abs(st.lam[0] - st.lam[o]);
            if (d < best_gap) {
                best_gap = d;
                best_P = grid[j];
                best_j = j;
                partner_slot = o;
                mu = 0.5 * (st.lam[0] + st.lam[o]);
            }
        }
    }

    // local pair distance: the two eigenvalues nearest the stored pair midpoint
    auto pair_at = [&](double P, cplx* mean, double* parallel) {
        Mat vecs;
        std::vector<cplx> lam = eig_values(mod.at(P), &vecs);
        std::vector<int> order(lam.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(lam[a] - mu) < std::abs(lam[b] - mu);
        });
        int i1 = order[0], i2 = order[1];
        if (mean) *mean = 0.5 * (lam[i1] + lam[i2]);
        if (parallel) {
            Vec v1 = vecs.col(i1), v2 = vecs.col(i2);
            *parallel = std::abs(v1.dot(v2)) / (v1.norm() * v2.norm());
        }
        return std::abs(lam[i1] - lam[i2]);
    };

    double a = grid[std::max(best_j - 1, 0)];
    double b = grid[std::min(best_j + 1, coarse - 1)];
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = pair_at(c, nullptr, nullptr);
    double fd = pair_at(d, nullptr, nullptr);
    for (int it = 0; it < 120 && (b - a) > 1e-14 * std::max(1.0, b); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = pair_at(c, nullptr, nullptr);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = pair_at(d, nullptr, nullptr);
        }
    }
    double P_star = (fc < fd) ? c : d;
    if (best_gap < std::min(fc, fd)) P_star = best_P;  // coarse point already best

    ExceptionalPoint ep;
    ep.n = base.n;
    ep.Delta = base.Delta;
    ep.P_crit = P_star;
    cplx mean;
    ep.residual_gap = pair_at(P_star, &mean, &ep.parallelism);
    ep.omega_at_ep = mean.imag();
    ep.Gamma_at_ep = mean.real();
    ep.partner = canonical_labels(base.n)[partner_slot];
    ep.is_ep = (ep.residual_gap < 1e-6 * base.g) && (ep.parallelism > 1.0 - 1e-4);
    return ep;
}

// ---- transcription comparison ----

ComparisonReport compare_printed_vs_oracle(const SubspaceParams& p) {
    std::vector<cplx> printed = eig_values(Mat(ngl_matrix(p)));
    std::vector<cplx> oracle = eig_values(oracle_block(p));
    const int k = static_cast<int>(printed.size());
    const int m = static_cast<int>(oracle.size());
    std::vector<int> order = sorted_order(printed);

    ComparisonReport rep;
    rep.n = p.n;
    double best_rms = std::numeric_limits<double>::infinity();

    std::vector<int> pick(m, -1);
    std::vector<char> used(k, 0);
    std::function<void(int)> rec = [&](int slot) {
        if (slot == m) {
            cplx z = 0.0;  // optimal common offset for this assignment
            for (int s = 0; s < m; ++s) z += printed[pick[s]] - oracle[s];
            z /= static_cast<double>(m);
            double ss = 0.0, mx = 0.0;
            for (int s = 0; s < m; ++s) {
                double r = std::abs(printed[pick[s]] - oracle[s] - z);
                ss += r * r;
                mx = std::max(mx, r);
            }
            double rms = std::sqrt(ss / m);
            if (rms < best_rms) {
                best_rms = rms;
                rep.shift = z;
                rep.rms_residual = rms;
                rep.max_residual = mx;
            }
            return;
        }
        for (int oi = 0; oi < k; ++oi) {
            int ci = order[oi];
            if (used[ci]) continue;
            used[ci] = 1;
            pick[slot] = ci;
            rec(slot + 1);
            used[ci] = 0;
        }
    };
    rec(0);

    double scale = 1.0;
    for (const cplx& v : oracle) scale = std::max(scale, std::abs(v));
    rep.equivalent = rep.rms_residual <= 1e-9 * scale;
    return rep;
}

}  // namespace jcdyn
