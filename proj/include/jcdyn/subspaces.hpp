// subspaces.hpp — One-photon transition sectors of the damped generator:
// 4x4 coherence blocks, labeled eigenvalue branches, bare-basis expansion
// coefficients, and detection of branch coalescence (exceptional points).

#pragma once

#include "jcdyn/operators.hpp"

#include <array>
#include <string>
#include <vector>

namespace jcdyn {

// Parameters of one transition sector between photon rungs n and n-1.
// The block is built frame-relative: Im(lambda) is the offset of the emission
// line from the cavity frequency, Delta = omega_x - omega_c.
struct SubspaceParams {
    int n = 1;          // upper rung index (>= 1)
    double g       = 0.0;
    double kappa   = 0.0;
    double gamma_x = 0.0;
    double P_theta = 0.0;
    double Delta   = 0.0;

    void validate() const;  // throws std::invalid_argument
};

enum class MatrixSource { oracle, printed };

// Literature-form 4x4 block, transcribed verbatim (shorthands Omega_n = g sqrt(n),
// Z = -n P_theta + 4 i Delta, corner sqrt(n(n-1)) P_theta). Kept solely for the
// transcription-fidelity comparison below; physics outputs use oracle_block.
Eigen::Matrix4cd ngl_matrix(const SubspaceParams& p);

// Authoritative block: restriction of no_gain_liouvillian to the coherence sector
//   { |n,0><n-1,0|, |n-1,1><n-1,0|, |n,0><n-2,1|, |n-1,1><n-2,1| },
// negated so Re(lambda) >= 0 are linewidths. For n = 1 the last two components
// do not exist and the block is 2x2. Sector closure is asserted: any coupling
// leaking outside the sector above 1e-12 relative is an internal error.
// n_max defaults to n+1; the result is independent of n_max beyond that.
Mat oracle_block(const SubspaceParams& p, int n_max = -1);

// Branch labels (s, s') over the sign choices of the rung-n and rung-(n-1)
// dressed doublets; each of s, sp is -1 or +1. For n = 1 the lower rung is the
// non-degenerate ground state and only the (-,-) / (-,+) pair is defined, mapped
// to the upper / lower polariton transition respectively.
struct BranchLabel {
    int s  = -1;
    int sp = -1;
    bool operator==(const BranchLabel&) const = default;
};
std::string label_name(BranchLabel l);                    // "--", "-+", "+-", "++"
std::vector<BranchLabel> canonical_labels(int n);         // fixed storage order

// Labeled eigensystem of one sector at a single parameter point.
struct TransitionEigen {
    int n = 1;
    MatrixSource source = MatrixSource::oracle;
    std::vector<BranchLabel> labels;  // canonical order; size 2 (n=1) or 4
    std::vector<cplx> lambda;         // per label; Gamma = Re, omega = Im
    Mat vecs;                         // eigenvector columns aligned with labels
    bool ambiguous = false;           // continuity broke down near a coalescence
};

// Labels are seeded at P_theta = 0 by matching Im(lambda) to the bare transition
// frequencies s sqrt(g^2 n + Delta^2/4) - s' sqrt(g^2 (n-1) + Delta^2/4)
// (n = 1: Delta/2 +- sqrt(g^2 + Delta^2/4)), ties broken by Re then Im ascending,
// and propagated to p.P_theta by nearest-neighbor continuity with adaptive steps.
TransitionEigen ngl_eigen(const SubspaceParams& p, MatrixSource source);

// Sweep version: one continuity-tracked labeling along an increasing P_theta grid
// starting at 0. Returns one TransitionEigen per grid point.
std::vector<TransitionEigen> track_branches(const SubspaceParams& p,
                                            const std::vector<double>& P_grid,
                                            MatrixSource source);

// Expansion of the (-,-) eigenvector over the bare coherence basis,
// U = sum_{alpha,beta} C[alpha][beta] |n-alpha,alpha><n-1-beta,beta|.
// Normalized to sum |C|^2 = 1; global phase fixed so the largest component is
// real positive. For n = 1 the beta = 1 column does not exist and is zero.
struct BareCoefficients {
    int n = 1;
    std::array<std::array<cplx, 2>, 2> C{};

    double c_sq(int alpha, int beta) const;  // |C[alpha][beta]|^2
};
BareCoefficients bare_coefficients(const TransitionEigen& e);

// Coalescence of the tracked (-,-) branch with its nearest partner branch.
// For n = 1 the only partner is (-,+); for n >= 2 at Delta = 0 the meeting
// branch is the mirror (+,+) — the gap is minimized over all partner branches
// and the one realizing the minimum is reported.
struct ExceptionalPoint {
    int n = 1;
    double Delta = 0.0;
    double P_crit = 0.0;        // location of the gap minimum (meV)
    double omega_at_ep = 0.0;   // Im of the pair midpoint at P_crit (frame-relative)
    double Gamma_at_ep = 0.0;   // Re of the pair midpoint at P_crit
    double residual_gap = 0.0;  // |lambda_1 - lambda_2| at P_crit
    double parallelism = 0.0;   // |<v1,v2>| / (|v1||v2|) of the coalescing pair
    BranchLabel partner{};      // branch met by (-,-)
    bool is_ep = false;         // gap < 1e-6 g AND parallelism > 1 - 1e-4
};

// Coarse scan (200 points over [P_lo, P_hi]) of the tracked gap, then
// golden-section refinement of the local pair distance. A minimum that stays
// above tolerance is reported as an avoided crossing (is_ep = false), not an
// error. p.P_theta is ignored; p.n, p.Delta and the rates are used.
ExceptionalPoint exceptional_point(const SubspaceParams& p, double P_lo, double P_hi);

// Eigenvalue-set comparison of the literature-form block against the generator
// restriction, after an optimal global complex shift and assignment.
struct ComparisonReport {
    int n = 1;
    cplx shift{};           // fitted offset, printed minus oracle
    double rms_residual = 0.0;
    double max_residual = 0.0;
    bool equivalent = false;  // residual below 1e-9 x scale after the shift
};
ComparisonReport compare_printed_vs_oracle(const SubspaceParams& p);

}  // namespace jcdyn
