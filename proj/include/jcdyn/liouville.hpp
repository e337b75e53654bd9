// liouville.hpp — Lindblad generators as dense superoperators, steady-state
// extraction, and time evolution by matrix exponential.

#pragma once

#include "jcdyn/operators.hpp"

namespace jcdyn {

// Vectorization is column-stacking: vec(rho) concatenates the columns of rho,
// so vec(A rho B) = (B^T (x) A) vec(rho). All superoperators use this layout.
struct Superoperator {
    HilbertSpace space;
    Mat mat;  // dim^2 x dim^2
};

Vec vectorize(const Mat& rho);
Mat unvectorize(const Vec& v, int dim);

// Kronecker product, kron(A,B)[i*rB + k, j*cB + l] = A(i,j) B(k,l).
Mat kron(const Mat& A, const Mat& B);

// tr(A B) without forming the product.
cplx trace_of_product(const Mat& A, const Mat& B);

// Superoperator of 2 X rho X^dag - X^dag X rho - rho X^dag X.
// No 1/2 prefactor here; callers scale by rate/2.
Mat dissipator_matrix(const Mat& X);

// Superoperator of -i [H, rho].
Mat hamiltonian_superop(const Mat& H);

// Full generator:
//   d rho/dt = -i[H,rho] + (kappa/2) D_a + (gamma_x/2) D_sigma + (P_x/2) D_sigma^dag
//              + (P_theta/2) D_{sigma a^dag} + (gamma_theta/2) D_{sigma^dag a}
// Trace-preserving: vec(I)^dag is a left null vector.
Superoperator full_liouvillian(const HilbertSpace& hs, const SystemParams& p);

// Damped-only variant: the refilling (jump) parts of the cavity and emitter decay
// channels are dropped and the incoherent emitter pump is forced off, leaving
//   d rho/dt = -i (K rho - rho K^dag) + (P_theta/2) D_{sigma a^dag}
//              [+ (gamma_theta/2) D_{sigma^dag a}]
// with K = H - i (gamma_x/2) sigma^dag sigma - i (kappa/2) a^dag a.
// Not trace-preserving; block-diagonal over excitation-number coherence sectors.
Superoperator no_gain_liouvillian(const HilbertSpace& hs, const SystemParams& p);

struct SteadyStateResult {
    Mat rho;
    double isolation;    // second-smallest / smallest singular value of the generator
    bool used_fallback;  // trace-constrained least-squares path was taken
};

// Null-space extraction by SVD (smallest singular vector), trace-normalized and
// hermitized. If the smallest singular value is not isolated by 1e3x from the
// next, retries as a trace-constrained least-squares solve; a residual that
// remains large signals a degenerate steady state and throws std::runtime_error.
SteadyStateResult solve_steady_state(const Superoperator& L);
Mat steady_state(const Superoperator& L);

// exp(L t) applied to vec(rho0), via scaling-and-squaring matrix exponential.
Mat evolve(const Superoperator& L, const Mat& rho0, double t);

}  // namespace jcdyn
