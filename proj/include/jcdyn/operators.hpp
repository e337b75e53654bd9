// operators.hpp — Truncated cavity-QED Hilbert space, ladder operators, and the
// Jaynes-Cummings Hamiltonian for a two-level emitter coupled to a single mode.

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace jcdyn {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Vec  = Eigen::VectorXcd;

// Units: hbar = 1; every energy and rate is in meV, time in 1/meV, temperature in K.

// Photon Fock space truncated at n_max, tensored with a two-level emitter.
// Basis ordering is i = 2n + alpha with the emitter index alpha in {0,1} fastest,
// so each excitation-number block occupies a contiguous index pair.
struct HilbertSpace {
    int n_max = 0;
    int dim   = 0;  // 2 * (n_max + 1)

    explicit HilbertSpace(int n_max_);

    int index(int n, int alpha) const;       // basis index of |n, alpha>
    int photon_of(int i) const { return i / 2; }
    int exciton_of(int i) const { return i % 2; }
};

// Coupling, loss, pump, and frequency parameters of the driven emitter-cavity system.
struct SystemParams {
    double g       = 0.0;  // emitter-cavity coupling (meV)
    double kappa   = 0.0;  // cavity loss rate (meV)
    double gamma_x = 0.0;  // emitter spontaneous decay (meV)
    double P_x     = 0.0;  // incoherent emitter pump (meV)
    double P_theta = 0.0;  // phonon-assisted emitter->cavity transfer rate (meV)
    double omega_x = 0.0;  // emitter frequency (meV)
    double omega_c = 0.0;  // cavity frequency (meV)
    double gamma_theta = 0.0;  // reverse phonon-assisted channel, usually negligible

    double delta() const { return omega_x - omega_c; }

    // Throws std::invalid_argument naming the offending field (negative rate,
    // non-finite value).
    void validate() const;
};

// Annihilation/lowering operators and the derived number operators on one space.
struct BareOperators {
    Mat a;          // photon annihilation, a|n,alpha> = sqrt(n)|n-1,alpha>
    Mat sigma;      // emitter lowering, sigma|n,1> = |n,0>
    Mat n_phot;     // a^dag a
    Mat n_exciton;  // sigma^dag sigma
    Mat n_exc;      // total excitation number a^dag a + sigma^dag sigma
};

BareOperators bare_operators(const HilbertSpace& hs);

// H = omega_x sigma^dag sigma + omega_c a^dag a + g (a^dag sigma + a sigma^dag).
// Hermitian, commutes with the total excitation number.
Mat jc_hamiltonian(const HilbertSpace& hs, double omega_x, double omega_c, double g);

// --------------------------- density-matrix checks ---------------------------

double trace_error(const Mat& rho);        // |tr(rho) - 1|
double hermiticity_error(const Mat& rho);  // max entrywise |rho - rho^dag|
double min_eigenvalue(const Mat& rho);     // smallest eigenvalue of (rho + rho^dag)/2

// Throws std::runtime_error if rho is not a valid state within tol
// (unit trace, Hermitian, eigenvalues >= -tol).
void validate_density(const Mat& rho, double tol = 1e-9);

}  // namespace jcdyn
