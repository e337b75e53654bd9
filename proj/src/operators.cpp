// operators.cpp — construction of the truncated-space operators and state checks.

#include "jcdyn/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jcdyn {

HilbertSpace::HilbertSpace(int n_max_) : n_max(n_max_), dim(2 * (n_max_ + 1)) {
    if (n_max_ < 1) {
        throw std::invalid_argument("HilbertSpace: n_max must be >= 1, got " +
                                    std::to_string(n_max_));
    }
}

int HilbertSpace::index(int n, int alpha) const {
    if (n < 0 || n > n_max || alpha < 0 || alpha > 1) {
        throw std::invalid_argument("HilbertSpace::index: state |" + std::to_string(n) +
                                    "," + std::to_string(alpha) + "> outside the space");
    }
    return 2 * n + alpha;
}

void SystemParams::validate() const {
    auto check_rate = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument(std::string("SystemParams: ") + name +
                                        " must be finite and >= 0");
        }
    };
    check_rate(g, "g");
    check_rate(kappa, "kappa");
    check_rate(gamma_x, "gamma_x");
    check_rate(P_x, "P_x");
    check_rate(P_theta, "P_theta");
    check_rate(gamma_theta, "gamma_theta");
    if (!std::isfinite(omega_x) || !std::isfinite(omega_c)) {
        throw std::invalid_argument("SystemParams: omega_x and omega_c must be finite");
    }
}

BareOperators bare_operators(const HilbertSpace& hs) {
    BareOperators ops;
    ops.a     = Mat::Zero(hs.dim, hs.dim);
    ops.sigma = Mat::Zero(hs.dim, hs.dim);
    for (int alpha = 0; alpha <= 1; ++alpha) {
        for (int n = 1; n <= hs.n_max; ++n) {
            ops.a(hs.index(n - 1, alpha), hs.index(n, alpha)) = std::sqrt(double(n));
        }
    }
    for (int n = 0; n <= hs.n_max; ++n) {
        ops.sigma(hs.index(n, 0), hs.index(n, 1)) = 1.0;
    }
    ops.n_phot    = ops.a.adjoint() * ops.a;
    ops.n_exciton = ops.sigma.adjoint() * ops.sigma;
    ops.n_exc     = ops.n_phot + ops.n_exciton;
    return ops;
}

Mat jc_hamiltonian(const HilbertSpace& hs, double omega_x, double omega_c, double g) {
    const BareOperators ops = bare_operators(hs);
    Mat h = omega_x * ops.n_exciton + omega_c * ops.n_phot +
            g * (ops.a.adjoint() * ops.sigma + ops.a * ops.sigma.adjoint());
    return h;
}

double trace_error(const Mat& rho) { return std::abs(rho.trace() - cplx(1.0, 0.0)); }

double hermiticity_error(const Mat& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Mat& rho) {
    Mat herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("min_eigenvalue: eigensolver failed");
    }
    return solver.eigenvalues().minCoeff();
}

void validate_density(const Mat& rho, double tol) {
    if (rho.rows() != rho.cols()) {
        throw std::runtime_error("validate_density: matrix not square");
    }
    if (trace_error(rho) > tol) {
        throw std::runtime_error("validate_density: trace deviates from 1 by " +
                                 std::to_string(trace_error(rho)));
    }
    if (hermiticity_error(rho) > tol) {
        throw std::runtime_error("validate_density: not Hermitian within tolerance");
    }
    if (min_eigenvalue(rho) < -tol) {
        throw std::runtime_error("validate_density: negative eigenvalue " +
                                 std::to_string(min_eigenvalue(rho)));
    }
}

}  // namespace jcdyn
