// liouville.cpp — generator assembly and dense solvers.

#include "jcdyn/liouville.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

namespace jcdyn {

Vec vectorize(const Mat& rho) {
    return Eigen::Map<const Vec>(rho.data(), rho.size());
}

Mat unvectorize(const Vec& v, int dim) {
    if (v.size() != Eigen::Index(dim) * dim) {
        throw std::invalid_argument("unvectorize: length does not match dim^2");
    }
    return Eigen::Map<const Mat>(v.data(), dim, dim);
}

Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

cplx trace_of_product(const Mat& A, const Mat& B) {
    return (A.transpose().cwiseProduct(B)).sum();
}

Mat dissipator_matrix(const Mat& X) {
    const Eigen::Index d = X.rows();
    const Mat eye = Mat::Identity(d, d);
    const Mat xdx = X.adjoint() * X;
    return 2.0 * kron(X.conjugate(), X) - kron(eye, xdx) - kron(xdx.transpose(), eye);
}

Mat hamiltonian_superop(const Mat& H) {
    const Eigen::Index d = H.rows();
    const Mat eye = Mat::Identity(d, d);
    return cplx(0.0, -1.0) * (kron(eye, H) - kron(H.transpose(), eye));
}

Superoperator full_liouvillian(const HilbertSpace& hs, const SystemParams& p) {
    p.validate();
    const BareOperators ops = bare_operators(hs);
    const Mat H = jc_hamiltonian(hs, p.omega_x, p.omega_c, p.g);

    Mat L = hamiltonian_superop(H);
    L += 0.5 * p.kappa * dissipator_matrix(ops.a);
    L += 0.5 * p.gamma_x * dissipator_matrix(ops.sigma);
    L += 0.5 * p.P_x * dissipator_matrix(Mat(ops.sigma.adjoint()));
    L += 0.5 * p.P_theta * dissipator_matrix(Mat(ops.sigma * ops.a.adjoint()));
    if (p.gamma_theta != 0.0) {
        L += 0.5 * p.gamma_theta * dissipator_matrix(Mat(ops.sigma.adjoint() * ops.a));
    }
    return {hs, std::move(L)};
}

Superoperator no_gain_liouvillian(const HilbertSpace& hs, const SystemParams& p) {
    p.validate();
    const BareOperators ops = bare_operators(hs);
    const Mat H = jc_hamiltonian(hs, p.omega_x, p.omega_c, p.g);
    const Mat eye = Mat::Identity(hs.dim, hs.dim);

    // Anti-commutator halves only for the decay channels (no refilling jumps):
    // together with -i[H, .] this is -i (K rho - rho K^dag).
    auto damping_half = [&eye](const Mat& xdx) -> Mat {
        return -kron(eye, xdx) - kron(xdx.transpose(), eye);
    };

    Mat L = hamiltonian_superop(H);
    L += 0.5 * p.kappa * damping_half(ops.n_phot);
    L += 0.5 * p.gamma_x * damping_half(ops.n_exciton);
    L += 0.5 * p.P_theta * dissipator_matrix(Mat(ops.sigma * ops.a.adjoint()));
    if (p.gamma_theta != 0.0) {
        L += 0.5 * p.gamma_theta * dissipator_matrix(Mat(ops.sigma.adjoint() * ops.a));
    }
    return {hs, std::move(L)};
}

SteadyStateResult solve_steady_state(const Superoperator& L) {
    const int d  = L.space.dim;
    const int d2 = d * d;
    if (L.mat.rows() != d2 || L.mat.cols() != d2) {
        throw std::invalid_argument("solve_steady_state: superoperator has wrong shape");
    }

    Eigen::BDCSVD<Mat> svd(L.mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();  // descending
    const double s_min  = s(d2 - 1);
    const double s_next = s(d2 - 2);
    const double isolation = s_next / std::max(s_min, 1e-300);

    SteadyStateResult result;
    result.isolation     = isolation;
    result.used_fallback = false;

    Vec v;
    if (isolation >= 1e3) {
        v = svd.matrixV().col(d2 - 1);
    } else {
        // Smallest singular value not isolated: solve min ||L x|| subject to a
        // unit-trace row appended with weight comparable to ||L||.
        result.used_fallback = true;
        const double w = std::max(L.mat.cwiseAbs().maxCoeff(), 1.0);
        Mat aug(d2 + 1, d2);
        aug.topRows(d2) = L.mat;
        Eigen::RowVectorXcd trace_row = Eigen::RowVectorXcd::Zero(d2);
        for (int k = 0; k < d; ++k) trace_row(k * d + k) = w;
        aug.bottomRows(1) = trace_row;
        Vec rhs = Vec::Zero(d2 + 1);
        rhs(d2) = w;
        v = aug.colPivHouseholderQr().solve(rhs);
        const double residual = (L.mat * v).norm() / (L.mat.norm() * v.norm());
        if (residual > 1e-8) {
            throw std::runtime_error(
                "solve_steady_state: degenerate or absent steady state (null space "
                "not one-dimensional)");
        }
    }

    Mat rho = unvectorize(v, d);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-12 * rho.norm()) {
        throw std::runtime_error("solve_steady_state: null vector has vanishing trace");
    }
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint().eval());
    return {std::move(rho), isolation, result.used_fallback};
}

Mat steady_state(const Superoperator& L) { return solve_steady_state(L).rho; }

Mat evolve(const Superoperator& L, const Mat& rho0, double t) {
    if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
    if (rho0.rows() != L.space.dim || rho0.cols() != L.space.dim) {
        throw std::invalid_argument("evolve: state dimension mismatch");
    }
    if (t == 0.0) return rho0;
    Mat prop = (L.mat * t).exp();
    return unvectorize(prop * vectorize(rho0), L.space.dim);
}

}  // namespace jcdyn
