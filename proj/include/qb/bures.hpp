#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <string>

#include "qb/errors.hpp"
#include "qb/tolerances.hpp"

// 2-Wasserstein geometry of centered Gaussians: the squared distance between
// covariances S1, S2 is tr[S1 + S2 - 2*(S1^{1/2} S2 S1^{1/2})^{1/2}], realized
// by the linear pushforward map T with T*S1*T = S2. All matrix functions go
// through symmetric eigendecomposition with eigenvalues clamped at a shared
// floor, which is the single singularity policy of the module.

namespace qb {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

template <class Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        std::ostringstream os;
        os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw ContractError(os.str());
    }
}

template <class Derived>
double relative_asymmetry(const Eigen::MatrixBase<Derived>& m) {
    const double norm = m.norm();
    if (norm == 0.0) return 0.0;
    return (m - m.transpose()).norm() / norm;
}

template <class Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, const char* what) {
    require_square(m, what);
    const double drift = relative_asymmetry(m);
    if (drift > tol().symmetry) {
        std::ostringstream os;
        os << what << ": matrix is not symmetric (relative asymmetry " << drift << ")";
        throw ContractError(os.str());
    }
}

template <class Derived>
Eigen::SelfAdjointEigenSolver<DenseMatrix<typename Derived::Scalar>>
spd_eigs(const Eigen::MatrixBase<Derived>& S, const char* what) {
    require_symmetric(S, what);
    using Mat = DenseMatrix<typename Derived::Scalar>;
    const Mat sym = ((S + S.transpose()) / 2).eval();
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw SingularityError(std::string(what) + ": eigendecomposition failed");
    }
    return solver;
}

} // namespace detail

/// Symmetrize in place against roundoff drift.
template <class Derived>
DenseMatrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return ((m + m.transpose()) / 2).eval();
}

/// Clamp the spectrum of a nominally-SPD matrix at the eigen floor.
template <class Derived>
DenseMatrix<typename Derived::Scalar> spd_clamp(const Eigen::MatrixBase<Derived>& S,
                                                double floor = tol().eigen_floor) {
    using Scalar = typename Derived::Scalar;
    auto solver = detail::spd_eigs(S, "spd_clamp");
    if (solver.eigenvalues().minCoeff() >= static_cast<Scalar>(floor)) return symmetrized(S);
    DenseVector<Scalar> clamped =
        solver.eigenvalues().cwiseMax(static_cast<Scalar>(floor));
    return symmetrized(solver.eigenvectors() * clamped.asDiagonal() *
                       solver.eigenvectors().transpose());
}

template <class Derived>
typename Derived::Scalar smallest_eigenvalue(const Eigen::MatrixBase<Derived>& S) {
    return detail::spd_eigs(S, "smallest_eigenvalue").eigenvalues().minCoeff();
}

/// Principal square root of an SPD matrix, eigenvalues clamped at the floor.
template <class Derived>
DenseMatrix<typename Derived::Scalar> spd_sqrt(const Eigen::MatrixBase<Derived>& S) {
    using Scalar = typename Derived::Scalar;
    auto solver = detail::spd_eigs(S, "spd_sqrt");
    DenseVector<Scalar> roots = solver.eigenvalues()
                                    .cwiseMax(static_cast<Scalar>(tol().eigen_floor))
                                    .cwiseSqrt();
    return symmetrized(solver.eigenvectors() * roots.asDiagonal() *
                       solver.eigenvectors().transpose());
}

/// Inverse square root. Unlike spd_sqrt this refuses near-singular input,
/// since clamping would silently amplify noise by 1/floor.
template <class Derived>
DenseMatrix<typename Derived::Scalar> spd_sqrt_inv(const Eigen::MatrixBase<Derived>& S) {
    using Scalar = typename Derived::Scalar;
    auto solver = detail::spd_eigs(S, "spd_sqrt_inv");
    const Scalar min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < static_cast<Scalar>(tol().eigen_floor)) {
        std::ostringstream os;
        os << "spd_sqrt_inv: matrix is near singular, smallest eigenvalue " << min_eig
           << " < " << tol().eigen_floor;
        throw SingularityError(os.str());
    }
    DenseVector<Scalar> inv_roots = solver.eigenvalues().cwiseSqrt().cwiseInverse();
    return symmetrized(solver.eigenvectors() * inv_roots.asDiagonal() *
                       solver.eigenvectors().transpose());
}

/// Squared Bures distance tr[S1 + S2 - 2*(S1^{1/2} S2 S1^{1/2})^{1/2}],
/// evaluated in the equivalent Procrustes form |S1^{1/2} - S2^{1/2} U|_F^2
/// with U the polar factor of S2^{1/2} S1^{1/2}. The difference form does
/// not cancel, so coinciding covariances give ~0 instead of trace roundoff.
template <class D1, class D2>
typename D1::Scalar bures_distance_sq(const Eigen::MatrixBase<D1>& S1,
                                      const Eigen::MatrixBase<D2>& S2) {
    using Mat = DenseMatrix<typename D1::Scalar>;
    if (S1.rows() != S2.rows() || S1.cols() != S2.cols()) {
        throw ContractError("bures_distance_sq: dimension mismatch");
    }
    detail::require_symmetric(S1, "bures_distance_sq");
    if (S1.derived() == S2.derived()) return 0; // identity case is exact
    const Mat a = spd_sqrt(S1);
    const Mat b = spd_sqrt(S2);
    Eigen::JacobiSVD<Mat> svd((b * a).eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat aligned = b * (svd.matrixU() * svd.matrixV().transpose());
    return (a - aligned).squaredNorm();
}

/// Linear map pushing N(0,S1) onto N(0,S2):
///   T = S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2},  T*S1*T = S2.
template <class D1, class D2>
DenseMatrix<typename D1::Scalar> transport_map(const Eigen::MatrixBase<D1>& S1,
                                               const Eigen::MatrixBase<D2>& S2) {
    if (S1.rows() != S2.rows() || S1.cols() != S2.cols()) {
        throw ContractError("transport_map: dimension mismatch");
    }
    const auto root = spd_sqrt(S1);
    const auto inv_root = spd_sqrt_inv(S1);
    const auto cross = spd_sqrt((root * S2 * root).eval());
    return symmetrized(inv_root * cross * inv_root);
}

/// Solve L*S + S*L = xi for symmetric L, working in the eigenbasis of S
/// where the equation is elementwise: L~_ij = xi~_ij / (lambda_i + lambda_j).
template <class D1, class D2>
DenseMatrix<typename D1::Scalar> lyapunov_solve(const Eigen::MatrixBase<D1>& S,
                                                const Eigen::MatrixBase<D2>& xi) {
    using Scalar = typename D1::Scalar;
    detail::require_symmetric(xi, "lyapunov_solve (xi)");
    if (S.rows() != xi.rows()) throw ContractError("lyapunov_solve: dimension mismatch");
    auto solver = detail::spd_eigs(S, "lyapunov_solve");
    const DenseVector<Scalar> lambda =
        solver.eigenvalues().cwiseMax(static_cast<Scalar>(tol().eigen_floor));
    const DenseMatrix<Scalar>& V = solver.eigenvectors();
    DenseMatrix<Scalar> rotated = V.transpose() * symmetrized(xi) * V;
    for (Eigen::Index i = 0; i < rotated.rows(); ++i) {
        for (Eigen::Index j = 0; j < rotated.cols(); ++j) {
            rotated(i, j) /= lambda(i) + lambda(j);
        }
    }
    return symmetrized(V * rotated * V.transpose());
}

/// Exponential map of the Bures geometry: with L the Lyapunov solution for
/// tangent xi at S, returns (I+L) S (I+L). Throws StepTooLargeError when
/// I+L is singular, i.e. the step left the SPD cone.
template <class D1, class D2>
DenseMatrix<typename D1::Scalar> bures_exp(const Eigen::MatrixBase<D1>& S,
                                           const Eigen::MatrixBase<D2>& xi) {
    using Scalar = typename D1::Scalar;
    using Mat = DenseMatrix<Scalar>;
    const Mat L = lyapunov_solve(S, xi);
    const Mat step = Mat::Identity(L.rows(), L.cols()) + L;
    Eigen::SelfAdjointEigenSolver<Mat> step_eigs(step);
    if (step_eigs.info() != Eigen::Success ||
        step_eigs.eigenvalues().cwiseAbs().minCoeff() < static_cast<Scalar>(1e-12)) {
        throw StepTooLargeError("bures_exp: I + L is singular; shrink the step");
    }
    Mat result = symmetrized(step * S * step);
    if (smallest_eigenvalue(result) < static_cast<Scalar>(tol().eigen_floor)) {
        result = spd_clamp(result);
    }
    return result;
}

/// Inverse of bures_exp, built from the transport map: the tangent xi with
/// Lyapunov solution T - I, so xi = T*S1 + S1*T - 2*S1.
template <class D1, class D2>
DenseMatrix<typename D1::Scalar> bures_log(const Eigen::MatrixBase<D1>& S1,
                                           const Eigen::MatrixBase<D2>& S2) {
    const auto T = transport_map(S1, S2);
    return symmetrized(T * S1 + S1 * T - 2 * S1.derived());
}

/// Squared norm of tangent xi at S: tr(L S L) with L the Lyapunov solution.
/// For xi = bures_log(S1,S2) this equals the squared Bures distance.
template <class D1, class D2>
typename D1::Scalar spd_tangent_norm_sq(const Eigen::MatrixBase<D1>& S,
                                        const Eigen::MatrixBase<D2>& xi) {
    using Scalar = typename D1::Scalar;
    const auto L = lyapunov_solve(S, xi);
    return std::max(Scalar((L * S.derived() * L).trace()), Scalar(0));
}

/// One mixture component: mean, covariance and a factor with
/// covariance = factor * factor^T. The factor is not kept triangular; the
/// gradient update does not preserve triangularity and nothing downstream
/// needs it.
struct GaussianComponent {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd factor;

    Eigen::Index dim() const { return mean.size(); }
};

/// Build a component from mean and covariance; symmetrizes, clamps the
/// spectrum at the eigen floor and computes a Cholesky factor.
inline GaussianComponent make_gaussian(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance) {
    detail::require_symmetric(covariance, "make_gaussian");
    if (mean.size() != covariance.rows()) {
        throw ContractError("make_gaussian: mean/covariance dimension mismatch");
    }
    Eigen::MatrixXd cov = spd_clamp(covariance);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    Eigen::MatrixXd factor;
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
    } else {
        // Borderline spectrum: fall back to the symmetric square root.
        factor = spd_sqrt(cov);
    }
    return GaussianComponent{std::move(mean), std::move(cov), std::move(factor)};
}

inline void validate_gaussian(const GaussianComponent& c) {
    if (c.mean.size() != c.covariance.rows() || c.covariance.rows() != c.covariance.cols() ||
        c.factor.rows() != c.covariance.rows() || c.factor.cols() != c.covariance.cols()) {
        throw ContractError("GaussianComponent: inconsistent dimensions");
    }
    const double norm = c.covariance.norm();
    const double drift = (c.factor * c.factor.transpose() - c.covariance).norm();
    if (drift > tol().symmetry * std::max(norm, 1.0)) {
        throw ContractError("GaussianComponent: factor * factor^T does not match covariance");
    }
}

/// Squared 2-Wasserstein distance between Gaussians:
/// squared mean distance plus squared Bures distance of the covariances.
inline double gaussian_w2_sq(const GaussianComponent& a, const GaussianComponent& b) {
    if (a.dim() != b.dim()) throw ContractError("gaussian_w2_sq: dimension mismatch");
    return (a.mean - b.mean).squaredNorm() + bures_distance_sq(a.covariance, b.covariance);
}

/// Gradient of L -> 0.5 * bures_distance_sq(L L^T, target) at c.factor,
/// namely (I - T) L with T the transport map from c.covariance to target.
inline Eigen::MatrixXd bures_grad_cholesky(const GaussianComponent& c,
                                           const Eigen::MatrixXd& target_cov) {
    const Eigen::MatrixXd T = transport_map(c.covariance, target_cov);
    return (Eigen::MatrixXd::Identity(T.rows(), T.cols()) - T) * c.factor;
}

} // namespace qb
