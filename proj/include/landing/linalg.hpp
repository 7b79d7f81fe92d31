// Dense linear-algebra kernels: symmetric/skew projections, SPD square
// roots, orthogonal complements, and Lyapunov solvers for SPD coefficient
// matrices.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace landing {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Shapes of the arguments do not match the operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input lies outside the mathematical domain (e.g. not SPD, not tangent).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A matrix that must have full column rank does not.
class RankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace linalg {

/// Numerical thresholds used by the whole toolkit. A single mutable
/// instance is reachable through tolerances(); adjust it once at startup,
/// before any concurrent use.
struct Tolerances {
    /// Relative symmetry defect accepted when validating symmetric inputs.
    double symmetry_rel = 1e-12;
    /// Full rank requires sigma_min > full_rank_rel * sigma_max.
    double full_rank_rel = 1e-10;
    /// SPD requires lambda_min > spd_eig_rel * lambda_max. Set to the square
    /// of full_rank_rel so that X'X is accepted exactly when X passes the
    /// rank test.
    double spd_eig_rel = 1e-20;
    /// Residual bound ||R*R - M||_F <= sqrt_residual_rel * ||M||_F.
    double sqrt_residual_rel = 1e-10;
    /// Residual bound ||A*S + S*A - C||_F <= lyapunov_residual_rel * ||C||_F.
    double lyapunov_residual_rel = 1e-10;
    /// Defining residuals of an orthogonal complement (absolute).
    double orth_residual_abs = 1e-12;
    /// Tangent-space membership: ||xi'Y + Y'xi|| <= tangent_rel * ||xi|| * ||Y||.
    /// Loose enough that integrator drift does not cause spurious rejections.
    double tangent_rel = 1e-8;
    /// Vectors with ||xi|| <= vector_zero_rel * ||Y|| count as the zero
    /// element of any space at Y; membership checks cannot resolve below the
    /// rounding of the arithmetic that produced them.
    double vector_zero_rel = 1e-13;
    /// Gram-cache consistency of a manifold point, relative.
    double gram_cache_rel = 1e-12;
};

inline Tolerances& tolerances() {
    static Tolerances tols;
    return tols;
}

namespace detail {

inline void require_square(const Matrix& a, const char* op) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(op) + ": expected a square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

} // namespace detail

/// Symmetric k x k matrix; the stored entries satisfy A == A' exactly.
class SymMatrix {
public:
    explicit SymMatrix(Matrix a) : entries_(std::move(a)) {
        detail::require_square(entries_, "SymMatrix");
        const double defect = (entries_ - entries_.transpose()).norm();
        if (defect > tolerances().symmetry_rel * std::max(1.0, entries_.norm())) {
            throw DomainError("SymMatrix: input is not symmetric");
        }
        // Re-project so the invariant holds bit-exactly.
        entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
    }

    const Matrix& matrix() const { return entries_; }
    Index size() const { return entries_.rows(); }

private:
    Matrix entries_;
};

/// Skew-symmetric k x k matrix; A + A' == 0 exactly.
class SkewMatrix {
public:
    explicit SkewMatrix(Matrix a) : entries_(std::move(a)) {
        detail::require_square(entries_, "SkewMatrix");
        const double defect = (entries_ + entries_.transpose()).norm();
        if (defect > tolerances().symmetry_rel * std::max(1.0, entries_.norm())) {
            throw DomainError("SkewMatrix: input is not skew-symmetric");
        }
        entries_ = 0.5 * (entries_ - entries_.transpose()).eval();
        entries_.diagonal().setZero();
    }

    const Matrix& matrix() const { return entries_; }
    Index size() const { return entries_.rows(); }

private:
    Matrix entries_;
};

/// Symmetric positive-definite p x p matrix. Construction verifies symmetry
/// and that the smallest eigenvalue is positive beyond the SPD threshold.
class SpdMatrix {
public:
    explicit SpdMatrix(Matrix a) : entries_(std::move(a)) {
        detail::require_square(entries_, "SpdMatrix");
        const double scale = std::max(1.0, entries_.norm());
        if ((entries_ - entries_.transpose()).norm() > tolerances().symmetry_rel * scale) {
            throw DomainError("SpdMatrix: input is not symmetric");
        }
        entries_ = 0.5 * (entries_ + entries_.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
        min_eig_ = es.eigenvalues().minCoeff();
        max_eig_ = es.eigenvalues().maxCoeff();
        if (!(min_eig_ > tolerances().spd_eig_rel * std::max(max_eig_, 0.0)) || min_eig_ <= 0.0) {
            throw DomainError("SpdMatrix: smallest eigenvalue " + std::to_string(min_eig_) +
                              " is not positive");
        }
    }

    const Matrix& matrix() const { return entries_; }
    Index size() const { return entries_.rows(); }
    double min_eigenvalue() const { return min_eig_; }
    double max_eigenvalue() const { return max_eig_; }

private:
    Matrix entries_;
    double min_eig_ = 0.0;
    double max_eig_ = 0.0;
};

/// Symmetric part (A + A')/2.
inline SymMatrix sym(const Matrix& a) {
    detail::require_square(a, "sym");
    return SymMatrix(0.5 * (a + a.transpose()));
}

/// Skew-symmetric part (A - A')/2.
inline SkewMatrix skew(const Matrix& a) {
    detail::require_square(a, "skew");
    return SkewMatrix(0.5 * (a - a.transpose()));
}

/// Symmetric positive-definite square root: returns R with R*R = M.
inline SpdMatrix spd_sqrt(const SpdMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
    if (es.info() != Eigen::Success) {
        throw DomainError("spd_sqrt: eigendecomposition failed");
    }
    const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix r = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
    r = 0.5 * (r + r.transpose()).eval();
    const double residual = (r * r - m.matrix()).norm();
    if (residual > tolerances().sqrt_residual_rel * std::max(1.0, m.matrix().norm())) {
        throw DomainError("spd_sqrt: residual " + std::to_string(residual) + " too large");
    }
    return SpdMatrix(std::move(r));
}

/// Relative full-rank test on the singular values of an n x p matrix.
inline bool has_full_column_rank(const Matrix& x) {
    if (x.cols() > x.rows() || x.cols() < 1) return false;
    Eigen::JacobiSVD<Matrix> svd(x);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1) > tolerances().full_rank_rel * sv(0);
}

/// Orthonormal basis of the orthogonal complement of range(X): returns an
/// n x (n-p) matrix Q with X'Q = 0 and Q'Q = I.
inline Matrix orth_complement(const Matrix& x) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (p > n || p < 1) {
        throw DimensionError("orth_complement: need n >= p >= 1");
    }
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > tolerances().full_rank_rel * sv(0))) {
        throw RankError("orth_complement: matrix is numerically rank deficient");
    }
    return svd.matrixU().rightCols(n - p);
}

namespace detail {

// Core of both Lyapunov solvers: with A = Q diag(l) Q', the equation
// A*S + S*A = C transforms to (l_i + l_j) * S~_ij = C~_ij.
inline Matrix lyapunov_eig_solve(const SpdMatrix& a, const Matrix& c, const char* op) {
    if (a.size() != c.rows()) {
        throw DimensionError(std::string(op) + ": coefficient and right-hand side sizes differ");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    if (es.info() != Eigen::Success) {
        throw DomainError(std::string(op) + ": eigendecomposition failed");
    }
    const Vector& lam = es.eigenvalues();
    const Matrix& q = es.eigenvectors();
    Matrix ct = q.transpose() * c * q;
    for (Index i = 0; i < ct.rows(); ++i) {
        for (Index j = 0; j < ct.cols(); ++j) {
            ct(i, j) /= lam(i) + lam(j);
        }
    }
    Matrix s = q * ct * q.transpose();
    const double residual = (a.matrix() * s + s * a.matrix() - c).norm();
    if (residual > tolerances().lyapunov_residual_rel * std::max(1.0, c.norm())) {
        throw DomainError(std::string(op) + ": residual " + std::to_string(residual) +
                          " exceeds tolerance; coefficient matrix is too ill-conditioned");
    }
    return s;
}

} // namespace detail

/// Unique symmetric solution S of A*S + S*A = C for SPD A and symmetric C.
inline SymMatrix solve_lyapunov_spd(const SpdMatrix& a, const SymMatrix& c) {
    Matrix s = detail::lyapunov_eig_solve(a, c.matrix(), "solve_lyapunov_spd");
    return SymMatrix(0.5 * (s + s.transpose()));
}

/// Unique skew-symmetric solution W of W*A + A*W = C for SPD A and skew C.
/// Skewness of the result is asserted by the SkewMatrix constructor.
inline SkewMatrix solve_lyapunov_skew(const SpdMatrix& a, const SkewMatrix& c) {
    Matrix w = detail::lyapunov_eig_solve(a, c.matrix(), "solve_lyapunov_skew");
    return SkewMatrix(0.5 * (w - w.transpose()));
}

} // namespace linalg
} // namespace landing
