// Geometry of the generalized Stiefel manifold St_M(p,n) = {Y : Y'Y = M}:
// tangent and normal spaces, the extended canonical metric and its
// alternatives, projections, and Riemannian gradients.

#pragma once

#include "landing/linalg.hpp"
#include "landing/objective.hpp"

#include <optional>
#include <utility>

namespace landing::geometry {

using linalg::SkewMatrix;
using linalg::SpdMatrix;
using linalg::SymMatrix;

/// Dimension of St_M(p,n) as an embedded submanifold: np - p(p+1)/2.
constexpr Index manifold_dimension(Index n, Index p) {
    return n * p - p * (p + 1) / 2;
}

/// An n x p matrix of full column rank, n >= p >= 1. Rank is checked at
/// construction against the relative singular-value threshold.
class FullRankMatrix {
public:
    explicit FullRankMatrix(Matrix x) : entries_(std::move(x)) {
        if (entries_.cols() < 1 || entries_.rows() < entries_.cols()) {
            throw DimensionError("FullRankMatrix: need n >= p >= 1");
        }
        if (!linalg::has_full_column_rank(entries_)) {
            throw RankError("FullRankMatrix: numerically rank deficient");
        }
    }

    const Matrix& matrix() const { return entries_; }
    Index rows() const { return entries_.rows(); }
    Index cols() const { return entries_.cols(); }

private:
    Matrix entries_;
};

/// A point Y on St_M(p,n) with M = Y'Y, carrying cached geometry: the Gram
/// matrix, its Cholesky factorization (all applications of (Y'Y)^-1 go
/// through solves, never an explicit inverse), and an orthonormal basis of
/// the complement of range(Y).
class GeneralizedStiefelPoint {
public:
    explicit GeneralizedStiefelPoint(FullRankMatrix x)
        : x_(x.matrix()),
          gram_(x_.transpose() * x_),
          gram_llt_(gram_.matrix()),
          complement_(linalg::orth_complement(x_)) {}

    explicit GeneralizedStiefelPoint(Matrix x) : GeneralizedStiefelPoint(FullRankMatrix(std::move(x))) {}

    Index n() const { return x_.rows(); }
    Index p() const { return x_.cols(); }
    const Matrix& matrix() const { return x_; }
    const SpdMatrix& gram() const { return gram_; }
    const Matrix& complement() const { return complement_; }

    /// (Y'Y)^-1 * B via Cholesky solve.
    Matrix gram_solve(const Matrix& b) const { return gram_llt_.solve(b); }

    /// B * (Y'Y)^-1 via Cholesky solve on the transpose.
    Matrix gram_solve_right(const Matrix& b) const {
        return gram_llt_.solve(b.transpose()).transpose();
    }

private:
    Matrix x_;
    SpdMatrix gram_;
    Eigen::LLT<Matrix> gram_llt_;
    Matrix complement_;
};

/// Element of the tangent space at Y: xi'Y + Y'xi = 0 up to the membership
/// tolerance.
class TangentVector {
public:
    TangentVector(GeneralizedStiefelPoint base, Matrix value)
        : base_(std::move(base)), value_(std::move(value)) {
        if (value_.rows() != base_.n() || value_.cols() != base_.p()) {
            throw DimensionError("TangentVector: value shape does not match base point");
        }
        const double base_norm = base_.matrix().norm();
        if (value_.norm() <= linalg::tolerances().vector_zero_rel * base_norm) {
            return; // numerically the zero vector
        }
        const double residual =
            (value_.transpose() * base_.matrix() + base_.matrix().transpose() * value_).norm();
        if (residual > linalg::tolerances().tangent_rel * value_.norm() * base_norm) {
            throw DomainError("TangentVector: not in the tangent space (residual " +
                              std::to_string(residual) + ")");
        }
    }

    const GeneralizedStiefelPoint& base() const { return base_; }
    const Matrix& matrix() const { return value_; }

private:
    GeneralizedStiefelPoint base_;
    Matrix value_;
};

/// The two normal-space conventions in play. They span different subspaces
/// for M != I, so a normal vector is tagged with the metric it belongs to:
///   canonical_g:  N = Y (Y'Y)^-1 S, the complement under the extended
///                 canonical metric g;
///   euclidean:    N = Y S, the complement under the Frobenius inner product.
enum class NormalConvention { canonical_g, euclidean };

class NormalVector {
public:
    NormalVector(GeneralizedStiefelPoint base, Matrix value, NormalConvention tag)
        : base_(std::move(base)), value_(std::move(value)), tag_(tag) {
        if (value_.rows() != base_.n() || value_.cols() != base_.p()) {
            throw DimensionError("NormalVector: value shape does not match base point");
        }
        const double base_norm = base_.matrix().norm();
        if (value_.norm() <= linalg::tolerances().vector_zero_rel * base_norm) {
            return; // numerically the zero vector
        }
        const Matrix ytv = base_.matrix().transpose() * value_;
        Matrix reconstructed;
        Matrix coeff;
        if (tag_ == NormalConvention::canonical_g) {
            coeff = ytv; // S = Y'N for N = Y (Y'Y)^-1 S
            reconstructed = base_.matrix() * base_.gram_solve(0.5 * (coeff + coeff.transpose()));
        } else {
            coeff = base_.gram_solve(ytv); // S = (Y'Y)^-1 Y'N for N = Y S
            reconstructed = base_.matrix() * (0.5 * (coeff + coeff.transpose()));
        }
        if ((value_ - reconstructed).norm() > linalg::tolerances().tangent_rel * value_.norm() ||
            (coeff - coeff.transpose()).norm() >
                linalg::tolerances().tangent_rel * std::max(coeff.norm(), 1e-300)) {
            throw DomainError("NormalVector: value does not lie in the tagged normal space");
        }
    }

    const GeneralizedStiefelPoint& base() const { return base_; }
    const Matrix& matrix() const { return value_; }
    NormalConvention convention() const { return tag_; }

private:
    GeneralizedStiefelPoint base_;
    Matrix value_;
    NormalConvention tag_;
};

/// Squared feasibility violation N(X) = 1/4 ||X'X - I||_F^2; zero exactly on
/// the Stiefel manifold.
inline double stiefel_distance_penalty(const Matrix& x) {
    const Index p = x.cols();
    return 0.25 * (x.transpose() * x - Matrix::Identity(p, p)).squaredNorm();
}

/// Gradient of the penalty: X (X'X - I).
inline Matrix penalty_gradient(const Matrix& x) {
    const Index p = x.cols();
    return x * (x.transpose() * x - Matrix::Identity(p, p));
}

/// Tangent vector W*Y from a skew-symmetric n x n parameter.
inline TangentVector tangent_from_skew(const GeneralizedStiefelPoint& y, const SkewMatrix& w) {
    if (w.size() != y.n()) {
        throw DimensionError("tangent_from_skew: W must be n x n");
    }
    return TangentVector(y, w.matrix() * y.matrix());
}

/// Tangent vector Y (Y'Y)^-1 Omega + Yperp K from the minimal parameters
/// Omega (p x p skew) and K ((n-p) x p).
inline TangentVector tangent_from_omega_k(const GeneralizedStiefelPoint& y, const SkewMatrix& omega,
                                          const Matrix& k) {
    if (omega.size() != y.p()) {
        throw DimensionError("tangent_from_omega_k: Omega must be p x p");
    }
    if (k.rows() != y.n() - y.p() || k.cols() != y.p()) {
        throw DimensionError("tangent_from_omega_k: K must be (n-p) x p");
    }
    return TangentVector(y, y.matrix() * y.gram_solve(omega.matrix()) + y.complement() * k);
}

struct OmegaKDecomposition {
    SkewMatrix omega;
    Matrix k;
};

/// Inverse of tangent_from_omega_k: Omega = skew part of Y'xi, K = Yperp'xi.
/// The complement basis cached on the base point makes the round trip exact.
inline OmegaKDecomposition tangent_decompose_omega_k(const TangentVector& xi) {
    const auto& y = xi.base();
    Matrix ytxi = y.matrix().transpose() * xi.matrix();
    return OmegaKDecomposition{SkewMatrix(0.5 * (ytxi - ytxi.transpose())),
                               y.complement().transpose() * xi.matrix()};
}

/// The diffeomorphism X -> X M^(1/2), mapping St(p,n) onto St_M(p,n).
inline FullRankMatrix map_phi(const FullRankMatrix& x, const SpdMatrix& m) {
    if (m.size() != x.cols()) {
        throw DimensionError("map_phi: M must be p x p");
    }
    return FullRankMatrix(x.matrix() * linalg::spd_sqrt(m).matrix());
}

/// Inverse map Y -> Y M^(-1/2).
inline FullRankMatrix map_phi_inverse(const FullRankMatrix& y, const SpdMatrix& m) {
    if (m.size() != y.cols()) {
        throw DimensionError("map_phi_inverse: M must be p x p");
    }
    const Matrix root = linalg::spd_sqrt(m).matrix();
    Eigen::LLT<Matrix> llt(root);
    return FullRankMatrix(llt.solve(y.matrix().transpose()).transpose());
}

/// Canonical metric on the Stiefel manifold: <xi, (I - 1/2 X X') zeta>.
inline double canonical_metric(const Matrix& x, const Matrix& xi, const Matrix& zeta) {
    return (xi.array() * (zeta - 0.5 * x * (x.transpose() * zeta)).array()).sum();
}

/// Extension of the canonical metric to all of R^{n x p}_*:
///   g_Y(xi, zeta) = <xi, (I - 1/2 Y (Y'Y)^-1 Y') zeta (Y'Y)^-1>.
/// Reduces to canonical_metric when Y'Y = I; symmetric and positive definite.
inline double metric_g(const GeneralizedStiefelPoint& y, const Matrix& xi, const Matrix& zeta) {
    if (xi.rows() != y.n() || xi.cols() != y.p() || zeta.rows() != y.n() || zeta.cols() != y.p()) {
        throw DimensionError("metric_g: arguments must be n x p");
    }
    const Matrix b = y.gram_solve_right(zeta);
    const Matrix c = b - 0.5 * y.matrix() * y.gram_solve(y.matrix().transpose() * b);
    return (xi.array() * c.array()).sum();
}

struct EuclideanDecomposition {
    TangentVector tangent;
    NormalVector normal;
};

/// Frobenius-orthogonal splitting xi = xi_T + xi_N with xi_N = X S, where S
/// solves the Lyapunov equation (X'X) S + S (X'X) = 2 sym(X' xi).
inline EuclideanDecomposition euclidean_decompose(const GeneralizedStiefelPoint& x,
                                                  const Matrix& xi) {
    if (xi.rows() != x.n() || xi.cols() != x.p()) {
        throw DimensionError("euclidean_decompose: xi must be n x p");
    }
    const Matrix ytxi = x.matrix().transpose() * xi;
    const SymMatrix rhs(ytxi + ytxi.transpose());
    const SymMatrix s = linalg::solve_lyapunov_spd(x.gram(), rhs);
    Matrix normal_part = x.matrix() * s.matrix();
    return EuclideanDecomposition{TangentVector(x, xi - normal_part),
                                  NormalVector(x, std::move(normal_part), NormalConvention::euclidean)};
}

/// g-orthogonal projection of an ambient vector onto the normal space
/// N_Y = {Y (Y'Y)^-1 S}: the solution is S = sym(Y' xi), and the residual
/// xi - proj is tangent, hence g-orthogonal to every normal vector.
inline NormalVector canonical_normal_project(const GeneralizedStiefelPoint& y, const Matrix& xi) {
    if (xi.rows() != y.n() || xi.cols() != y.p()) {
        throw DimensionError("canonical_normal_project: xi must be n x p");
    }
    const Matrix ytxi = y.matrix().transpose() * xi;
    const Matrix s = 0.5 * (ytxi + ytxi.transpose());
    return NormalVector(y, y.matrix() * y.gram_solve(s), NormalConvention::canonical_g);
}

/// The tangent-space endomorphism Pi_X(xi) = xi X'X + X X' xi.
inline TangentVector pi_map(const GeneralizedStiefelPoint& x, const TangentVector& xi) {
    return TangentVector(x, xi.matrix() * x.gram().matrix() +
                                x.matrix() * (x.matrix().transpose() * xi.matrix()));
}

namespace detail {

// Pi_X^-1 via the Lyapunov equation X'zeta = Omega X'X + X'X Omega followed
// by Pi^-1(zeta) = X (X'X)^-1 Omega + Xperp Xperp' zeta (X'X)^-1.
inline Matrix pi_inverse_lyapunov(const GeneralizedStiefelPoint& x, const Matrix& zeta) {
    const Matrix ytz = x.matrix().transpose() * zeta;
    const SkewMatrix c(0.5 * (ytz - ytz.transpose()));
    const SkewMatrix omega = linalg::solve_lyapunov_skew(x.gram(), c);
    const Matrix perp_part = x.complement() * (x.complement().transpose() * zeta);
    return x.matrix() * x.gram_solve(omega.matrix()) + x.gram_solve_right(perp_part);
}

// Projector form (I - 1/2 X (X'X)^-1 X') zeta (X'X)^-1. For X'X = I this is
// Pi_X^-1 itself; for a general gram it equals Pi_X^-1 plus a Euclidean-normal
// component X S (the two coincide after tangent projection, and they pair
// identically with every tangent vector, which is what the metric uses).
inline Matrix pi_inverse_closed_form(const GeneralizedStiefelPoint& x, const Matrix& zeta) {
    return x.gram_solve_right(zeta - 0.5 * x.matrix() * x.gram_solve(x.matrix().transpose() * zeta));
}

} // namespace detail

/// Inverse of pi_map on the tangent space. Solves the skew Lyapunov equation
/// for the unique preimage; with assertions enabled, the tangent part of the
/// independent projector form is evaluated as a cross-check.
inline TangentVector pi_inverse(const GeneralizedStiefelPoint& x, const TangentVector& zeta) {
    Matrix xi = detail::pi_inverse_lyapunov(x, zeta.matrix());
#ifndef NDEBUG
    const Matrix closed = detail::pi_inverse_closed_form(x, zeta.matrix());
    const Matrix closed_tangent = euclidean_decompose(x, closed).tangent.matrix();
    if ((xi - closed_tangent).norm() > 1e-10 * std::max(xi.norm(), 1e-300)) {
        throw DomainError("pi_inverse: Lyapunov and projector-form routes disagree");
    }
#endif
    return TangentVector(x, std::move(xi));
}

/// Metric built from the Euclidean splitting and Pi_X:
///   g_X(xi, zeta) = <xi_T, Pi_X^-1(zeta_T)> + <xi_N, zeta_N>.
/// Agrees with metric_g whenever both arguments are tangent.
inline double metric_pi(const GeneralizedStiefelPoint& x, const Matrix& xi, const Matrix& zeta) {
    const EuclideanDecomposition dx = euclidean_decompose(x, xi);
    const EuclideanDecomposition dz = euclidean_decompose(x, zeta);
    const Matrix inv_t = detail::pi_inverse_lyapunov(x, dz.tangent.matrix());
    return (dx.tangent.matrix().array() * inv_t.array()).sum() +
           (dx.normal.matrix().array() * dz.normal.matrix().array()).sum();
}

/// Riemannian gradient of f at X on (St_{X'X}(p,n), g): psi(X) X with
/// psi(X) = 2 skew(grad f(X) X'). Tangent by construction.
inline TangentVector riemannian_gradient_canonical(const GeneralizedStiefelPoint& x,
                                                   const Objective& obj) {
    const Matrix g = obj.gradient(x.matrix());
    return TangentVector(x, g * x.gram().matrix() - x.matrix() * (g.transpose() * x.matrix()));
}

/// Riemannian gradient under the Euclidean metric: the tangent part of the
/// Euclidean splitting of grad f(X).
inline TangentVector riemannian_gradient_euclidean(const GeneralizedStiefelPoint& x,
                                                   const Objective& obj) {
    return euclidean_decompose(x, obj.gradient(x.matrix())).tangent;
}

} // namespace landing::geometry
