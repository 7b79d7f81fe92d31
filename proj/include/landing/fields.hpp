// The landing field, its components, and the PLAM comparison field. Off the
// Stiefel manifold these are plain ambient matrices (neither tangent nor
// normal to St(p,n)), so all three return raw n x p matrices.

#pragma once

#include "landing/geometry.hpp"
#include "landing/linalg.hpp"
#include "landing/objective.hpp"

#include <utility>

namespace landing {

/// Relative gradient psi(X) = 2 skew(grad f(X) X'), an n x n skew matrix.
inline linalg::SkewMatrix relative_gradient_psi(const Matrix& x, const Objective& obj) {
    const Matrix g = obj.gradient(x);
    return linalg::SkewMatrix(g * x.transpose() - x * g.transpose());
}

/// Landing field Lambda(X) = psi(X) X + lambda X (X'X - I). The two summands
/// are Frobenius-orthogonal for every full-rank X.
inline Matrix landing_field(const Matrix& x, const Objective& obj, const LandingParams& params) {
    const Matrix g = obj.gradient(x);
    const Matrix relative = g * (x.transpose() * x) - x * (g.transpose() * x);
    return relative + params.lambda * geometry::penalty_gradient(x);
}

/// PLAM field grad f(X) - X sym(grad f(X)' X) + lambda X (X'X - I). Unlike
/// the landing field, its first two terms are not orthogonal to the penalty
/// gradient.
inline Matrix plam_field(const Matrix& x, const Objective& obj, const LandingParams& params) {
    const Matrix g = obj.gradient(x);
    const Matrix gtx = g.transpose() * x;
    return g - 0.5 * x * (gtx + gtx.transpose()) + params.lambda * geometry::penalty_gradient(x);
}

/// The two stationarity residuals (||psi(X) X||_F, ||grad N(X)||_F); their
/// joint vanishing characterizes critical points of f relative to St(p,n).
inline std::pair<double, double> landing_residual(const Matrix& x, const Objective& obj,
                                                  const LandingParams& /*params*/) {
    const Matrix g = obj.gradient(x);
    const Matrix relative = g * (x.transpose() * x) - x * (g.transpose() * x);
    return {relative.norm(), geometry::penalty_gradient(x).norm()};
}

} // namespace landing
