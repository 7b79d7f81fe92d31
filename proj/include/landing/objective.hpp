// Differentiable objective handles and the regularization parameter of the
// landing field.

#pragma once

#include "landing/linalg.hpp"

#include <functional>
#include <string>
#include <utility>

namespace landing {

/// A differentiable function f on n x p matrices together with its Euclidean
/// gradient. Implementations must be reentrant: value() and gradient() may be
/// called concurrently from several threads.
struct Objective {
    std::string name;
    std::function<double(const Matrix&)> value;
    std::function<Matrix(const Matrix&)> gradient;
};

/// Regularization weight of the penalty component of the landing field.
struct LandingParams {
    double lambda = 1.0;

    explicit LandingParams(double l) : lambda(l) {
        if (!(lambda > 0.0)) {
            throw DomainError("LandingParams: lambda must be positive");
        }
    }
};

/// Opt-in validation that obj.gradient matches central finite differences of
/// obj.value at X. Returns the worst relative entry error.
inline double validate_gradient(const Objective& obj, const Matrix& x, double h = 1e-6) {
    const Matrix g = obj.gradient(x);
    Matrix fd(x.rows(), x.cols());
    Matrix probe = x;
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            const double saved = probe(i, j);
            probe(i, j) = saved + h;
            const double fp = obj.value(probe);
            probe(i, j) = saved - h;
            const double fm = obj.value(probe);
            probe(i, j) = saved;
            fd(i, j) = (fp - fm) / (2.0 * h);
        }
    }
    const double scale = std::max(1.0, g.norm());
    return (fd - g).norm() / scale;
}

} // namespace landing
