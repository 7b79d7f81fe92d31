// Numerical integration of the landing system dX/dt = -Lambda(X) (and the
// PLAM variant): explicit Euler, classic RK4, and an adaptive RKF45 pair,
// with trajectory recording, stopping rules, and a falsifiable guard on the
// monotone decrease of the penalty.

#pragma once

#include "landing/fields.hpp"
#include "landing/geometry.hpp"
#include "landing/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace landing::flow {

enum class Scheme { explicit_euler, rk4, rkf45_adaptive };
enum class FieldKind { landing, plam };
enum class Termination { t_max, residual_tol, rank_failure };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::t_max: return "t_max";
        case Termination::residual_tol: return "residual_tol";
        case Termination::rank_failure: return "rank_failure";
    }
    return "unknown";
}

/// Raised when the penalty increases along a landing trajectory by more than
/// the integrator slack; the exact flow is monotone, so this flags a step
/// size too large for the problem.
class NonmonotonePenaltyError : public std::runtime_error {
public:
    NonmonotonePenaltyError(double t, double increase, double slack)
        : std::runtime_error("penalty increased by " + std::to_string(increase) + " at t = " +
                             std::to_string(t) + ", exceeding integrator slack " +
                             std::to_string(slack) + "; reduce dt"),
          t_(t), increase_(increase), slack_(slack) {}

    double t() const { return t_; }
    double increase() const { return increase_; }
    double slack() const { return slack_; }

private:
    double t_, increase_, slack_;
};

struct IntegratorConfig {
    Scheme scheme = Scheme::rk4;
    /// Fixed step size; non-positive selects the default 0.01 / lambda,
    /// which resolves the rate-2*lambda penalty dynamics.
    double dt = 0.0;
    /// Integration horizon; non-positive selects the default 20 / lambda.
    double t_max = 0.0;
    /// Per-step error control for rkf45: accept when the embedded-pair
    /// Frobenius error is at most abs_tol + rel_tol * ||X||.
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    /// Keep every record_every-th accepted step (plus the first and last).
    int record_every = 1;
    /// Stop once ||field(X)||_F falls below this.
    double residual_tol = 1e-8;
};

/// Config with dt and t_max resolved from lambda.
inline IntegratorConfig default_config(const LandingParams& params) {
    IntegratorConfig cfg;
    cfg.dt = 0.01 / params.lambda;
    cfg.t_max = 20.0 / params.lambda;
    return cfg;
}

struct TrajectorySample {
    double t = 0.0;
    Matrix x;
    double f = 0.0;
    double penalty = 0.0;
    double residual = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Termination terminated_by = Termination::t_max;
    Index n = 0;
    Index p = 0;
};

namespace detail {

inline Matrix eval_field(FieldKind kind, const Matrix& x, const Objective& obj,
                         const LandingParams& params) {
    return kind == FieldKind::landing ? landing_field(x, obj, params)
                                      : plam_field(x, obj, params);
}

template <typename Rhs>
Matrix euler_step(const Rhs& rhs, const Matrix& x, double h) {
    return x + h * rhs(x);
}

template <typename Rhs>
Matrix rk4_step(const Rhs& rhs, const Matrix& x, double h) {
    const Matrix k1 = rhs(x);
    const Matrix k2 = rhs(x + 0.5 * h * k1);
    const Matrix k3 = rhs(x + 0.5 * h * k2);
    const Matrix k4 = rhs(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One Fehlberg 4(5) stage evaluation; returns the 5th-order state and the
// Frobenius norm of the embedded-pair difference.
template <typename Rhs>
Matrix rkf45_step(const Rhs& rhs, const Matrix& x, double h, double& error) {
    const Matrix k1 = rhs(x);
    const Matrix k2 = rhs(x + h * (0.25 * k1));
    const Matrix k3 = rhs(x + h * ((3.0 / 32.0) * k1 + (9.0 / 32.0) * k2));
    const Matrix k4 = rhs(x + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 +
                                   (7296.0 / 2197.0) * k3));
    const Matrix k5 = rhs(x + h * ((439.0 / 216.0) * k1 - 8.0 * k2 + (3680.0 / 513.0) * k3 -
                                   (845.0 / 4104.0) * k4));
    const Matrix k6 = rhs(x + h * ((-8.0 / 27.0) * k1 + 2.0 * k2 - (3544.0 / 2565.0) * k3 +
                                   (1859.0 / 4104.0) * k4 - (11.0 / 40.0) * k5));
    const Matrix x4 = x + h * ((25.0 / 216.0) * k1 + (1408.0 / 2565.0) * k3 +
                               (2197.0 / 4104.0) * k4 - (1.0 / 5.0) * k5);
    const Matrix x5 = x + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 +
                               (28561.0 / 56430.0) * k4 - (9.0 / 50.0) * k5 + (2.0 / 55.0) * k6);
    error = (x5 - x4).norm();
    return x5;
}

inline double penalty_noise_floor(const Matrix& x) {
    const double scale = std::max(1.0, x.squaredNorm());
    return 1e-14 * scale * scale;
}

} // namespace detail

/// Integrate dX/dt = -field(X) from a full-rank X0 until t_max or until the
/// field norm drops below cfg.residual_tol. Recorded states are checked for
/// full rank; along the landing field the penalty must be nonincreasing up to
/// ten times a Richardson estimate of the local truncation error.
inline Trajectory integrate(const Matrix& x0, FieldKind kind, const Objective& obj,
                            const LandingParams& params, IntegratorConfig cfg) {
    if (cfg.dt <= 0.0) cfg.dt = 0.01 / params.lambda;
    if (cfg.t_max <= 0.0) cfg.t_max = 20.0 / params.lambda;
    if (cfg.record_every < 1 || cfg.abs_tol <= 0.0 || cfg.rel_tol <= 0.0 ||
        cfg.residual_tol <= 0.0) {
        throw DomainError("integrate: invalid integrator configuration");
    }
    if (!linalg::has_full_column_rank(x0)) {
        throw RankError("integrate: initial point must have full column rank");
    }

    const auto rhs = [&](const Matrix& x) -> Matrix {
        return -detail::eval_field(kind, x, obj, params);
    };
    const bool guard_monotone = (kind == FieldKind::landing);
    // The exact landing flow keeps N(X(t)) <= N(X0); leaving that sublevel
    // set by a wide margin is a certain discretization failure, independent
    // of any truncation estimate.
    const double penalty_ceiling = 2.0 * geometry::stiefel_distance_penalty(x0) + 10.0;

    Trajectory traj;
    traj.n = x0.rows();
    traj.p = x0.cols();

    Matrix x = x0;
    double t = 0.0;
    double h = cfg.dt;

    const auto record = [&](const Matrix& state, double time) {
        TrajectorySample s;
        s.t = time;
        s.x = state;
        s.f = obj.value(state);
        s.penalty = geometry::stiefel_distance_penalty(state);
        s.residual = detail::eval_field(kind, state, obj, params).norm();
        traj.samples.push_back(std::move(s));
        return traj.samples.back().residual;
    };

    double residual = record(x, t);
    if (residual <= cfg.residual_tol) {
        traj.terminated_by = Termination::residual_tol;
        return traj;
    }

    long accepted = 0;
    bool stopped = false;
    Termination reason = Termination::t_max;

    const double horizon_sliver = 1e-12 * std::max(1.0, cfg.t_max);
    while (t < cfg.t_max && !stopped) {
        const double remaining = cfg.t_max - t;
        if (remaining < horizon_sliver) {
            // Rounding leftover of the time accumulation; declare the
            // horizon reached rather than taking a degenerate step.
            t = cfg.t_max;
            break;
        }
        double step = std::min(h, remaining);
        if (remaining - step < horizon_sliver) step = remaining;
        if (step < 1e-14 * std::max(1.0, cfg.t_max)) {
            throw DomainError("integrate: step size underflow (error control cannot meet tolerance)");
        }
        Matrix x_new;
        double pair_error = 0.0;
        bool accept = true;

        switch (cfg.scheme) {
            case Scheme::explicit_euler:
                x_new = detail::euler_step(rhs, x, step);
                break;
            case Scheme::rk4:
                x_new = detail::rk4_step(rhs, x, step);
                break;
            case Scheme::rkf45_adaptive: {
                x_new = detail::rkf45_step(rhs, x, step, pair_error);
                const double tol = cfg.abs_tol + cfg.rel_tol * x.norm();
                accept = pair_error <= tol;
                const double ratio = pair_error > 0.0 ? tol / pair_error : 5.0;
                const double factor =
                    std::min(5.0, std::max(0.2, 0.9 * std::pow(ratio, 0.2)));
                h = step * factor;
                break;
            }
        }
        if (!accept) continue;

        if (guard_monotone) {
            const double n_prev = geometry::stiefel_distance_penalty(x);
            const double n_new = geometry::stiefel_distance_penalty(x_new);
            if (n_new > penalty_ceiling) {
                throw NonmonotonePenaltyError(t + step, n_new - n_prev,
                                              penalty_ceiling - n_prev);
            }
            if (n_new > n_prev) {
                // Local truncation estimate: the embedded pair for rkf45, a
                // step-doubling comparison otherwise (only evaluated on the
                // rare increasing step).
                double trunc;
                if (cfg.scheme == Scheme::rkf45_adaptive) {
                    trunc = geometry::penalty_gradient(x_new).norm() * pair_error;
                } else {
                    Matrix x_half = cfg.scheme == Scheme::rk4
                                        ? detail::rk4_step(rhs, detail::rk4_step(rhs, x, 0.5 * step),
                                                           0.5 * step)
                                        : detail::euler_step(
                                              rhs, detail::euler_step(rhs, x, 0.5 * step), 0.5 * step);
                    trunc = std::abs(n_new - geometry::stiefel_distance_penalty(x_half));
                }
                const double slack = 10.0 * trunc + detail::penalty_noise_floor(x);
                if (n_new - n_prev > slack) {
                    throw NonmonotonePenaltyError(t + step, n_new - n_prev, slack);
                }
            }
        }

        x = std::move(x_new);
        t += step;
        ++accepted;

        const bool due = (accepted % cfg.record_every == 0) || t >= cfg.t_max;
        if (due) {
            if (!linalg::has_full_column_rank(x)) {
                reason = Termination::rank_failure;
                stopped = true;
                break;
            }
            residual = record(x, t);
            if (residual <= cfg.residual_tol) {
                reason = Termination::residual_tol;
                stopped = true;
            }
        } else {
            residual = detail::eval_field(kind, x, obj, params).norm();
            if (residual <= cfg.residual_tol) {
                if (!linalg::has_full_column_rank(x)) {
                    reason = Termination::rank_failure;
                    stopped = true;
                    break;
                }
                record(x, t);
                reason = Termination::residual_tol;
                stopped = true;
            }
        }
    }

    if (!stopped) {
        // Horizon reached; make sure the final state is recorded.
        if (t - traj.samples.back().t >= horizon_sliver) {
            if (!linalg::has_full_column_rank(x)) {
                reason = Termination::rank_failure;
            } else {
                record(x, t);
            }
        }
    }
    traj.terminated_by = reason;
    return traj;
}

/// Sorted eigenvalues of X'X at every sample: the Gram spectrum whose
/// evolution admits a closed form along the landing flow.
inline std::vector<std::pair<double, Vector>> gram_trajectory(const Trajectory& traj) {
    std::vector<std::pair<double, Vector>> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(s.x.transpose() * s.x, Eigen::EigenvaluesOnly);
        out.emplace_back(s.t, es.eigenvalues());
    }
    return out;
}

} // namespace landing::flow
