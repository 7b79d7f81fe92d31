// Numerical certificates: the closed-form Gram-eigenvalue dynamics, endpoint
// membership in the critical set, and asymptotic-stability probes around
// known minimizers.

#pragma once

#include "landing/fields.hpp"
#include "landing/flow.hpp"
#include "landing/objective.hpp"
#include "landing/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace landing::diagnostics {

/// Closed-form solution of the scalar Gram dynamics chi' = -2 lambda chi (chi - 1):
///   chi(t) = chi0 e^{2 lambda t} / (chi0 (e^{2 lambda t} - 1) + 1),
/// evaluated in the overflow-safe form chi0 / (chi0 + (1 - chi0) e^{-2 lambda t}).
/// Fixed point chi0 = 1; limit 1 as t -> infinity.
inline double gram_closed_form(double chi0, double lambda, double t) {
    if (!(chi0 > 0.0)) throw DomainError("gram_closed_form: chi0 must be positive");
    if (!(lambda > 0.0)) throw DomainError("gram_closed_form: lambda must be positive");
    if (t < 0.0) throw DomainError("gram_closed_form: t must be nonnegative");
    return chi0 / (chi0 + (1.0 - chi0) * std::exp(-2.0 * lambda * t));
}

struct CertificateReport {
    std::string certificate;
    bool pass = false;
    bool applicable = true;
    std::map<std::string, double> metrics;
    std::map<std::string, double> tolerances;
    std::string note;

    nlohmann::json to_json() const {
        return nlohmann::json{{"certificate", certificate}, {"pass", pass},
                              {"applicable", applicable},   {"metrics", metrics},
                              {"tolerances", tolerances},   {"note", note}};
    }
};

inline CertificateReport not_applicable_report(std::string certificate, std::string note) {
    CertificateReport r;
    r.certificate = std::move(certificate);
    r.pass = true;
    r.applicable = false;
    r.note = std::move(note);
    return r;
}

/// Compare the sorted Gram eigenvalues of every sample of a landing
/// trajectory against the closed form seeded with the initial eigenvalues.
/// PASS iff the worst relative deviation stays below tol. Also reports the
/// eigenvector drift between the first and last sample for eigenvalues
/// isolated by more than cluster_tol (the exact flow keeps them constant).
inline CertificateReport certify_gram_convergence(const flow::Trajectory& traj,
                                                  const LandingParams& params, double tol = 1e-5,
                                                  double cluster_tol = 1e-6) {
    CertificateReport report;
    report.certificate = "gram_convergence";
    report.tolerances["max_relative_deviation"] = tol;
    if (traj.samples.empty()) {
        report.pass = false;
        report.note = "empty trajectory";
        return report;
    }

    const auto eig = [](const Matrix& x) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(x.transpose() * x);
        return es;
    };
    const auto es0 = eig(traj.samples.front().x);
    const Vector chi0 = es0.eigenvalues();

    double worst = 0.0;
    for (const auto& s : traj.samples) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(s.x.transpose() * s.x, Eigen::EigenvaluesOnly);
        const Vector chi = es.eigenvalues();
        for (Index i = 0; i < chi.size(); ++i) {
            const double predicted = gram_closed_form(chi0(i), params.lambda, s.t);
            worst = std::max(worst, std::abs(chi(i) - predicted) / predicted);
        }
    }

    // Eigenvector constancy, skipping clustered eigenvalues.
    const auto es_end = eig(traj.samples.back().x);
    const Vector chi_end = es_end.eigenvalues();
    const auto isolated = [&](const Vector& v, Index i) {
        const bool below = i == 0 || v(i) - v(i - 1) > cluster_tol;
        const bool above = i == v.size() - 1 || v(i + 1) - v(i) > cluster_tol;
        return below && above;
    };
    double max_angle = 0.0;
    int compared = 0;
    for (Index i = 0; i < chi0.size(); ++i) {
        if (!isolated(chi0, i) || !isolated(chi_end, i)) continue;
        const double c =
            std::min(1.0, std::abs(es0.eigenvectors().col(i).dot(es_end.eigenvectors().col(i))));
        max_angle = std::max(max_angle, std::acos(c));
        ++compared;
    }

    report.metrics["max_relative_deviation"] = worst;
    report.metrics["eigenvector_drift_angle"] = max_angle;
    report.metrics["eigenvectors_compared"] = static_cast<double>(compared);
    report.metrics["samples"] = static_cast<double>(traj.samples.size());
    report.pass = worst <= tol;
    return report;
}

/// Endpoint membership in the critical set: PASS iff the final relative
/// gradient norm ||psi(X) X||_F and final penalty N(X) are both below their
/// tolerances.
inline CertificateReport certify_critical_convergence(const flow::Trajectory& traj,
                                                      const Objective& obj,
                                                      double tol_stat = 1e-6,
                                                      double tol_feas = 1e-8) {
    CertificateReport report;
    report.certificate = "critical_convergence";
    report.tolerances["stationarity"] = tol_stat;
    report.tolerances["feasibility"] = tol_feas;
    if (traj.samples.empty()) {
        report.pass = false;
        report.note = "empty trajectory";
        return report;
    }
    const auto& s = traj.samples.back();
    const Matrix g = obj.gradient(s.x);
    const double stat = (g * (s.x.transpose() * s.x) - s.x * (g.transpose() * s.x)).norm();
    report.metrics["final_relative_gradient_norm"] = stat;
    report.metrics["final_penalty"] = s.penalty;
    report.metrics["final_f"] = s.f;
    report.metrics["final_t"] = s.t;
    report.pass = stat <= tol_stat && s.penalty <= tol_feas;
    return report;
}

struct StabilityOptions {
    std::uint64_t seed = 0;
    /// Integration settings; dt/t_max of zero resolve from lambda.
    flow::IntegratorConfig cfg;
    /// Recovery radius; non-positive selects 10 * perturbation radius.
    double recovery_tol = 0.0;
    /// exact_point compares endpoints directly; subspace aligns by the best
    /// orthogonal factor first. The default picks exact_point for p = 1.
    enum class Mode { auto_detect, exact_point, subspace } mode = Mode::auto_detect;
};

/// Launch `trials` landing flows from X* + radius * (unit Frobenius
/// perturbation) and test whether every endpoint returns to X* (up to the
/// orthogonal ambiguity of an invariant subspace when mode is subspace).
/// Requires X* to be an on-manifold equilibrium.
inline CertificateReport probe_stability(const Matrix& x_star, const Objective& obj,
                                         const LandingParams& params, double radius, int trials,
                                         StabilityOptions opts = {}) {
    const Index n = x_star.rows();
    const Index p = x_star.cols();
    if (radius < 0.0 || trials < 1) {
        throw std::invalid_argument("probe_stability: radius must be >= 0 and trials >= 1");
    }
    if (geometry::stiefel_distance_penalty(x_star) > 1e-16) {
        throw std::invalid_argument("probe_stability: X* must lie on the Stiefel manifold");
    }
    if (landing_field(x_star, obj, params).norm() > 1e-10) {
        throw std::invalid_argument("probe_stability: X* must be an equilibrium");
    }

    flow::IntegratorConfig cfg = opts.cfg;
    if (cfg.dt <= 0.0) cfg.dt = 0.01 / params.lambda;
    if (cfg.t_max <= 0.0) cfg.t_max = 40.0 / params.lambda;
    const double recovery_tol = opts.recovery_tol > 0.0 ? opts.recovery_tol : 10.0 * radius;
    const bool subspace = opts.mode == StabilityOptions::Mode::subspace ||
                          (opts.mode == StabilityOptions::Mode::auto_detect && p > 1);

    rng::Xoshiro256pp gen(opts.seed);
    int recovered = 0;
    double max_distance = 0.0;
    double max_angle = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Matrix direction = rng::normal_matrix(gen, n, p);
        Matrix x0 = x_star;
        if (radius > 0.0) {
            direction /= direction.norm();
            x0 += radius * direction;
        }
        const flow::Trajectory traj = flow::integrate(x0, flow::FieldKind::landing, obj, params, cfg);
        const Matrix& x_end = traj.samples.back().x;

        double distance;
        if (subspace) {
            const Matrix overlap = x_star.transpose() * x_end;
            Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Matrix q = svd.matrixU() * svd.matrixV().transpose();
            distance = (x_end - x_star * q).norm();
            const double cmin = std::min(1.0, svd.singularValues().minCoeff());
            max_angle = std::max(max_angle, std::acos(cmin));
        } else {
            distance = (x_end - x_star).norm();
        }
        max_distance = std::max(max_distance, distance);
        if (distance <= recovery_tol) ++recovered;
    }

    CertificateReport report;
    report.certificate = "stability_probe";
    report.tolerances["recovery_distance"] = recovery_tol;
    report.metrics["trials"] = static_cast<double>(trials);
    report.metrics["radius"] = radius;
    report.metrics["recovered_fraction"] = static_cast<double>(recovered) / trials;
    report.metrics["max_distance"] = max_distance;
    if (subspace) report.metrics["max_principal_angle"] = max_angle;
    report.pass = recovered == trials;
    report.note = subspace ? "endpoint compared to the orbit X* Q over orthogonal Q"
                           : "endpoint compared to X* directly";
    return report;
}

} // namespace landing::diagnostics
