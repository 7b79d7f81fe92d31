// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. The process exit code is the number of failures.

#include "landing/landing.hpp"
#include "test_helpers.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace landing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// 1. The two landing-field components are Frobenius-orthogonal.
Outcome check_component_orthogonality() {
    rng::Xoshiro256pp gen(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const Index n = 3 + static_cast<Index>(gen.next() % 28);
        const Index p = 1 + static_cast<Index>(gen.next() % std::min<Index>(n, 10));
        const Matrix x = testutil::well_conditioned_point(gen, n, p, 0.2, 4.0);
        const std::vector<Objective> objectives = {
            problems::make_linear(n, p, rng::normal_matrix(gen, n, p)).objective,
            problems::make_rayleigh(n, p, rng::sym_matrix(gen, n)).objective,
            problems::make_procrustes(n, p, Matrix::Identity(n, n),
                                      rng::normal_matrix(gen, n, p)).objective};
        for (const auto& obj : objectives) {
            const Matrix psi_x = relative_gradient_psi(x, obj).matrix() * x;
            const Matrix pen = geometry::penalty_gradient(x);
            const double denom = std::max(1e-300, psi_x.norm() * pen.norm());
            worst = std::max(worst, std::abs((psi_x.array() * pen.array()).sum()) / denom);
        }
    }
    return {worst <= 1e-11, "worst normalized inner product " + std::to_string(worst)};
}

// 2. Gram eigenvalues of rk4 trajectories match the closed form; halving dt
//    improves the worst deviation at least 8x.
Outcome check_gram_closed_form() {
    rng::Xoshiro256pp gen(1002);
    const std::vector<double> chi0 = {0.1, 0.5, 2.0, 10.0};
    bool pass = true;
    std::ostringstream detail;
    for (double lambda : {0.5, 2.0}) {
        const LandingParams params(lambda);
        const Matrix x0 = testutil::point_with_gram_spectrum(gen, 12, 4, chi0);
        const auto instance = problems::make_linear(12, 4, rng::normal_matrix(gen, 12, 4));
        const auto deviation = [&](double dt) {
            flow::IntegratorConfig cfg;
            cfg.dt = dt;
            cfg.t_max = 2.0 / lambda;
            cfg.residual_tol = 1e-300;
            const auto traj =
                flow::integrate(x0, flow::FieldKind::landing, instance.objective, params, cfg);
            double worst = 0.0;
            for (const auto& [t, eigs] : flow::gram_trajectory(traj)) {
                for (Index i = 0; i < eigs.size(); ++i) {
                    const double predicted = diagnostics::gram_closed_form(
                        chi0[static_cast<std::size_t>(i)], lambda, t);
                    worst = std::max(worst, std::abs(eigs(i) - predicted) / predicted);
                }
            }
            return worst;
        };
        const double coarse = deviation(0.002 / lambda);
        const double fine = deviation(0.001 / lambda);
        const double gain = coarse / std::max(fine, 1e-300);
        pass = pass && coarse <= 1e-5 && gain >= 8.0;
        detail << "lambda=" << lambda << ": dev=" << coarse << " gain=" << gain << "  ";
    }
    return {pass, detail.str()};
}

// 3. Any full-rank start with N(X0) <= 5 lands: final N <= 1e-8 by t = 20/lambda.
Outcome check_landing() {
    rng::Xoshiro256pp gen(1003);
    const LandingParams params(1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 5 + static_cast<Index>(gen.next() % 10);
        const Index p = 1 + static_cast<Index>(gen.next() % 4);
        std::vector<double> chi(static_cast<std::size_t>(p));
        for (auto& c : chi) c = 0.2 + 2.8 * gen.uniform01();
        const Matrix x0 = testutil::point_with_gram_spectrum(gen, n, p, chi);
        if (geometry::stiefel_distance_penalty(x0) > 5.0) {
            return {false, "start violated the N <= 5 precondition"};
        }
        const auto instance = problems::make_rayleigh(n, p, rng::sym_matrix(gen, n));
        flow::IntegratorConfig cfg;
        cfg.t_max = 20.0 / params.lambda;
        const auto traj =
            flow::integrate(x0, flow::FieldKind::landing, instance.objective, params, cfg);
        worst = std::max(worst, traj.samples.back().penalty);
    }
    return {worst <= 1e-8, "worst final penalty " + std::to_string(worst)};
}

// 4. Endpoints are critical points: Rayleigh reaches the eigensolver optimum,
//    the planar linear problem reaches -A/||A||.
Outcome check_critical_convergence() {
    std::ostringstream detail;
    bool pass = true;

    const auto rayleigh = problems::builtin_problem("rayleigh20x3", 17);
    const Matrix x0 = problems::random_start(20, 3, 17);
    flow::IntegratorConfig cfg;
    cfg.t_max = 100.0;
    const auto traj = flow::integrate(x0, flow::FieldKind::landing, rayleigh.objective,
                                      LandingParams(1.0), cfg);
    const Matrix& xe = traj.samples.back().x;
    const Matrix g = rayleigh.objective.gradient(xe);
    const double stat = (g * (xe.transpose() * xe) - xe * (g.transpose() * xe)).norm();
    const double f_gap = std::abs(traj.samples.back().f - rayleigh.optimum->value);
    pass = pass && stat <= 1e-6 && f_gap <= 1e-6;
    detail << "rayleigh: |psi X|=" << stat << " f-gap=" << f_gap;

    const auto linear = problems::builtin_problem("linear21");
    const Matrix y0 = problems::random_start(2, 1, 23);
    flow::IntegratorConfig lcfg;
    lcfg.t_max = 40.0;
    const auto ltraj = flow::integrate(y0, flow::FieldKind::landing, linear.objective,
                                       LandingParams(1.0), lcfg);
    const double dist = (ltraj.samples.back().x - *linear.optimum->minimizer).norm();
    pass = pass && dist <= 1e-6;
    detail << "  linear: endpoint distance " << dist;
    return {pass, detail.str()};
}

// 5. The relative gradient satisfies the defining identity of the Riemannian
//    gradient under the extended canonical metric.
Outcome check_gradient_identity() {
    rng::Xoshiro256pp gen(1005);
    const Index n = 8, p = 3;
    const auto suite = testutil::objective_suite(n, p, 1005);
    double worst = 0.0;
    for (const auto& obj : suite) {
        for (int trial = 0; trial < 100; ++trial) {
            const geometry::GeneralizedStiefelPoint y(
                testutil::well_conditioned_point(gen, n, p));
            const Matrix xi = testutil::random_tangent_value(gen, y);
            const Matrix grad = geometry::riemannian_gradient_canonical(y, obj).matrix();
            const Matrix eg = obj.gradient(y.matrix());
            const double gap = std::abs(geometry::metric_g(y, grad, xi) -
                                        (eg.array() * xi.array()).sum());
            worst = std::max(worst, gap / std::max(1e-300, eg.norm() * xi.norm()));
        }
    }
    return {worst <= 1e-9, "worst normalized identity gap " + std::to_string(worst)};
}

// 6. The two metric constructions agree on tangent pairs and reduce to the
//    canonical metric at identity gram.
Outcome check_metric_equivalences() {
    rng::Xoshiro256pp gen(1006);
    const Index n = 7, p = 3;
    double worst_pi = 0.0, worst_canonical = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const geometry::GeneralizedStiefelPoint y(testutil::well_conditioned_point(gen, n, p));
        const Matrix xi = testutil::random_tangent_value(gen, y);
        const Matrix zeta = testutil::random_tangent_value(gen, y);
        const double g = geometry::metric_g(y, xi, zeta);
        const double pi = geometry::metric_pi(y, xi, zeta);
        worst_pi = std::max(worst_pi, std::abs(g - pi) / std::max(1.0, std::abs(g)));

        const Matrix x = rng::orthonormal_matrix(gen, n, p);
        const geometry::GeneralizedStiefelPoint pt((geometry::FullRankMatrix(x)));
        const Matrix xs = rng::skew_matrix(gen, n) * x;
        const Matrix zs = rng::skew_matrix(gen, n) * x;
        const double canonical = geometry::canonical_metric(x, xs, zs);
        const double scale = std::max(1.0, std::abs(canonical));
        worst_canonical = std::max(
            {worst_canonical, std::abs(geometry::metric_g(pt, xs, zs) - canonical) / scale,
             std::abs(geometry::metric_pi(pt, xs, zs) - canonical) / scale});
    }
    std::ostringstream detail;
    detail << "pi-vs-g " << worst_pi << ", canonical reduction " << worst_canonical;
    return {worst_pi <= 1e-10 && worst_canonical <= 1e-12, detail.str()};
}

// 7. Euclidean splitting and the Pi round trip at the stated tolerances.
Outcome check_lyapunov_machinery() {
    rng::Xoshiro256pp gen(1007);
    const Index n = 9, p = 4;
    double worst_recon = 0.0, worst_cross = 0.0, worst_round = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const geometry::GeneralizedStiefelPoint y(testutil::well_conditioned_point(gen, n, p));
        const Matrix xi = rng::normal_matrix(gen, n, p);
        const auto parts = geometry::euclidean_decompose(y, xi);
        worst_recon = std::max(worst_recon,
                               (parts.tangent.matrix() + parts.normal.matrix() - xi).norm() /
                                   std::max(1e-300, xi.norm()));
        worst_cross = std::max(
            worst_cross,
            std::abs((parts.tangent.matrix().array() * parts.normal.matrix().array()).sum()) /
                std::max(1e-300, xi.squaredNorm()));

        const geometry::TangentVector tv(y, testutil::random_tangent_value(gen, y));
        const auto back = geometry::pi_inverse(y, geometry::pi_map(y, tv));
        worst_round = std::max(back.matrix().norm() > 0
                                   ? (back.matrix() - tv.matrix()).norm() /
                                         std::max(1e-300, tv.matrix().norm())
                                   : 0.0,
                               worst_round);
    }
    std::ostringstream detail;
    detail << "reconstruction " << worst_recon << ", cross " << worst_cross << ", round trip "
           << worst_round;
    return {worst_recon <= 1e-10 && worst_cross <= 1e-10 && worst_round <= 1e-9, detail.str()};
}

// 8. Perturbed starts around the planar minimizer all flow back to it.
Outcome check_stability() {
    const auto instance = problems::builtin_problem("linear21");
    diagnostics::StabilityOptions opts;
    opts.seed = 777;
    opts.recovery_tol = 1e-4;
    opts.cfg.t_max = 40.0;
    const auto report = diagnostics::probe_stability(*instance.optimum->minimizer,
                                                     instance.objective, LandingParams(1.0), 0.1,
                                                     20, opts);
    std::ostringstream detail;
    detail << "recovered fraction " << report.metrics.at("recovered_fraction") << ", max distance "
           << report.metrics.at("max_distance");
    return {report.pass, detail.str()};
}

// 9. On-manifold starts stay on the manifold along the whole rk4 trajectory.
Outcome check_invariance() {
    rng::Xoshiro256pp gen(1009);
    const Index n = 10, p = 3;
    const Matrix x0 = rng::orthonormal_matrix(gen, n, p);
    const auto instance = problems::make_rayleigh(n, p, rng::sym_matrix(gen, n));
    flow::IntegratorConfig cfg;
    cfg.t_max = 10.0;
    cfg.residual_tol = 1e-300;
    const auto traj = flow::integrate(x0, flow::FieldKind::landing, instance.objective,
                                      LandingParams(1.0), cfg);
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::max(worst, s.penalty);
    return {worst <= 1e-10, "max penalty along trajectory " + std::to_string(worst)};
}

// 10. The figure dataset is byte-for-byte reproducible.
Outcome check_reproducibility() {
    const fs::path base = "acceptance_scratch";
    fs::remove_all(base);
    cli::Figure1Options opts;
    opts.seed = 42;
    std::ostringstream sink;
    opts.out_dir = (base / "first").string();
    if (cli::cmd_figure1(opts, sink, sink) != 0) return {false, "first invocation failed"};
    opts.out_dir = (base / "second").string();
    if (cli::cmd_figure1(opts, sink, sink) != 0) return {false, "second invocation failed"};

    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(base / "first")) {
        const auto read = [](const fs::path& path) {
            std::ifstream is(path, std::ios::binary);
            std::ostringstream os;
            os << is.rdbuf();
            return os.str();
        };
        if (read(entry.path()) != read(base / "second" / entry.path().filename())) {
            return {false, "mismatch in " + entry.path().filename().string()};
        }
        ++files;
    }
    return {files == 7, std::to_string(files) + " files compared byte-for-byte"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"landing-field component orthogonality", check_component_orthogonality},
        {"gram eigenvalues follow the closed form (with order check)", check_gram_closed_form},
        {"full-rank starts land on the manifold", check_landing},
        {"endpoints reach the critical set", check_critical_convergence},
        {"riemannian gradient identity", check_gradient_identity},
        {"metric equivalences", check_metric_equivalences},
        {"lyapunov splitting and pi round trip", check_lyapunov_machinery},
        {"stability probe around the isolated minimizer", check_stability},
        {"manifold invariance of on-manifold starts", check_invariance},
        {"byte-identical figure dataset", check_reproducibility},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("[%2zu/10] %s  %s  (%s)\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), outcome.detail.c_str());
    }
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
