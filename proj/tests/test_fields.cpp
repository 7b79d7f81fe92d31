#include "landing/fields.hpp"
#include "landing/problems.hpp"
#include "landing/rng.hpp"
#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace landing;

TEST_CASE("relative gradient psi", "[fields]") {
    rng::Xoshiro256pp gen(53);

    SECTION("symmetric grad f X' gives zero") {
        const Matrix x = rng::normal_matrix(gen, 5, 2);
        Objective obj{"self", nullptr, [](const Matrix& v) { return v; }};
        REQUIRE(relative_gradient_psi(x, obj).matrix().norm() <= 1e-12 * x.norm() * x.norm());
    }

    SECTION("linear objective expands to A X' - X A'") {
        const Matrix a = rng::normal_matrix(gen, 5, 2);
        const auto instance = problems::make_linear(5, 2, a);
        const Matrix x = rng::normal_matrix(gen, 5, 2);
        const Matrix expected = a * x.transpose() - x * a.transpose();
        REQUIRE((relative_gradient_psi(x, instance.objective).matrix() - expected).norm() <=
                1e-13 * std::max(1.0, expected.norm()));
    }

    SECTION("always skew, and twice the unscaled skew part") {
        const auto suite = testutil::objective_suite(6, 3, 59);
        for (const auto& obj : suite) {
            const Matrix x = rng::normal_matrix(gen, 6, 3);
            const Matrix psi = relative_gradient_psi(x, obj).matrix();
            REQUIRE((psi + psi.transpose()).norm() <= 1e-12 * std::max(1.0, psi.norm()));
            const Matrix gxt = obj.gradient(x) * x.transpose();
            const Matrix half_skew = 0.5 * (gxt - gxt.transpose());
            REQUIRE((psi - 2.0 * half_skew).norm() <= 1e-12 * std::max(1.0, psi.norm()));
        }
    }
}

TEST_CASE("landing field structure", "[fields]") {
    rng::Xoshiro256pp gen(61);
    const LandingParams params(1.7);

    SECTION("penalty term vanishes on the manifold and the field is tangent") {
        const auto suite = testutil::objective_suite(6, 3, 67);
        const Matrix x = rng::orthonormal_matrix(gen, 6, 3);
        for (const auto& obj : suite) {
            const Matrix field = landing_field(x, obj, params);
            const Matrix psi_x = relative_gradient_psi(x, obj).matrix() * x;
            REQUIRE((field - psi_x).norm() <= 1e-11 * std::max(1.0, field.norm()));
            REQUIRE((field.transpose() * x + x.transpose() * field).norm() <=
                    1e-11 * std::max(1.0, field.norm()));
        }
    }

    SECTION("equals the canonical riemannian gradient on the manifold") {
        const auto suite = testutil::objective_suite(7, 2, 71);
        const Matrix x = rng::orthonormal_matrix(gen, 7, 2);
        const geometry::GeneralizedStiefelPoint pt((geometry::FullRankMatrix(x)));
        for (const auto& obj : suite) {
            const Matrix field = landing_field(x, obj, params);
            const Matrix rgrad = geometry::riemannian_gradient_canonical(pt, obj).matrix();
            REQUIRE((field - rgrad).norm() <= 1e-11 * std::max(1.0, rgrad.norm()));
        }
    }

    SECTION("component orthogonality over 500 random points") {
        int checked = 0;
        for (int trial = 0; trial < 500; ++trial) {
            const Index n = 3 + static_cast<Index>(gen.next() % 28);
            const Index p = 1 + static_cast<Index>(gen.next() % std::min<Index>(n, 10));
            const Matrix x = testutil::well_conditioned_point(gen, n, p, 0.2, 4.0);
            const auto instance = problems::make_linear(n, p, rng::normal_matrix(gen, n, p));
            const Matrix psi_x = relative_gradient_psi(x, instance.objective).matrix() * x;
            const Matrix pen = geometry::penalty_gradient(x);
            const double cross = (psi_x.array() * pen.array()).sum();
            REQUIRE(std::abs(cross) <= 1e-11 * std::max(1e-30, psi_x.norm() * pen.norm()));
            ++checked;
        }
        REQUIRE(checked == 500);
    }

    SECTION("pythagoras identity for the field norm") {
        const auto suite = testutil::objective_suite(6, 3, 79);
        for (const auto& obj : suite) {
            for (int trial = 0; trial < 20; ++trial) {
                const Matrix x = testutil::well_conditioned_point(gen, 6, 3);
                const Matrix field = landing_field(x, obj, params);
                const auto [stat, feas] = landing_residual(x, obj, params);
                const double lhs = field.squaredNorm();
                const double rhs = stat * stat + params.lambda * params.lambda * feas * feas;
                REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("equilibrium characterization", "[fields]") {
    rng::Xoshiro256pp gen(83);
    const LandingParams params(0.8);

    SECTION("critical points on the manifold zero the field") {
        // Rayleigh objective at an exact eigenbasis: psi(X*) X* = 0 and N = 0.
        Matrix a = Matrix::Zero(6, 6);
        a.diagonal() << 1, 2, 3, 4, 5, 6;
        const auto instance = problems::make_rayleigh(6, 2, a);
        const Matrix x_star = Matrix::Identity(6, 2);
        REQUIRE(landing_field(x_star, instance.objective, params).norm() <= 1e-12);
        const auto [stat, feas] = landing_residual(x_star, instance.objective, params);
        REQUIRE(stat <= 1e-12);
        REQUIRE(feas <= 1e-12);
    }

    SECTION("on-manifold non-critical points have positive stationarity residual only") {
        Matrix a = Matrix::Zero(4, 4);
        a.diagonal() << 1, 2, 3, 4;
        const auto instance = problems::make_rayleigh(4, 1, a);
        Matrix x(4, 1);
        x << std::sqrt(0.5), std::sqrt(0.5), 0, 0;
        const auto [stat, feas] = landing_residual(x, instance.objective, params);
        REQUIRE(stat > 1e-3);
        REQUIRE(feas <= 1e-12);
    }

    SECTION("zero field implies feasible and stationary") {
        const auto suite = testutil::objective_suite(5, 2, 89);
        for (const auto& obj : suite) {
            const Matrix x = testutil::well_conditioned_point(gen, 5, 2);
            const Matrix field = landing_field(x, obj, params);
            const auto [stat, feas] = landing_residual(x, obj, params);
            // Orthogonality makes the implication exact at the norm level.
            REQUIRE(field.squaredNorm() >=
                    0.999 * (stat * stat + params.lambda * params.lambda * feas * feas));
        }
    }
}

TEST_CASE("plam field", "[fields]") {
    rng::Xoshiro256pp gen(97);
    const LandingParams params(1.0);

    SECTION("tangent on the manifold with vanishing penalty term") {
        const auto suite = testutil::objective_suite(6, 3, 101);
        const Matrix x = rng::orthonormal_matrix(gen, 6, 3);
        for (const auto& obj : suite) {
            const Matrix field = plam_field(x, obj, params);
            REQUIRE((field.transpose() * x + x.transpose() * field).norm() <=
                    1e-11 * std::max(1.0, field.norm()));
        }
    }

    SECTION("matches the euclidean riemannian gradient on the manifold") {
        const auto suite = testutil::objective_suite(6, 3, 103);
        const Matrix x = rng::orthonormal_matrix(gen, 6, 3);
        const geometry::GeneralizedStiefelPoint pt((geometry::FullRankMatrix(x)));
        for (const auto& obj : suite) {
            const Matrix field = plam_field(x, obj, params);
            const Matrix rgrad = geometry::riemannian_gradient_euclidean(pt, obj).matrix();
            REQUIRE((field - rgrad).norm() <= 1e-10 * std::max(1.0, rgrad.norm()));
        }
    }

    SECTION("components are generally not orthogonal") {
        // Fixed seed found by search: the non-penalty part has a visible
        // component along the penalty gradient.
        rng::Xoshiro256pp search(7);
        double best = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const Matrix x = testutil::well_conditioned_point(search, 5, 2, 0.3, 3.0);
            const auto instance = problems::make_linear(5, 2, rng::normal_matrix(search, 5, 2));
            const Matrix g = instance.objective.gradient(x);
            const Matrix gtx = g.transpose() * x;
            const Matrix non_penalty = g - 0.5 * x * (gtx + gtx.transpose());
            const Matrix pen = geometry::penalty_gradient(x);
            const double cross =
                std::abs((non_penalty.array() * pen.array()).sum()) /
                std::max(1e-30, non_penalty.norm() * pen.norm());
            best = std::max(best, cross);
        }
        REQUIRE(best > 1e-3);
    }

    SECTION("critical points zero the plam field too") {
        Matrix a = Matrix::Zero(6, 6);
        a.diagonal() << 1, 2, 3, 4, 5, 6;
        const auto instance = problems::make_rayleigh(6, 2, a);
        const Matrix x_star = Matrix::Identity(6, 2);
        REQUIRE(plam_field(x_star, instance.objective, params).norm() <= 1e-12);
    }
}
