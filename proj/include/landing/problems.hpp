// Benchmark objectives with known structure: linear functions, orthogonal
// Procrustes fitting, and Rayleigh trace minimization. Instances carry the
// independently computed optimum when a closed form exists, and every bit of
// randomness derives from the instance seed through the toolkit generator.

#pragma once

#include "landing/objective.hpp"
#include "landing/rng.hpp"
#include "landing/serialize.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>

namespace landing::problems {

struct OptimumInfo {
    double value = 0.0;
    std::optional<Matrix> minimizer;
    std::string description;
};

struct ProblemInstance {
    Objective objective;
    Index n = 0;
    Index p = 0;
    std::optional<OptimumInfo> optimum;
    std::uint64_t seed = 0;
};

/// f(X) = <A, X> with constant gradient A. The minimizer over St(p,n) is
/// -U V' from the thin SVD A = U S V', with value -(sum of singular values);
/// for p = 1 this reduces to -A/||A|| and -||A||.
inline ProblemInstance make_linear(Index n, Index p, Matrix a, std::uint64_t seed = 0) {
    if (a.rows() != n || a.cols() != p) {
        throw DimensionError("make_linear: A must be n x p");
    }
    if (a.norm() == 0.0) {
        throw DomainError("make_linear: A must be nonzero");
    }
    ProblemInstance inst;
    inst.n = n;
    inst.p = p;
    inst.seed = seed;
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    OptimumInfo opt;
    opt.value = -svd.singularValues().sum();
    opt.minimizer = -(svd.matrixU() * svd.matrixV().transpose());
    opt.description = "minimizer -UV' of the thin SVD of A";
    inst.optimum = std::move(opt);
    inst.objective.name = "linear";
    inst.objective.value = [a](const Matrix& x) { return (a.array() * x.array()).sum(); };
    inst.objective.gradient = [a](const Matrix&) -> Matrix { return a; };
    return inst;
}

/// f(X) = 1/2 ||A X - B||_F^2 with gradient A'(A X - B). When A = I the
/// minimizer over St(p,n) is the polar factor of B, with value
/// 1/2 ||B||^2 + p/2 - (nuclear norm of B).
inline ProblemInstance make_procrustes(Index n, Index p, Matrix a, Matrix b,
                                       std::uint64_t seed = 0) {
    if (a.cols() != n || b.cols() != p || a.rows() != b.rows()) {
        throw DimensionError("make_procrustes: need A m x n and B m x p");
    }
    ProblemInstance inst;
    inst.n = n;
    inst.p = p;
    inst.seed = seed;
    if (a.rows() == n && a.isIdentity(1e-14)) {
        Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
        OptimumInfo opt;
        opt.value = 0.5 * b.squaredNorm() + 0.5 * static_cast<double>(p) -
                    svd.singularValues().sum();
        opt.minimizer = svd.matrixU() * svd.matrixV().transpose();
        opt.description = "polar factor of B";
        inst.optimum = std::move(opt);
    }
    inst.objective.name = "procrustes";
    inst.objective.value = [a, b](const Matrix& x) { return 0.5 * (a * x - b).squaredNorm(); };
    inst.objective.gradient = [a, b](const Matrix& x) -> Matrix {
        return a.transpose() * (a * x - b);
    };
    return inst;
}

/// f(X) = 1/2 tr(X' A X) for symmetric A, with gradient A X (the 1/2 factor
/// makes the gradient exact). The minimum over St(p,n) is half the sum of
/// the p smallest eigenvalues, attained on the corresponding eigenbasis.
inline ProblemInstance make_rayleigh(Index n, Index p, Matrix a, std::uint64_t seed = 0) {
    if (a.rows() != n || a.cols() != n) {
        throw DimensionError("make_rayleigh: A must be n x n");
    }
    if ((a - a.transpose()).norm() > linalg::tolerances().symmetry_rel * std::max(1.0, a.norm())) {
        throw DomainError("make_rayleigh: A must be symmetric");
    }
    a = 0.5 * (a + a.transpose()).eval();
    ProblemInstance inst;
    inst.n = n;
    inst.p = p;
    inst.seed = seed;
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    OptimumInfo opt;
    opt.value = 0.5 * es.eigenvalues().head(p).sum();
    opt.minimizer = es.eigenvectors().leftCols(p);
    opt.description = "eigenvectors of the p smallest eigenvalues";
    inst.optimum = std::move(opt);
    inst.objective.name = "rayleigh";
    inst.objective.value = [a](const Matrix& x) {
        return 0.5 * (x.array() * (a * x).array()).sum();
    };
    inst.objective.gradient = [a](const Matrix& x) -> Matrix { return a * x; };
    return inst;
}

/// Random full-rank starting point: iid normal entries scaled by 1/sqrt(n),
/// so the Gram matrix sits near the identity and the default step size
/// resolves the penalty transient.
inline Matrix random_start(Index n, Index p, std::uint64_t seed) {
    rng::Xoshiro256pp gen(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int attempt = 0; attempt < 16; ++attempt) {
        Matrix x = scale * rng::normal_matrix(gen, n, p);
        if (linalg::has_full_column_rank(x)) return x;
    }
    throw RankError("random_start: failed to draw a full-rank matrix");
}

/// Build an instance from a JSON spec {kind, n, p, seed, ...}. Kind-specific
/// parameters: linear takes optional "A"; procrustes takes optional "A"
/// (default identity) and "B"; rayleigh takes "A" or "spectrum" (eigenvalues
/// placed on a seeded random orthogonal basis). Missing matrices are drawn
/// from the seed.
inline ProblemInstance load_problem(const nlohmann::json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    const Index n = spec.at("n").get<Index>();
    const Index p = spec.at("p").get<Index>();
    const std::uint64_t seed = spec.value("seed", std::uint64_t{0});
    rng::Xoshiro256pp gen(seed);

    if (kind == "linear") {
        Matrix a = spec.contains("A") ? io::matrix_from_json(spec.at("A"))
                                      : rng::normal_matrix(gen, n, p);
        return make_linear(n, p, std::move(a), seed);
    }
    if (kind == "procrustes") {
        const Index m = spec.value("m", n);
        Matrix a = spec.contains("A") ? io::matrix_from_json(spec.at("A"))
                                      : Matrix(Matrix::Identity(m, n));
        Matrix b = spec.contains("B") ? io::matrix_from_json(spec.at("B"))
                                      : rng::normal_matrix(gen, m, p);
        return make_procrustes(n, p, std::move(a), std::move(b), seed);
    }
    if (kind == "rayleigh") {
        Matrix a;
        if (spec.contains("A")) {
            a = io::matrix_from_json(spec.at("A"));
        } else if (spec.contains("spectrum")) {
            const auto spectrum = spec.at("spectrum").get<std::vector<double>>();
            if (static_cast<Index>(spectrum.size()) != n) {
                throw DimensionError("load_problem: spectrum must have n entries");
            }
            const Matrix q = rng::orthonormal_matrix(gen, n, n);
            Vector d = Eigen::Map<const Vector>(spectrum.data(), n);
            a = q * d.asDiagonal() * q.transpose();
        } else {
            a = rng::sym_matrix(gen, n);
        }
        return make_rayleigh(n, p, std::move(a), seed);
    }
    throw DomainError("load_problem: unknown problem kind '" + kind + "'");
}

inline ProblemInstance load_problem_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_problem_file: cannot open " + path);
    nlohmann::json spec;
    is >> spec;
    return load_problem(spec);
}

/// Named built-in problems usable wherever a spec file is accepted:
///   linear21     -- linear objective on St(1,2) with A = (1, 0)'
///   rayleigh20x3 -- trace minimization, n = 20, p = 3, spectrum 1..20 on a
///                   seeded random orthogonal basis
///   procrustes83 -- nearest orthonormal frame to a random 8 x 3 target
inline ProblemInstance builtin_problem(const std::string& name, std::uint64_t seed = 0) {
    if (name == "linear21") {
        Matrix a(2, 1);
        a << 1.0, 0.0;
        return make_linear(2, 1, std::move(a), seed);
    }
    if (name == "rayleigh20x3") {
        nlohmann::json spec = {{"kind", "rayleigh"}, {"n", 20}, {"p", 3}, {"seed", seed}};
        std::vector<double> spectrum(20);
        for (int i = 0; i < 20; ++i) spectrum[i] = static_cast<double>(i + 1);
        spec["spectrum"] = spectrum;
        return load_problem(spec);
    }
    if (name == "procrustes83") {
        rng::Xoshiro256pp gen(seed);
        Matrix b = rng::normal_matrix(gen, 8, 3);
        return make_procrustes(8, 3, Matrix::Identity(8, 8), std::move(b), seed);
    }
    throw DomainError("builtin_problem: unknown builtin '" + name + "'");
}

} // namespace landing::problems
