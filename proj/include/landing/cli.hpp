// Command implementations behind the `landing` executable: run a flow and
// emit its trajectory, reproduce the St(1,2) sweep dataset, and certify
// trajectories. Each command returns the process exit code:
//   0  success (and, for certify, every requested certificate passed)
//   1  a certificate failed
//   2  invalid configuration
//   3  rank failure or nonmonotone penalty during integration

#pragma once

#include "landing/diagnostics.hpp"
#include "landing/flow.hpp"
#include "landing/problems.hpp"
#include "landing/serialize.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace landing::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string problem = "linear21";
    std::string field = "landing";
    std::string integrator = "rk4";
    /// Zero-valued numeric options mean "not set": they resolve from the
    /// problem spec file if present, then from built-in defaults
    /// (lambda 1, dt 0.01/lambda, tmax 20/lambda).
    double lambda = 0.0;
    double dt = 0.0;
    double tmax = 0.0;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    int record_every = 1;
    double residual_tol = 1e-8;
};

namespace detail {

inline flow::FieldKind parse_field(const std::string& name) {
    if (name == "landing") return flow::FieldKind::landing;
    if (name == "plam") return flow::FieldKind::plam;
    throw ConfigError("unknown field '" + name + "' (expected landing|plam)");
}

inline flow::Scheme parse_scheme(const std::string& name) {
    if (name == "euler") return flow::Scheme::explicit_euler;
    if (name == "rk4") return flow::Scheme::rk4;
    if (name == "rkf45") return flow::Scheme::rkf45_adaptive;
    throw ConfigError("unknown integrator '" + name + "' (expected euler|rk4|rkf45)");
}

inline void check_format(const std::string& format) {
    if (format != "csv" && format != "json") {
        throw ConfigError("unknown format '" + format + "' (expected csv|json)");
    }
}

struct ResolvedRun {
    problems::ProblemInstance instance;
    flow::FieldKind field = flow::FieldKind::landing;
    LandingParams params{1.0};
    flow::IntegratorConfig cfg;
    std::uint64_t seed = 0;
};

// Precedence: explicit CLI flags > problem spec file keys > defaults.
inline ResolvedRun resolve_run(const RunOptions& opts) {
    check_format(opts.format);
    nlohmann::json spec;
    const bool from_file = std::filesystem::exists(opts.problem);
    if (from_file) {
        std::ifstream is(opts.problem);
        if (!is) throw ConfigError("cannot open problem file " + opts.problem);
        try {
            is >> spec;
        } catch (const std::exception& e) {
            throw ConfigError("cannot parse problem file " + opts.problem + ": " + e.what());
        }
    }

    if (opts.lambda < 0.0) throw ConfigError("lambda must be positive");
    if (opts.dt < 0.0) throw ConfigError("dt must be positive");
    if (opts.tmax < 0.0) throw ConfigError("tmax must be positive");

    ResolvedRun run;
    run.field = parse_field(opts.field);
    run.seed = opts.seed ? *opts.seed
                         : (from_file ? spec.value("seed", std::uint64_t{0}) : std::uint64_t{0});

    const double lambda =
        opts.lambda > 0.0 ? opts.lambda : (from_file ? spec.value("lambda", 1.0) : 1.0);
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    run.params = LandingParams(lambda);

    run.cfg.scheme = parse_scheme(opts.integrator);
    run.cfg.dt = opts.dt > 0.0 ? opts.dt : (from_file ? spec.value("dt", 0.0) : 0.0);
    run.cfg.t_max = opts.tmax > 0.0 ? opts.tmax : (from_file ? spec.value("tmax", 0.0) : 0.0);
    run.cfg.record_every = opts.record_every;
    run.cfg.residual_tol = opts.residual_tol;
    if (run.cfg.record_every < 1) throw ConfigError("record-every must be >= 1");
    if (run.cfg.residual_tol <= 0.0) throw ConfigError("residual tolerance must be positive");

    try {
        if (from_file) {
            if (!opts.seed) {
                run.instance = problems::load_problem(spec);
            } else {
                spec["seed"] = *opts.seed;
                run.instance = problems::load_problem(spec);
            }
        } else {
            run.instance = problems::builtin_problem(opts.problem, run.seed);
        }
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid problem: ") + e.what());
    }
    return run;
}

} // namespace detail

/// Integrate one flow and write the trajectory.
inline int cmd_run(const RunOptions& opts, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    detail::ResolvedRun run;
    try {
        run = detail::resolve_run(opts);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    const Matrix x0 = problems::random_start(run.instance.n, run.instance.p, run.seed);
    flow::Trajectory traj;
    try {
        traj = flow::integrate(x0, run.field, run.instance.objective, run.params, run.cfg);
    } catch (const flow::NonmonotonePenaltyError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const RankError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }

    if (!opts.out.empty()) {
        io::save_trajectory(traj, opts.out, opts.format);
    }
    const auto& last = traj.samples.back();
    out << "problem=" << run.instance.objective.name << " field=" << opts.field
        << " lambda=" << io::format_double(run.params.lambda)
        << " terminated_by=" << flow::to_string(traj.terminated_by)
        << " t=" << io::format_double(last.t) << "\nfinal f=" << io::format_double(last.f)
        << " penalty=" << io::format_double(last.penalty)
        << " residual=" << io::format_double(last.residual) << '\n';
    return traj.terminated_by == flow::Termination::rank_failure ? 3 : 0;
}

struct Figure1Options {
    std::vector<double> lambdas = {0.25, 1.0, 4.0};
    std::string out_dir = "figure1";
    std::string format = "csv";
    std::string integrator = "rk4";
    double dt = 0.0;
    double tmax = 0.0;
    int record_every = 1;
    double residual_tol = 1e-10;
    std::uint64_t seed = 0;
};

/// Sweep the St(1,2) linear problem over the lambda grid from two fixed
/// starting points, one inside the unit circle at (0.4, 0.3) and one outside
/// at (1.6, 1.2). Writes one trajectory file per cell plus manifest.json.
/// Cells run concurrently, capped by LANDING_NUM_THREADS.
inline int cmd_figure1(const Figure1Options& opts, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    try {
        detail::check_format(opts.format);
        if (opts.lambdas.empty()) throw ConfigError("lambda grid must be nonempty");
        for (double l : opts.lambdas) {
            if (!(l > 0.0)) throw ConfigError("lambda values must be positive");
        }
        detail::parse_scheme(opts.integrator);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    const problems::ProblemInstance instance = problems::builtin_problem("linear21", opts.seed);
    Matrix inside(2, 1), outside(2, 1);
    inside << 0.4, 0.3;
    outside << 1.6, 1.2;
    const std::vector<std::pair<std::string, Matrix>> starts = {{"inside", inside},
                                                                {"outside", outside}};

    struct Cell {
        double lambda;
        std::string start_name;
        Matrix x0;
        std::string file;
        flow::Trajectory traj;
        std::string failure;
    };
    std::vector<Cell> cells;
    for (double lambda : opts.lambdas) {
        for (const auto& [name, x0] : starts) {
            Cell cell;
            cell.lambda = lambda;
            cell.start_name = name;
            cell.x0 = x0;
            char lam[32];
            std::snprintf(lam, sizeof(lam), "%g", lambda);
            cell.file = std::string("traj_lam") + lam + "_" + name + "." + opts.format;
            cells.push_back(std::move(cell));
        }
    }

    std::size_t max_threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LANDING_NUM_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) max_threads = static_cast<std::size_t>(parsed);
    }
    max_threads = std::min(max_threads, cells.size());

    const auto run_cell = [&](Cell& cell) {
        const LandingParams params(cell.lambda);
        flow::IntegratorConfig cfg;
        cfg.scheme = detail::parse_scheme(opts.integrator);
        cfg.dt = opts.dt;
        cfg.t_max = opts.tmax;
        cfg.record_every = opts.record_every;
        cfg.residual_tol = opts.residual_tol;
        try {
            cell.traj = flow::integrate(cell.x0, flow::FieldKind::landing, instance.objective,
                                        params, cfg);
            if (cell.traj.terminated_by == flow::Termination::rank_failure) {
                cell.failure = "rank_failure";
            }
        } catch (const std::exception& e) {
            cell.failure = e.what();
        }
    };

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(max_threads);
    for (std::size_t w = 0; w < max_threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
                run_cell(cells[i]);
            }
        });
    }
    for (auto& worker : workers) worker.join();

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) {
        err << "error: cannot create output directory " << opts.out_dir << '\n';
        return 2;
    }

    nlohmann::json manifest;
    manifest["problem"] = {{"kind", "linear"}, {"n", 2}, {"p", 1},
                           {"A", io::matrix_to_json(instance.objective.gradient(inside))}};
    manifest["lambdas"] = opts.lambdas;
    manifest["initial_points"] = {{"inside", io::matrix_to_json(inside)},
                                  {"outside", io::matrix_to_json(outside)}};
    manifest["note"] =
        "lambda grid and initial points are toolkit defaults, chosen so the starts bracket "
        "the unit circle";
    manifest["integrator"] = opts.integrator;
    manifest["format"] = opts.format;
    manifest["seed"] = opts.seed;
    manifest["cells"] = nlohmann::json::array();

    int failures = 0;
    for (const auto& cell : cells) {
        nlohmann::json entry = {{"lambda", cell.lambda},
                                {"start", cell.start_name},
                                {"file", cell.file}};
        if (cell.failure.empty()) {
            io::save_trajectory(cell.traj, opts.out_dir + "/" + cell.file, opts.format);
            const auto& last = cell.traj.samples.back();
            entry["t_end"] = last.t;
            entry["final_f"] = last.f;
            entry["final_penalty"] = last.penalty;
            entry["final_residual"] = last.residual;
            entry["terminated_by"] = flow::to_string(cell.traj.terminated_by);
        } else {
            entry["error"] = cell.failure;
            ++failures;
        }
        manifest["cells"].push_back(std::move(entry));
    }

    std::ofstream ms(opts.out_dir + "/manifest.json", std::ios::binary);
    ms << manifest.dump(2) << '\n';
    out << "wrote " << (cells.size() - failures) << "/" << cells.size() << " trajectories to "
        << opts.out_dir << '\n';
    return failures == 0 ? 0 : 3;
}

struct CertifyOptions {
    /// Existing trajectory file; when empty, an inline run described by
    /// `run` is integrated first.
    std::string traj;
    RunOptions run;
    std::vector<std::string> certificates = {"gram", "critical"};
    std::string out;
    double tol_gram = 1e-5;
    double tol_stat = 1e-6;
    double tol_feas = 1e-8;
    double stability_radius = 0.1;
    int stability_trials = 20;
};

/// Emit the requested certificate reports as a JSON array. Exit 0 iff every
/// applicable certificate passes.
inline int cmd_certify(const CertifyOptions& opts, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    detail::ResolvedRun run;
    flow::Trajectory traj;
    try {
        run = detail::resolve_run(opts.run);
        if (!opts.traj.empty()) {
            traj = io::load_trajectory(opts.traj);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    if (opts.traj.empty()) {
        const Matrix x0 = problems::random_start(run.instance.n, run.instance.p, run.seed);
        try {
            traj = flow::integrate(x0, run.field, run.instance.objective, run.params, run.cfg);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 3;
        }
    }

    nlohmann::json reports = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& name : opts.certificates) {
        diagnostics::CertificateReport report;
        if (name == "gram") {
            if (run.field == flow::FieldKind::plam) {
                report = diagnostics::not_applicable_report(
                    "gram_convergence", "closed-form Gram dynamics hold for the landing field only");
            } else {
                report = diagnostics::certify_gram_convergence(traj, run.params, opts.tol_gram);
            }
        } else if (name == "critical") {
            report = diagnostics::certify_critical_convergence(traj, run.instance.objective,
                                                               opts.tol_stat, opts.tol_feas);
        } else if (name == "stability") {
            if (!run.instance.optimum || !run.instance.optimum->minimizer) {
                report = diagnostics::not_applicable_report(
                    "stability_probe", "problem does not expose a known minimizer");
            } else {
                try {
                    diagnostics::StabilityOptions sopts;
                    sopts.seed = run.seed;
                    report = diagnostics::probe_stability(*run.instance.optimum->minimizer,
                                                          run.instance.objective, run.params,
                                                          opts.stability_radius,
                                                          opts.stability_trials, sopts);
                } catch (const std::invalid_argument& e) {
                    err << "error: " << e.what() << '\n';
                    return 2;
                }
            }
        } else {
            err << "error: unknown certificate '" << name << "' (expected gram|critical|stability)\n";
            return 2;
        }
        all_pass = all_pass && report.pass;
        reports.push_back(report.to_json());
    }

    const std::string text = reports.dump(2) + "\n";
    if (!opts.out.empty()) {
        std::ofstream os(opts.out, std::ios::binary);
        if (!os) {
            err << "error: cannot open report file " << opts.out << '\n';
            return 2;
        }
        os << text;
    }
    out << text;
    return all_pass ? 0 : 1;
}

} // namespace landing::cli
