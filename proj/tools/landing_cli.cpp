// Command-line front end. Subcommands:
//   run      integrate one flow and write the trajectory
//   figure1  sweep the St(1,2) linear problem over a lambda grid
//   certify  emit JSON certificate reports for a run or a trajectory file

#include "landing/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Landing-flow toolkit: retraction-free optimization over orthonormal frames"};
    app.require_subcommand(1);

    landing::cli::RunOptions run_opts;
    std::uint64_t seed_flag = 0;

    auto* run = app.add_subcommand("run", "Integrate a flow and write its trajectory");
    run->add_option("--problem", run_opts.problem,
                    "Problem spec file or builtin (linear21|rayleigh20x3|procrustes83)");
    run->add_option("--field", run_opts.field, "Vector field: landing|plam")
        ->check(CLI::IsMember({"landing", "plam"}));
    run->add_option("--lambda", run_opts.lambda, "Regularization weight (> 0)");
    run->add_option("--integrator", run_opts.integrator, "Scheme: euler|rk4|rkf45")
        ->check(CLI::IsMember({"euler", "rk4", "rkf45"}));
    run->add_option("--dt", run_opts.dt, "Fixed step size (default 0.01/lambda)");
    run->add_option("--tmax", run_opts.tmax, "Integration horizon (default 20/lambda)");
    auto* run_seed = run->add_option("--seed", seed_flag, "Seed for the initial point");
    run->add_option("--out", run_opts.out, "Trajectory output path");
    run->add_option("--format", run_opts.format, "Output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--record-every", run_opts.record_every, "Sample stride (accepted steps)");
    run->add_option("--residual-tol", run_opts.residual_tol, "Stop when ||field|| drops below");

    landing::cli::Figure1Options fig_opts;
    auto* fig = app.add_subcommand("figure1",
                                   "St(1,2) linear-problem sweep over lambda and two starts");
    fig->add_option("--lambdas", fig_opts.lambdas, "Lambda grid (default 0.25 1 4)");
    fig->add_option("--out-dir", fig_opts.out_dir, "Output directory");
    fig->add_option("--format", fig_opts.format, "Output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    fig->add_option("--integrator", fig_opts.integrator, "Scheme: euler|rk4|rkf45")
        ->check(CLI::IsMember({"euler", "rk4", "rkf45"}));
    fig->add_option("--dt", fig_opts.dt, "Fixed step size (default 0.01/lambda per cell)");
    fig->add_option("--tmax", fig_opts.tmax, "Horizon (default 20/lambda per cell)");
    fig->add_option("--record-every", fig_opts.record_every, "Sample stride");
    fig->add_option("--seed", fig_opts.seed, "Seed recorded in the manifest");

    landing::cli::CertifyOptions cert_opts;
    std::uint64_t cert_seed_flag = 0;
    auto* cert = app.add_subcommand("certify", "Run certificates and emit JSON reports");
    cert->add_option("--traj", cert_opts.traj, "Existing trajectory file (csv|json)");
    cert->add_option("--problem", cert_opts.run.problem, "Problem spec file or builtin");
    cert->add_option("--field", cert_opts.run.field, "Field the trajectory follows")
        ->check(CLI::IsMember({"landing", "plam"}));
    cert->add_option("--lambda", cert_opts.run.lambda, "Regularization weight");
    cert->add_option("--integrator", cert_opts.run.integrator, "Scheme for inline runs")
        ->check(CLI::IsMember({"euler", "rk4", "rkf45"}));
    cert->add_option("--dt", cert_opts.run.dt, "Step size for inline runs");
    cert->add_option("--tmax", cert_opts.run.tmax, "Horizon for inline runs");
    auto* cert_seed = cert->add_option("--seed", cert_seed_flag, "Seed for inline runs");
    cert->add_option("--certificates", cert_opts.certificates,
                     "Certificates to run: gram|critical|stability");
    cert->add_option("--out", cert_opts.out, "Report output path (also printed to stdout)");
    cert->add_option("--tol-gram", cert_opts.tol_gram, "Gram deviation tolerance");
    cert->add_option("--tol-stat", cert_opts.tol_stat, "Stationarity tolerance");
    cert->add_option("--tol-feas", cert_opts.tol_feas, "Feasibility tolerance");
    cert->add_option("--radius", cert_opts.stability_radius, "Stability probe radius");
    cert->add_option("--trials", cert_opts.stability_trials, "Stability probe trials");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (run->parsed()) {
        if (run_seed->count() > 0) run_opts.seed = seed_flag;
        return landing::cli::cmd_run(run_opts);
    }
    if (fig->parsed()) {
        return landing::cli::cmd_figure1(fig_opts);
    }
    if (cert_seed->count() > 0) cert_opts.run.seed = cert_seed_flag;
    return landing::cli::cmd_certify(cert_opts);
}
