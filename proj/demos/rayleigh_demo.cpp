// Minimal library usage: minimize the Rayleigh trace over St(p,n) by
// integrating the landing flow from an off-manifold start, then compare the
// reached value against the eigensolver optimum.

#include "landing/landing.hpp"

#include <iostream>

int main() {
    using namespace landing;

    const auto instance = problems::builtin_problem("rayleigh20x3", /*seed=*/7);
    const Matrix x0 = problems::random_start(instance.n, instance.p, /*seed=*/7);
    const LandingParams params(1.0);

    flow::IntegratorConfig cfg = flow::default_config(params);
    cfg.t_max = 60.0;
    cfg.record_every = 50;

    const auto traj =
        flow::integrate(x0, flow::FieldKind::landing, instance.objective, params, cfg);
    const auto& last = traj.samples.back();

    std::cout << "reached f = " << last.f << " (optimum " << instance.optimum->value << ")\n"
              << "penalty N = " << last.penalty << ", ||field|| = " << last.residual << '\n'
              << "terminated by: " << flow::to_string(traj.terminated_by) << '\n';

    const auto report = diagnostics::certify_critical_convergence(traj, instance.objective);
    std::cout << report.to_json().dump(2) << '\n';
    return report.pass ? 0 : 1;
}
