#include <doctest.h>

#include <cmath>

#include "replidyn/diagnostics.hpp"
#include "replidyn/elliptic.hpp"
#include "replidyn/error.hpp"
#include "replidyn/solver.hpp"
#include "support.hpp"

using namespace replidyn;
using testing::interval;

namespace {

// Trace with given corrected mass and energy functions sampled at spacing dt.
template <class Y, class E>
Trace synthetic(Y y, E e, double dt, int rows, double eps = 0.0) {
    Trace tr;
    tr.epsilon = eps;
    for (int k = 0; k < rows; ++k) {
        const double t = k * dt;
        tr.rows.push_back({t, k ? dt : 0.0, y(t) + eps, e(t), 1.0, 1.0, e(t), 0});
    }
    return tr;
}

std::vector<Snapshot> constant_run(const GridPtr& g, double eps, int n) {
    std::vector<Snapshot> s;
    for (int k = 0; k < n; ++k) s.push_back(make_snapshot(0.1 * k, Field(g, eps), eps));
    return s;
}

struct Run {
    SimulationResult sim;
    Field u0;
};

Run torsion_run(double mass, double t_end, double dt_max, int stride = 1) {
    const auto g = interval(201);
    const TorsionSolution t = solve_torsion(g);
    SolverParams p;
    p.t_end = t_end;
    p.dt_max = dt_max;
    p.snapshot_stride = stride;
    Field u = t.phi;
    for (auto& v : u.values) v = p.epsilon + mass * v / integrate(t.phi);
    return {run(u, p, t), u};
}

}  // namespace

TEST_CASE("mass_ode_residual on synthetic traces") {
    const Trace flat = synthetic([](double) { return 0.0; }, [](double) { return 0.0; }, 0.1, 5, 1e-3);
    CHECK(mass_ode_residual(flat).max_residual == 0.0);
    const Trace crit = synthetic([](double) { return 1.0; }, [](double t) { return 3.0 + t; }, 0.1, 5);
    CHECK(mass_ode_residual(crit).max_residual == 0.0);
    CHECK(mass_ode_residual(crit).normalized == 0.0);

    const Trace ex = synthetic([](double t) { return 1.0 + 0.5 * std::exp(t); }, [](double) { return 1.0; }, 1e-3, 100);
    const MassOdeResidual r = mass_ode_residual(ex);
    CHECK(r.t.size() == 98u);
    CHECK(r.normalized <= 1e-6);
    CHECK_THROWS_AS(mass_ode_residual(synthetic([](double) { return 1.0; }, [](double) { return 1.0; }, 1, 2)), Error);
}

TEST_CASE("h identity on the manufactured solution") {
    const Trace ex = synthetic([](double t) { return 1.0 + 0.5 * std::exp(t); }, [](double) { return 1.0; }, 1e-3, 1001);
    const HIdentity h = h_identity_check(ex);
    CHECK(h.abs_error.front() == 0.0);
    CHECK(h.max_abs_error <= 1e-6);
    const Trace sub = synthetic([](double) { return 0.9; }, [](double) { return 1.0; }, 1e-3, 10);
    CHECK_THROWS_WITH_AS(h_identity_check(sub), doctest::Contains("supercritical"), Error);
}

TEST_CASE("precap_rows stops at half the cap or at saturation") {
    Trace tr = synthetic([](double t) { return 1.0 + t; }, [](double t) { return 10.0 * t; }, 1.0, 10, 0.01);
    for (std::size_t k = 0; k < tr.size(); ++k) tr.rows[k].sup_norm = 1.0 + k;
    tr.sup_cap = 12.0;
    CHECK(precap_rows(tr) == 5u);  // sup 6 reaches half the cap
    tr.sup_cap = 100.0;
    CHECK(precap_rows(tr) == 10u);
    tr.rows[7].dirichlet_energy = 100.0;  // 1/eps
    CHECK(precap_rows(tr) == 7u);
}

TEST_CASE("constant state passes every estimate trivially") {
    const auto g = interval(51);
    const double eps = 1e-3;
    const auto snaps = constant_run(g, eps, 6);
    const Field u0(g, eps);
    const BoundaryConcentration bc = boundary_concentration(snaps, 0.5, 0.1, u0);
    CHECK(bc.lhs == 0.0);
    CHECK(bc.lhs <= bc.bound + 1e-15);

    Trace tr = synthetic([](double) { return 0.0; }, [](double) { return 0.0; }, 0.1, 6, eps);
    const GradientBound gb = gradient_bound_check(tr, snaps, solve_torsion_subdomain(g, 0.25), u0);
    for (bool p : gb.pass) CHECK(p);
    for (double e : gb.energy) CHECK(e == 0.0);

    const TestFunction tf = bump_test_function(*g, 0.2, 0.5);
    const WeakFormTerms w = weak_form_residual(snaps, tf, 0.0, 0.5, eps);
    CHECK(w.residual == 0.0);
}

TEST_CASE("weak form with a zero test function is zero") {
    const Run r = torsion_run(1.0, 0.05, 1e-4, 10);
    TestFunction zero{[](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; }};
    CHECK(weak_form_residual(r.sim.snapshots, zero, 0.0, 0.05, 1e-3).residual == 0.0);
}

TEST_CASE("weak form rejects test functions touching the boundary") {
    const Run r = torsion_run(1.0, 0.05, 1e-4, 10);
    TestFunction wide{[](double, double, double t) { return 1.0 - t; }, [](double, double, double) { return -1.0; }};
    CHECK_THROWS_AS(weak_form_residual(r.sim.snapshots, wide, 0.0, 0.05, 1e-3), Error);
}

TEST_CASE("gradient bound holds with equality at t = 0") {
    const Run r = torsion_run(0.5, 0.5, 1e-3, 10);
    const auto g = r.u0.grid;
    const GradientBound gb = gradient_bound_check(r.sim.trace, r.sim.snapshots, solve_torsion_subdomain(g, 0.25), r.u0);
    CHECK(gb.energy.front() == doctest::Approx(gb.bound.front()).epsilon(1e-12));
    for (bool p : gb.pass) CHECK(p);
}

TEST_CASE("boundary concentration on a decaying run") {
    const Run r = torsion_run(0.5, 2.0, 1e-3, 1);
    const BoundaryConcentration bc = boundary_concentration(r.sim.snapshots, 0.5, 0.1, r.u0);
    CHECK(bc.lhs > 0.0);
    CHECK(bc.lhs <= bc.bound);
    CHECK(bc.collar_energy <= bc.collar_bound);
    CHECK(bc.eta > 0.0);
}

TEST_CASE("phi norm, energy ODI, monotonicity and Poincare rate on short runs") {
    const Run low = torsion_run(0.5, 1.0, 1e-3);
    CHECK(phi_norm_bound_check(low.sim.trace).all());
    CHECK(energy_odi_check(low.sim.trace).all());
    CHECK(mass_monotonicity_check(low.sim.trace).all());
    const double cp = poincare_constant(low.u0.grid);
    CHECK(poincare_rate_check(low.sim.trace, cp).all());

    const Run high = torsion_run(1.5, 1.0, 2e-5);
    const std::size_t pre = precap_rows(high.sim.trace);
    CHECK(phi_norm_bound_check(high.sim.trace, 0.05, pre).all());
    CHECK(mass_monotonicity_check(high.sim.trace, 1e-6, pre).all());
    CHECK(poincare_rate_check(high.sim.trace, cp, 0.1, pre).all());
}

TEST_CASE("final_over_median and energy_time_integral") {
    const Trace tr = synthetic([](double t) { return 1.0 + t; }, [](double t) { return 1.0 + t; }, 1.0, 5);
    CHECK(final_over_median(tr, 5, true) == doctest::Approx(5.0 / 3.0));
    CHECK(energy_time_integral(tr) == doctest::Approx(12.0));
}

TEST_CASE("run_checks output") {
    const Run r = torsion_run(0.5, 0.5, 1e-3, 5);
    const auto rows = run_checks(r.sim.trace, r.sim.snapshots, check_names());
    CHECK_FALSE(rows.empty());
    CHECK(all_pass(rows));
    const std::string csv = checks_to_csv(rows);
    CHECK(csv.rfind("check,t,value,bound,pass\n", 0) == 0);
    CHECK(csv.find(",true\n") != std::string::npos);
    CHECK_THROWS_AS(run_checks(r.sim.trace, r.sim.snapshots, {"no_such_check"}), Error);
}
