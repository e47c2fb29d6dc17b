#include <doctest.h>

#include <cmath>

#include "replidyn/elliptic.hpp"
#include "replidyn/error.hpp"
#include "replidyn/initdata.hpp"
#include "support.hpp"

using namespace replidyn;
using testing::interval;

namespace {

struct Setup {
    GridPtr grid;
    TorsionSolution torsion;
    Field u0;
};

Setup half_torsion(int n = 201) {
    Setup s;
    s.grid = interval(n);
    s.torsion = solve_torsion(s.grid);
    s.u0 = s.torsion.phi;
    for (auto& v : s.u0.values) v *= 0.5;
    return s;
}

const PropertyCheck& find(const std::vector<PropertyCheck>& r, const std::string& name) {
    for (const auto& p : r)
        if (p.property == name) return p;
    FAIL("missing property " << name);
    return r.front();
}

}  // namespace

TEST_CASE("mollify") {
    const auto g = interval(201);
    CHECK(sup_norm(mollify(Field(g, 0.0), 0.05)) == 0.0);

    Field bump(g, 0.0);
    for (int i = 80; i <= 120; ++i) bump[g->index(i)] = 1.0;
    const Field m = mollify(bump, g->h[0]);
    CHECK(std::abs(integrate(m) - integrate(bump)) <= 1e-12);
    for (double v : m.values) CHECK(v >= 0.0);

    const TorsionSolution t = solve_torsion(g);
    const Field mt = mollify(t.phi, 0.05);
    Field diff(g);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = mt[k] - t.phi[k];
    CHECK(l2_norm(diff) <= 0.02);
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->boundary_distance(k) < 0.05 - 1e-12) CHECK(mt[k] == 0.0);

    CHECK_THROWS_AS(mollify(t.phi, 0.6), Error);
}

TEST_CASE("construct_initial on half the torsion function") {
    const Setup s = half_torsion();
    const double target = dirichlet_energy(s.u0, 0.0);
    CHECK(target == doctest::Approx(1.0 / 48.0).epsilon(1e-3));
    const InitDataRecipe r = default_recipe(s.u0, 1e-3, s.torsion);
    const InitDataResult res = construct_initial(r, s.torsion);
    CHECK(std::abs(res.C - target) <= 0.1 * target);
    CHECK(res.u0eps[0] == 1e-3);
    CHECK(res.u0eps[s.grid->size() - 1] == 1e-3);
    CHECK(res.A * res.C * res.C + res.B * res.C + res.Gamma == doctest::Approx(0.0).epsilon(1e-9));
    for (double v : res.u0eps.values) CHECK(v >= 1e-3);
    CHECK(res.report.size() == 7u);
    for (const auto& p : res.report) CHECK_MESSAGE(p.pass, p.property << " measured " << p.measured);
    CHECK(std::abs(integrate(res.u0eps) - integrate(s.u0) - res.mass_offset) <= 1e-10);
}

TEST_CASE("recipe invariants") {
    const Setup s = half_torsion(101);
    CHECK_THROWS_AS(construct_initial(default_recipe(Field(s.grid, 0.0), 1e-3, s.torsion), s.torsion), Error);
    InitDataRecipe r = default_recipe(s.u0, 1e-3, s.torsion);
    r.margin_theta = r.margin_rho;
    CHECK_THROWS_AS(construct_initial(r, s.torsion), Error);
    r = default_recipe(s.u0, 1.5, s.torsion);
    CHECK_THROWS_AS(construct_initial(r, s.torsion), Error);
    r = default_recipe(s.u0, 1e-3, s.torsion);
    r.L = 0.1;
    CHECK_THROWS_AS(construct_initial(r, s.torsion), Error);
}

TEST_CASE("a corrupted boundary value fails (a1)") {
    const Setup s = half_torsion();
    const InitDataRecipe r = default_recipe(s.u0, 1e-3, s.torsion);
    InitDataResult res = construct_initial(r, s.torsion);
    res.u0eps[0] = 2e-3;
    const auto report = verify_approx_properties(res, r, s.torsion);
    CHECK_FALSE(find(report, "a1_boundary").pass);
    CHECK_FALSE(all_pass(report));
}

TEST_CASE("epsilon sequence: C converges, alpha and the W12 distance shrink") {
    const Setup s = half_torsion();
    const double target = dirichlet_energy(s.u0, 0.0);
    double prev_gap = INFINITY, prev_alpha = INFINITY, prev_dist = INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const InitDataRecipe r = default_recipe(s.u0, eps, s.torsion);
        const InitDataResult res = construct_initial(r, s.torsion);
        const double gap = std::abs(res.C - target) / target;
        const double dist = w12_distance(res.u0eps, s.u0);
        CHECK(gap < prev_gap);
        CHECK(std::abs(res.alpha) < prev_alpha);
        CHECK(dist < prev_dist);
        CHECK(all_pass(res.report));
        prev_gap = gap;
        prev_alpha = std::abs(res.alpha);
        prev_dist = dist;
    }
}

TEST_CASE("a high-energy profile at a wide collar has no real root") {
    const Setup s = half_torsion();
    Field u0 = s.torsion.phi;
    for (auto& v : u0.values) v *= 18.0;  // corrected mass 1.5
    const InitDataRecipe r = default_recipe(u0, 1e-3, s.torsion);
    CHECK_THROWS_WITH_AS(construct_initial(r, s.torsion), doctest::Contains("no real root"), Error);
}
