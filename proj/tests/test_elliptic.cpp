#include <doctest.h>

#include <cmath>

#include "replidyn/elliptic.hpp"
#include "replidyn/error.hpp"
#include "replidyn/linalg.hpp"
#include "support.hpp"

using namespace replidyn;
using testing::box;
using testing::interval;
using testing::pi;

namespace {

// Center value of the unit-square torsion function from its sine series.
double square_torsion_centre() {
    double s = 0.0;
    for (int m = 1; m < 400; m += 2)
        for (int n = 1; n < 400; n += 2) {
            const double sign = (((m - 1) / 2 + (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
            s += sign * 16.0 / (pi * pi * m * n * pi * pi * (m * m + n * n));
        }
    return s;
}

}  // namespace

TEST_CASE("1D torsion function is stencil exact") {
    const auto g = interval(201);
    const TorsionSolution t = solve_torsion(g);
    double err = 0.0, mx = 0.0;
    for (int i = 0; i < 201; ++i) {
        const double x = g->coord(0, i);
        err = std::max(err, std::abs(t.phi[g->index(i)] - x * (1 - x) / 2));
        mx = std::max(mx, t.phi[g->index(i)]);
    }
    CHECK(err <= 1e-10);
    CHECK(mx == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(t.phi[0] == 0.0);
    CHECK(t.phi[200] == 0.0);
    CHECK(t.domain_tag == "full");
}

TEST_CASE("2D unit-square centre value matches the series oracle") {
    const double oracle = square_torsion_centre();
    CHECK(oracle == doctest::Approx(0.07367).epsilon(1e-4));
    const auto g = box(65, 65);
    const TorsionSolution t = solve_torsion(g);
    CHECK(std::abs(t.phi[g->index(32, 32)] - oracle) <= 5e-4);
    CHECK(t.residual <= 1e-10);
    for (std::size_t k = 0; k < g->size(); ++k) {
        if (g->is_boundary(k))
            CHECK(t.phi[k] == 0.0);
        else
            CHECK(t.phi[k] > 0.0);
    }
}

TEST_CASE("subdomain torsion") {
    const auto g = interval(201);
    const TorsionSolution t = solve_torsion_subdomain(g, 0.25);
    double err = 0.0;
    for (int i = 0; i < 201; ++i) {
        const double x = g->coord(0, i);
        const double exact = (x > 0.25 && x < 0.75) ? (x - 0.25) * (0.75 - x) / 2 : 0.0;
        err = std::max(err, std::abs(t.phi[g->index(i)] - exact));
    }
    CHECK(err <= 1e-10);
    CHECK(std::abs(t.c_subdomain - 1.0 / 96.0) <= 1e-5);
    CHECK_THROWS_AS(solve_torsion_subdomain(g, 0.5), Error);
}

TEST_CASE("c_subdomain grows as the margin shrinks") {
    const auto g = box(41, 41);
    double prev = 0.0;
    for (double margin : {0.3, 0.2, 0.1}) {
        const double c = solve_torsion_subdomain(g, margin).c_subdomain;
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("phi_weighted_sup") {
    const auto g = interval(101);
    const TorsionSolution t = solve_torsion(g);
    Field v = t.phi;
    for (auto& x : v.values) x *= 3.0;
    CHECK(phi_weighted_sup(v, t) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(phi_weighted_sup(Field(g, 0.0), t) == 0.0);
    const Field w = sample(g, [](double x, double) { return x * (1 - x); });
    CHECK(phi_weighted_sup(w, t) == doctest::Approx(2.0).epsilon(1e-10));

    const Field s = sample(g, [](double x, double) { return std::sin(3 * x) - 0.2; });
    Field neg = s;
    for (auto& x : neg.values) x *= -2.5;
    CHECK(phi_weighted_sup(neg, t) == 2.5 * phi_weighted_sup(s, t));
}

TEST_CASE("discrete Poincare constant") {
    const auto g = interval(201);
    const double h = g->h[0];
    const double lambda = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
    CHECK(poincare_constant(g) == doctest::Approx(1.0 / lambda).epsilon(1e-8));
}

TEST_CASE("linear algebra kernels") {
    // 1D Dirichlet Laplacian, matrix-free.
    const int n = 50;
    std::vector<double> diag(n, 2.0), rhs(n, 1.0), x(n, 0.0);
    auto apply = [&](std::span<const double> in, std::span<double> out) {
        for (int i = 0; i < n; ++i)
            out[i] = 2 * in[i] - (i > 0 ? in[i - 1] : 0.0) - (i + 1 < n ? in[i + 1] : 0.0);
    };
    const CgResult r = conjugate_gradient(apply, diag, rhs, x, 1e-12, 500);
    CHECK(r.converged);
    std::vector<double> lo(n, -1.0), up(n, -1.0), y(n);
    CHECK(solve_tridiagonal(lo, diag, up, rhs, y));
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-9));
    std::vector<double> zero(n, 0.0);
    CHECK_FALSE(solve_tridiagonal(lo, zero, up, rhs, y));
}
