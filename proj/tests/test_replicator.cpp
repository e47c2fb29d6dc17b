#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "replidyn/error.hpp"
#include "replidyn/replicator.hpp"
#include "support.hpp"

using namespace replidyn;
using testing::interval;
using testing::pi;

namespace {

PayoffMatrix identity(std::size_t m) {
    PayoffMatrix a(m);
    for (std::size_t i = 0; i < m; ++i) a(i, i) = 1.0;
    return a;
}

// Scalar form of the 2-strategy coordination game, p' = p (1 - p) (2p - 1).
double coordination_oracle(double p, double t_end) {
    const double dt = 1e-5;
    auto f = [](double x) { return x * (1 - x) * (2 * x - 1); };
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int s = 0; s < steps; ++s) {
        const double k1 = f(p), k2 = f(p + dt / 2 * k1), k3 = f(p + dt / 2 * k2), k4 = f(p + dt * k3);
        p += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return p;
}

}  // namespace

TEST_CASE("replicator_rhs examples") {
    const auto a = identity(2);
    const std::vector<double> mid{0.5, 0.5};
    const auto r0 = replicator_rhs(mid, a);
    CHECK(r0[0] == 0.0);
    CHECK(r0[1] == 0.0);
    const std::vector<double> p{0.75, 0.25};
    const auto r = replicator_rhs(p, a);
    CHECK(r[0] == 0.09375);
    CHECK(r[1] == -0.09375);
}

TEST_CASE("replicator_rhs is tangent to the simplex") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 2 + trial % 7;
        PayoffMatrix a(m);
        for (auto& v : a.a) v = U(rng) * 4 - 2;
        std::vector<double> p(m);
        double s = 0.0;
        for (auto& v : p) s += (v = U(rng));
        for (auto& v : p) v /= s;
        double sum = 0.0;
        for (double v : replicator_rhs(p, a)) sum += v;
        CHECK(std::abs(sum) <= 1e-15);
    }
}

TEST_CASE("payoff shift leaves the vector field unchanged") {
    PayoffMatrix a(3), b(3);
    const double vals[] = {1, -2, 3, 0, 5, -1, 2, 2, -4};
    for (int k = 0; k < 9; ++k) {
        a.a[k] = vals[k];
        b.a[k] = vals[k] + 8.0;
    }
    const std::vector<double> p{0.5, 0.25, 0.25};
    CHECK(replicator_rhs(p, a) == replicator_rhs(p, b));

    const ReplicatorTrace ta = integrate_replicator({0.5, 0.25, 0.25}, a, 2.0, 1.0 / 128);
    const ReplicatorTrace tb = integrate_replicator({0.5, 0.25, 0.25}, b, 2.0, 1.0 / 128);
    for (std::size_t k = 0; k < ta.p.size(); ++k)
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ta.p[k][i] - tb.p[k][i]) <= 1e-13);
}

TEST_CASE("constant payoff keeps the uniform state") {
    const PayoffMatrix a(4, 2.5);
    const ReplicatorTrace tr = integrate_replicator({0.25, 0.25, 0.25, 0.25}, a, 1.0, 0.1);
    for (const auto& p : tr.p)
        for (double v : p) CHECK(v == 0.25);
}

TEST_CASE("coordination game follows the scalar ODE") {
    const ReplicatorTrace tr = integrate_replicator({0.6, 0.4}, identity(2), 10.0, 1e-2);
    for (std::size_t k = 1; k < tr.p.size(); ++k) CHECK(tr.p[k][0] > tr.p[k - 1][0]);
    CHECK(tr.p.back()[0] > 0.99);
    CHECK(std::abs(tr.p.back()[0] - coordination_oracle(0.6, 10.0)) <= 1e-4);
    CHECK(tr.t.back() == 10.0);
}

TEST_CASE("simplex invariance on random games") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    PayoffMatrix a(10);
    for (auto& v : a.a) v = U(rng);
    std::vector<double> p(10, 0.1);
    const ReplicatorTrace tr = integrate_replicator(p, a, 20.0, 1e-2);
    for (const auto& q : tr.p) {
        double s = 0.0;
        for (double v : q) {
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) <= 1e-9);
    }
}

TEST_CASE("a step that overshoots the simplex is an error") {
    PayoffMatrix a(2);
    a(0, 0) = 1000.0;
    CHECK_THROWS_WITH_AS(integrate_replicator({0.5, 0.5}, a, 1.0, 0.5), doctest::Contains("dt too large"), Error);
    CHECK_THROWS_AS(integrate_replicator({0.7, 0.7}, a, 1.0, 0.1), Error);
}

TEST_CASE("kernel payoff matrix") {
    const auto g = interval(401);
    const double sigma = 0.02, h = g->h[0];
    const PayoffMatrix a = payoff_matrix_from_kernel(*g, sigma);
    const double diag = h / (sigma * std::sqrt(2 * pi));
    for (std::size_t i = 0; i < a.m; ++i) CHECK(a(i, i) == diag);
    for (std::size_t i = 0; i < a.m; ++i)
        for (std::size_t j = 0; j < i; ++j) CHECK(a(i, j) == a(j, i));
    for (int i = 0; i < 401; ++i) {
        const double x = g->coord(0, i);
        if (std::min(x, 1 - x) < 5 * sigma) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < a.m; ++j) s += a(static_cast<std::size_t>(i), j);
        CHECK(s >= 0.999);
    }
}

TEST_CASE("kernel-Laplacian consistency") {
    const auto g = interval(801);
    const Field affine = sample(g, [](double x, double) { return 2.0 - 3.0 * x; });
    CHECK(kernel_laplacian_consistency(affine, 0.05) <= 1e-8);

    const Field s = sample(g, [](double x, double) { return std::sin(pi * x); });
    const double d1 = kernel_laplacian_consistency(s, 0.05);
    const double d2 = kernel_laplacian_consistency(s, 0.025);
    const double moment_bound = std::pow(pi, 4) * 0.05 * 0.05 / 8;
    CHECK(d1 <= 2.0 * moment_bound);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
    CHECK_THROWS_AS(kernel_laplacian_consistency(s, 1e-3), Error);
}

TEST_CASE("replicator trace writers") {
    const ReplicatorTrace tr = integrate_replicator({0.6, 0.4}, identity(2), 0.02, 0.01);
    std::ostringstream csv;
    write_replicator_csv(csv, tr);
    CHECK(csv.str().rfind("t,p_1,p_2\n0,0.6,0.4\n", 0) == 0);
    std::ostringstream nd;
    write_replicator_ndjson(nd, tr);
    CHECK(nd.str().rfind("{\"p\":[0.6,0.4],\"t\":0.0}", 0) == 0);

    ReplicatorTrace wide;
    wide.t = {0.0};
    wide.p = {std::vector<double>(65, 1.0 / 65)};
    std::ostringstream os;
    CHECK_THROWS_AS(write_replicator_csv(os, wide), Error);
}
