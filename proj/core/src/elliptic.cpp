#include "replidyn/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "replidyn/error.hpp"
#include "replidyn/linalg.hpp"

namespace replidyn {

namespace {

constexpr double kTorsionTol = 1e-10;

// Index box [lo, hi] per axis; the nodes strictly inside are unknowns.
struct IndexBox {
    std::array<int, 2> lo{0, 0};
    std::array<int, 2> hi{0, 0};
};

// Unknowns of -Lap_h w = rhs on the interior of an index box.
class BoxPoisson {
public:
    BoxPoisson(const Grid& g, IndexBox box) : g_(g), box_(box) {
        for (int a = 0; a < 2; ++a) m_[a] = (a < g.dimension) ? box.hi[a] - box.lo[a] - 1 : 1;
        ihx2_ = 1.0 / (g.h[0] * g.h[0]);
        ihy2_ = g.dimension == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    }

    std::size_t unknowns() const { return static_cast<std::size_t>(m_[0]) * static_cast<std::size_t>(m_[1]); }
    double diagonal() const { return 2.0 * ihx2_ + 2.0 * ihy2_; }

    void apply(std::span<const double> x, std::span<double> y) const {
        auto at = [&](int i, int j) -> double {
            if (i < 0 || i >= m_[0] || j < 0 || j >= m_[1]) return 0.0;
            return x[static_cast<std::size_t>(i) * m_[1] + j];
        };
        for (int i = 0; i < m_[0]; ++i) {
            for (int j = 0; j < m_[1]; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * m_[1] + j;
                double v = (2.0 * x[k] - at(i - 1, j) - at(i + 1, j)) * ihx2_;
                if (g_.dimension == 2) v += (2.0 * x[k] - at(i, j - 1) - at(i, j + 1)) * ihy2_;
                y[k] = v;
            }
        }
    }

    // Grid node of unknown (i, j).
    std::size_t node(int i, int j) const {
        return g_.dimension == 1 ? g_.index(box_.lo[0] + 1 + i) : g_.index(box_.lo[0] + 1 + i, box_.lo[1] + 1 + j);
    }
    int m(int a) const { return m_[a]; }

private:
    const Grid& g_;
    IndexBox box_;
    std::array<int, 2> m_{1, 1};
    double ihx2_ = 0.0;
    double ihy2_ = 0.0;
};

TorsionSolution solve_box(const GridPtr& grid, IndexBox box) {
    BoxPoisson op(*grid, box);
    const std::size_t nu = op.unknowns();
    std::vector<double> rhs(nu, 1.0), x(nu, 0.0), diag(nu, op.diagonal());
    const int cap = static_cast<int>(10 * grid->size());
    const CgResult res = conjugate_gradient([&](std::span<const double> a, std::span<double> b) { op.apply(a, b); },
                                            diag, rhs, x, kTorsionTol, cap);
    if (!res.converged) {
        std::ostringstream msg;
        msg << "torsion solve did not converge after " << res.iterations << " iterations, relative residual "
            << res.relative_residual;
        throw Error(msg.str());
    }

    TorsionSolution sol;
    sol.phi = Field(grid, 0.0);
    for (int i = 0; i < op.m(0); ++i)
        for (int j = 0; j < op.m(1); ++j) sol.phi[op.node(i, j)] = x[static_cast<std::size_t>(i) * op.m(1) + j];
    sol.residual = res.relative_residual;
    sol.iterations = res.iterations;
    sol.c_subdomain = integrate(sol.phi);
    return sol;
}

}  // namespace

TorsionSolution solve_torsion(const GridPtr& grid) {
    IndexBox box;
    for (int a = 0; a < grid->dimension; ++a) box.hi[a] = grid->n[a] - 1;
    TorsionSolution sol = solve_box(grid, box);
    sol.domain_tag = "full";
    return sol;
}

TorsionSolution solve_torsion_subdomain(const GridPtr& grid, double margin) {
    if (!(margin > 0.0)) throw Error("subdomain margin must be positive");
    IndexBox box;
    for (int a = 0; a < grid->dimension; ++a) {
        const int lo = static_cast<int>(std::ceil(margin / grid->h[a] - 1e-9));
        const int hi = grid->n[a] - 1 - lo;
        if (hi - lo - 1 < 3)
            throw Error("subdomain margin " + std::to_string(margin) + " leaves fewer than 3 interior nodes on axis " +
                        std::to_string(a));
        box.lo[a] = lo;
        box.hi[a] = hi;
    }
    TorsionSolution sol = solve_box(grid, box);
    sol.margin = margin;
    std::ostringstream tag;
    tag << "subdomain:" << margin;
    sol.domain_tag = tag.str();
    return sol;
}

double phi_weighted_sup(const Field& v, const TorsionSolution& torsion) {
    if (v.grid->shape() != torsion.phi.grid->shape()) throw Error("phi_weighted_sup: grids differ");
    double m = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double p = torsion.phi[k];
        if (p > 0.0) m = std::max(m, std::abs(v[k] / p));
    }
    return m;
}

double poincare_constant(const GridPtr& grid) {
    IndexBox box;
    for (int a = 0; a < grid->dimension; ++a) box.hi[a] = grid->n[a] - 1;
    BoxPoisson op(*grid, box);
    const std::size_t nu = op.unknowns();
    std::vector<double> x(nu, 1.0), y(nu, 0.0), diag(nu, op.diagonal()), ax(nu);
    const int cap = static_cast<int>(10 * grid->size());

    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double a : v) s += a * a;
        return std::sqrt(s);
    };
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        const double nx = norm(x);
        for (auto& a : x) a /= nx;
        std::fill(y.begin(), y.end(), 0.0);
        const CgResult res = conjugate_gradient([&](std::span<const double> a, std::span<double> b) { op.apply(a, b); },
                                                diag, x, y, 1e-13, cap);
        if (!res.converged && res.relative_residual > 1e-9) throw Error("poincare_constant: inner solve failed");
        op.apply(y, ax);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < nu; ++k) {
            num += y[k] * ax[k];
            den += y[k] * y[k];
        }
        const double next = num / den;
        x.swap(y);
        if (it > 0 && std::abs(next - lambda) <= 1e-13 * next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return 1.0 / lambda;
}

}  // namespace replidyn
