#include "replidyn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "replidyn/error.hpp"

namespace replidyn {

double Grid::measure() const { return dimension == 1 ? extents[0] : extents[0] * extents[1]; }

double Grid::boundary_distance(std::size_t k) const {
    const int i = static_cast<int>(k / static_cast<std::size_t>(n[1]));
    const int j = static_cast<int>(k % static_cast<std::size_t>(n[1]));
    const double x = coord(0, i);
    double d = std::min(x, extents[0] - x);
    if (dimension == 2) {
        const double y = coord(1, j);
        d = std::min(d, std::min(y, extents[1] - y));
    }
    return std::max(d, 0.0);
}

std::vector<int> Grid::shape() const {
    if (dimension == 1) return {n[0]};
    return {n[0], n[1]};
}

Field::Field(GridPtr g, double fill) : grid(std::move(g)), values(grid->size(), fill) {}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size()) throw Error("field size does not match grid");
}

GridPtr build_grid(int dimension, std::span<const double> extents, std::span<const int> n) {
    if (dimension != 1 && dimension != 2) throw Error("grid dimension must be 1 or 2");
    if (extents.size() < static_cast<std::size_t>(dimension) || n.size() < static_cast<std::size_t>(dimension))
        throw Error("grid needs one extent and one node count per axis");

    auto g = std::make_shared<Grid>();
    g->dimension = dimension;
    for (int a = 0; a < dimension; ++a) {
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
            throw Error("grid extent on axis " + std::to_string(a) + " must be positive");
        if (n[a] < 3) throw Error("grid needs n >= 3 nodes per axis, got " + std::to_string(n[a]));
        g->extents[a] = extents[a];
        g->n[a] = n[a];
        g->h[a] = extents[a] / (n[a] - 1);
    }
    if (dimension == 1) {
        g->extents[1] = 1.0;
        g->n[1] = 1;
        g->h[1] = 1.0;
    }

    const std::size_t total = static_cast<std::size_t>(g->n[0]) * static_cast<std::size_t>(g->n[1]);
    g->boundary_mask.assign(total, 0);
    g->quad_weights.assign(total, 0.0);
    for (int i = 0; i < g->n[0]; ++i) {
        const bool edge_i = (i == 0 || i == g->n[0] - 1);
        const double wi = g->h[0] * (edge_i ? 0.5 : 1.0);
        if (dimension == 1) {
            g->boundary_mask[g->index(i)] = edge_i;
            g->quad_weights[g->index(i)] = wi;
            continue;
        }
        for (int j = 0; j < g->n[1]; ++j) {
            const bool edge_j = (j == 0 || j == g->n[1] - 1);
            const double wj = g->h[1] * (edge_j ? 0.5 : 1.0);
            g->boundary_mask[g->index(i, j)] = edge_i || edge_j;
            g->quad_weights[g->index(i, j)] = wi * wj;
        }
    }
    return g;
}

void require_finite(const Field& f, const char* what) {
    for (double v : f.values)
        if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite value in field");
}

double integrate(const Field& f) {
    require_finite(f, "integrate");
    const auto& w = f.grid->quad_weights;
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f[k];
    return s;
}

Field laplacian(const Field& f, double boundary_value) {
    const Grid& g = *f.grid;
    Field out(f.grid, 0.0);
    auto val = [&](std::size_t k) { return g.is_boundary(k) ? boundary_value : f[k]; };
    const double ihx2 = 1.0 / (g.h[0] * g.h[0]);
    if (g.dimension == 1) {
        for (int i = 1; i < g.n[0] - 1; ++i)
            out[i] = (val(i - 1) - 2.0 * f[i] + val(i + 1)) * ihx2;
        return out;
    }
    const double ihy2 = 1.0 / (g.h[1] * g.h[1]);
    for (int i = 1; i < g.n[0] - 1; ++i) {
        for (int j = 1; j < g.n[1] - 1; ++j) {
            const std::size_t k = g.index(i, j);
            out[k] = (val(g.index(i - 1, j)) - 2.0 * f[k] + val(g.index(i + 1, j))) * ihx2 +
                     (val(g.index(i, j - 1)) - 2.0 * f[k] + val(g.index(i, j + 1))) * ihy2;
        }
    }
    return out;
}

namespace {

// Sum over cells of area * (grad a . grad b) with the edge-averaged forward
// difference stencil. va/vb map a node index to its value.
template <class A, class B>
double cell_inner(const Grid& g, A&& va, B&& vb) {
    if (g.dimension == 1) {
        double s = 0.0;
        for (int i = 0; i < g.n[0] - 1; ++i) s += (va(i + 1) - va(i)) * (vb(i + 1) - vb(i));
        return s / g.h[0];
    }
    double sx = 0.0;
    double sy = 0.0;
    for (int i = 0; i < g.n[0] - 1; ++i) {
        for (int j = 0; j < g.n[1] - 1; ++j) {
            const std::size_t k00 = g.index(i, j), k10 = g.index(i + 1, j);
            const std::size_t k01 = g.index(i, j + 1), k11 = g.index(i + 1, j + 1);
            sx += (va(k10) - va(k00)) * (vb(k10) - vb(k00)) + (va(k11) - va(k01)) * (vb(k11) - vb(k01));
            sy += (va(k01) - va(k00)) * (vb(k01) - vb(k00)) + (va(k11) - va(k10)) * (vb(k11) - vb(k10));
        }
    }
    return 0.5 * (sx * g.h[1] / g.h[0] + sy * g.h[0] / g.h[1]);
}

}  // namespace

double dirichlet_energy(const Field& f, double boundary_value) {
    require_finite(f, "dirichlet_energy");
    const Grid& g = *f.grid;
    auto val = [&](std::size_t k) { return g.is_boundary(k) ? boundary_value : f[k]; };
    return cell_inner(g, val, val);
}

double energy_inner(const Field& f, const Field& other) {
    const Grid& g = *f.grid;
    return cell_inner(g, [&](std::size_t k) { return f[k]; }, [&](std::size_t k) { return other[k]; });
}

CellData cell_data(const Field& f, double boundary_value) {
    const Grid& g = *f.grid;
    auto val = [&](std::size_t k) { return g.is_boundary(k) ? boundary_value : f[k]; };
    CellData c;
    if (g.dimension == 1) {
        const int cells = g.n[0] - 1;
        c.area = g.h[0];
        c.grad_sq.resize(cells);
        c.mean.resize(cells);
        c.centre_distance.resize(cells);
        for (int i = 0; i < cells; ++i) {
            const double d = (val(i + 1) - val(i)) / g.h[0];
            c.grad_sq[i] = d * d;
            c.mean[i] = 0.5 * (val(i) + val(i + 1));
            const double x = (i + 0.5) * g.h[0];
            c.centre_distance[i] = std::min(x, g.extents[0] - x);
        }
        return c;
    }
    const int cx = g.n[0] - 1, cy = g.n[1] - 1;
    c.area = g.h[0] * g.h[1];
    const std::size_t cells = static_cast<std::size_t>(cx) * static_cast<std::size_t>(cy);
    c.grad_sq.resize(cells);
    c.mean.resize(cells);
    c.centre_distance.resize(cells);
    for (int i = 0; i < cx; ++i) {
        for (int j = 0; j < cy; ++j) {
            const double f00 = val(g.index(i, j)), f10 = val(g.index(i + 1, j));
            const double f01 = val(g.index(i, j + 1)), f11 = val(g.index(i + 1, j + 1));
            const double gx2 = 0.5 * ((f10 - f00) * (f10 - f00) + (f11 - f01) * (f11 - f01)) / (g.h[0] * g.h[0]);
            const double gy2 = 0.5 * ((f01 - f00) * (f01 - f00) + (f11 - f10) * (f11 - f10)) / (g.h[1] * g.h[1]);
            const std::size_t k = static_cast<std::size_t>(i) * cy + j;
            c.grad_sq[k] = gx2 + gy2;
            c.mean[k] = 0.25 * (f00 + f10 + f01 + f11);
            const double x = (i + 0.5) * g.h[0], y = (j + 0.5) * g.h[1];
            c.centre_distance[k] = std::min(std::min(x, g.extents[0] - x), std::min(y, g.extents[1] - y));
        }
    }
    return c;
}

double l2_norm(const Field& f) {
    const auto& w = f.grid->quad_weights;
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f[k] * f[k];
    return std::sqrt(s);
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace replidyn
