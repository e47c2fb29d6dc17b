#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace replidyn {

/// Uniform tensor grid on an interval or an axis-aligned box [0,L1]x[0,L2].
///
/// Nodes are stored row-major with the first axis varying slowest, so in 2D
/// node (i, j) lives at index i * n[1] + j. The outermost node layer is the
/// Dirichlet boundary.
struct Grid {
    int dimension = 1;
    std::array<double, 2> extents{1.0, 1.0};
    std::array<int, 2> n{3, 1};
    std::array<double, 2> h{0.5, 1.0};
    std::vector<std::uint8_t> boundary_mask;
    std::vector<double> quad_weights;

    std::size_t size() const { return quad_weights.size(); }
    std::size_t index(int i, int j = 0) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n[1]) + static_cast<std::size_t>(j);
    }
    bool is_boundary(std::size_t k) const { return boundary_mask[k] != 0; }
    double coord(int axis, int i) const { return h[axis] * i; }
    /// Lebesgue measure of the domain.
    double measure() const;
    /// Distance of node k to the boundary of the box.
    double boundary_distance(std::size_t k) const;
    /// Node counts of the axes in use (1 or 2 entries).
    std::vector<int> shape() const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal scalar values on a grid.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    Field(GridPtr g, double fill = 0.0);
    Field(GridPtr g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
};

GridPtr build_grid(int dimension, std::span<const double> extents, std::span<const int> n);

/// Evaluates f at every node (x, y); y = 0 in 1D.
template <class F>
Field sample(const GridPtr& grid, F&& f) {
    Field out(grid);
    if (grid->dimension == 1) {
        for (int i = 0; i < grid->n[0]; ++i) out[grid->index(i)] = f(grid->coord(0, i), 0.0);
    } else {
        for (int i = 0; i < grid->n[0]; ++i)
            for (int j = 0; j < grid->n[1]; ++j)
                out[grid->index(i, j)] = f(grid->coord(0, i), grid->coord(1, j));
    }
    return out;
}

/// Trapezoid quadrature of the nodal values.
double integrate(const Field& f);

/// Second-order central Laplacian on interior nodes; boundary nodes of f are
/// replaced by boundary_value, and the output is zero on the boundary.
Field laplacian(const Field& f, double boundary_value);

/// Integral of |grad f|^2 from forward differences on cells with midpoint
/// quadrature; boundary nodes take boundary_value.
double dirichlet_energy(const Field& f, double boundary_value);

/// Symmetric bilinear form whose diagonal is dirichlet_energy. Both fields use
/// their own boundary values (pass fields that already carry them).
double energy_inner(const Field& f, const Field& g);

/// Per-cell |grad f|^2 (same stencil as dirichlet_energy) and the cell-average
/// of f. Cell c of a 2D grid is (i, j) with index i * (n[1]-1) + j.
struct CellData {
    std::vector<double> grad_sq;
    std::vector<double> mean;
    std::vector<double> centre_distance;  // distance of the cell centre to the boundary
    double area = 0.0;
};
CellData cell_data(const Field& f, double boundary_value);

/// L2 norm by trapezoid quadrature.
double l2_norm(const Field& f);

double sup_norm(const Field& f);

/// Throws if any value is NaN or infinite.
void require_finite(const Field& f, const char* what);

}  // namespace replidyn
