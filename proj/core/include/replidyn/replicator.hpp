#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "replidyn/mesh.hpp"

namespace replidyn {

/// Dense m x m payoff matrix, row-major.
struct PayoffMatrix {
    std::size_t m = 0;
    std::vector<double> a;

    PayoffMatrix() = default;
    explicit PayoffMatrix(std::size_t size, double fill = 0.0) : m(size), a(size * size, fill) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * m + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * m + j]; }
};

/// Throws unless p is a probability vector (p >= 0, sum within 1e-9 of 1).
void validate_simplex(std::span<const double> p);

/// ((A p)_i - p^T A p) p_i.
std::vector<double> replicator_rhs(std::span<const double> p, const PayoffMatrix& a);

struct ReplicatorTrace {
    std::vector<double> t;
    std::vector<std::vector<double>> p;
    std::vector<double> clip;  // total clipped negative mass per recorded step
    double max_clip = 0.0;
};

/// Classical RK4. After each step negative components are clipped to 0 and
/// the state is renormalized; a step that needs a clip larger than 1e-6
/// throws "dt too large". Every record_stride-th state is stored.
ReplicatorTrace integrate_replicator(std::vector<double> p0, const PayoffMatrix& a, double t_end, double dt,
                                     std::size_t record_stride = 1);

/// a_ij = h (2 pi sigma^2)^{-1/2} exp(-(x_i - x_j)^2 / (2 sigma^2)) over the nodes of a 1D grid.
PayoffMatrix payoff_matrix_from_kernel(const Grid& grid, double sigma);

/// max over nodes at least 5 sigma from the boundary of
/// |(2 / sigma^2) (G_sigma * u - u) - Lap_h u|. 1D fields only.
double kernel_laplacian_consistency(const Field& u, double sigma);

/// Header t,p_1,...,p_m.
void write_replicator_csv(std::ostream& os, const ReplicatorTrace& tr);
/// One {"t": .., "p": [...]} record per line.
void write_replicator_ndjson(std::ostream& os, const ReplicatorTrace& tr);

inline constexpr std::size_t kReplicatorCsvMaxColumns = 64;

}  // namespace replidyn
