#include "replidyn/replicator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "replidyn/error.hpp"
#include "replidyn/trace.hpp"

namespace replidyn {

void validate_simplex(std::span<const double> p) {
    if (p.empty()) throw Error("simplex state is empty");
    double s = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) throw Error("simplex state has a negative or non-finite component");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw Error("simplex state does not sum to 1");
}

std::vector<double> replicator_rhs(std::span<const double> p, const PayoffMatrix& a) {
    const std::size_t m = p.size();
    if (a.m != m) throw Error("replicator_rhs: payoff matrix size does not match the state");
    std::vector<double> ap(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) ap[i] += a(i, j) * p[j];
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += p[i] * ap[i];
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = (ap[i] - mean) * p[i];
    return out;
}

ReplicatorTrace integrate_replicator(std::vector<double> p, const PayoffMatrix& a, double t_end, double dt,
                                     std::size_t record_stride) {
    if (!(dt > 0.0)) throw Error("integrate_replicator: dt must be positive");
    if (!(t_end >= 0.0)) throw Error("integrate_replicator: t_end must be nonnegative");
    if (record_stride == 0) throw Error("integrate_replicator: record_stride must be >= 1");
    for (double v : a.a)
        if (!std::isfinite(v)) throw Error("integrate_replicator: payoff matrix has non-finite entries");
    validate_simplex(p);

    const std::size_t m = p.size();
    ReplicatorTrace tr;
    tr.t.push_back(0.0);
    tr.p.push_back(p);
    tr.clip.push_back(0.0);

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    std::vector<double> tmp(m);
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t0 = (s - 1) * dt;
        const double h = std::min(dt, t_end - t0);
        auto stage = [&](const std::vector<double>& k, double c) {
            for (std::size_t i = 0; i < m; ++i) tmp[i] = p[i] + c * h * k[i];
            return replicator_rhs(tmp, a);
        };
        const std::vector<double> k1 = replicator_rhs(p, a);
        const std::vector<double> k2 = stage(k1, 0.5);
        const std::vector<double> k3 = stage(k2, 0.5);
        const std::vector<double> k4 = stage(k3, 1.0);
        double clip = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (p[i] < 0.0) {
                clip -= p[i];
                p[i] = 0.0;
            }
        }
        if (clip > 1e-6) throw Error("dt too large");
        const double sum = std::accumulate(p.begin(), p.end(), 0.0);
        for (auto& v : p) v /= sum;
        tr.max_clip = std::max(tr.max_clip, clip);
        if (s % record_stride == 0 || s == steps) {
            tr.t.push_back(s == steps ? t_end : s * dt);
            tr.p.push_back(p);
            tr.clip.push_back(clip);
        }
    }
    return tr;
}

PayoffMatrix payoff_matrix_from_kernel(const Grid& grid, double sigma) {
    if (!(sigma > 0.0)) throw Error("payoff_matrix_from_kernel: sigma must be positive");
    if (grid.dimension != 1) throw Error("payoff_matrix_from_kernel: 1D grid required");
    const std::size_t m = static_cast<std::size_t>(grid.n[0]);
    const double h = grid.h[0];
    const double norm = h / (sigma * std::sqrt(2.0 * std::numbers::pi));
    PayoffMatrix a(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (static_cast<double>(i) - static_cast<double>(j)) * h;
            a(i, j) = norm * std::exp(-d * d / (2.0 * sigma * sigma));
        }
    }
    return a;
}

double kernel_laplacian_consistency(const Field& u, double sigma) {
    const Grid& g = *u.grid;
    if (g.dimension != 1) throw Error("kernel_laplacian_consistency: 1D field required");
    if (sigma < 2.0 * g.h[0]) throw Error("kernel_laplacian_consistency: sigma < 2h, kernel under-resolved");
    const double h = g.h[0];
    const int reach = static_cast<int>(std::ceil(12.0 * sigma / h));
    double defect = 0.0;
    bool any = false;
    for (int i = 1; i + 1 < g.n[0]; ++i) {
        const double x = g.coord(0, i);
        if (std::min(x, g.extents[0] - x) < 5.0 * sigma - 1e-12) continue;
        // Symmetric window, renormalized, so affine data is reproduced exactly
        // wherever the window is clipped by the boundary.
        const int w = std::min({reach, i, g.n[0] - 1 - i});
        double conv = 0.0, weight = 0.0;
        for (int j = i - w; j <= i + w; ++j) {
            const double d = (i - j) * h;
            const double k = std::exp(-d * d / (2.0 * sigma * sigma));
            conv += k * u[g.index(j)];
            weight += k;
        }
        conv /= weight;
        const double lap = (u[g.index(i - 1)] - 2.0 * u[g.index(i)] + u[g.index(i + 1)]) / (h * h);
        defect = std::max(defect, std::abs(2.0 / (sigma * sigma) * (conv - u[g.index(i)]) - lap));
        any = true;
    }
    if (!any) throw Error("kernel_laplacian_consistency: no node lies 5 sigma from the boundary");
    return defect;
}

void write_replicator_csv(std::ostream& os, const ReplicatorTrace& tr) {
    const std::size_t m = tr.p.empty() ? 0 : tr.p.front().size();
    if (m > kReplicatorCsvMaxColumns) throw Error("replicator CSV is limited to 64 strategies; use NDJSON");
    os << 't';
    for (std::size_t i = 1; i <= m; ++i) os << ",p_" << i;
    os << '\n';
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        os << format_double(tr.t[k]);
        for (double v : tr.p[k]) os << ',' << format_double(v);
        os << '\n';
    }
}

void write_replicator_ndjson(std::ostream& os, const ReplicatorTrace& tr) {
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        nlohmann::json j;
        j["t"] = tr.t[k];
        j["p"] = tr.p[k];
        os << j.dump() << '\n';
    }
}

}  // namespace replidyn
