#include "replidyn/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "replidyn/error.hpp"
#include "replidyn/mesh.hpp"

namespace replidyn {

TmaxFit estimate_tmax(const Trace& trace) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (trace.corrected_mass(k) > 1.0) idx.push_back(k);
    if (idx.size() < 10) throw Error("estimate_tmax: need at least 10 rows with corrected mass above 1");
    const std::size_t take = std::max<std::size_t>(10, idx.size() / 4);
    const std::size_t first = idx.size() - take;

    double st = 0, sw = 0, stt = 0, stw = 0;
    std::vector<double> t(take), w(take);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t k = idx[first + i];
        t[i] = trace.rows[k].t;
        w[i] = 1.0 / (trace.corrected_mass(k) - 1.0);
        st += t[i];
        sw += w[i];
    }
    const double n = static_cast<double>(take);
    const double tm = st / n, wm = sw / n;
    for (std::size_t i = 0; i < take; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        stw += (t[i] - tm) * (w[i] - wm);
    }
    if (!(stt > 0.0)) throw Error("estimate_tmax: degenerate time samples");
    const double slope = stw / stt;
    if (!(slope < 0.0)) throw Error("no blow-up signature");
    const double icpt = wm - slope * tm;

    double ss = 0.0, wmin = w[0], wmax = w[0];
    for (std::size_t i = 0; i < take; ++i) {
        const double r = w[i] - (icpt + slope * t[i]);
        ss += r * r;
        wmin = std::min(wmin, w[i]);
        wmax = std::max(wmax, w[i]);
    }
    TmaxFit fit;
    fit.t_max = -icpt / slope;
    const double range = wmax - wmin;
    fit.residual = range > 0.0 ? std::sqrt(ss / n) / range : 0.0;
    fit.points = take;
    return fit;
}

std::vector<double> default_checkpoints(double t_last) {
    return {0.5 * t_last, 0.7 * t_last, 0.85 * t_last, 0.95 * t_last, t_last};
}

BlowupReport blowup_set_estimate(const std::vector<Snapshot>& snapshots, std::span<const double> checkpoints,
                                 double growth_threshold, std::span<const double> core_margins) {
    if (checkpoints.size() < 3) throw Error("blowup_set_estimate: need at least 3 checkpoints");
    if (snapshots.empty()) throw Error("blowup_set_estimate: no snapshots");

    std::vector<std::size_t> picks;
    for (double tc : checkpoints) {
        std::size_t best = 0;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < snapshots.size(); ++s) {
            const double d = std::abs(snapshots[s].t - tc);
            if (d < gap) {
                gap = d;
                best = s;
            }
        }
        if (picks.empty() || picks.back() != best) picks.push_back(best);
    }
    if (picks.size() < 3)
        throw Error("blowup_set_estimate: checkpoints resolve to fewer than 3 distinct snapshots");

    const GridPtr grid = grid_from_snapshot(snapshots[picks.front()]);
    for (std::size_t p : picks)
        if (snapshots[p].shape != snapshots[picks.front()].shape)
            throw Error("blowup_set_estimate: snapshot shapes differ");

    BlowupReport rep;
    for (std::size_t p : picks) rep.checkpoint_times.push_back(snapshots[p].t);

    const Grid& g = *grid;
    const std::size_t K = picks.size();
    std::size_t interior = 0, blowing = 0;
    std::vector<double> node_growth(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        ++interior;
        const double base = snapshots[picks[0]].values[k];
        if (!(base > 0.0)) throw Error("blowup_set_estimate: nonpositive value at the first checkpoint");
        std::vector<double> seq(K);
        for (std::size_t c = 0; c < K; ++c) seq[c] = snapshots[picks[c]].values[k] / base;
        const bool increasing = seq[K - 1] > seq[K - 2] && seq[K - 2] > seq[K - 3];
        if (increasing && seq[K - 1] >= growth_threshold) ++blowing;
        rep.growth.push_back(seq[K - 1]);
        node_growth[k] = seq[K - 1];
    }
    rep.blowup_set_fraction = interior ? static_cast<double>(blowing) / static_cast<double>(interior) : 0.0;

    for (double m : core_margins) {
        CoreGrowth cg;
        cg.margin = m;
        cg.min_growth = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.is_boundary(k) || g.boundary_distance(k) < m - 1e-12) continue;
            cg.min_growth = std::min(cg.min_growth, node_growth[k]);
            ++cg.nodes;
        }
        if (cg.nodes == 0) throw Error("blowup_set_estimate: core margin leaves no nodes");
        rep.cores.push_back(cg);
    }
    return rep;
}

double poincare_blowup_bound(double y0, double c_p, double omega_measure) {
    if (!(y0 > 1.0)) throw Error("poincare_blowup_bound: corrected mass must exceed 1");
    if (!(c_p > 0.0) || !(omega_measure > 0.0)) throw Error("poincare_blowup_bound: need c_p > 0 and |Omega| > 0");
    const double z0 = 0.5 * (1.0 + y0);
    return c_p * omega_measure / ((y0 - 1.0) * z0);
}

}  // namespace replidyn
