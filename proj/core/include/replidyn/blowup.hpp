#pragma once

#include <span>
#include <string>
#include <vector>

#include "replidyn/snapshot_io.hpp"
#include "replidyn/trace.hpp"

namespace replidyn {

struct TmaxFit {
    double t_max = 0.0;
    /// RMS deviation from the affine fit, relative to the range of the fitted values.
    double residual = 0.0;
    std::size_t points = 0;
};

/// Least-squares affine fit of 1/(y-1) against t over the last quartile of the
/// rows with corrected mass y > 1 (at least 10 rows); the root is the estimate.
TmaxFit estimate_tmax(const Trace& trace);

struct CoreGrowth {
    double margin = 0.0;
    double min_growth = 0.0;
    std::size_t nodes = 0;
};

struct BlowupReport {
    double t_max_estimate = 0.0;
    std::string fit_method = "affine_inverse_excess_mass";
    double fit_residual = 0.0;
    double blowup_set_fraction = 0.0;
    std::vector<double> checkpoint_times;  // snapshot times actually used
    std::vector<double> growth;            // u(x, t_K) / u(x, t_1) per interior node
    std::vector<CoreGrowth> cores;
};

/// {0.5, 0.7, 0.85, 0.95, 1.0} * t_last.
std::vector<double> default_checkpoints(double t_last);

/// Growth of every interior node along the checkpoints. Each checkpoint picks
/// the snapshot closest in time; at least 3 distinct snapshots are needed.
/// A node blows up when its growth sequence increases over the last three
/// checkpoints and the final growth reaches growth_threshold.
BlowupReport blowup_set_estimate(const std::vector<Snapshot>& snapshots, std::span<const double> checkpoints,
                                 double growth_threshold, std::span<const double> core_margins = {});

/// C_P |Omega| / ((y0 - 1) z0) with z0 = (1 + y0) / 2.
double poincare_blowup_bound(double y0, double c_p, double omega_measure);

}  // namespace replidyn
