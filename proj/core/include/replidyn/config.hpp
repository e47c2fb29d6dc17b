#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "replidyn/diagnostics.hpp"
#include "replidyn/solver.hpp"

namespace replidyn {

struct GridSpec {
    int dimension = 1;
    std::vector<double> extents{1.0};
    std::vector<int> n{201};
};

/// Initial profile: the torsion function scaled to the requested corrected
/// mass, optionally perturbed by a seeded smooth multiplicative factor.
/// method "shifted" starts the solver from eps + u0; "compatible" uses the
/// cutoff/quadratic construction and its property report.
struct InitSpec {
    std::string method = "shifted";
    double mass = 1.0;
    double noise = 0.0;
    std::optional<double> mollify_radius;
    std::optional<double> margin_theta;
    std::optional<double> margin_rho;
    std::optional<double> L;
};

struct DiagnosticsSpec {
    bool enabled = true;
    std::vector<std::string> checks{"mass_ode",  "h_identity",      "gradient_bound", "boundary_concentration",
                                    "phi_norm",  "energy_odi",      "interior_barrier", "mass_monotonicity",
                                    "poincare_rate", "comparison_bound", "weak_form"};
    CheckOptions options;
};

struct BlowupSpec {
    double growth_threshold = 10.0;
    double core_margin = 0.25;
};

struct ReplicatorSpec {
    /// coordination | identity | constant | kernel
    std::string game = "coordination";
    int m = 2;
    double sigma = 0.05;
    double payoff_shift = 0.0;
    std::vector<double> p0;  // empty: uniform
    double t_end = 10.0;
    double dt = 1e-2;
    int record_stride = 1;
};

struct ExperimentConfig {
    GridSpec grid;
    InitSpec init;
    SolverParams solver;
    DiagnosticsSpec diagnostics;
    BlowupSpec blowup;
    ReplicatorSpec replicator;
    std::string output_dir = "out";
    std::string name = "run";
    std::uint64_t seed = 0;
};

/// Sweep axes: initial_mass, epsilon, n, dt_init, margin.
struct SweepSpec {
    ExperimentConfig base;
    std::string axis;
    std::vector<double> values;
    int parallelism = 1;
};

/// Parses the flat `key = value` format. `#` starts a comment; lists are
/// whitespace- or comma-separated. Unknown keys, malformed values and
/// violated invariants raise Error naming the key and line.
ExperimentConfig parse_config(const std::string& text);

/// Same file format; the sweep.* keys are required here and rejected by parse_config.
SweepSpec parse_sweep(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

/// Applies one axis value to a copy of the base config.
ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis, double value);

const std::vector<std::string>& sweep_axes();

}  // namespace replidyn
