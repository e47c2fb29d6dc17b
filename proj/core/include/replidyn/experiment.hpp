#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "replidyn/blowup.hpp"
#include "replidyn/config.hpp"
#include "replidyn/diagnostics.hpp"
#include "replidyn/elliptic.hpp"
#include "replidyn/initdata.hpp"
#include "replidyn/replicator.hpp"
#include "replidyn/solver.hpp"

namespace replidyn {

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// REPLIDYN_OUT if set, otherwise the configured output directory.
std::filesystem::path output_root(const ExperimentConfig& config);

/// Torsion profile scaled to the given integral, with optional seeded
/// multiplicative noise from the lowest sine modes (mass restored afterwards).
Field scaled_torsion_profile(const TorsionSolution& torsion, double mass, double noise, std::uint64_t seed);

struct PreparedInitial {
    GridPtr grid;
    TorsionSolution torsion;
    InitDataRecipe recipe;
    InitDataResult init;
};

/// Grid, torsion function, target profile and regularized initial data.
PreparedInitial prepare_initial(const ExperimentConfig& config);

/// Ordered flat key/value summary; values are already JSON literals.
using FlatSummary = std::vector<std::pair<std::string, std::string>>;
std::string summary_json(const FlatSummary& summary);
std::string json_number(double v);

std::string initdata_report_csv(const std::vector<PropertyCheck>& report);

/// Full blow-up analysis of a finished run: T_max fit, blow-up set,
/// Poincare bound, and final-over-median ratios of energy and mass.
struct BlowupAnalysis {
    BlowupReport report;
    double poincare_bound = 0.0;
    double poincare_constant = 0.0;
    double energy_ratio = 0.0;
    double mass_ratio = 0.0;
    double mass_growth = 0.0;  // corrected mass at the last pre-cap row over the initial one
    std::string fit_error;     // nonempty when the T_max fit failed
};
BlowupAnalysis analyse_blowup(const Trace& trace, const std::vector<Snapshot>& snapshots, const BlowupSpec& spec);
std::string blowup_csv(const BlowupAnalysis& a);

struct ExperimentResult {
    int exit_code = 0;
    std::string message;
    std::filesystem::path dir;
    Outcome outcome = Outcome::RanToEnd;
    double t_max_estimate = 0.0;
    double max_mass_ode_residual = 0.0;
    std::optional<Snapshot> final_snapshot;
    FlatSummary summary;
};

/// initdata -> solver -> diagnostics -> blowup, with artifacts in
/// out_root / config.name. Exit code 0 ok, 1 module error, 2 failed check.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_root);

struct SweepRow {
    double axis_value = 0.0;
    std::string outcome;
    double t_max_estimate = 0.0;
    double max_mass_ode_residual = 0.0;
    int exit_code = 0;
    std::string message;
};

struct SweepResult {
    int exit_code = 0;
    std::vector<SweepRow> rows;
    /// epsilon axis only: L2 distance of u - eps between consecutive final snapshots.
    std::vector<double> pairwise_l2;
};

/// Runs every axis value with at most spec.parallelism concurrent runs.
/// Per-run directories live under out_root / name / <axis>_<value>.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_root);

/// Writes u0eps.ndjson and initdata_report.csv; exit code 2 if a property fails.
int run_initdata(const ExperimentConfig& config, const std::filesystem::path& out_root, std::string* message = nullptr);

/// Builds the game from replicator.* keys, integrates it and writes the trace.
int run_replicator(const ExperimentConfig& config, const std::filesystem::path& out_root,
                   std::string* message = nullptr);
PayoffMatrix build_game(const ReplicatorSpec& spec);

}  // namespace replidyn
