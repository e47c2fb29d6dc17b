#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "replidyn/elliptic.hpp"
#include "replidyn/mesh.hpp"
#include "replidyn/snapshot_io.hpp"
#include "replidyn/trace.hpp"

namespace replidyn {

enum class Scheme { SemiImplicit, Explicit };

struct SolverParams {
    double epsilon = 1e-3;
    double dt_init = 1e-5;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double cfl_c = 0.9;
    double t_end = 1.0;
    /// Blow-up threshold on the sup norm. 0 means sup_cap_factor * initial sup norm.
    double sup_cap = 0.0;
    double sup_cap_factor = 1e4;
    Scheme scheme = Scheme::SemiImplicit;
    int snapshot_stride = 50;
    int trace_stride = 1;
    /// Decayed when the final corrected mass is below this fraction of the initial one.
    double decay_threshold = 0.05;
    /// Also stop as BlowUp once the energy reaches the cutoff 1/epsilon. Past
    /// that point the regularized nonlocal term is frozen and u_eps settles
    /// on a bounded profile instead of following the limit problem.
    bool stop_on_saturation = true;
    /// Relative tolerance of the inner CG solve (2D semi-implicit only).
    double linear_tol = 1e-12;
};

/// Throws Error when the parameter invariants are violated.
void validate(const SolverParams& p);

Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

struct SolverState {
    double t = 0.0;
    Field u;
    double dt = 0.0;
    double energy = 0.0;
    double rho_value = 0.0;
};

enum class Outcome { Decayed, RanToEnd, BlowUp };
std::string to_string(Outcome o);

enum class StopReason { EndTime, SupCap, DtStarvation, Saturation };
std::string to_string(StopReason r);

struct StepResult {
    SolverState state;
    std::size_t floored_nodes = 0;
    double dt_used = 0.0;
    int rejected = 0;
    /// The adaptive controller asked for dt < dt_min; state is the input state.
    bool starved = false;
};

struct SimulationResult {
    Outcome outcome = Outcome::RanToEnd;
    StopReason reason = StopReason::EndTime;
    double t_max_estimate = 0.0;  // NaN unless BlowUp with a usable fit
    double t_last = 0.0;
    Trace trace;
    std::vector<Snapshot> snapshots;
    SolverParams params;
    std::size_t steps = 0;
    std::size_t floored_total = 0;
    /// More than 0.1% of node updates were floored.
    bool floor_flagged = false;
};

/// min(z, 1/epsilon).
double rho_eps(double z, double epsilon);

/// State at t = 0; checks the boundary and floor invariants.
SolverState initial_state(const Field& u0eps, const SolverParams& params);

/// One accepted step with adaptive dt (see SolverParams). The step never
/// goes past params.t_end.
StepResult step(const SolverState& state, const SolverParams& params);

SimulationResult run(const Field& u0eps, const SolverParams& params, const TorsionSolution& torsion);
SimulationResult run(const Field& u0eps, const SolverParams& params);

/// e^{B+1} (M + max Phi).
double comparison_upper_bound(double M, double B, const TorsionSolution& torsion);

}  // namespace replidyn
