#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "replidyn/elliptic.hpp"
#include "replidyn/mesh.hpp"
#include "replidyn/snapshot_io.hpp"
#include "replidyn/trace.hpp"

namespace replidyn {

/// One line of the verify CSV: check,t,value,bound,pass.
struct CheckRow {
    std::string check;
    double t = 0.0;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

inline constexpr const char* kCheckHeader = "check,t,value,bound,pass";
std::string checks_to_csv(const std::vector<CheckRow>& rows);
bool all_pass(const std::vector<CheckRow>& rows);

/// Number of leading rows that are usable for the limit-problem identities:
/// sup norm below half the cap and the nonlocal term not saturated.
std::size_t precap_rows(const Trace& trace);

struct MassOdeResidual {
    std::vector<double> t;          // interior rows only
    std::vector<double> residual;   // |y' - (y - 1) E| with corrected y
    std::vector<double> derivative; // central difference y'
    std::vector<double> raw_mass;   // all rows
    std::vector<double> corrected_mass;
    double max_residual = 0.0;
    double max_derivative = 0.0;
    /// max(max_derivative, 1e-6 * max E); the floor only matters when y' is
    /// at roundoff level, as on a critical-mass run.
    double scale = 0.0;
    /// max_residual / scale (0 when both vanish).
    double normalized = 0.0;
};

/// Residual of y' = (y - 1) E over rows [0, rows) (all rows by default).
MassOdeResidual mass_ode_residual(const Trace& trace, std::size_t rows = 0);

struct HIdentity {
    std::vector<double> t;
    std::vector<double> h;          // trapezoid integral of E
    std::vector<double> log_ratio;  // ln((y - 1) / (y0 - 1))
    std::vector<double> abs_error;
    std::vector<double> rel_error;  // |h - log_ratio| / max(|h|, |log_ratio|)
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
};

HIdentity h_identity_check(const Trace& trace, std::size_t rows = 0);

struct GradientBound {
    std::vector<double> t;
    std::vector<double> energy;
    std::vector<double> bound;
    std::vector<bool> pass;
};

/// Lemma-type bound E(t) <= E(0) exp[(sup y / 2C') (int phi ln u(t) - int phi ln u0 + int_0^t int_{Omega'} u)]
/// evaluated at every snapshot; y is the raw mass of the regularized solution.
GradientBound gradient_bound_check(const Trace& trace, const std::vector<Snapshot>& snapshots,
                                   const TorsionSolution& subdomain, const Field& u0eps, double tol = 0.1);

struct BoundaryConcentration {
    double lhs = 0.0;            // q int int u^{q-1} |grad u|^2
    double bound = 0.0;          // C(T)
    double collar_energy = 0.0;  // int int_{collar} |grad u|^2
    double collar_bound = 0.0;   // (2 eta)^{1-q} C(T) / q
    double eta = 0.0;            // max of u over the collar and the run
    std::vector<double> t;
    std::vector<double> bound_series;  // C(t) at each snapshot
    std::vector<double> lhs_series;
};

/// Time integrals use the trapezoid rule over the snapshot times; snapshots
/// should be dense (snapshot_stride = 1) for a sharp comparison.
BoundaryConcentration boundary_concentration(const std::vector<Snapshot>& snapshots, double q, double margin,
                                             const Field& u0eps);

struct SeriesCheck {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> bound;
    std::vector<bool> pass;
    bool all() const;
};

/// phi_norm_k <= max(phi_norm_0, running max of E) (1 + tol).
SeriesCheck phi_norm_bound_check(const Trace& trace, double tol = 0.05, std::size_t rows = 0);

/// Smooth test function phi(x, y, t) with its time derivative.
struct TestFunction {
    std::function<double(double, double, double)> value;
    std::function<double(double, double, double)> time_derivative;
};

struct WeakFormTerms {
    double time_term = 0.0;      // -int int v phi_t
    double gradient_term = 0.0;  // int int grad v . grad(v phi)
    double initial_term = 0.0;   // int v0 phi(., 0)
    double nonlocal_term = 0.0;  // int (int v phi)(int |grad v|^2)
    double residual = 0.0;       // normalized |LHS - RHS|
};

/// Weak-form residual on v = u - eps. The test function must vanish on
/// boundary and boundary-adjacent nodes and for t >= t_hi, and the snapshots
/// must reach t_hi.
WeakFormTerms weak_form_residual(const std::vector<Snapshot>& snapshots, const TestFunction& test, double t_lo,
                                 double t_hi, double epsilon);

/// Bump in x (and y) times cos^2(pi t / (2 t_hi)) on [0, t_hi), zero after.
TestFunction bump_test_function(const Grid& grid, double support_margin, double t_hi);

/// (E_{k+1} - E_k) / dt <= (int u) E^2 + tol (1 + E^2) between trace rows.
SeriesCheck energy_odi_check(const Trace& trace, double tol = 1e-2, std::size_t rows = 0);

/// min over the core of u(t) >= y(t) phi_K - tol with y(t) = c3 / (1 + c3 t)
/// and c3 = min over the core of u0eps / phi_K.
SeriesCheck interior_barrier_check(const std::vector<Snapshot>& snapshots, const TorsionSolution& core,
                                   const Field& u0eps, double tol = 1e-6);

/// Corrected mass nonincreasing (y0 < 1) or nondecreasing (y0 > 1) up to tol
/// relative to the local mass.
SeriesCheck mass_monotonicity_check(const Trace& trace, double tol = 1e-6, std::size_t rows = 0);

/// Subcritical: y' <= -(1 - slack) ((1 - y0) / (C_P |Omega|)) y^2.
/// Supercritical: y' >= (1 - slack) ((y0 - 1) / (C_P |Omega|)) y^2.
SeriesCheck poincare_rate_check(const Trace& trace, double c_p, double slack = 0.1, std::size_t rows = 0);

/// Ratio of the final value of a trace column to its median over rows [0, rows).
double final_over_median(const Trace& trace, std::size_t rows, bool energy_column);

/// Trapezoid integral of E over rows [0, rows).
double energy_time_integral(const Trace& trace, std::size_t rows = 0);

/// Options for run_checks.
struct CheckOptions {
    double subdomain_margin = 0.25;
    double concentration_q = 0.5;
    double concentration_margin = 0.1;
    double mass_residual_tol = 0.05;
    double h_identity_tol = 0.05;
    double gradient_tol = 0.1;
    double phi_norm_tol = 0.05;
    double weak_form_tol = 0.05;
    double poincare_slack = 0.1;
};

/// Names accepted by run_checks.
const std::vector<std::string>& check_names();

/// Runs the named checks on a trace and its snapshots; the first snapshot
/// plays the role of u0eps. Unknown names are errors.
std::vector<CheckRow> run_checks(const Trace& trace, const std::vector<Snapshot>& snapshots,
                                 const std::vector<std::string>& names, const CheckOptions& opt = {});

}  // namespace replidyn
