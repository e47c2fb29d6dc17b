#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace replidyn {

struct TraceRow {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;              // raw integral of u_eps
    double dirichlet_energy = 0.0;
    double sup_norm = 0.0;
    double phi_norm = 0.0;          // ||u - eps||_{Phi,inf}
    double rho_eps_value = 0.0;
    long long floored_nodes = 0;
};

/// Time series of a run together with the constants needed to evaluate the
/// limit-problem identities on it.
struct Trace {
    std::vector<TraceRow> rows;
    double epsilon = 0.0;
    double measure = 1.0;  // |Omega|
    double sup_cap = 0.0;

    /// y - eps |Omega|, the mass of u - eps.
    double corrected_mass(std::size_t k) const { return rows[k].mass - epsilon * measure; }
    std::size_t size() const { return rows.size(); }
};

inline constexpr const char* kTraceHeader = "t,dt,mass,dirichlet_energy,sup_norm,phi_norm,rho_eps_value,floored_nodes";

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& os, const Trace& trace);
std::string trace_to_csv(const Trace& trace);
/// Reads the CSV columns; epsilon / measure / sup_cap are left for the caller.
Trace read_trace_csv(std::istream& is);
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace replidyn
