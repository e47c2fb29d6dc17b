#include "replidyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "replidyn/error.hpp"
#include "replidyn/solver.hpp"

namespace replidyn {

std::string checks_to_csv(const std::vector<CheckRow>& rows) {
    std::ostringstream os;
    os << kCheckHeader << '\n';
    for (const auto& r : rows)
        os << r.check << ',' << format_double(r.t) << ',' << format_double(r.value) << ',' << format_double(r.bound)
           << ',' << (r.pass ? "true" : "false") << '\n';
    return os.str();
}

bool all_pass(const std::vector<CheckRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

bool SeriesCheck::all() const { return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; }); }

std::size_t precap_rows(const Trace& trace) {
    const double cap = trace.sup_cap > 0.0 ? trace.sup_cap : std::numeric_limits<double>::infinity();
    const double sat = trace.epsilon > 0.0 ? 1.0 / trace.epsilon : std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    while (n < trace.size() && trace.rows[n].sup_norm < 0.5 * cap && trace.rows[n].dirichlet_energy < sat) ++n;
    return n;
}

namespace {

std::size_t row_count(const Trace& trace, std::size_t rows) {
    return rows == 0 ? trace.size() : std::min(rows, trace.size());
}

double central_derivative(const Trace& tr, std::size_t k) {
    return (tr.corrected_mass(k + 1) - tr.corrected_mass(k - 1)) / (tr.rows[k + 1].t - tr.rows[k - 1].t);
}

double trapz(const std::vector<double>& t, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    return s;
}

// Closed-box trapezoid weights of the subdomain on which `torsion` lives.
std::vector<double> subdomain_weights(const Grid& g, double margin) {
    std::array<int, 2> lo{0, 0}, hi{0, 0};
    for (int a = 0; a < g.dimension; ++a) {
        lo[a] = margin > 0.0 ? static_cast<int>(std::ceil(margin / g.h[a] - 1e-9)) : 0;
        hi[a] = g.n[a] - 1 - lo[a];
    }
    std::vector<double> w(g.size(), 0.0);
    auto axis_w = [&](int a, int i) {
        if (i < lo[a] || i > hi[a]) return 0.0;
        return (i == lo[a] || i == hi[a]) ? 0.5 * g.h[a] : g.h[a];
    };
    for (int i = 0; i < g.n[0]; ++i) {
        if (g.dimension == 1) {
            w[g.index(i)] = axis_w(0, i);
        } else {
            for (int j = 0; j < g.n[1]; ++j) w[g.index(i, j)] = axis_w(0, i) * axis_w(1, j);
        }
    }
    return w;
}

Field snapshot_field(const Snapshot& s, const GridPtr& grid) { return field_from_snapshot(s, grid); }

void require_same_grid(const Snapshot& s, const Grid& g) {
    if (s.shape != g.shape()) throw Error("snapshot shape does not match the grid");
}

}  // namespace

MassOdeResidual mass_ode_residual(const Trace& trace, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    if (n < 3) throw Error("mass_ode_residual: need at least 3 rows");
    MassOdeResidual out;
    for (std::size_t k = 0; k < n; ++k) {
        out.raw_mass.push_back(trace.rows[k].mass);
        out.corrected_mass.push_back(trace.corrected_mass(k));
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dy = central_derivative(trace, k);
        const double r = std::abs(dy - (trace.corrected_mass(k) - 1.0) * trace.rows[k].dirichlet_energy);
        out.t.push_back(trace.rows[k].t);
        out.residual.push_back(r);
        out.derivative.push_back(dy);
        out.max_residual = std::max(out.max_residual, r);
        out.max_derivative = std::max(out.max_derivative, std::abs(dy));
    }
    double emax = 0.0;
    for (std::size_t k = 0; k < n; ++k) emax = std::max(emax, trace.rows[k].dirichlet_energy);
    out.scale = std::max(out.max_derivative, 1e-6 * emax);
    if (out.scale > 0.0)
        out.normalized = out.max_residual / out.scale;
    else
        out.normalized = out.max_residual > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return out;
}

HIdentity h_identity_check(const Trace& trace, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    if (n == 0) throw Error("h_identity_check: empty trace");
    const double y0 = trace.corrected_mass(0);
    if (!(y0 > 1.0)) throw Error("identity only valid for supercritical mass");
    HIdentity out;
    double h = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0)
            h += 0.5 * (trace.rows[k].dirichlet_energy + trace.rows[k - 1].dirichlet_energy) *
                 (trace.rows[k].t - trace.rows[k - 1].t);
        const double yk = trace.corrected_mass(k);
        const double lr = yk > 1.0 ? std::log((yk - 1.0) / (y0 - 1.0)) : std::numeric_limits<double>::quiet_NaN();
        const double err = std::abs(h - lr);
        const double scale = std::max(std::abs(h), std::abs(lr));
        out.t.push_back(trace.rows[k].t);
        out.h.push_back(h);
        out.log_ratio.push_back(lr);
        out.abs_error.push_back(err);
        out.rel_error.push_back(scale > 0.0 ? err / scale : (std::isnan(err) ? err : 0.0));
        if (std::isnan(err)) {
            out.max_abs_error = out.max_rel_error = std::numeric_limits<double>::quiet_NaN();
        } else if (!std::isnan(out.max_abs_error)) {
            out.max_abs_error = std::max(out.max_abs_error, err);
            out.max_rel_error = std::max(out.max_rel_error, out.rel_error.back());
        }
    }
    return out;
}

GradientBound gradient_bound_check(const Trace& trace, const std::vector<Snapshot>& snapshots,
                                   const TorsionSolution& subdomain, const Field& u0eps, double tol) {
    if (snapshots.empty()) throw Error("gradient_bound_check: no snapshots");
    const GridPtr grid = u0eps.grid;
    const Grid& g = *grid;
    const Field& phi = subdomain.phi;
    if (phi.grid->shape() != g.shape()) throw Error("gradient_bound_check: torsion grid differs from u0eps");
    const double eps = trace.epsilon;
    const double c_sub = subdomain.c_subdomain;
    if (!(c_sub > 0.0)) throw Error("gradient_bound_check: subdomain constant must be positive");
    const std::vector<double> wsub = subdomain_weights(g, subdomain.margin);

    auto phi_log = [&](const Field& u) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (phi[k] <= 0.0) continue;
            if (!(u[k] > 0.0)) throw Error("gradient_bound_check: nonpositive value inside the subdomain");
            s += g.quad_weights[k] * phi[k] * std::log(u[k]);
        }
        return s;
    };
    auto sub_mass = [&](const Field& u) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) s += wsub[k] * u[k];
        return s;
    };

    const double e0 = dirichlet_energy(u0eps, eps);
    const double a0 = phi_log(u0eps);
    GradientBound out;
    std::vector<double> ts, ms;
    std::size_t row = 0;
    double sup_y = 0.0;
    for (const auto& s : snapshots) {
        require_same_grid(s, g);
        const Field u = snapshot_field(s, grid);
        ts.push_back(s.t);
        ms.push_back(sub_mass(u));
        while (row < trace.size() && trace.rows[row].t <= s.t + 1e-15 * std::max(1.0, s.t)) {
            sup_y = std::max(sup_y, trace.rows[row].mass);
            ++row;
        }
        const double e = dirichlet_energy(u, eps);
        const double expo = sup_y / (2.0 * c_sub) * (phi_log(u) - a0 + trapz(ts, ms));
        const double rhs = e0 * std::exp(expo);
        out.t.push_back(s.t);
        out.energy.push_back(e);
        out.bound.push_back(rhs);
        out.pass.push_back(e <= rhs * (1.0 + tol));
    }
    return out;
}

BoundaryConcentration boundary_concentration(const std::vector<Snapshot>& snapshots, double q, double margin,
                                             const Field& u0eps) {
    if (!(q > 0.0 && q < 1.0)) throw Error("boundary_concentration: q must lie in (0,1)");
    if (snapshots.empty()) throw Error("boundary_concentration: no snapshots");
    const GridPtr grid = u0eps.grid;
    const Grid& g = *grid;
    const double eps = snapshots.front().boundary_value.value_or(u0eps[0]);

    auto powq = [&](const Field& u, double p) {
        Field out(u.grid);
        for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::pow(u[k], p);
        return out;
    };
    const double m0 = integrate(powq(u0eps, q));

    BoundaryConcentration out;
    std::vector<double> ts, weighted, collar, source;
    for (const auto& s : snapshots) {
        require_same_grid(s, g);
        const Field u = snapshot_field(s, grid);
        // q u^{q-1}|grad u|^2 = grad(u^q).grad(u), assembled per cell by polarization.
        const Field uq = powq(u, q);
        Field sum(grid), diff(grid);
        for (std::size_t k = 0; k < u.size(); ++k) {
            sum[k] = uq[k] + u[k];
            diff[k] = uq[k] - u[k];
        }
        const double epsq = std::pow(eps, q);
        const CellData cd = cell_data(u, eps);
        const CellData cp = cell_data(sum, epsq + eps);
        const CellData cm = cell_data(diff, epsq - eps);
        double wsum = 0.0, csum = 0.0;
        for (std::size_t c = 0; c < cd.grad_sq.size(); ++c) {
            wsum += 0.25 * (cp.grad_sq[c] - cm.grad_sq[c]) / q * cd.area;
            if (cd.centre_distance[c] < margin) csum += cd.grad_sq[c] * cd.area;
        }
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.boundary_distance(k) < margin) out.eta = std::max(out.eta, u[k]);
        const double mq = integrate(powq(u, q));
        ts.push_back(s.t);
        weighted.push_back(wsum);
        collar.push_back(csum);
        source.push_back(mq * dirichlet_energy(u, eps));
        out.t.push_back(s.t);
        out.lhs_series.push_back(q * trapz(ts, weighted));
        out.bound_series.push_back(-mq / q + m0 / q + trapz(ts, source));
    }
    out.lhs = out.lhs_series.back();
    out.bound = out.bound_series.back();
    out.collar_energy = trapz(ts, collar);
    out.collar_bound = std::pow(2.0 * out.eta, 1.0 - q) * out.bound / q;
    return out;
}

SeriesCheck phi_norm_bound_check(const Trace& trace, double tol, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    SeriesCheck out;
    if (n == 0) return out;
    const double p0 = trace.rows[0].phi_norm;
    double emax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        emax = std::max(emax, trace.rows[k].dirichlet_energy);
        const double bound = std::max(p0, emax) * (1.0 + tol);
        out.t.push_back(trace.rows[k].t);
        out.value.push_back(trace.rows[k].phi_norm);
        out.bound.push_back(bound);
        out.pass.push_back(k == 0 || trace.rows[k].phi_norm <= bound);
    }
    return out;
}

TestFunction bump_test_function(const Grid& grid, double support_margin, double t_hi) {
    if (!(t_hi > 0.0)) throw Error("bump_test_function: t_hi must be positive");
    const Grid g = grid;
    auto axis = [g, support_margin](int a, double x) {
        const double lo = support_margin, hi = g.extents[a] - support_margin;
        if (!(hi > lo)) throw Error("bump_test_function: margin leaves an empty support");
        if (x <= lo || x >= hi) return 0.0;
        const double s = std::sin(std::numbers::pi * (x - lo) / (hi - lo));
        return s * s;
    };
    auto space = [g, axis](double x, double y) {
        double v = axis(0, x);
        if (g.dimension == 2) v *= axis(1, y);
        return v;
    };
    TestFunction f;
    f.value = [space, t_hi](double x, double y, double t) {
        if (t >= t_hi) return 0.0;
        const double c = std::cos(0.5 * std::numbers::pi * t / t_hi);
        return space(x, y) * c * c;
    };
    f.time_derivative = [space, t_hi](double x, double y, double t) {
        if (t >= t_hi) return 0.0;
        return -space(x, y) * 0.5 * std::numbers::pi / t_hi * std::sin(std::numbers::pi * t / t_hi);
    };
    return f;
}

WeakFormTerms weak_form_residual(const std::vector<Snapshot>& snapshots, const TestFunction& test, double t_lo,
                                 double t_hi, double epsilon) {
    if (snapshots.empty()) throw Error("weak_form_residual: no snapshots");
    if (!(t_hi > t_lo)) throw Error("weak_form_residual: empty time support");
    const GridPtr grid = grid_from_snapshot(snapshots.front());
    const Grid& g = *grid;

    std::size_t first = snapshots.size();
    for (std::size_t s = 0; s < snapshots.size(); ++s)
        if (std::abs(snapshots[s].t - t_lo) <= 1e-12 * std::max(1.0, t_lo)) first = s;
    if (first == snapshots.size()) throw Error("weak_form_residual: no snapshot at the start of the time support");
    if (snapshots.back().t < t_hi) throw Error("weak_form_residual: snapshots end before the time support");

    const double hmax = g.dimension == 1 ? g.h[0] : std::max(g.h[0], g.h[1]);
    auto sample_at = [&](double t, bool derivative) {
        return sample(grid, [&](double x, double y) {
            return derivative ? test.time_derivative(x, y, t) : test.value(x, y, t);
        });
    };
    auto check_support = [&](const Field& phi, double t) {
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.boundary_distance(k) < 1.5 * hmax && std::abs(phi[k]) > 1e-14)
                throw Error("weak_form_residual: test function does not vanish near the boundary at t=" +
                            std::to_string(t));
    };

    WeakFormTerms out;
    std::vector<double> ts, f_time, f_grad, f_nonlocal;
    for (std::size_t s = first; s < snapshots.size(); ++s) {
        const Snapshot& snap = snapshots[s];
        require_same_grid(snap, g);
        Field v = field_from_snapshot(snap, grid);
        for (auto& a : v.values) a -= epsilon;
        const Field phi = sample_at(snap.t, false);
        const Field phit = sample_at(snap.t, true);
        check_support(phi, snap.t);
        check_support(phit, snap.t);
        Field vphi(grid), vphit(grid);
        for (std::size_t k = 0; k < g.size(); ++k) {
            vphi[k] = v[k] * phi[k];
            vphit[k] = v[k] * phit[k];
        }
        if (s == first) out.initial_term = integrate(vphi);
        ts.push_back(snap.t);
        f_time.push_back(-integrate(vphit));
        f_grad.push_back(energy_inner(v, vphi));
        f_nonlocal.push_back(integrate(vphi) * energy_inner(v, v));
        if (snap.t >= t_hi) {
            for (std::size_t k = 0; k < g.size(); ++k)
                if (std::abs(phi[k]) > 1e-14) throw Error("weak_form_residual: test function does not vanish at t_hi");
            break;
        }
    }
    out.time_term = trapz(ts, f_time);
    out.gradient_term = trapz(ts, f_grad);
    out.nonlocal_term = trapz(ts, f_nonlocal);
    const double lhs = out.time_term + out.gradient_term;
    const double rhs = out.initial_term + out.nonlocal_term;
    const double scale = std::max({std::abs(out.time_term), std::abs(out.gradient_term), std::abs(out.initial_term),
                                   std::abs(out.nonlocal_term)});
    out.residual = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    return out;
}

SeriesCheck energy_odi_check(const Trace& trace, double tol, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    SeriesCheck out;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto& a = trace.rows[k];
        const auto& b = trace.rows[k + 1];
        const double rate = (b.dirichlet_energy - a.dirichlet_energy) / (b.t - a.t);
        const double e = std::max(a.dirichlet_energy, b.dirichlet_energy);
        const double m = std::max(a.mass, b.mass);
        const double bound = m * e * e + tol * (1.0 + e * e);
        out.t.push_back(b.t);
        out.value.push_back(rate);
        out.bound.push_back(bound);
        out.pass.push_back(rate <= bound);
    }
    return out;
}

SeriesCheck interior_barrier_check(const std::vector<Snapshot>& snapshots, const TorsionSolution& core,
                                   const Field& u0eps, double tol) {
    const GridPtr grid = u0eps.grid;
    const Grid& g = *grid;
    const Field& phi = core.phi;
    double c3 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k)
        if (phi[k] > 0.0) c3 = std::min(c3, u0eps[k] / phi[k]);
    if (!std::isfinite(c3)) throw Error("interior_barrier_check: core torsion function vanishes everywhere");
    SeriesCheck out;
    for (const auto& s : snapshots) {
        require_same_grid(s, g);
        const double y = c3 / (1.0 + c3 * s.t);
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < g.size(); ++k)
            if (phi[k] > 0.0) m = std::min(m, s.values[k] - y * phi[k]);
        out.t.push_back(s.t);
        out.value.push_back(m);
        out.bound.push_back(-tol);
        out.pass.push_back(m >= -tol);
    }
    return out;
}

SeriesCheck mass_monotonicity_check(const Trace& trace, double tol, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    SeriesCheck out;
    if (n < 2) return out;
    const double y0 = trace.corrected_mass(0);
    if (std::abs(y0 - 1.0) <= 1e-9) return out;  // critical mass: no monotone regime
    const bool sub = y0 < 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double prev = trace.corrected_mass(k - 1), cur = trace.corrected_mass(k);
        const double slack = tol * std::abs(prev);
        out.t.push_back(trace.rows[k].t);
        out.value.push_back(cur - prev);
        out.bound.push_back(sub ? slack : -slack);
        out.pass.push_back(sub ? cur - prev <= slack : cur - prev >= -slack);
    }
    return out;
}

SeriesCheck poincare_rate_check(const Trace& trace, double c_p, double slack, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    SeriesCheck out;
    if (n < 3) return out;
    const double y0 = trace.corrected_mass(0);
    if (std::abs(y0 - 1.0) <= 1e-9) return out;
    const double c = std::abs(y0 - 1.0) / (c_p * trace.measure);
    const bool sub = y0 < 1.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dy = central_derivative(trace, k);
        const double y = trace.corrected_mass(k);
        const double bound = (sub ? -1.0 : 1.0) * (1.0 - slack) * c * y * y;
        out.t.push_back(trace.rows[k].t);
        out.value.push_back(dy);
        out.bound.push_back(bound);
        out.pass.push_back(sub ? dy <= bound : dy >= bound);
    }
    return out;
}

double final_over_median(const Trace& trace, std::size_t rows, bool energy_column) {
    const std::size_t n = row_count(trace, rows);
    if (n == 0) throw Error("final_over_median: empty trace");
    std::vector<double> v;
    for (std::size_t k = 0; k < n; ++k)
        v.push_back(energy_column ? trace.rows[k].dirichlet_energy : trace.corrected_mass(k));
    const double last = v.back();
    std::sort(v.begin(), v.end());
    const double med = (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return med > 0.0 ? last / med : std::numeric_limits<double>::infinity();
}

double energy_time_integral(const Trace& trace, std::size_t rows) {
    const std::size_t n = row_count(trace, rows);
    double s = 0.0;
    for (std::size_t k = 1; k < n; ++k)
        s += 0.5 * (trace.rows[k].dirichlet_energy + trace.rows[k - 1].dirichlet_energy) *
             (trace.rows[k].t - trace.rows[k - 1].t);
    return s;
}

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{
        "mass_ode",       "h_identity",       "gradient_bound",    "boundary_concentration",
        "phi_norm",       "weak_form",        "energy_odi",        "interior_barrier",
        "mass_monotonicity", "poincare_rate", "comparison_bound"};
    return names;
}

namespace {

void append_series(std::vector<CheckRow>& rows, const std::string& name, const SeriesCheck& s) {
    for (std::size_t i = 0; i < s.t.size(); ++i) rows.push_back({name, s.t[i], s.value[i], s.bound[i], s.pass[i]});
}

}  // namespace

std::vector<CheckRow> run_checks(const Trace& trace_in, const std::vector<Snapshot>& snapshots,
                                 const std::vector<std::string>& names, const CheckOptions& opt) {
    if (snapshots.empty()) throw Error("run_checks: no snapshots");
    if (trace_in.size() < 3) throw Error("run_checks: trace needs at least 3 rows");
    for (const auto& n : names)
        if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
            throw Error("unknown check '" + n + "'");

    const GridPtr grid = grid_from_snapshot(snapshots.front());
    const Field u0eps = field_from_snapshot(snapshots.front(), grid);
    Trace trace = trace_in;
    if (trace.epsilon == 0.0) trace.epsilon = snapshots.front().boundary_value.value_or(0.0);
    trace.measure = grid->measure();
    if (trace.sup_cap == 0.0) trace.sup_cap = 1e4 * trace.rows[0].sup_norm;
    const std::size_t pre = precap_rows(trace);
    const double t_pre = trace.rows[pre > 0 ? pre - 1 : 0].t;
    std::vector<Snapshot> snaps_pre;
    for (const auto& s : snapshots)
        if (s.t <= t_pre) snaps_pre.push_back(s);

    std::vector<CheckRow> rows;
    for (const auto& name : names) {
        if (name == "mass_ode") {
            if (pre < 3) continue;
            const MassOdeResidual r = mass_ode_residual(trace, pre);
            for (std::size_t i = 0; i < r.t.size(); ++i) {
                const double v = r.scale > 0.0 ? r.residual[i] / r.scale : r.residual[i];
                rows.push_back({name, r.t[i], v, opt.mass_residual_tol, v <= opt.mass_residual_tol});
            }
        } else if (name == "h_identity") {
            if (!(trace.corrected_mass(0) > 1.0)) continue;
            const HIdentity h = h_identity_check(trace, pre);
            for (std::size_t i = 0; i < h.t.size(); ++i)
                rows.push_back({name, h.t[i], h.rel_error[i], opt.h_identity_tol, h.rel_error[i] <= opt.h_identity_tol});
        } else if (name == "gradient_bound") {
            const TorsionSolution sub = solve_torsion_subdomain(grid, opt.subdomain_margin);
            const GradientBound gb = gradient_bound_check(trace, snaps_pre, sub, u0eps, opt.gradient_tol);
            for (std::size_t i = 0; i < gb.t.size(); ++i)
                rows.push_back({name, gb.t[i], gb.energy[i], gb.bound[i] * (1.0 + opt.gradient_tol), gb.pass[i]});
        } else if (name == "boundary_concentration") {
            const BoundaryConcentration bc =
                boundary_concentration(snaps_pre, opt.concentration_q, opt.concentration_margin, u0eps);
            rows.push_back({"boundary_concentration_lhs", bc.t.back(), bc.lhs, bc.bound, bc.lhs <= bc.bound});
            rows.push_back({"boundary_concentration_collar", bc.t.back(), bc.collar_energy, bc.collar_bound,
                            bc.collar_energy <= bc.collar_bound});
        } else if (name == "phi_norm") {
            append_series(rows, name, phi_norm_bound_check(trace, opt.phi_norm_tol));
        } else if (name == "weak_form") {
            const double lmin = grid->dimension == 1 ? grid->extents[0] : std::min(grid->extents[0], grid->extents[1]);
            if (snaps_pre.size() < 3) continue;
            const double t_hi = snaps_pre.back().t;
            const TestFunction tf = bump_test_function(*grid, 0.2 * lmin, t_hi);
            const WeakFormTerms w = weak_form_residual(snaps_pre, tf, snaps_pre.front().t, t_hi, trace.epsilon);
            rows.push_back({name, t_hi, w.residual, opt.weak_form_tol, w.residual <= opt.weak_form_tol});
        } else if (name == "energy_odi") {
            append_series(rows, name, energy_odi_check(trace, 1e-2, pre));
        } else if (name == "interior_barrier") {
            const TorsionSolution core = solve_torsion_subdomain(grid, opt.subdomain_margin);
            append_series(rows, name, interior_barrier_check(snaps_pre, core, u0eps));
        } else if (name == "mass_monotonicity") {
            append_series(rows, name, mass_monotonicity_check(trace, 1e-6, pre));
        } else if (name == "poincare_rate") {
            append_series(rows, name, poincare_rate_check(trace, poincare_constant(grid), opt.poincare_slack, pre));
        } else if (name == "comparison_bound") {
            const TorsionSolution full = solve_torsion(grid);
            const double M = sup_norm(u0eps);
            const double B = energy_time_integral(trace, pre);
            const double bound = comparison_upper_bound(M, B, full);
            double sup = 0.0;
            for (std::size_t k = 0; k < pre; ++k) sup = std::max(sup, trace.rows[k].sup_norm);
            rows.push_back({name, t_pre, sup, bound + 1e-6, sup <= bound + 1e-6});
        }
    }
    return rows;
}

}  // namespace replidyn
