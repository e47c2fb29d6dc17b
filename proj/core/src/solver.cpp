#include "replidyn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "replidyn/blowup.hpp"
#include "replidyn/error.hpp"
#include "replidyn/linalg.hpp"

namespace replidyn {

void validate(const SolverParams& p) {
    auto fail = [](const std::string& m) { throw Error("solver params: " + m); };
    if (!(p.epsilon > 0.0)) fail("epsilon must be positive");
    if (!(p.dt_min > 0.0 && p.dt_min <= p.dt_init && p.dt_init <= p.dt_max))
        fail("need 0 < dt_min <= dt_init <= dt_max");
    if (!(p.cfl_c > 0.0 && p.cfl_c <= 1.0)) fail("cfl_c must lie in (0,1]");
    if (!(p.t_end > 0.0)) fail("t_end must be positive");
    if (p.sup_cap != 0.0 && !(p.sup_cap > p.epsilon)) fail("sup_cap must exceed epsilon");
    if (p.sup_cap == 0.0 && !(p.sup_cap_factor > 1.0)) fail("sup_cap_factor must exceed 1");
    if (p.snapshot_stride < 1 || p.trace_stride < 1) fail("strides must be >= 1");
    if (!(p.decay_threshold > 0.0 && p.decay_threshold < 1.0)) fail("decay_threshold must lie in (0,1)");
    if (!(p.linear_tol > 0.0 && p.linear_tol < 1e-3)) fail("linear_tol must lie in (0,1e-3)");
}

Scheme parse_scheme(const std::string& s) {
    if (s == "semi-implicit" || s == "semi_implicit") return Scheme::SemiImplicit;
    if (s == "explicit") return Scheme::Explicit;
    throw Error("unknown scheme '" + s + "' (expected semi-implicit or explicit)");
}

std::string to_string(Scheme s) { return s == Scheme::Explicit ? "explicit" : "semi-implicit"; }

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Decayed: return "Decayed";
        case Outcome::RanToEnd: return "RanToEnd";
        case Outcome::BlowUp: return "BlowUp";
    }
    return "?";
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::EndTime: return "end_time";
        case StopReason::SupCap: return "sup_cap";
        case StopReason::DtStarvation: return "dt_starvation";
        case StopReason::Saturation: return "saturation";
    }
    return "?";
}

double rho_eps(double z, double epsilon) {
    if (z < 0.0) throw Error("rho_eps: negative argument");
    if (!(epsilon > 0.0)) throw Error("rho_eps: epsilon must be positive");
    return std::min(z, 1.0 / epsilon);
}

namespace {

// Row-scaled semi-implicit system (diag(1/u) - dt Lap_h) x = (1 + dt rho) on
// interior nodes with x = eps on the boundary. Symmetric positive definite.
Field semi_implicit_update(const Field& u, double dt, double rho, double eps, double tol) {
    const Grid& g = *u.grid;
    Field out(u.grid, eps);
    const double rhs0 = 1.0 + dt * rho;
    if (g.dimension == 1) {
        const int m = g.n[0] - 2;
        const double c = dt / (g.h[0] * g.h[0]);
        std::vector<double> lo(m, -c), di(m), up(m, -c), rhs(m, rhs0), x(m);
        for (int i = 0; i < m; ++i) di[i] = 1.0 / u[g.index(i + 1)] + 2.0 * c;
        rhs[0] += c * eps;
        rhs[m - 1] += c * eps;
        if (!solve_tridiagonal(lo, di, up, rhs, x)) throw Error("semi-implicit step: tridiagonal solve failed");
        for (int i = 0; i < m; ++i) out[g.index(i + 1)] = x[i];
        return out;
    }

    const int mi = g.n[0] - 2, mj = g.n[1] - 2;
    const std::size_t nu = static_cast<std::size_t>(mi) * mj;
    const double cx = dt / (g.h[0] * g.h[0]), cy = dt / (g.h[1] * g.h[1]);
    std::vector<double> inv_u(nu), diag(nu), rhs(nu, rhs0), x(nu);
    for (int i = 0; i < mi; ++i) {
        for (int j = 0; j < mj; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * mj + j;
            const double uk = u[g.index(i + 1, j + 1)];
            inv_u[k] = 1.0 / uk;
            diag[k] = inv_u[k] + 2.0 * (cx + cy);
            x[k] = uk;
            if (i == 0) rhs[k] += cx * eps;
            if (i == mi - 1) rhs[k] += cx * eps;
            if (j == 0) rhs[k] += cy * eps;
            if (j == mj - 1) rhs[k] += cy * eps;
        }
    }
    auto apply = [&](std::span<const double> a, std::span<double> b) {
        for (int i = 0; i < mi; ++i) {
            for (int j = 0; j < mj; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * mj + j;
                double v = diag[k] * a[k];
                if (i > 0) v -= cx * a[k - mj];
                if (i < mi - 1) v -= cx * a[k + mj];
                if (j > 0) v -= cy * a[k - 1];
                if (j < mj - 1) v -= cy * a[k + 1];
                b[k] = v;
            }
        }
    };
    const CgResult res = conjugate_gradient(apply, diag, rhs, x, tol, static_cast<int>(10 * g.size()));
    if (!res.converged) {
        std::ostringstream msg;
        msg << "semi-implicit step: CG did not converge, relative residual " << res.relative_residual;
        throw Error(msg.str());
    }
    for (int i = 0; i < mi; ++i)
        for (int j = 0; j < mj; ++j) out[g.index(i + 1, j + 1)] = x[static_cast<std::size_t>(i) * mj + j];
    return out;
}

Field explicit_update(const Field& u, double dt, double rho, double eps) {
    const Field lap = laplacian(u, eps);
    Field out(u.grid, eps);
    const Grid& g = *u.grid;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!g.is_boundary(k)) out[k] = u[k] + dt * (u[k] * lap[k] + u[k] * rho);
    return out;
}

double min_spacing(const Grid& g) { return g.dimension == 1 ? g.h[0] : std::min(g.h[0], g.h[1]); }

}  // namespace

SolverState initial_state(const Field& u0eps, const SolverParams& params) {
    validate(params);
    if (!u0eps.grid) throw Error("initial field has no grid");
    require_finite(u0eps, "initial field");
    const Grid& g = *u0eps.grid;
    const double eps = params.epsilon;
    SolverState s;
    s.u = u0eps;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) {
            if (std::abs(u0eps[k] - eps) > 1e-12) throw Error("initial field must equal epsilon on the boundary");
            s.u[k] = eps;
        } else if (u0eps[k] < eps - 1e-12) {
            throw Error("initial field must satisfy u >= epsilon");
        }
    }
    s.t = 0.0;
    s.dt = params.dt_init;
    s.energy = dirichlet_energy(s.u, eps);
    s.rho_value = rho_eps(s.energy, eps);
    return s;
}

StepResult step(const SolverState& state, const SolverParams& params) {
    const double eps = params.epsilon;
    const Grid& g = *state.u.grid;
    const double sup_old = sup_norm(state.u);

    double dt = std::min({state.dt, params.dt_max, 0.5 / std::max(state.rho_value, 1.0)});
    if (params.scheme == Scheme::Explicit) {
        const double hmin = min_spacing(g);
        dt = std::min(dt, params.cfl_c * hmin * hmin / (2.0 * g.dimension * sup_old));
    }
    const double remaining = params.t_end - state.t;
    bool last = false;
    if (dt >= remaining) {
        dt = remaining;
        last = true;
    }

    StepResult out;
    double change = 0.0;
    Field next;
    while (true) {
        next = params.scheme == Scheme::Explicit
                   ? explicit_update(state.u, dt, state.rho_value, eps)
                   : semi_implicit_update(state.u, dt, state.rho_value, eps, params.linear_tol);
        require_finite(next, "solver state");
        change = std::abs(sup_norm(next) - sup_old) / sup_old;
        if (change <= 0.1) break;
        const double halved = 0.5 * dt;
        if (halved < params.dt_min) {
            out.state = state;
            out.starved = true;
            out.rejected = out.rejected + 1;
            return out;
        }
        dt = halved;
        last = false;
        ++out.rejected;
    }

    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) {
            next[k] = eps;
        } else if (next[k] < eps) {
            next[k] = eps;
            ++out.floored_nodes;
        }
    }

    out.dt_used = dt;
    out.state.u = std::move(next);
    out.state.t = last ? params.t_end : state.t + dt;
    if (last)
        out.state.dt = state.dt;  // the tail step was clipped to t_end
    else
        out.state.dt = change < 0.01 ? std::min(1.2 * dt, params.dt_max) : dt;
    out.state.energy = dirichlet_energy(out.state.u, eps);
    out.state.rho_value = rho_eps(out.state.energy, eps);
    return out;
}

double comparison_upper_bound(double M, double B, const TorsionSolution& torsion) {
    if (!(M > 0.0) || !(B >= 0.0)) throw Error("comparison_upper_bound: need M > 0 and B >= 0");
    return std::exp(B + 1.0) * (M + sup_norm(torsion.phi));
}

SimulationResult run(const Field& u0eps, const SolverParams& params) {
    return run(u0eps, params, solve_torsion(u0eps.grid));
}

SimulationResult run(const Field& u0eps, const SolverParams& params, const TorsionSolution& torsion) {
    SolverState state = initial_state(u0eps, params);
    const Grid& g = *state.u.grid;
    const double eps = params.epsilon;

    SimulationResult res;
    res.params = params;
    res.trace.epsilon = eps;
    res.trace.measure = g.measure();
    const double sup0 = sup_norm(state.u);
    res.trace.sup_cap = params.sup_cap > 0.0 ? params.sup_cap : params.sup_cap_factor * sup0;
    if (!(res.trace.sup_cap > eps)) throw Error("sup_cap must exceed epsilon");

    auto phi_norm = [&](const Field& u) {
        Field v(u.grid);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = u[k] - eps;
        return phi_weighted_sup(v, torsion);
    };
    long long floored_since_row = 0;
    auto record = [&](const SolverState& s, double dt, double sup) {
        res.trace.rows.push_back(
            {s.t, dt, integrate(s.u), s.energy, sup, phi_norm(s.u), s.rho_value, floored_since_row});
        floored_since_row = 0;
    };
    record(state, 0.0, sup0);
    res.snapshots.push_back(make_snapshot(0.0, state.u, eps));

    std::size_t interior = 0;
    for (std::size_t k = 0; k < g.size(); ++k) interior += g.is_boundary(k) ? 0 : 1;

    double sup_prev = sup0;
    double sup = sup0;
    bool stopped = false;
    double last_dt = 0.0;
    while (!stopped) {
        if (state.t >= params.t_end) {
            res.reason = StopReason::EndTime;
            break;
        }
        StepResult sr = step(state, params);
        if (sr.starved) {
            if (!(sup > sup_prev)) throw Error("time step fell below dt_min while the sup norm was not increasing");
            res.reason = StopReason::DtStarvation;
            if (res.trace.rows.back().t != state.t) {
                record(state, last_dt, sup);
                res.snapshots.push_back(make_snapshot(state.t, state.u, eps));
            }
            break;
        }
        state = std::move(sr.state);
        last_dt = sr.dt_used;
        ++res.steps;
        res.floored_total += sr.floored_nodes;
        floored_since_row += static_cast<long long>(sr.floored_nodes);
        sup_prev = sup;
        sup = sup_norm(state.u);

        if (sup >= res.trace.sup_cap) {
            res.reason = StopReason::SupCap;
            stopped = true;
        } else if (params.stop_on_saturation && state.energy >= 1.0 / eps) {
            res.reason = StopReason::Saturation;
            stopped = true;
        } else if (state.t >= params.t_end) {
            res.reason = StopReason::EndTime;
            stopped = true;
        }
        if (stopped || res.steps % static_cast<std::size_t>(params.trace_stride) == 0) record(state, sr.dt_used, sup);
        if (stopped || res.steps % static_cast<std::size_t>(params.snapshot_stride) == 0)
            res.snapshots.push_back(make_snapshot(state.t, state.u, eps));
    }

    res.t_last = state.t;
    res.floor_flagged = res.steps > 0 && static_cast<double>(res.floored_total) >
                                             1e-3 * static_cast<double>(res.steps) * static_cast<double>(interior);
    res.t_max_estimate = std::numeric_limits<double>::quiet_NaN();
    if (res.reason != StopReason::EndTime) {
        res.outcome = Outcome::BlowUp;
        try {
            res.t_max_estimate = estimate_tmax(res.trace).t_max;
        } catch (const Error&) {
        }
    } else {
        const double y0 = res.trace.corrected_mass(0);
        const double y1 = res.trace.corrected_mass(res.trace.size() - 1);
        res.outcome = (y0 > 0.0 && y1 < params.decay_threshold * y0) ? Outcome::Decayed : Outcome::RanToEnd;
    }
    return res;
}

}  // namespace replidyn
