#include "replidyn/initdata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "replidyn/error.hpp"

namespace replidyn {

namespace {

// Source coordinate for the inward shift on one axis of length len: the
// collar [0, shift] is emptied and the rest is a dilation of [0, len / 2]
// about the centre. Returns a negative value inside the emptied collar.
double shift_source(double x, double len, double shift) {
    const bool right = x > 0.5 * len;
    const double d = right ? len - x : x;
    if (d <= shift * (1.0 + 1e-12)) return -1.0;
    const double half = 0.5 * len;
    const double s = (d - shift) * half / (half - shift);
    return right ? len - s : s;
}

double interp1(const Grid& g, const Field& f, double x) {
    const double u = std::clamp(x / g.h[0], 0.0, static_cast<double>(g.n[0] - 1));
    const int i = std::min(static_cast<int>(u), g.n[0] - 2);
    const double w = u - i;
    return (1.0 - w) * f[g.index(i)] + w * f[g.index(i + 1)];
}

double interp2(const Grid& g, const Field& f, double x, double y) {
    const double u = std::clamp(x / g.h[0], 0.0, static_cast<double>(g.n[0] - 1));
    const double v = std::clamp(y / g.h[1], 0.0, static_cast<double>(g.n[1] - 1));
    const int i = std::min(static_cast<int>(u), g.n[0] - 2);
    const int j = std::min(static_cast<int>(v), g.n[1] - 2);
    const double wu = u - i, wv = v - j;
    return (1 - wu) * (1 - wv) * f[g.index(i, j)] + wu * (1 - wv) * f[g.index(i + 1, j)] +
           (1 - wu) * wv * f[g.index(i, j + 1)] + wu * wv * f[g.index(i + 1, j + 1)];
}

double ramp(double d, double margin) {
    const double start = 0.5 * margin;
    if (d <= start) return 0.0;
    if (d >= margin) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * (d - start) / (margin - start)));
}

double min_extent(const Grid& g) {
    return g.dimension == 1 ? g.extents[0] : std::min(g.extents[0], g.extents[1]);
}

double max_spacing(const Grid& g) { return g.dimension == 1 ? g.h[0] : std::max(g.h[0], g.h[1]); }

Field make_rho(const GridPtr& grid, double margin) {
    const Grid& g = *grid;
    return sample(grid, [&](double x, double y) {
        double r = ramp(std::min(x, g.extents[0] - x), margin);
        if (g.dimension == 2) r *= ramp(std::min(y, g.extents[1] - y), margin);
        return r;
    });
}

Field make_theta(const GridPtr& grid, double margin) {
    const Grid& g = *grid;
    auto bump = [](double x, double centre, double half) {
        const double z = (x - centre) / half;
        return std::abs(z) < 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * z)) : 0.0;
    };
    Field theta = sample(grid, [&](double x, double y) {
        double v = bump(x, 0.5 * g.extents[0], 0.5 * g.extents[0] - margin);
        if (g.dimension == 2) v *= bump(y, 0.5 * g.extents[1], 0.5 * g.extents[1] - margin);
        return v;
    });
    const double mass = integrate(theta);
    if (!(mass > 0.0)) throw Error("theta support contains no grid nodes; reduce margin_theta");
    for (auto& v : theta.values) v /= mass;
    return theta;
}

// Nodes adjacent to the boundary (interior nodes with a boundary neighbour).
std::vector<std::size_t> boundary_adjacent(const Grid& g) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) continue;
        const double d = g.boundary_distance(k);
        if (d < max_spacing(g) * 1.5) out.push_back(k);
    }
    return out;
}

}  // namespace

Field mollify(const Field& u0, double radius) {
    const GridPtr& grid = u0.grid;
    const Grid& g = *grid;
    if (radius < max_spacing(g) * (1.0 - 1e-12)) throw Error("mollify radius must be at least the grid spacing");

    // Discrete cos^2 bump, normalized to unit sum over its stencil.
    struct Tap {
        int di, dj;
        double w;
    };
    std::vector<Tap> taps;
    const int ri = static_cast<int>(std::floor(radius / g.h[0] + 1e-9));
    const int rj = g.dimension == 2 ? static_cast<int>(std::floor(radius / g.h[1] + 1e-9)) : 0;
    double total = 0.0;
    int reach_i = 0, reach_j = 0;
    for (int di = -ri; di <= ri; ++di) {
        for (int dj = -rj; dj <= rj; ++dj) {
            const double rr = std::hypot(di * g.h[0], g.dimension == 2 ? dj * g.h[1] : 0.0);
            if (rr >= radius * (1.0 - 1e-12) && !(di == 0 && dj == 0)) continue;
            const double c = std::cos(0.5 * std::numbers::pi * rr / radius);
            taps.push_back({di, dj, c * c});
            total += c * c;
            reach_i = std::max(reach_i, std::abs(di));
            reach_j = std::max(reach_j, std::abs(dj));
        }
    }
    for (auto& t : taps) t.w /= total;

    // The first nonzero shifted node sits one spacing past the shift and the
    // stencil reaches `reach` spacings, so this keeps the result at distance
    // >= radius from the boundary.
    const std::array<double, 2> shift{radius + (reach_i - 1) * g.h[0],
                                      g.dimension == 2 ? radius + (reach_j - 1) * g.h[1] : 0.0};
    for (int a = 0; a < g.dimension; ++a)
        if (shift[a] >= 0.5 * g.extents[a] - radius)
            throw Error("mollify radius too large: the shifted support would be empty");

    Field shifted(grid, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const int i = static_cast<int>(k / static_cast<std::size_t>(g.n[1]));
        const int j = static_cast<int>(k % static_cast<std::size_t>(g.n[1]));
        const double sx = shift_source(g.coord(0, i), g.extents[0], shift[0]);
        if (sx < 0.0) continue;
        if (g.dimension == 1) {
            shifted[k] = interp1(g, u0, sx);
        } else {
            const double sy = shift_source(g.coord(1, j), g.extents[1], shift[1]);
            if (sy < 0.0) continue;
            shifted[k] = interp2(g, u0, sx, sy);
        }
    }

    Field out(grid, 0.0);
    for (int i = 0; i < g.n[0]; ++i) {
        for (int j = 0; j < g.n[1]; ++j) {
            const std::size_t k = g.index(i, j);
            if (g.is_boundary(k)) continue;
            double s = 0.0;
            for (const auto& t : taps) {
                const int ii = i + t.di, jj = j + t.dj;
                if (ii < 0 || ii >= g.n[0] || jj < 0 || jj >= g.n[1]) continue;
                s += t.w * shifted[g.index(ii, jj)];
            }
            out[k] = std::max(s, 0.0);
        }
    }
    return out;
}

InitDataRecipe default_recipe(Field u0, double epsilon, const TorsionSolution& torsion) {
    const Grid& g = *u0.grid;
    InitDataRecipe r;
    r.epsilon = epsilon;
    const double len = min_extent(g);
    r.mollify_radius = 2.0 * max_spacing(g) + 0.5 * epsilon * len;
    // rho must vanish on the stencil of the boundary-adjacent nodes.
    r.margin_rho = std::max(4.0 * max_spacing(g), r.mollify_radius);
    r.margin_theta = std::max(2.0 * r.margin_rho, 0.15 * len);
    const double energy = dirichlet_energy(u0, 0.0);
    r.L = 1.1 * std::max(energy, phi_weighted_sup(u0, torsion));
    r.u0 = std::move(u0);
    return r;
}

void validate_recipe(const InitDataRecipe& recipe, const TorsionSolution& torsion) {
    const Field& u0 = recipe.u0;
    if (!u0.grid) throw Error("recipe: u0 has no grid");
    require_finite(u0, "recipe u0");
    if (!(recipe.epsilon > 0.0 && recipe.epsilon < 1.0)) throw Error("recipe: epsilon must lie in (0,1)");
    if (!(recipe.margin_rho > 0.0 && recipe.margin_theta > recipe.margin_rho))
        throw Error("recipe: margins must satisfy margin_theta > margin_rho > 0");
    const Grid& g = *u0.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (u0[k] < 0.0) throw Error("recipe: u0 must be nonnegative");
        if (g.is_boundary(k) && u0[k] != 0.0) throw Error("recipe: u0 must vanish on the boundary");
        if (!g.is_boundary(k) && !(u0[k] > 0.0))
            throw Error("recipe: u0 must be positive at interior nodes (1/u0 locally bounded)");
    }
    const double pn = phi_weighted_sup(u0, torsion);
    if (!(pn <= recipe.L)) throw Error("recipe: ||u0||_{Phi,inf} exceeds L");
}

InitDataResult construct_initial(const InitDataRecipe& recipe, const TorsionSolution& torsion) {
    validate_recipe(recipe, torsion);
    const GridPtr& grid = recipe.u0.grid;
    const Grid& g = *grid;
    const Field& Phi = torsion.phi;

    InitDataResult res;
    res.mollified = mollify(recipe.u0, recipe.mollify_radius);
    res.rho = make_rho(grid, recipe.margin_rho);
    res.theta = make_theta(grid, recipe.margin_theta);
    res.mass_offset = recipe.epsilon * g.measure();

    const std::size_t n = g.size();
    Field one_minus_rho_phi(grid), rho_phi(grid), rho_theta(grid);
    for (std::size_t k = 0; k < n; ++k) {
        one_minus_rho_phi[k] = (1.0 - res.rho[k]) * Phi[k];
        rho_phi[k] = res.rho[k] * res.mollified[k];
        rho_theta[k] = res.rho[k] * res.theta[k];
    }
    const double k_collar = integrate(one_minus_rho_phi);
    const double s_theta = integrate(rho_theta);
    if (!(s_theta > 0.0)) throw Error("construct_initial: rho vanishes on the support of theta");
    const double deficit = integrate(recipe.u0) - integrate(rho_phi);

    // u0eps - eps = C * Q + P with alpha = (deficit - C k) / s_theta.
    Field Q(grid), P(grid);
    for (std::size_t k = 0; k < n; ++k) {
        Q[k] = one_minus_rho_phi[k] - (k_collar / s_theta) * rho_theta[k];
        P[k] = rho_phi[k] + (deficit / s_theta) * rho_theta[k];
    }
    res.A = energy_inner(Q, Q);
    res.B = 2.0 * energy_inner(P, Q) - 1.0;
    res.Gamma = energy_inner(P, P);

    const double disc = res.B * res.B - 4.0 * res.A * res.Gamma;
    if (disc < 0.0) throw Error("quadratic has no real root; shrink eps or mollify_radius");
    res.C = -2.0 * res.Gamma / (res.B - std::sqrt(disc));
    if (!(res.C > 0.0)) throw Error("construct_initial: root C is not positive");
    res.alpha = (deficit - res.C * k_collar) / s_theta;

    res.u0eps = Field(grid);
    for (std::size_t k = 0; k < n; ++k) {
        res.u0eps[k] = g.is_boundary(k) ? recipe.epsilon
                                        : recipe.epsilon + res.C * one_minus_rho_phi[k] +
                                              res.rho[k] * (res.mollified[k] + res.alpha * res.theta[k]);
    }

    double core_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k)
        if (g.boundary_distance(k) >= 0.5 * recipe.margin_theta) core_min = std::min(core_min, res.mollified[k]);
    res.C_K = std::isfinite(core_min) ? 0.5 * core_min : 0.0;

    res.report = verify_approx_properties(res, recipe, torsion);
    return res;
}

double w12_distance(const Field& a, const Field& b) {
    Field d(a.grid);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = a[k] - b[k];
    const double l2 = l2_norm(d);
    return std::sqrt(l2 * l2 + energy_inner(d, d));
}

std::vector<PropertyCheck> verify_approx_properties(const InitDataResult& result, const InitDataRecipe& recipe,
                                                    const TorsionSolution& torsion) {
    const Field& u = result.u0eps;
    const Grid& g = *u.grid;
    const double eps = recipe.epsilon;
    std::vector<PropertyCheck> out;

    double bdev = 0.0, floor_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) bdev = std::max(bdev, std::abs(u[k] - eps));
        floor_min = std::min(floor_min, u[k] - eps);
    }
    out.push_back({"a1_boundary", bdev, 1e-8, bdev <= 1e-8});
    out.push_back({"a1_floor", floor_min, 0.0, floor_min >= -1e-12});

    const double energy = dirichlet_energy(u, eps);
    const Field lap = laplacian(u, eps);
    double compat = 0.0;
    for (std::size_t k : boundary_adjacent(g)) compat = std::max(compat, std::abs(lap[k] + energy));
    const double compat_rel = energy > 0.0 ? compat / energy : compat;
    out.push_back({"a1_compatibility", compat_rel, 0.1, compat_rel <= 0.1});

    Field shifted(u.grid);
    for (std::size_t k = 0; k < g.size(); ++k) shifted[k] = u[k] - eps;
    const double pn = phi_weighted_sup(shifted, torsion);
    out.push_back({"ae_phi_norm", pn, recipe.L + 0.1, pn <= recipe.L + 0.1});

    double core_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.boundary_distance(k) >= 0.5 * recipe.margin_theta) core_min = std::min(core_min, u[k]);
    out.push_back({"a3_core_lower", core_min, result.C_K, result.C_K > 0.0 && core_min >= result.C_K});

    const double dist = w12_distance(u, recipe.u0);
    Field zero(u.grid, 0.0);
    const double ref = w12_distance(recipe.u0, zero);
    out.push_back({"a5_w12_distance", dist, ref, dist < ref});

    const double mass_gap = std::abs(integrate(u) - integrate(recipe.u0) - eps * g.measure());
    out.push_back({"a6_mass", mass_gap, 1e-10, mass_gap <= 1e-10});
    return out;
}

bool all_pass(const std::vector<PropertyCheck>& report) {
    return std::all_of(report.begin(), report.end(), [](const PropertyCheck& c) { return c.pass; });
}

}  // namespace replidyn
