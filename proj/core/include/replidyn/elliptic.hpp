#pragma once

#include <string>

#include "replidyn/mesh.hpp"

namespace replidyn {

/// Discrete torsion function: -Lap phi = 1 inside its domain, phi = 0 on the
/// domain's boundary and outside of it.
struct TorsionSolution {
    Field phi;
    std::string domain_tag;   // "full" or "subdomain:<margin>"
    double margin = 0.0;      // 0 for the full domain
    double c_subdomain = 0.0; // integral of phi over its domain
    double residual = 0.0;    // final relative CG residual
    int iterations = 0;
};

TorsionSolution solve_torsion(const GridPtr& grid);

/// Torsion function of the concentric box shrunk by `margin` on every side.
/// The box edges snap to the first grid line at distance >= margin.
TorsionSolution solve_torsion_subdomain(const GridPtr& grid, double margin);

/// esssup |v / phi| over the nodes where phi > 0.
double phi_weighted_sup(const Field& v, const TorsionSolution& torsion);

/// Discrete Poincare constant 1 / lambda_min(-Lap_h) with zero Dirichlet data,
/// from inverse power iteration.
double poincare_constant(const GridPtr& grid);

}  // namespace replidyn
