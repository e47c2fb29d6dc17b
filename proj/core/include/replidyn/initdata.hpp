#pragma once

#include <string>
#include <vector>

#include "replidyn/elliptic.hpp"
#include "replidyn/mesh.hpp"

namespace replidyn {

/// Inputs for building regularized initial data from a target profile u0.
struct InitDataRecipe {
    Field u0;
    double epsilon = 1e-3;
    double mollify_radius = 0.05;
    double margin_theta = 0.25;  // theta is supported at distance >= margin_theta from the boundary
    double margin_rho = 0.05;    // rho == 1 at distance >= margin_rho, rho == 0 up to margin_rho / 2
    double L = 1.0;              // bound on ||u0||_{Phi,inf}
};

struct PropertyCheck {
    std::string property;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct InitDataResult {
    Field u0eps;
    Field mollified;  // the compactly supported smooth approximation of u0
    Field rho;
    Field theta;
    double C = 0.0;
    double alpha = 0.0;
    double A = 0.0;
    double B = 0.0;
    double Gamma = 0.0;
    double C_K = 0.0;            // lower bound on the core
    double mass_offset = 0.0;    // epsilon * |Omega|
    std::vector<PropertyCheck> report;
};

/// Inward shift of the boundary collar followed by convolution with a
/// normalized cos^2 bump of the given radius. The result vanishes within
/// `radius` of the boundary.
Field mollify(const Field& u0, double radius);

/// Recipe with epsilon-dependent cutoffs: mollify_radius = 2 h + 0.5 eps
/// (min extent), margin_rho = max(4 h, radius), margin_theta =
/// max(2 margin_rho, 0.15 min extent), and L = 1.1 max(E(u0), ||u0||_{Phi,inf}).
InitDataRecipe default_recipe(Field u0, double epsilon, const TorsionSolution& torsion);

/// Throws Error when the recipe invariants do not hold.
void validate_recipe(const InitDataRecipe& recipe, const TorsionSolution& torsion);

/// u0eps = eps + C (1 - rho) Phi + rho (phi + alpha theta), with C the root of
/// A C^2 + B C + Gamma = 0 that makes the discrete Dirichlet energy of u0eps
/// equal to C, and alpha chosen so that integrate(u0eps) = integrate(u0) + eps |Omega|.
InitDataResult construct_initial(const InitDataRecipe& recipe, const TorsionSolution& torsion);

std::vector<PropertyCheck> verify_approx_properties(const InitDataResult& result, const InitDataRecipe& recipe,
                                                    const TorsionSolution& torsion);

/// W^{1,2} distance used by the (a5) check.
double w12_distance(const Field& a, const Field& b);

bool all_pass(const std::vector<PropertyCheck>& report);

}  // namespace replidyn
