#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace replidyn {

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive-definite
/// operator given matrix-free. x holds the initial guess and the solution.
CgResult conjugate_gradient(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            std::span<const double> diagonal, std::span<const double> rhs, std::span<double> x,
                            double rel_tol, int max_iterations);

/// Thomas algorithm for a tridiagonal system; lower[0] and upper[n-1] unused.
/// Returns false on a zero pivot.
bool solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<const double> rhs, std::span<double> x);

}  // namespace replidyn
