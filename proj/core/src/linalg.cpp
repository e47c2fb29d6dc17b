#include "replidyn/linalg.hpp"

#include <cmath>

namespace replidyn {

namespace {
double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
}  // namespace

CgResult conjugate_gradient(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            std::span<const double> diagonal, std::span<const double> rhs, std::span<double> x,
                            double rel_tol, int max_iterations) {
    const std::size_t n = rhs.size();
    std::vector<double> r(n), z(n), p(n), ap(n);
    CgResult res;

    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    if (rhs_norm == 0.0) {
        for (auto& v : x) v = 0.0;
        res.converged = true;
        return res;
    }

    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    double rnorm = std::sqrt(dot(r, r));
    res.relative_residual = rnorm / rhs_norm;
    if (res.relative_residual <= rel_tol) {
        res.converged = true;
        return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diagonal[i];
    p = z;
    double rz = dot(r, z);

    for (int it = 1; it <= max_iterations; ++it) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;  // operator not SPD along p
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = std::sqrt(dot(r, r));
        res.iterations = it;
        res.relative_residual = rnorm / rhs_norm;
        if (res.relative_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diagonal[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return res;
}

bool solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<const double> rhs, std::span<double> x) {
    const std::size_t n = diag.size();
    if (n == 0) return true;
    std::vector<double> c(n), d(n);
    double beta = diag[0];
    if (beta == 0.0) return false;
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = diag[i] - lower[i] * c[i - 1];
        if (beta == 0.0 || !std::isfinite(beta)) return false;
        c[i] = (i + 1 < n) ? upper[i] / beta : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return true;
}

}  // namespace replidyn
