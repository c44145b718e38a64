#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "anisoflow/errors.hpp"

namespace anisoflow {

// Thomas algorithm for a tridiagonal system
//   sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]
// (sub[0] and sup[n-1] ignored). No pivoting; intended for the strictly
// diagonally dominant systems the time stepper produces.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& sub,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& sup,
                                             const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    std::vector<double> c_star(n), d_star(n), x(n);

    double denom = diag[0];
    if (denom == 0.0) throw SolveFailure("zero pivot in tridiagonal solve (row 0)");
    c_star[0] = sup[0] / denom;
    d_star[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - sub[i] * c_star[i - 1];
        if (denom == 0.0)
            throw SolveFailure("zero pivot in tridiagonal solve (row " + std::to_string(i) + ")");
        c_star[i] = sup[i] / denom;
        d_star[i] = (rhs[i] - sub[i] * d_star[i - 1]) / denom;
    }
    x[n - 1] = d_star[n - 1];
    for (std::size_t i = n - 1; i > 0; --i) x[i - 1] = d_star[i - 1] - c_star[i - 1] * x[i];
    return x;
}

// Cyclic tridiagonal solve under periodic coupling: row 0 additionally
// carries sub[0] against x[n-1] and row n-1 carries sup[n-1] against x[0].
// Implemented as a rank-one correction of the plain factorization (two
// auxiliary tridiagonal solves). The residual ||Mx - rhs||_inf is checked
// against rel_tol * ||rhs||_inf before the solution is returned.
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& sub,
                                                    const std::vector<double>& diag,
                                                    const std::vector<double>& sup,
                                                    const std::vector<double>& rhs,
                                                    double rel_tol = 1e-12) {
    const std::size_t n = diag.size();
    if (n < 3) throw SolveFailure("cyclic tridiagonal solve needs n >= 3");

    const double corner_first = sub[0];     // (row 0, col n-1)
    const double corner_last = sup[n - 1];  // (row n-1, col 0)

    std::vector<double> diag_mod = diag;
    const double gamma = -diag[0];
    diag_mod[0] = diag[0] - gamma;
    diag_mod[n - 1] = diag[n - 1] - corner_first * corner_last / gamma;

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner_last;

    const auto y = solve_tridiagonal(sub, diag_mod, sup, rhs);
    const auto z = solve_tridiagonal(sub, diag_mod, sup, u);

    const double factor =
        (y[0] + corner_first * y[n - 1] / gamma) / (1.0 + z[0] + corner_first * z[n - 1] / gamma);

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];

    double rhs_norm = 0.0, res_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = x[(i + n - 1) % n];
        const double hi = x[(i + 1) % n];
        double row = diag[i] * x[i];
        row += (i == 0) ? corner_first * lo : sub[i] * lo;
        row += (i == n - 1) ? corner_last * hi : sup[i] * hi;
        res_norm = std::max(res_norm, std::abs(row - rhs[i]));
        rhs_norm = std::max(rhs_norm, std::abs(rhs[i]));
    }
    if (!(res_norm <= rel_tol * std::max(rhs_norm, 1e-300)) && rhs_norm > 0.0)
        throw SolveFailure("cyclic solve residual " + std::to_string(res_norm) +
                           " exceeds tolerance " + std::to_string(rel_tol * rhs_norm));
    if (rhs_norm == 0.0 && res_norm > 0.0)
        throw SolveFailure("cyclic solve nonzero residual for zero right-hand side");
    return x;
}

}  // namespace anisoflow
