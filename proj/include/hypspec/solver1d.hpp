#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hypspec::solver1d {

/// -u'' + V u = lambda u on [-L, L], u(-L) = u(L) = 0.
struct Problem1D {
    double L = 1.0;
    std::function<double(double)> V = [](double) { return 0.0; };
    double tol = 1e-12;  ///< integrator tolerance (absolute and relative)

    void validate() const;
};

Problem1D zero_potential(double L = 1.0);
/// V(x) = 5 (1 - x^2).
Problem1D parabolic5(double L = 1.0);
/// V(x) = sum_i c_i x^i.
Problem1D polynomial_potential(std::vector<double> coeffs, double L = 1.0);

struct ShootResult {
    double u = 0.0;   ///< u(L)
    double du = 0.0;  ///< u'(L)
};

/// Integrates from -L with u(-L) = 0, u'(-L) = 1.
ShootResult shoot(const Problem1D& p, double lambda);

/// Values of the shooting solution on the given ascending points in [-L, L].
std::vector<double> shooting_solution(const Problem1D& p, double lambda, const std::vector<double>& xs);

struct EigenOptions {
    double residual_tol = 1e-12;  ///< |u(L)| relative to the local amplitude
    int max_iterations = 100;
    int threads = 0;
};

/// Sign changes of u_lambda(L) on a uniform grid, refined by safeguarded
/// secant steps. Ascending.
std::vector<double> eigenvalues_1d(const Problem1D& p, double lambda_lo, double lambda_hi, double step,
                                   const EigenOptions& opts = {});

}  // namespace hypspec::solver1d
