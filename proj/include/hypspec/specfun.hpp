#pragma once

#include <complex>

namespace hypspec::specfun {

/// Euler–Mascheroni constant (OEIS A001620, first 20 digits).
inline constexpr double kEulerGamma = 0.57721566490153286061;

enum class RuleKind { Adaptive, Composite };

/// Integration contract for the semi-infinite r-integrals of the trace formula.
struct QuadratureSpec {
    RuleKind rule = RuleKind::Adaptive;
    double abs_tol = 1e-13;
    double r_max = 12.0;

    void validate() const;
};

/// Value of a quadrature together with its audited error.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;       ///< quadrature estimate + analytic truncation tail
    double tail_bound = 0.0;  ///< part of `error` coming from truncation at r_max
};

struct Hyp2F1Result {
    std::complex<double> value;
    double error_estimate = 0.0;    ///< relative
    bool reduced_accuracy = false;  ///< transformed argument above 0.95
};

/// Gauss hypergeometric 2F1(a,b;c;z) for z <= 0 via the Pfaff transform
/// z -> z/(z-1) and the power series in the transformed argument.
/// Throws InvalidArgument if c is a non-positive integer or z > 0, and
/// NumericalFailure if the series does not converge.
Hyp2F1Result hyp2f1(std::complex<double> a, std::complex<double> b, double c, double z);

/// Upper incomplete gamma Gamma(s, x) for real s and x > 0.
double upper_gamma(double s, double x);

/// Exponential integral E1(x) = Gamma(0, x).
double exp_integral_e1(double x);

/// Generalized exponential integral E2(x) = x Gamma(-1, x), x > 0.
double exp_integral_e2(double x);

/// I(t) = int_0^inf pi e^{-r^2 t} sech^2(pi r) dr.
QuadResult identity_term_integral(double t, const QuadratureSpec& q = {});

/// m_k = int_0^inf pi (r^2 + 1/4)^k sech^2(pi r) dr.
QuadResult heat_moment(int k, const QuadratureSpec& q = {});

/// Adaptive Gauss–Kronrod integration of f over [a, b] to absolute
/// tolerance `abs_tol`. Throws NumericalFailure when the tolerance is not met.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol);

/// pi sech^2(pi r), evaluated without overflow.
double sech2_weight(double r);

}  // namespace hypspec::specfun

#include "hypspec/detail/quadrature.hpp"
