#pragma once

#include <vector>

#include "hypspec/length_spectrum.hpp"
#include "hypspec/specfun.hpp"
#include "hypspec/surface_mps.hpp"

namespace hypspec::selberg {

/// Everything the trace formula consumes.
struct SpectralInput {
    double vol = 0.0;
    /// Ascending, repeated by multiplicity, eigenvalues[0] == 0.
    std::vector<double> eigenvalues;
    LengthSpectrum lengths;  ///< primitive oriented classes
    /// Radius of a disk around some point that contains a fundamental domain.
    /// Enters the bound on the number of classes beyond lengths.l_max.
    double domain_radius = 0.0;

    double systole() const { return lengths.systole(); }
    void validate() const;
};

/// Repeats each lambda by its multiplicity.
std::vector<double> expand(const std::vector<EigenvalueRecord>& records);

/// Area 4 pi (g - 1).
double genus_area(int genus);

/// Bolza surface: area 4 pi, domain radius the circumradius of the octagon.
SpectralInput bolza_input(std::vector<double> eigenvalues, LengthSpectrum lengths);

struct Tolerances {
    double quad_abs = 1e-14;  ///< per r- or t-integral
    double series_rel = 1e-17;
    int threads = 0;
};

/// Upper bound on the number of oriented hyperbolic classes (primitive or
/// not) of length <= x: 2 pi (cosh(x + 3 R) - 1) / vol.
double class_count_bound(double x, double vol, double domain_radius);

struct HeatTrace {
    double value = 0.0;
    double identity = 0.0;
    double geodesic = 0.0;
    double quadrature_error = 0.0;
    double length_tail = 0.0;  ///< bound on classes longer than l_max

    double error() const { return quadrature_error + length_tail; }
};

/// Geometric side of the trace formula for tr e^{t Delta}.
HeatTrace heat_trace_geometric(double t, const SpectralInput& in, const Tolerances& tol = {});

/// Vol e^{-t/4} / (4 pi t) * int_0^inf pi e^{-r^2 t} sech^2(pi r) dr.
specfun::QuadResult identity_term(double t, double vol, const Tolerances& tol = {});

/// sum_j e^{-lambda_j t} over the first n + 1 entries (j = 0..n).
double heat_trace_spectral(double t, const std::vector<double>& eigenvalues, int n);

struct HeatCoefficient {
    double value = 0.0;
    double error = 0.0;
};

/// a_k = Vol / (4 pi) (-1)^k / k! m_k - [k == 1], for k = 0..k_max.
std::vector<HeatCoefficient> heat_coefficients(double vol, int k_max, const Tolerances& tol = {});

struct Budget {
    double spectral_tail = 0.0;
    double length_tail = 0.0;
    double quadrature = 0.0;
    double heat_truncation = 0.0;

    double total() const { return spectral_tail + length_tail + quadrature + heat_truncation; }
};

struct ZetaOptions {
    double epsilon = 0.1;
    int n_heat = 8;
    Tolerances tol;
    double max_error = 0.0;  ///< if > 0, a larger total budget throws
};

struct ZetaEvaluation {
    double s = 0.0;
    double value = 0.0;
    Budget budget;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;  ///< before division by Gamma(s)
    double epsilon = 0.0;
    int n_eigen = 0;  ///< nonzero eigenvalues used
    int n_heat = 0;
    double l_max = 0.0;
};

/// Spectral zeta function continued to s > -n_heat. s = 1 is the pole; at
/// s = 0, -1, ... the pole of T2 cancels against 1 / Gamma(s).
ZetaEvaluation zeta(double s, const SpectralInput& in, const ZetaOptions& opts = {});

struct DeterminantEvaluation {
    double det = 0.0;
    double zeta_prime0 = 0.0;  ///< L1 + L2 + L3 = -log det
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
    Budget budget;             ///< on zeta'(0)
    double det_error = 0.0;    ///< budget propagated to det
    double epsilon = 0.0;
    int n_eigen = 0;
    double l_max = 0.0;
};

DeterminantEvaluation log_det(const SpectralInput& in, const ZetaOptions& opts = {});

struct RCurve {
    std::vector<double> t, r;
    double crossover = 0.0;  ///< grid t with the smallest |R_N|
    int sign_changes = 0;
};

/// R_N(t) = sum_{j<=N} e^{-lambda_j t} minus the identity term.
RCurve r_n_curve(const SpectralInput& in, int n, const std::vector<double>& t_grid, const Tolerances& tol = {});

/// First positive root of cos(x) cosh(x) = 1.
double nu_constant();

struct Certificate {
    bool certified = false;
    double lambda_max = 0.0;  ///< -log(F_T - R~_N) / t when certified
    double f_t = 0.0;         ///< explicit bound
    double f_t_trace = 0.0;   ///< sqrt(T/t) tr(e^{-Delta T}) e^{...}, trace from the geometric side
    double f_t_trace_error = 0.0;
    double r_tilde = 0.0;
    double t = 0.0, big_t = 0.0;
};

/// No eigenvalue missing from mu in [0, lambda_max]. mu is ascending with
/// multiplicity and starts at 0. Requires 0 < t < T < sqrt(l0^2 + 1) - 1.
Certificate completeness_certificate(const std::vector<double>& mu, const SpectralInput& in, double t,
                                     double big_t, const Tolerances& tol = {});

/// F_test(t) = (1/t) sum_{sqrt(mu_j) <= t} (t - sqrt(mu_j)) - Vol / (12 pi) (t^2 - 1).
std::vector<double> riesz_test(const std::vector<double>& mu, double vol, const std::vector<double>& t_grid);

struct WeylFit {
    double slope = 0.0;
    double expected = 0.0;  ///< Vol / (4 pi)
    double relative_error = 0.0;
};

/// Least-squares slope of N(lambda) against lambda over the upper half of
/// the list (at least 50 entries).
WeylFit weyl_check(const std::vector<double>& mu, double vol);

}  // namespace hypspec::selberg
