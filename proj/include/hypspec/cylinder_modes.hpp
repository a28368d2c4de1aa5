#pragma once

#include <complex>
#include <vector>

namespace hypspec {

enum class Parity { Even, Odd };
enum class Angular { Cos, Sin };

/// Fourier mode k >= 0 on a hyperbolic cylinder, its radial parity, and the
/// realified angular factor cos/sin(2 pi k t / l). For k = 0 only cos exists.
struct ModeIndex {
    int k = 0;
    Parity parity = Parity::Even;
    Angular angular = Angular::Cos;

    void validate() const;
    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

struct RadialOptions {
    double rel_tol = 1e-14;
    double abs_tol = 1e-15;
    int max_nodes = 512;  ///< cap on Chebyshev nodes per panel
};

/// Initial-value-normalized solution of
///   -(1/cosh r) d/dr (cosh r dPhi/dr) + 4 pi^2 k^2 / (l^2 cosh^2 r) Phi = lambda Phi
/// on [-rho_max, rho_max]. Phi and Phi' are stored as piecewise Chebyshev
/// expansions on [0, rho_max], with panels short enough that the solution
/// changes by a bounded factor across each; negative rho is reached by parity.
/// Immutable after construction.
class RadialSolution {
public:
    RadialSolution() = default;

    double core_length() const { return core_length_; }
    int k() const { return k_; }
    Parity parity() const { return parity_; }
    double lambda() const { return lambda_; }
    double rho_max() const { return rho_max_; }
    /// Total retained Chebyshev coefficients over all panels (value expansion).
    int degree() const;
    int panel_count() const { return static_cast<int>(panels_.size()); }

    double value(double rho) const;
    double derivative(double rho) const;

private:
    friend RadialSolution solve_radial(double, int, Parity, double, double, const RadialOptions&);

    double core_length_ = 0.0;
    int k_ = 0;
    Parity parity_ = Parity::Even;
    double lambda_ = 0.0;
    double rho_max_ = 0.0;
    struct Panel {
        double lo, hi;
        std::vector<double> value_coef, deriv_coef;
    };
    std::vector<Panel> panels_;

    void check_range(double rho) const;
    const Panel& panel_for(double r) const;
};

RadialSolution solve_radial(double core_length, int k, Parity parity, double lambda,
                            double rho_max, const RadialOptions& opts = {});

inline RadialSolution solve_radial(double core_length, const ModeIndex& mode, double lambda,
                                   double rho_max, const RadialOptions& opts = {}) {
    mode.validate();
    return solve_radial(core_length, mode.k, mode.parity, lambda, rho_max, opts);
}

struct ModeSample {
    double value;
    double d_rho;
    double d_t;
};

/// Phi_k(rho) trig(2 pi k t / l) and its coordinate partials.
ModeSample mode_value_and_gradient(const RadialSolution& sol, Angular angular, double rho,
                                   double t);

/// n_rho d_rho Phi + n_t d_t Phi for a unit normal of the Fermi metric
/// d rho^2 + cosh^2 rho dt^2. Rejects normals whose metric length differs
/// from 1 by more than 1e-10.
double directional_normal_derivative(const RadialSolution& sol, Angular angular, double rho,
                                     double t, double n_rho, double n_t);

/// The hypergeometric fundamental system (already normalized to the same
/// initial data as solve_radial). Only meaningful where the Pfaff-transformed
/// argument tanh^2 rho stays below ~0.95.
std::complex<double> closed_form_mode(double core_length, int k, Parity parity, double lambda,
                                      double rho);

}  // namespace hypspec
