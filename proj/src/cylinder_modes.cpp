#include "hypspec/cylinder_modes.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hypspec/errors.hpp"
#include "hypspec/specfun.hpp"

namespace hypspec {

namespace {

constexpr double kPi = std::numbers::pi;
using State = std::array<double, 2>;

// Clenshaw summation of sum c_m T_m(x).
double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    const double x2 = 2.0 * x;
    for (std::size_t m = c.size(); m-- > 1;) {
        const double b0 = c[m] + x2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c.empty() ? 0.0 : c[0] + x * b1 - b2;
}

// Chebyshev coefficients from values at the n first-kind nodes, listed in
// ascending order.
std::vector<double> cheb_coefficients(const std::vector<double>& x, const std::vector<double>& f) {
    const std::size_t n = x.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double tm2 = 1.0, tm1 = x[j];  // T_0, T_1
        const double twox = 2.0 * x[j];
        const double fj = f[j];
        c[0] += fj;
        if (n > 1) c[1] += fj * tm1;
        for (std::size_t m = 2; m < n; ++m) {
            const double tm = twox * tm1 - tm2;
            c[m] += fj * tm;
            tm2 = tm1;
            tm1 = tm;
        }
    }
    for (double& v : c) v *= 2.0 / static_cast<double>(n);
    c[0] *= 0.5;
    return c;
}

// Chebyshev coefficients of a function of given parity on [-1, 1] from its
// values at the positive half of 2n first-kind nodes.
std::vector<double> parity_coefficients(const std::vector<double>& x, const std::vector<double>& f,
                                        bool even) {
    const std::size_t n = x.size();
    const std::size_t big_m = 2 * n;
    std::vector<double> c(big_m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double tm2 = 1.0, tm1 = x[j];
        const double twox = 2.0 * x[j];
        const double fj = f[j];
        if (even) c[0] += fj;
        else c[1] += fj * tm1;
        for (std::size_t m = 2; m < big_m; ++m) {
            const double tm = twox * tm1 - tm2;
            if ((m % 2 == 0) == even) c[m] += fj * tm;
            tm2 = tm1;
            tm1 = tm;
        }
    }
    for (double& v : c) v *= 4.0 / static_cast<double>(big_m);
    c[0] *= 0.5;
    return c;
}

bool tail_converged(const std::vector<double>& c, double rel) {
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) return true;
    double tail = 0.0;
    const std::size_t n = c.size();
    for (std::size_t m = n - std::min<std::size_t>(n, 8); m < n; ++m) tail = std::max(tail, std::abs(c[m]));
    return tail <= rel * cmax;
}

void trim(std::vector<double>& c) {
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    while (c.size() > 1 && std::abs(c.back()) <= 1e-18 * cmax) c.pop_back();
}

}  // namespace

void ModeIndex::validate() const {
    if (k < 0) throw InvalidArgument("ModeIndex: k must be >= 0");
    if (k == 0 && angular != Angular::Cos) {
        throw InvalidArgument("ModeIndex: k = 0 admits only the cos angular part");
    }
}

void RadialSolution::check_range(double rho) const {
    if (!(std::abs(rho) <= rho_max_ * (1.0 + 1e-12))) {
        throw InvalidArgument("RadialSolution: rho = " + std::to_string(rho) +
                              " outside [-rho_max, rho_max], rho_max = " + std::to_string(rho_max_));
    }
}

int RadialSolution::degree() const {
    int d = 0;
    for (const auto& p : panels_) d += static_cast<int>(p.value_coef.size());
    return d;
}

const RadialSolution::Panel& RadialSolution::panel_for(double r) const {
    auto it = std::lower_bound(panels_.begin(), panels_.end(), r,
                               [](const Panel& p, double v) { return p.hi < v; });
    return it == panels_.end() ? panels_.back() : *it;
}

double RadialSolution::value(double rho) const {
    check_range(rho);
    const double r = std::min(std::abs(rho), rho_max_);
    const Panel& p = panel_for(r);
    if (p.lo == 0.0) return clenshaw(p.value_coef, std::clamp(rho / p.hi, -1.0, 1.0));
    const double x = std::clamp((2.0 * r - p.lo - p.hi) / (p.hi - p.lo), -1.0, 1.0);
    const double v = clenshaw(p.value_coef, x);
    return (rho < 0.0 && parity_ == Parity::Odd) ? -v : v;
}

double RadialSolution::derivative(double rho) const {
    check_range(rho);
    const double r = std::min(std::abs(rho), rho_max_);
    const Panel& p = panel_for(r);
    if (p.lo == 0.0) return clenshaw(p.deriv_coef, std::clamp(rho / p.hi, -1.0, 1.0));
    const double x = std::clamp((2.0 * r - p.lo - p.hi) / (p.hi - p.lo), -1.0, 1.0);
    const double v = clenshaw(p.deriv_coef, x);
    return (rho < 0.0 && parity_ == Parity::Even) ? -v : v;
}

RadialSolution solve_radial(double core_length, int k, Parity parity, double lambda,
                            double rho_max, const RadialOptions& opts) {
    if (!(core_length > 0.0)) throw InvalidArgument("solve_radial: core length must be > 0");
    if (!(rho_max > 0.0)) throw InvalidArgument("solve_radial: rho_max must be > 0");
    if (k < 0) throw InvalidArgument("solve_radial: k must be >= 0");

    namespace ode = boost::numeric::odeint;
    const double kk = 4.0 * kPi * kPi * double(k) * double(k) / (core_length * core_length);
    // y = (Phi, cosh(rho) Phi')
    auto rhs = [kk, lambda](const State& y, State& dy, double rho) {
        const double c = std::cosh(rho);
        dy[0] = y[1] / c;
        dy[1] = (kk / c - lambda * c) * y[0];
    };
    const bool even = parity == Parity::Even;

    RadialSolution sol;
    sol.core_length_ = core_length;
    sol.k_ = k;
    sol.parity_ = parity;
    sol.lambda_ = lambda;
    sol.rho_max_ = rho_max;

    // The integrator noise floor sits near rel_tol; coefficients below it carry nothing.
    const double floor = 100.0 * std::max(opts.rel_tol, 1e-16);
    State y = even ? State{1.0, 0.0} : State{0.0, 1.0};
    double lo = 0.0;
    while (lo < rho_max) {
        // Local growth/oscillation rate bounds the change across a panel to about e^3.
        const double rate = std::sqrt(kk) / std::cosh(lo) + std::sqrt(std::abs(lambda)) + 1.0;
        double hi = lo + 3.0 / rate;
        if (hi > rho_max - 1e-3 * (hi - lo)) hi = rho_max;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);

        bool done = false;
        for (int n = 16; n <= opts.max_nodes && !done; n *= 2) {
            // The panel at the core is [-hi, hi] with a parity-restricted
            // expansion, sampled at the positive half of 2n nodes.
            const bool core = lo == 0.0;
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j) {
                x[j] = core ? std::cos(kPi * (n - 1 - j + 0.5) / (2.0 * n))
                            : std::cos(kPi * (n - 1 - j + 0.5) / n);
            }
            std::vector<double> times;
            times.reserve(n + 2);
            times.push_back(lo);
            for (double xj : x) times.push_back(core ? hi * xj : mid + half * xj);
            times.push_back(hi);

            std::vector<double> phi(n), dphi(n);
            State ys = y;
            double last_rho = lo;
            std::size_t idx = 0;
            auto observer = [&](const State& st, double rho) {
                last_rho = rho;
                if (idx > 0 && idx <= static_cast<std::size_t>(n)) {
                    phi[idx - 1] = st[0];
                    dphi[idx - 1] = st[1] / std::cosh(rho);
                }
                ++idx;
            };
            try {
                auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                                    ode::runge_kutta_fehlberg78<State>());
                ode::integrate_times(stepper, rhs, ys, times.begin(), times.end(), 0.25 * half / n,
                                     observer, ode::max_step_checker(100000));
            } catch (const std::exception& e) {
                throw NumericalFailure("solve_radial: integrator failed near rho = " +
                                       std::to_string(last_rho) + ": " + e.what());
            }
            if (!std::isfinite(ys[0]) || !std::isfinite(ys[1])) {
                throw NumericalFailure("solve_radial: non-finite solution near rho = " +
                                       std::to_string(last_rho));
            }
            auto cv = core ? parity_coefficients(x, phi, even) : cheb_coefficients(x, phi);
            auto cd = core ? parity_coefficients(x, dphi, !even) : cheb_coefficients(x, dphi);
            if (tail_converged(cv, floor) && tail_converged(cd, floor)) {
                trim(cv);
                trim(cd);
                sol.panels_.push_back({lo, hi, std::move(cv), std::move(cd)});
                y = ys;
                done = true;
            }
        }
        if (!done) {
            throw NumericalFailure("solve_radial: Chebyshev expansion did not converge on [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "] (k=" +
                                   std::to_string(k) + ", lambda=" + std::to_string(lambda) + ")");
        }
        lo = hi;
    }
    return sol;
}

ModeSample mode_value_and_gradient(const RadialSolution& sol, Angular angular, double rho,
                                   double t) {
    const double phi = sol.value(rho);
    const double dphi = sol.derivative(rho);
    if (sol.k() == 0) {
        if (angular != Angular::Cos) {
            throw InvalidArgument("mode_value_and_gradient: k = 0 admits only cos");
        }
        return {phi, dphi, 0.0};
    }
    const double omega = 2.0 * kPi * sol.k() / sol.core_length();
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    if (angular == Angular::Cos) return {phi * c, dphi * c, -omega * phi * s};
    return {phi * s, dphi * s, omega * phi * c};
}

double directional_normal_derivative(const RadialSolution& sol, Angular angular, double rho,
                                     double t, double n_rho, double n_t) {
    const double ch = std::cosh(rho);
    const double norm2 = n_rho * n_rho + ch * ch * n_t * n_t;
    if (std::abs(norm2 - 1.0) > 1e-10) {
        throw InvalidArgument("directional_normal_derivative: normal is not unit length");
    }
    const auto g = mode_value_and_gradient(sol, angular, rho, t);
    return n_rho * g.d_rho + n_t * g.d_t;
}

std::complex<double> closed_form_mode(double core_length, int k, Parity parity, double lambda,
                                      double rho) {
    using cd = std::complex<double>;
    const cd s = 0.5 + std::sqrt(cd(0.25 - lambda, 0.0));
    const cd ik = cd(0.0, kPi * k / core_length);
    const double z = -std::sinh(rho) * std::sinh(rho);
    const cd power = std::exp(2.0 * ik * std::log(std::cosh(rho)));
    if (parity == Parity::Even) {
        return power * specfun::hyp2f1(s / 2.0 + ik, (1.0 - s) / 2.0 + ik, 0.5, z).value;
    }
    return std::sinh(rho) * power *
           specfun::hyp2f1((1.0 + s) / 2.0 + ik, (2.0 - s) / 2.0 + ik, 1.5, z).value;
}

}  // namespace hypspec
