#include "hypspec/solver1d.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "hypspec/errors.hpp"
#include "hypspec/gsvd.hpp"
#include "hypspec/parallel.hpp"

namespace hypspec::solver1d {

namespace {

using State = std::array<double, 2>;

struct Rhs {
    const Problem1D* p;
    double lambda;
    void operator()(const State& y, State& dy, double x) const {
        dy[0] = y[1];
        dy[1] = (p->V(x) - lambda) * y[0];
    }
};

// Global error grows with the number of oscillations, so the local
// tolerance shrinks with L sqrt(lambda).
auto stepper(const Problem1D& p, double lambda) {
    using namespace boost::numeric::odeint;
    const double tol = p.tol / (1.0 + p.L * std::sqrt(std::abs(lambda)));
    return make_controlled(tol, tol, runge_kutta_fehlberg78<State>());
}

double initial_step(const Problem1D& p, double lambda) {
    return 0.01 * std::min(p.L, 1.0 / std::sqrt(1.0 + std::abs(lambda)));
}

}  // namespace

void Problem1D::validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("Problem1D: L must be > 0");
    if (!(tol > 0.0)) throw InvalidArgument("Problem1D: tolerance must be > 0");
    if (!V) throw InvalidArgument("Problem1D: potential is not set");
}

Problem1D zero_potential(double L) {
    Problem1D p;
    p.L = L;
    return p;
}

Problem1D parabolic5(double L) {
    Problem1D p;
    p.L = L;
    p.V = [](double x) { return 5.0 * (1.0 - x * x); };
    return p;
}

Problem1D polynomial_potential(std::vector<double> coeffs, double L) {
    Problem1D p;
    p.L = L;
    p.V = [c = std::move(coeffs)](double x) {
        double s = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
        return s;
    };
    return p;
}

ShootResult shoot(const Problem1D& p, double lambda) {
    p.validate();
    State y{0.0, 1.0};
    try {
        boost::numeric::odeint::integrate_adaptive(stepper(p, lambda), Rhs{&p, lambda}, y, -p.L, p.L,
                                                   initial_step(p, lambda));
    } catch (const std::exception& e) {
        std::ostringstream os;
        os.precision(17);
        os << "shoot: integrator failure at lambda = " << lambda << ": " << e.what();
        throw NumericalFailure(os.str());
    }
    if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
        throw NumericalFailure("shoot: non-finite solution");
    }
    return {y[0], y[1]};
}

std::vector<double> shooting_solution(const Problem1D& p, double lambda, const std::vector<double>& xs) {
    p.validate();
    std::vector<double> out;
    out.reserve(xs.size());
    if (xs.empty()) return out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < -p.L || xs[i] > p.L || (i > 0 && xs[i] < xs[i - 1])) {
            throw InvalidArgument("shooting_solution: points must be ascending in [-L, L]");
        }
    }
    std::vector<double> times{-p.L};
    times.insert(times.end(), xs.begin(), xs.end());
    State y{0.0, 1.0};
    std::vector<double> vals;
    boost::numeric::odeint::integrate_times(stepper(p, lambda), Rhs{&p, lambda}, y, times.begin(), times.end(),
                                            initial_step(p, lambda),
                                            [&](const State& s, double) { vals.push_back(s[0]); });
    out.assign(vals.begin() + 1, vals.end());
    return out;
}

std::vector<double> eigenvalues_1d(const Problem1D& p, double lambda_lo, double lambda_hi, double step,
                                   const EigenOptions& opts) {
    p.validate();
    const auto grid = gsvd::uniform_grid(lambda_lo, lambda_hi, step);
    const int threads = opts.threads > 0 ? opts.threads : parallel::default_threads();
    const auto f = parallel::map<ShootResult>(grid.size(), threads, [&](std::size_t i) { return shoot(p, grid[i]); });

    std::vector<std::size_t> brackets;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (f[i].u == 0.0 || (f[i].u > 0.0) != (f[i + 1].u > 0.0)) brackets.push_back(i);
    }
    auto refine = [&](std::size_t i) {
        double a = grid[i], b = grid[i + 1];
        double fa = f[i].u;
        if (fa == 0.0) return a;
        // Secant iterate, kept inside the sign bracket.
        double x0 = a, f0 = fa, x1 = b, f1 = f[i + 1].u;
        for (int it = 0; it < opts.max_iterations; ++it) {
            double x = x1 - f1 * (x1 - x0) / (f1 - f0);
            if (!(x > a && x < b)) x = 0.5 * (a + b);
            const auto r = shoot(p, x);
            const double scale = std::abs(r.du) / std::max(1.0, std::sqrt(std::abs(x)));
            if (std::abs(r.u) <= opts.residual_tol * scale || b - a <= 4e-16 * std::max(1.0, std::abs(x))) {
                return x;
            }
            if ((r.u > 0.0) == (fa > 0.0)) {
                a = x;
                fa = r.u;
            } else {
                b = x;
            }
            x0 = x1;
            f0 = f1;
            x1 = x;
            f1 = r.u;
        }
        std::ostringstream os;
        os.precision(17);
        os << "eigenvalues_1d: secant refinement did not converge in [" << a << ", " << b << "]";
        throw NumericalFailure(os.str());
    };
    return parallel::map<double>(brackets.size(), threads, [&](std::size_t k) { return refine(brackets[k]); });
}

}  // namespace hypspec::solver1d
