#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "hypspec/cylinder_modes.hpp"
#include "hypspec/errors.hpp"

using namespace hypspec;

namespace {

const double kBolzaSystole = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
constexpr double kLambda1 = 3.8388872588421995;

// Residual of the radial ODE applied to the interpolant, with a fourth-order
// central difference for the flux derivative.
double ode_residual(const RadialSolution& s, double rho) {
    const double h = 2e-4;
    auto flux = [&](double r) { return std::cosh(r) * s.derivative(r); };
    const double dflux = (8.0 * (flux(rho + h) - flux(rho - h)) - (flux(rho + 2 * h) - flux(rho - 2 * h))) /
                         (12.0 * h);
    const double kk = 4.0 * std::numbers::pi * std::numbers::pi * s.k() * s.k() /
                      (s.core_length() * s.core_length());
    const double c = std::cosh(rho);
    return -dflux / c + kk / (c * c) * s.value(rho) - s.lambda() * s.value(rho);
}

}  // namespace

TEST_CASE("k = 0, lambda = 0: constant and Gudermannian") {
    auto even = solve_radial(1.0, 0, Parity::Even, 0.0, 2.0);
    auto odd = solve_radial(1.0, 0, Parity::Odd, 0.0, 2.0);
    for (double r : {-1.9, -0.3, 0.0, 0.7, 2.0}) {
        CHECK(std::abs(even.value(r) - 1.0) < 1e-13);
        CHECK(std::abs(even.derivative(r)) < 1e-13);
        CHECK(std::abs(odd.value(r) - std::atan(std::sinh(r))) < 1e-13);
        CHECK(std::abs(odd.derivative(r) - 1.0 / std::cosh(r)) < 1e-13);
    }
    CHECK(std::abs(odd.value(1.0) - 0.8657694832396586) < 1e-13);
}

TEST_CASE("initial data and parity") {
    for (int k : {0, 1, 3, 12}) {
        for (double lam : {0.5, 3.8, 40.0, 200.0}) {
            auto e = solve_radial(kBolzaSystole, k, Parity::Even, lam, 2.1);
            auto o = solve_radial(kBolzaSystole, k, Parity::Odd, lam, 2.1);
            CHECK(std::abs(e.value(0.0) - 1.0) < 1e-12);
            CHECK(std::abs(e.derivative(0.0)) < 1e-12);
            CHECK(std::abs(o.value(0.0)) < 1e-12);
            CHECK(std::abs(o.derivative(0.0) - 1.0) < 1e-12);
            for (double r : {0.2, 1.1, 2.05}) {
                CHECK(e.value(-r) == doctest::Approx(e.value(r)).epsilon(1e-12));
                CHECK(o.value(-r) == doctest::Approx(-o.value(r)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("Wronskian is constant") {
    for (int k : {0, 2, 7, 20}) {
        for (double lam : {1.0, 20.0, 150.0, 400.0}) {
            auto e = solve_radial(kBolzaSystole, k, Parity::Even, lam, 2.5);
            auto o = solve_radial(kBolzaSystole, k, Parity::Odd, lam, 2.5);
            for (int i = 0; i <= 50; ++i) {
                const double r = 2.5 * i / 50.0;
                const double w =
                    std::cosh(r) * (e.value(r) * o.derivative(r) - e.derivative(r) * o.value(r));
                // Relative to the size of the products involved.
                const double scale = std::cosh(r) * (std::abs(e.value(r) * o.derivative(r)) +
                                                     std::abs(e.derivative(r) * o.value(r)));
                CHECK_MESSAGE(std::abs(w - 1.0) <= 1e-9 * std::max(1.0, scale),
                              "k=" << k << " lambda=" << lam << " rho=" << r);
            }
        }
    }
}

TEST_CASE("ODE residual at random points") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> ur(-2.0, 2.0);
    for (int k : {0, 1, 5}) {
        for (double lam : {2.0, 50.0}) {
            for (auto p : {Parity::Even, Parity::Odd}) {
                auto s = solve_radial(kBolzaSystole, k, p, lam, 2.2);
                for (int i = 0; i < 100; ++i) {
                    const double r = ur(gen);
                    double mag = std::abs(s.value(r)) + std::abs(s.derivative(r));
                    CHECK(std::abs(ode_residual(s, r)) <= 1e-9 * (1.0 + lam) * std::max(1.0, mag));
                }
            }
        }
    }
}

TEST_CASE("hypergeometric closed forms agree") {
    const double ell = kBolzaSystole;
    {
        auto s = solve_radial(ell, 1, Parity::Even, kLambda1, 1.0);
        const auto cf = closed_form_mode(ell, 1, Parity::Even, kLambda1, 0.5);
        CHECK(std::abs(cf.imag()) < 1e-12);
        CHECK(std::abs(s.value(0.5) - cf.real()) < 1e-9);
    }
    for (int k : {0, 1, 2}) {
        for (double lam : {1.0, 5.0, 20.0}) {
            auto e = solve_radial(ell, k, Parity::Even, lam, 1.6);
            auto o = solve_radial(ell, k, Parity::Odd, lam, 1.6);
            for (int i = 0; i <= 15; ++i) {
                const double r = 0.1 * i;
                CHECK(std::abs(e.value(r) - closed_form_mode(ell, k, Parity::Even, lam, r).real()) <
                      1e-8);
                CHECK(std::abs(o.value(r) - closed_form_mode(ell, k, Parity::Odd, lam, r).real()) <
                      1e-8);
            }
        }
    }
}

TEST_CASE("self-refinement at rho = 0.3") {
    RadialOptions tight;
    tight.rel_tol = 1e-15;
    tight.abs_tol = 1e-16;
    for (int k : {1, 4}) {
        auto a = solve_radial(kBolzaSystole, k, Parity::Odd, 12.5, 1.9);
        auto b = solve_radial(kBolzaSystole, k, Parity::Odd, 12.5, 1.9, tight);
        for (auto ang : {Angular::Cos, Angular::Sin}) {
            auto ga = mode_value_and_gradient(a, ang, 0.3, 0.77);
            auto gb = mode_value_and_gradient(b, ang, 0.3, 0.77);
            CHECK(std::abs(ga.value - gb.value) < 1e-10);
            CHECK(std::abs(ga.d_rho - gb.d_rho) < 1e-10);
        }
    }
}

TEST_CASE("mode_value_and_gradient") {
    const double ell = 3.0;
    auto s0 = solve_radial(ell, 0, Parity::Even, 7.0, 2.0);
    for (double r : {0.0, 0.5, 1.5}) {
        for (double t : {0.0, 1.0, 2.9}) CHECK(mode_value_and_gradient(s0, Angular::Cos, r, t).d_t == 0.0);
    }
    CHECK_THROWS_AS(mode_value_and_gradient(s0, Angular::Sin, 0.1, 0.0), InvalidArgument);

    const int k = 2;
    auto s = solve_radial(ell, k, Parity::Even, 7.0, 2.0);
    const double t = ell / (4.0 * k);
    auto g = mode_value_and_gradient(s, Angular::Cos, 0.8, t);
    CHECK(std::abs(g.value) < 1e-14);
    const double omega = 2.0 * std::numbers::pi * k / ell;
    CHECK(std::abs(std::abs(g.d_t) - omega * std::abs(s.value(0.8))) < 1e-13);
    CHECK_THROWS_AS(s.value(2.5), InvalidArgument);
}

TEST_CASE("directional normal derivative") {
    const double ell = kBolzaSystole;
    auto s = solve_radial(ell, 3, Parity::Odd, 9.0, 2.0);
    const double rho = 0.7, t = 0.4;
    const double ch = std::cosh(rho);

    // k = 0 even mode, normal along rho at rho = 0 gives Phi'(0) = 0.
    auto s0 = solve_radial(ell, 0, Parity::Even, 9.0, 2.0);
    CHECK(std::abs(directional_normal_derivative(s0, Angular::Cos, 0.0, 0.3, 1.0, 0.0)) < 1e-13);

    // Tangent to the level set.
    auto g = mode_value_and_gradient(s, Angular::Sin, rho, t);
    double vr = g.d_t, vt = -g.d_rho;
    const double nv = std::sqrt(vr * vr + ch * ch * vt * vt);
    CHECK(std::abs(directional_normal_derivative(s, Angular::Sin, rho, t, vr / nv, vt / nv)) < 1e-12);

    // Generic direction vs central difference along the geodesic with that initial velocity.
    const double ang = 0.9;
    const double nr = std::cos(ang), nt = std::sin(ang) / ch;
    const double h = 1e-3;
    // rho'' = sinh cosh t'^2, t'' = -2 tanh rho' t'
    using St = std::array<double, 4>;
    auto geo = [](const St& y, St& dy, double) {
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = std::sinh(y[0]) * std::cosh(y[0]) * y[3] * y[3];
        dy[3] = -2.0 * std::tanh(y[0]) * y[2] * y[3];
    };
    auto step = [&](double arclen) {
        namespace ode = boost::numeric::odeint;
        St y{rho, t, arclen > 0 ? nr : -nr, arclen > 0 ? nt : -nt};
        ode::integrate_adaptive(ode::make_controlled(1e-15, 1e-15, ode::runge_kutta_fehlberg78<St>()),
                                geo, y, 0.0, std::abs(arclen), 1e-4);
        return mode_value_and_gradient(s, Angular::Cos, y[0], y[1]).value;
    };
    const double fd = (8.0 * (step(h) - step(-h)) - (step(2 * h) - step(-2 * h))) / (12.0 * h);
    CHECK(std::abs(directional_normal_derivative(s, Angular::Cos, rho, t, nr, nt) - fd) < 1e-7);

    CHECK_THROWS_AS(directional_normal_derivative(s, Angular::Cos, rho, t, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(solve_radial(0.0, 1, Parity::Even, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(solve_radial(1.0, 1, Parity::Even, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS((ModeIndex{0, Parity::Even, Angular::Sin}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ModeIndex{-1, Parity::Even, Angular::Cos}.validate()), InvalidArgument);
}
