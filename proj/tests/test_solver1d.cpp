#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hypspec/errors.hpp"
#include "hypspec/solver1d.hpp"

using namespace hypspec;
using namespace hypspec::solver1d;

namespace {

constexpr double kPi = std::numbers::pi;

// Second-order finite differences on 400..3200 intervals, three Richardson
// levels (roundoff-limited near 1e-10).
constexpr double kParabolicFD[3] = {6.782757268677071, 13.42802807750816, 25.65992110687486};

}  // namespace

TEST_CASE("shooting against closed forms") {
    const auto p = zero_potential();
    const auto r1 = shoot(p, 1.0);
    CHECK(std::abs(r1.u - std::sin(2.0)) < 1e-11);
    CHECK(std::abs(r1.du - std::cos(2.0)) < 1e-11);
    const auto r2 = shoot(p, kPi * kPi / 4.0);
    CHECK(std::abs(r2.u) < 1e-11);
    for (double k : {50.0, 100.0}) {
        const auto r3 = shoot(p, k * k);
        CHECK(std::abs(r3.u - std::sin(2.0 * k) / k) < 1e-11 * (1.0 / k));
    }
}

TEST_CASE("shooting against a Taylor-series oracle") {
    // mpmath odefun at 25 digits.
    const auto p = parabolic5();
    const auto r = shoot(p, 4.0);
    CHECK(std::abs(r.u - 1.952945601422867356) < 1e-10);
    CHECK(std::abs(r.du - (-0.4296100767585238776)) < 1e-10);
    const auto r10 = shoot(p, 10.0);
    CHECK(std::abs(r10.u - (-0.2891161073019292473)) < 1e-10);
}

TEST_CASE("free particle spectrum") {
    const auto ev = eigenvalues_1d(zero_potential(), 0.5, 260.0, 0.5);
    REQUIRE(ev.size() == 10);
    for (int n = 1; n <= 10; ++n) CHECK(std::abs(ev[n - 1] - n * n * kPi * kPi / 4.0) < 1e-9);
    CHECK(std::abs(ev[0] - 2.4674011003) < 1e-9);
    CHECK(std::abs(ev[1] - 9.8696044011) < 1e-9);
    CHECK(std::abs(ev[2] - 22.2066099025) < 1e-9);
}

TEST_CASE("parabolic potential against the finite-difference oracle") {
    const auto p = parabolic5();
    const auto ev = eigenvalues_1d(p, 0.0, 30.0, 0.25);
    REQUIRE(ev.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(ev[i] - kParabolicFD[i]) < 1e-7);

    // Count below 100 equals the oracle count (6).
    const auto all = eigenvalues_1d(p, 0.0, 100.0, 0.25);
    CHECK(all.size() == 6);

    // Sign change across every refined root.
    for (double l : all) {
        const double h = 1e-6 * (1.0 + l);
        CHECK(shoot(p, l - h).u * shoot(p, l + h).u < 0.0);
    }

    // Orthogonality of normalized eigenfunctions (composite Simpson).
    const int n = 4000;
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i) xs[i] = -1.0 + 2.0 * i / n;
    auto simpson = [&](const std::vector<double>& f) {
        double s = f[0] + f[n];
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
        return s * (2.0 / n) / 3.0;
    };
    std::vector<std::vector<double>> u;
    for (double l : all) {
        auto v = shooting_solution(p, l, xs);
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
        const double nrm = std::sqrt(simpson(sq));
        for (double& x : v) x /= nrm;
        u.push_back(v);
    }
    for (std::size_t a = 0; a < u.size(); ++a) {
        for (std::size_t b = a + 1; b < u.size(); ++b) {
            std::vector<double> pr(n + 1);
            for (int i = 0; i <= n; ++i) pr[i] = u[a][i] * u[b][i];
            CHECK(std::abs(simpson(pr)) <= 1e-7);
        }
    }
}

TEST_CASE("constant shift of the potential") {
    const auto base = eigenvalues_1d(parabolic5(), 0.0, 30.0, 0.25);
    const auto shifted = eigenvalues_1d(polynomial_potential({7.0, 0.0, -5.0}), 0.0, 35.0, 0.25);
    REQUIRE(shifted.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(shifted[i] - base[i] - 2.0) < 1e-9);
}

TEST_CASE("validation") {
    Problem1D p;
    p.L = 0.0;
    CHECK_THROWS_AS(shoot(p, 1.0), InvalidArgument);
    CHECK_THROWS_AS(eigenvalues_1d(zero_potential(), 5.0, 1.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(shooting_solution(zero_potential(), 1.0, {0.5, 0.1}), InvalidArgument);
}
