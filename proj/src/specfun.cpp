#include "hypspec/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hypspec/errors.hpp"

namespace hypspec::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double c) { return c <= 0.0 && c == std::floor(c); }

// Gamma(s, x) by Lentz's continued fraction; valid for any real s, fast for x >= 1.
double upper_gamma_cf(double s, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return std::exp(-x + s * std::log(x)) * h;
        }
    }
    throw NumericalFailure("upper_gamma: continued fraction did not converge at s=" +
                           std::to_string(s) + ", x=" + std::to_string(x));
}

// Lower gamma gamma(s, x) by its power series; s > 0.
double lower_gamma_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            return sum * std::exp(-x + s * std::log(x));
        }
    }
    throw NumericalFailure("upper_gamma: series did not converge");
}

// Gamma(s, x) for s in (-1/2, 1/2] and x < 3/2 using
//   Gamma(s,x) = [Gamma(s) - x^s/s] - sum_{n>=1} (-1)^n x^{s+n} / (n! (s+n)),
// where the bracket is evaluated in a form that stays accurate as s -> 0.
double upper_gamma_small_s(double s, double x) {
    const double lx = std::log(x);
    double bracket;
    if (s == 0.0) {
        bracket = -kEulerGamma - lx;
    } else {
        bracket = boost::math::tgamma1pm1(s) / s - std::expm1(s * lx) / s;
    }
    double sum = 0.0;
    double pw = 1.0;  // (-1)^n x^n / n!
    for (int n = 1; n < 500; ++n) {
        pw *= -x / n;
        const double term = pw / (s + n);
        sum += term;
        if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return bracket - std::exp(s * lx) * sum;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0)) throw InvalidArgument("QuadratureSpec: abs_tol must be > 0");
    if (!(r_max > 0.0)) throw InvalidArgument("QuadratureSpec: r_max must be > 0");
}

Hyp2F1Result hyp2f1(std::complex<double> a, std::complex<double> b, double c, double z) {
    if (is_nonpositive_integer(c)) {
        throw InvalidArgument("hyp2f1: c is a non-positive integer");
    }
    if (!(z <= 0.0)) throw InvalidArgument("hyp2f1: requires z <= 0");
    if (z == 0.0) return {1.0, 0.0, false};

    // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)).
    const double w = z / (z - 1.0);
    const std::complex<double> bb = c - b;
    const std::complex<double> prefactor = std::exp(-a * std::log1p(-z));

    constexpr int kMaxTerms = 200000;
    std::complex<double> term = 1.0;
    std::complex<double> sum = 1.0;
    double max_term = 1.0;
    int small_run = 0;
    int n = 0;
    for (; n < kMaxTerms; ++n) {
        term *= (a + double(n)) * (bb + double(n)) / ((c + n) * (n + 1.0)) * w;
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        if (std::abs(term) <= kEps * std::abs(sum)) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
    }
    if (n >= kMaxTerms) {
        throw NumericalFailure("hyp2f1: series did not converge (transformed argument " +
                               std::to_string(w) + ")");
    }
    const double scale = std::max(std::abs(sum), std::numeric_limits<double>::min());
    const double err = kEps * (n + 1) * max_term / scale;
    return {prefactor * sum, err, w > 0.95};
}

double upper_gamma(double s, double x) {
    if (!(x > 0.0)) throw InvalidArgument("upper_gamma: requires x > 0");
    double result;
    if (x >= 1.0 && x >= s + 1.0) {
        result = upper_gamma_cf(s, x);
    } else if (s > 0.5) {
        result = std::tgamma(s) - lower_gamma_series(s, x);
    } else if (s > -0.5) {
        result = upper_gamma_small_s(s, x);
    } else {
        // Downward recurrence Gamma(s-1,x) = (Gamma(s,x) - x^{s-1} e^{-x}) / (s-1).
        const int n = static_cast<int>(std::floor(0.5 - s));
        double s0 = s + n;
        result = upper_gamma_small_s(s0, x);
        for (int i = 0; i < n; ++i) {
            const double sm = s0 - 1.0;
            result = (result - std::exp(sm * std::log(x) - x)) / sm;
            s0 = sm;
        }
    }
    if (!std::isfinite(result)) {
        throw NumericalFailure("upper_gamma: overflow at s=" + std::to_string(s) +
                               ", x=" + std::to_string(x));
    }
    return result;
}

double exp_integral_e1(double x) { return upper_gamma(0.0, x); }

double exp_integral_e2(double x) {
    if (!(x > 0.0)) throw InvalidArgument("exp_integral_e2: requires x > 0");
    // E2(x) = x Gamma(-1, x) = e^{-x} - x E1(x).
    if (x < 1.0) return std::exp(-x) - x * exp_integral_e1(x);
    return x * upper_gamma(-1.0, x);
}

double sech2_weight(double r) {
    const double e = std::exp(-2.0 * kPi * std::abs(r));
    const double d = 1.0 + e;
    return kPi * 4.0 * e / (d * d);
}

namespace {

template <class F>
QuadResult weighted_r_integral(F&& f, const QuadratureSpec& q, double r_max, double tail) {
    if (tail >= q.abs_tol) {
        throw NumericalFailure("r-integral: truncation tail " + std::to_string(tail) +
                               " exceeds tolerance");
    }
    const double budget = q.abs_tol - tail;
    QuadResult res;
    if (q.rule == RuleKind::Adaptive) {
        res = integrate(f, 0.0, r_max, budget);
    } else {
        constexpr int kPanels = 128;
        double sum = 0.0, err = 0.0;
        for (int i = 0; i < kPanels; ++i) {
            auto p = detail::gk15_panel(f, r_max * i / kPanels, r_max * (i + 1) / kPanels);
            sum += p.value;
            err += p.error;
        }
        res = {sum, err, 0.0};
        if (err > budget) {
            throw NumericalFailure("r-integral: composite rule error " + std::to_string(err) +
                                   " exceeds tolerance");
        }
    }
    res.tail_bound = tail;
    res.error += tail;
    return res;
}

}  // namespace

QuadResult identity_term_integral(double t, const QuadratureSpec& q) {
    q.validate();
    if (!(t > 0.0)) throw InvalidArgument("identity_term_integral: requires t > 0");
    // sech^2(pi r) <= 4 e^{-2 pi r} and e^{-r^2 t} <= 1, so the tail is <= 2 e^{-2 pi R}.
    const double tail = 2.0 * std::exp(-2.0 * kPi * q.r_max);
    auto f = [t](double r) { return std::exp(-r * r * t) * sech2_weight(r); };
    return weighted_r_integral(f, q, q.r_max, tail);
}

QuadResult heat_moment(int k, const QuadratureSpec& q) {
    q.validate();
    if (k < 0) throw InvalidArgument("heat_moment: requires k >= 0");
    // (r^2 + 1/4)^k <= (r + 1/2)^{2k}; the tail integral is an incomplete gamma value.
    auto tail_at = [k](double r_max) {
        const double u = 2.0 * kPi * (r_max + 0.5);
        const double m = 2.0 * k + 1.0;
        return 4.0 * kPi * std::exp(kPi - m * std::log(2.0 * kPi)) * upper_gamma(m, u);
    };
    double r_max = q.r_max;
    while (tail_at(r_max) > 0.25 * q.abs_tol && r_max < 400.0) r_max += 1.0;
    auto f = [k](double r) { return std::pow(r * r + 0.25, k) * sech2_weight(r); };
    return weighted_r_integral(f, q, r_max, tail_at(r_max));
}

}  // namespace hypspec::specfun
