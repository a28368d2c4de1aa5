#include "hypspec/selberg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "hypspec/errors.hpp"
#include "hypspec/parallel.hpp"

namespace hypspec::selberg {

namespace {

constexpr double kPi = std::numbers::pi;

int threads_of(const Tolerances& tol) { return tol.threads > 0 ? tol.threads : parallel::default_threads(); }

specfun::QuadratureSpec rspec(const Tolerances& tol) {
    specfun::QuadratureSpec q;
    q.abs_tol = tol.quad_abs;
    return q;
}

// log of 2 pi (cosh(x + 3R) - 1) / vol, using cosh z - 1 = 2 sinh^2(z/2).
double log_class_count(double x, double vol, double r) {
    const double w = 0.5 * (x + 3.0 * r);
    const double log_sinh = w + std::log1p(-std::exp(-2.0 * w)) - std::log(2.0);
    return std::log(2.0 * kPi / vol) + std::log(2.0) + 2.0 * log_sinh;
}

// Sum over unit bins [x, x + 1) beyond l_max of (class count up to x + 1)
// times the largest sampled value of the envelope in the bin. log_phi is the
// log of a per-class envelope that dominates every (n, gamma) term with
// n l(gamma) = y.
double length_tail(const std::function<double(double)>& log_phi, double l_max, double vol, double r) {
    double total = 0.0;
    for (int bin = 0; bin < 4000; ++bin) {
        const double x = l_max + bin;
        double lp = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 8; ++i) lp = std::max(lp, log_phi(x + i / 8.0));
        const double c = std::exp(log_class_count(x + 1.0, vol, r) + lp);
        total += c;
        if (bin >= 10 && c <= 1e-18 * total) return total;
        if (bin >= 10 && total == 0.0) return 0.0;
    }
    throw NumericalFailure("length tail did not converge");
}

// Weyl-density estimate of sum_{lambda > top} f(lambda): the smooth part
// (vol / 4 pi) int f plus |f(top)| sqrt(top) for the fluctuation.
double spectral_tail(const std::function<double(double)>& f, double top, double vol, double epsilon) {
    const double width = 80.0 / epsilon;
    const auto smooth = specfun::integrate([&](double l) { return std::abs(f(l)); }, top, top + width,
                                           1e-6 * std::abs(f(top)) * width + 1e-300);
    return vol / (4.0 * kPi) * (smooth.value + smooth.error) + std::abs(f(top)) * std::sqrt(top);
}

struct LengthSum {
    double value = 0.0;
    double quad_error = 0.0;
    double tail = 0.0;
};

// sum over (n, gamma) with n l <= l_max of mult * term(n l, l), plus the tail
// bound beyond l_max.
template <class Term>
LengthSum length_sum(const SpectralInput& in, Term&& term, const std::function<double(double)>& log_phi,
                     const Tolerances& tol) {
    struct Job {
        double l;
        int n;
        int mult;
    };
    std::vector<Job> jobs;
    for (const auto& e : in.lengths.entries) {
        for (int n = 1; n * e.length <= in.lengths.l_max; ++n) jobs.push_back({e.length, n, e.multiplicity});
    }
    const auto vals = parallel::map<specfun::QuadResult>(jobs.size(), threads_of(tol), [&](std::size_t i) {
        auto r = term(jobs[i].n, jobs[i].l);
        r.value *= jobs[i].mult;
        r.error *= jobs[i].mult;
        return r;
    });
    std::vector<double> v(vals.size()), e(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        v[i] = vals[i].value;
        e[i] = vals[i].error;
    }
    LengthSum out;
    out.value = parallel::tree_sum(v);
    out.quad_error = parallel::tree_sum(e);
    out.tail = length_tail(log_phi, in.lengths.l_max, in.vol, in.domain_radius);
    return out;
}

// log of y / (2 sinh(y/2)).
double log_ratio(double y) { return std::log(y) - 0.5 * y - std::log1p(-std::exp(-y)); }

// int_0^eps t^{s-1} e^{-t/4} (4 pi t)^{-1/2} l e^{-y^2/(4t)} / (2 sinh(y/2)) dt with y = n l.
specfun::QuadResult geodesic_t_integral(double s, double eps, int n, double l, double abs_tol) {
    const double y = n * l;
    const double pref = l / (2.0 * std::sinh(0.5 * y)) / std::sqrt(4.0 * kPi);
    auto f = [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp((s - 1.5) * std::log(t) - 0.25 * t - y * y / (4.0 * t));
    };
    auto r = specfun::integrate(f, 0.0, eps, abs_tol / pref);
    r.value *= pref;
    r.error *= pref;
    return r;
}

// Envelope for the t-integral above: the integrand grows on (0, eps] once
// y^2 / (4 eps) >= 3/2 - s, so the integral is at most eps^{s-1/2} e^{-y^2/(4 eps)}.
std::function<double(double)> t_integral_envelope(double s, double eps, double l_max) {
    if (l_max * l_max / (4.0 * eps) < 1.5 - s + 0.25 * eps) {
        std::ostringstream os;
        os << "length spectrum up to " << l_max << " is too short for epsilon = " << eps;
        throw NumericalFailure(os.str());
    }
    return [s, eps](double y) {
        return log_ratio(y) - 0.5 * std::log(4.0 * kPi) + (s - 0.5) * std::log(eps) - y * y / (4.0 * eps);
    };
}

void require_nonzero(const SpectralInput& in) {
    if (in.eigenvalues.size() < 2) throw InvalidArgument("spectral sums need at least one nonzero eigenvalue");
}

bool nonpositive_integer(double s) { return s <= 0.0 && s == std::floor(s); }

}  // namespace

void SpectralInput::validate() const {
    if (!(vol > 0.0) || !std::isfinite(vol)) throw InvalidArgument("SpectralInput: volume must be > 0");
    if (!(domain_radius > 0.0)) throw InvalidArgument("SpectralInput: domain radius must be > 0");
    if (eigenvalues.empty() || eigenvalues[0] != 0.0) {
        throw InvalidArgument("SpectralInput: eigenvalue list must start with 0");
    }
    for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
        if (!(eigenvalues[i] > 0.0) || eigenvalues[i] < eigenvalues[i - 1] || !std::isfinite(eigenvalues[i])) {
            throw InvalidArgument("SpectralInput: eigenvalues must be positive and ascending after lambda_0 = 0");
        }
    }
    lengths.validate();
    if (lengths.entries.empty()) throw InvalidArgument("SpectralInput: empty length spectrum");
}

std::vector<double> expand(const std::vector<EigenvalueRecord>& records) {
    std::vector<double> out;
    for (const auto& r : records) out.insert(out.end(), r.multiplicity, r.lambda);
    return out;
}

double genus_area(int genus) {
    if (genus < 2) throw InvalidArgument("genus_area: hyperbolic surfaces have genus >= 2");
    return 4.0 * kPi * (genus - 1);
}

SpectralInput bolza_input(std::vector<double> eigenvalues, LengthSpectrum lengths) {
    SpectralInput in;
    in.vol = genus_area(2);
    in.eigenvalues = std::move(eigenvalues);
    in.lengths = std::move(lengths);
    in.domain_radius = bolza_group().circumradius;
    in.validate();
    return in;
}

double class_count_bound(double x, double vol, double domain_radius) {
    return std::exp(log_class_count(x, vol, domain_radius));
}

specfun::QuadResult identity_term(double t, double vol, const Tolerances& tol) {
    auto r = specfun::identity_term_integral(t, rspec(tol));
    const double pref = vol * std::exp(-0.25 * t) / (4.0 * kPi * t);
    r.value *= pref;
    r.error *= pref;
    r.tail_bound *= pref;
    return r;
}

HeatTrace heat_trace_geometric(double t, const SpectralInput& in, const Tolerances& tol) {
    if (!(t > 0.0)) throw InvalidArgument("heat_trace_geometric: requires t > 0");
    in.validate();
    HeatTrace h;
    const auto id = identity_term(t, in.vol, tol);
    h.identity = id.value;
    h.quadrature_error = id.error;
    const double pref = std::exp(-0.25 * t) / std::sqrt(4.0 * kPi * t);
    auto term = [&](int n, double l) {
        const double y = n * l;
        return specfun::QuadResult{pref * l * std::exp(-y * y / (4.0 * t)) / (2.0 * std::sinh(0.5 * y)), 0.0, 0.0};
    };
    auto log_phi = [&](double y) { return std::log(pref) + log_ratio(y) - y * y / (4.0 * t); };
    const auto g = length_sum(in, term, log_phi, tol);
    h.geodesic = g.value;
    h.length_tail = g.tail;
    h.value = h.identity + h.geodesic;
    return h;
}

double heat_trace_spectral(double t, const std::vector<double>& eigenvalues, int n) {
    if (n < 0 || static_cast<std::size_t>(n) >= eigenvalues.size()) {
        throw InvalidArgument("heat_trace_spectral: N exceeds the eigenvalue list");
    }
    std::vector<double> v(n + 1);
    for (int j = 0; j <= n; ++j) v[j] = std::exp(-eigenvalues[j] * t);
    return parallel::tree_sum(v);
}

std::vector<HeatCoefficient> heat_coefficients(double vol, int k_max, const Tolerances& tol) {
    if (k_max < 0) throw InvalidArgument("heat_coefficients: k_max must be >= 0");
    std::vector<HeatCoefficient> out(k_max + 1);
    double fact = 1.0;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) fact *= k;
        const auto m = specfun::heat_moment(k, rspec(tol));
        const double c = vol / (4.0 * kPi) / fact;
        out[k].value = (k % 2 ? -c : c) * m.value - (k == 1 ? 1.0 : 0.0);
        out[k].error = c * m.error;
    }
    return out;
}

ZetaEvaluation zeta(double s, const SpectralInput& in, const ZetaOptions& opts) {
    in.validate();
    require_nonzero(in);
    const double eps = opts.epsilon;
    const int nh = opts.n_heat;
    if (!(eps > 0.0)) throw InvalidArgument("zeta: epsilon must be > 0");
    if (nh < 1) throw InvalidArgument("zeta: N_heat must be >= 1");
    if (!(s > -nh)) throw InvalidArgument("zeta: continuation requires s > -N_heat");
    if (s == 1.0) throw InvalidArgument("zeta: s = 1 is a pole");
    const auto& tol = opts.tol;

    ZetaEvaluation z;
    z.s = s;
    z.epsilon = eps;
    z.n_heat = nh;
    z.n_eigen = static_cast<int>(in.eigenvalues.size()) - 1;
    z.l_max = in.lengths.l_max;

    // T1.
    auto t1_term = [&](double l) { return std::exp(-s * std::log(l)) * specfun::upper_gamma(s, eps * l); };
    const auto t1v = parallel::map<double>(in.eigenvalues.size() - 1, threads_of(tol),
                                           [&](std::size_t i) { return t1_term(in.eigenvalues[i + 1]); });
    z.t1 = parallel::tree_sum(t1v);
    const double t1_tail = spectral_tail(t1_term, in.eigenvalues.back(), in.vol, eps);

    // T2.
    const auto a = heat_coefficients(in.vol, nh, tol);
    double t2_err = 0.0;
    int pole_k = -1;
    for (int k = 0; k <= nh; ++k) {
        const double d = s + k - 1.0;
        if (d == 0.0) {
            pole_k = k;
            continue;
        }
        const double w = std::pow(eps, d) / d;
        z.t2 += a[k].value * w;
        t2_err += a[k].error * std::abs(w);
    }

    // T3: the subtracted exponential integrates to the tail of its series.
    double series_err = 0.0;
    auto inner = [&](double r) {
        const double mu = r * r + 0.25;
        const double x = -mu * eps;
        double p = 1.0, sum = 0.0;
        for (int k = 1; k <= nh; ++k) p *= x / k;
        for (int k = nh + 1; k < 2000; ++k) {
            p *= x / k;
            const double term = p / (s + k - 1.0);
            sum += term;
            if (k > -x && std::abs(term) <= tol.series_rel * std::abs(sum)) break;
        }
        return std::pow(eps, s - 1.0) * sum;
    };
    const double rmax = 12.0;
    const auto t3q = specfun::integrate([&](double r) { return specfun::sech2_weight(r) * inner(r); }, 0.0, rmax,
                                        tol.quad_abs);
    // |inner| <= mu^{N+1} eps^{s+N} / ((N+1)! (s+N)); pi sech^2 <= 4 pi e^{-2 pi r}.
    double fact = 1.0;
    for (int k = 2; k <= nh + 1; ++k) fact *= k;
    const double mu_r = rmax * rmax + 0.25;
    const double decay = 2.0 * kPi - 2.0 * (nh + 1) * rmax / mu_r;
    const double t3_tail = decay > 0.0 ? 4.0 * kPi * std::exp(-2.0 * kPi * rmax) * std::pow(mu_r, nh + 1) *
                                             std::pow(eps, s + nh) / (fact * (s + nh)) / decay
                                       : std::numeric_limits<double>::infinity();
    const double c3 = in.vol / (4.0 * kPi);
    z.t3 = c3 * t3q.value;
    series_err = tol.series_rel * (std::abs(z.t2) + std::abs(z.t3));

    // T4.
    const auto t4 = length_sum(
        in, [&](int n, double l) { return geodesic_t_integral(s, eps, n, l, 1e-3 * tol.quad_abs); },
        t_integral_envelope(s, eps, in.lengths.l_max), tol);
    z.t4 = t4.value;

    const double quad = t2_err + c3 * (t3q.error + t3_tail) + t4.quad_error;
    if (pole_k >= 0) {
        // s = -m: 1 / Gamma(s) vanishes except against the pole a_{m+1} eps^{s+m} / (s+m).
        const int m = pole_k - 1;
        double mf = 1.0;
        for (int i = 2; i <= m; ++i) mf *= i;
        const double sign = m % 2 ? -1.0 : 1.0;
        z.value = sign * mf * a[pole_k].value;
        z.budget.quadrature = mf * a[pole_k].error;
        return z;
    }
    const double inv_gamma = nonpositive_integer(s) ? 0.0 : 1.0 / boost::math::tgamma(s);
    z.value = inv_gamma * (z.t1 + z.t2 + z.t3 + z.t4);
    const double g = std::abs(inv_gamma);
    z.budget.spectral_tail = g * t1_tail;
    z.budget.length_tail = g * t4.tail;
    z.budget.quadrature = g * quad;
    z.budget.heat_truncation = g * series_err;
    if (opts.max_error > 0.0 && z.budget.total() > opts.max_error) {
        std::ostringstream os;
        os.precision(6);
        os << "zeta: error budget " << z.budget.total() << " exceeds " << opts.max_error
           << " (eigenvalue list or length spectrum too short)";
        throw NumericalFailure(os.str());
    }
    return z;
}

DeterminantEvaluation log_det(const SpectralInput& in, const ZetaOptions& opts) {
    in.validate();
    require_nonzero(in);
    const double eps = opts.epsilon;
    if (!(eps > 0.0)) throw InvalidArgument("log_det: epsilon must be > 0");
    const auto& tol = opts.tol;
    DeterminantEvaluation d;
    d.epsilon = eps;
    d.n_eigen = static_cast<int>(in.eigenvalues.size()) - 1;
    d.l_max = in.lengths.l_max;

    auto l1_term = [&](double l) { return specfun::exp_integral_e1(eps * l); };
    const auto l1v = parallel::map<double>(in.eigenvalues.size() - 1, threads_of(tol),
                                           [&](std::size_t i) { return l1_term(in.eigenvalues[i + 1]); });
    d.l1 = parallel::tree_sum(l1v);
    d.budget.spectral_tail = spectral_tail(l1_term, in.eigenvalues.back(), in.vol, eps);

    constexpr double g = specfun::kEulerGamma;
    auto integrand = [&](double r) {
        const double mu = r * r + 0.25;
        const double x = eps * mu;
        const double body = (1.0 - specfun::exp_integral_e2(x)) / eps + mu * (g - 1.0 + std::log(x));
        return specfun::sech2_weight(r) / kPi * body;
    };
    const double rmax = 12.0;
    const auto q = specfun::integrate(integrand, 0.0, rmax, tol.quad_abs);
    // sech^2 <= 4 e^{-2 pi r}; the bracket is below 1/eps + 2 mu (1 + |log(eps mu)|) for r >= rmax.
    const double mu_r = rmax * rmax + 0.25;
    const double tail = 4.0 * std::exp(-2.0 * kPi * rmax) / (2.0 * kPi - 1.0) *
                        (1.0 / eps + 2.0 * mu_r * (1.0 + std::abs(std::log(eps * mu_r))));
    d.l2 = -in.vol / (4.0 * kPi * eps) - (in.vol / (12.0 * kPi) + 1.0) * (g + std::log(eps)) +
           in.vol / 4.0 * q.value;

    const auto l3 = length_sum(
        in, [&](int n, double l) { return geodesic_t_integral(0.0, eps, n, l, 1e-3 * tol.quad_abs); },
        t_integral_envelope(0.0, eps, in.lengths.l_max), tol);
    d.l3 = l3.value;
    d.budget.length_tail = l3.tail;
    d.budget.quadrature = in.vol / 4.0 * (q.error + tail) + l3.quad_error;
    d.zeta_prime0 = d.l1 + d.l2 + d.l3;
    d.det = std::exp(-d.zeta_prime0);
    d.det_error = d.det * std::expm1(d.budget.total());
    if (opts.max_error > 0.0 && d.budget.total() > opts.max_error) {
        throw NumericalFailure("log_det: error budget exceeds the requested tolerance");
    }
    return d;
}

RCurve r_n_curve(const SpectralInput& in, int n, const std::vector<double>& t_grid, const Tolerances& tol) {
    in.validate();
    if (n < 0 || static_cast<std::size_t>(n) >= in.eigenvalues.size()) {
        throw InvalidArgument("r_n_curve: N exceeds the eigenvalue list");
    }
    RCurve c;
    c.t = t_grid;
    c.r = parallel::map<double>(t_grid.size(), threads_of(tol), [&](std::size_t i) {
        const double t = t_grid[i];
        if (!(t > 0.0)) throw InvalidArgument("r_n_curve: t must be > 0");
        return heat_trace_spectral(t, in.eigenvalues, n) - identity_term(t, in.vol, tol).value;
    });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.r.size(); ++i) {
        if (std::abs(c.r[i]) < best) {
            best = std::abs(c.r[i]);
            c.crossover = c.t[i];
        }
        if (i > 0 && (c.r[i] > 0.0) != (c.r[i - 1] > 0.0)) ++c.sign_changes;
    }
    return c;
}

double nu_constant() {
    auto f = [](double x) { return std::cos(x) * std::cosh(x) - 1.0; };
    boost::math::tools::eps_tolerance<double> stop(52);
    std::uintmax_t it = 100;
    const auto r = boost::math::tools::toms748_solve(f, 4.0, 5.0, stop, it);
    return 0.5 * (r.first + r.second);
}

Certificate completeness_certificate(const std::vector<double>& mu, const SpectralInput& in, double t, double big_t,
                                     const Tolerances& tol) {
    in.validate();
    const double l0 = in.systole();
    if (!(t > 0.0 && t < big_t && big_t < std::sqrt(l0 * l0 + 1.0) - 1.0)) {
        std::ostringstream os;
        os << "completeness_certificate: need 0 < t < T < sqrt(l0^2 + 1) - 1 = " << std::sqrt(l0 * l0 + 1.0) - 1.0;
        throw InvalidArgument(os.str());
    }
    if (mu.empty() || mu[0] != 0.0) throw InvalidArgument("completeness_certificate: list must start with 0");
    for (std::size_t i = 1; i < mu.size(); ++i) {
        if (mu[i] < mu[i - 1]) throw InvalidArgument("completeness_certificate: list must be ascending");
    }
    Certificate c;
    c.t = t;
    c.big_t = big_t;
    const double nu = nu_constant();
    const double ex = std::exp(0.25 * big_t + l0 * l0 / (4.0 * big_t) - l0 * l0 / (4.0 * t));
    c.f_t = in.vol / (4.0 * kPi) / std::sqrt(t) * ex *
            (1.0 / std::sqrt(big_t) + (2.0 * nu * nu + nu * kPi) / (std::sqrt(kPi) * l0) +
             std::sqrt(big_t) * (4.0 * nu * nu * nu + 2.0 * nu * nu * kPi) / (kPi * l0 * l0));
    const auto tr = heat_trace_geometric(big_t, in, tol);
    c.f_t_trace = std::sqrt(big_t / t) * tr.value * ex;
    c.f_t_trace_error = std::sqrt(big_t / t) * tr.error() * ex;
    c.r_tilde = heat_trace_spectral(t, mu, static_cast<int>(mu.size()) - 1) - identity_term(t, in.vol, tol).value;
    const double arg = c.f_t - c.r_tilde;
    if (arg > 0.0 && arg < 1.0) {
        c.certified = true;
        c.lambda_max = -std::log(arg) / t;
    }
    return c;
}

std::vector<double> riesz_test(const std::vector<double>& mu, double vol, const std::vector<double>& t_grid) {
    std::vector<double> roots;
    roots.reserve(mu.size());
    for (double m : mu) {
        if (!(m >= 0.0)) throw InvalidArgument("riesz_test: eigenvalues must be >= 0");
        roots.push_back(std::sqrt(m));
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t > 0.0)) throw InvalidArgument("riesz_test: t must be > 0");
        double s = 0.0;
        for (double r : roots) {
            if (r > t) break;
            s += t - r;
        }
        out.push_back(s / t - vol / (12.0 * kPi) * (t * t - 1.0));
    }
    return out;
}

WeylFit weyl_check(const std::vector<double>& mu, double vol) {
    if (mu.size() < 50) throw InvalidArgument("weyl_check: needs at least 50 eigenvalues");
    if (!(vol > 0.0)) throw InvalidArgument("weyl_check: volume must be > 0");
    const std::size_t lo = mu.size() / 2;
    const double n = static_cast<double>(mu.size() - lo);
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = lo; i < mu.size(); ++i) {
        sx += mu[i];
        sy += static_cast<double>(i + 1);
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = lo; i < mu.size(); ++i) {
        sxy += (mu[i] - mx) * (static_cast<double>(i + 1) - my);
        sxx += (mu[i] - mx) * (mu[i] - mx);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("weyl_check: eigenvalues in the upper half are all equal");
    WeylFit w;
    w.slope = sxy / sxx;
    w.expected = vol / (4.0 * kPi);
    w.relative_error = std::abs(w.slope - w.expected) / w.expected;
    return w;
}

}  // namespace hypspec::selberg
