#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "hypspec/errors.hpp"

namespace hypspec::specfun {

namespace detail {

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// One G7/K15 panel; the error is |K15 - G7| on that panel.
template <class F>
Panel gk15_panel(F& f, double a, double b) {
    const auto& xk = boost::math::quadrature::gauss_kronrod<double, 15>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, 15>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double kron = wk[0] * f0;
    double gauss = wg[0] * f0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double fs = f(c - h * xk[i]) + f(c + h * xk[i]);
        kron += wk[i] * fs;
        if (i % 2 == 0) gauss += wg[i / 2] * fs;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol) {
    constexpr int kMaxPanels = 4000;
    std::priority_queue<detail::Panel> heap;
    // Start from a few panels so that narrow features are seen at all.
    constexpr int kInitial = 8;
    double total = 0.0, err = 0.0;
    for (int i = 0; i < kInitial; ++i) {
        const double lo = a + (b - a) * i / kInitial;
        const double hi = (i + 1 == kInitial) ? b : a + (b - a) * (i + 1) / kInitial;
        auto p = detail::gk15_panel(f, lo, hi);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int panels = kInitial;
    while (err > abs_tol) {
        if (panels >= kMaxPanels) {
            throw NumericalFailure("integrate: tolerance " + std::to_string(abs_tol) +
                                   " not met, error estimate " + std::to_string(err));
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15_panel(f, worst.a, mid);
        auto right = detail::gk15_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Re-sum from the panels to shed accumulated rounding of the running sums.
    double sum = 0.0, esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    return {sum, esum, 0.0};
}

}  // namespace hypspec::specfun
