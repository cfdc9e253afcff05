#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "msstab/msstab.hpp"

namespace msstab::testing {

inline constexpr double pi = std::numbers::pi;

/// Example 7.3: u = x + 1 above the flat curve, u = -x below, on [0,b) x (-a,a).
inline StripDomain example_strip(double a = 1.0, double b = 1.0) {
    return StripDomain{a, b, BoundaryTrace{1.0, 1.0, {}}, BoundaryTrace{-1.0, 0.0, {}}};
}

inline std::vector<double> sample(std::size_t n, double period, const std::function<double(double)>& f) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(static_cast<double>(i) * period / static_cast<double>(n));
    return out;
}

/// Adaptive Simpson quadrature, independent of the library's trapezoid rules.
inline double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol,
                               int depth = 40) {
    const std::function<double(double, double, double, double, double, double, double, int)> step =
        [&](double a, double b, double fa, double fm, double fb, double whole, double eps, int d) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
                return left + right + (left + right - whole) / 15.0;
            }
            return step(a, m, fa, flm, fm, left, eps / 2.0, d - 1) + step(m, b, fm, frm, fb, right, eps / 2.0, d - 1);
        };
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    return step(lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

}  // namespace msstab::testing
