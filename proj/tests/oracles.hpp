#pragma once

// Independent reference values used by the test suites. Nothing here calls
// into the library's quadrature or sweep code.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

inline double gk(const Fn& f, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

/// P(x) = (2 ell)^{-1} int_a^b exp(-|x-s|/ell) f(s) ds by adaptive quadrature of the exact source.
inline double direct_P(const Fn& f, double x, double a, double b, double ell) {
    auto left = [&](double s) { return std::exp(-(x - s) / ell) * f(s); };
    auto right = [&](double s) { return std::exp(-(s - x) / ell) * f(s); };
    // split into kernel-width pieces so the adaptive rule sees smooth integrands
    double acc = 0.0;
    const double w = 2.0 * ell;
    for (double lo = std::max(a, x - 40 * ell); lo < x; lo += w) acc += gk(left, lo, std::min(lo + w, x));
    for (double lo = x; lo < std::min(b, x + 40 * ell); lo += w) acc += gk(right, lo, std::min(lo + w, std::min(b, x + 40 * ell)));
    return acc / (2.0 * ell);
}

inline double direct_Px(const Fn& f, double x, double a, double b, double ell) {
    auto left = [&](double s) { return std::exp(-(x - s) / ell) * f(s); };
    auto right = [&](double s) { return std::exp(-(s - x) / ell) * f(s); };
    double L = 0.0, R = 0.0;
    const double w = 2.0 * ell;
    for (double lo = std::max(a, x - 40 * ell); lo < x; lo += w) L += gk(left, lo, std::min(lo + w, x));
    for (double lo = x; lo < std::min(b, x + 40 * ell); lo += w) R += gk(right, lo, std::min(lo + w, std::min(b, x + 40 * ell)));
    return (R - L) / (2.0 * ell * ell);
}

/// u = sin x: P = (1 + cos 2x / (1 + 4 ell^2)) / 4.
inline double sin_P(double x, double ell) { return 0.25 * (1.0 + std::cos(2.0 * x) / (1.0 + 4.0 * ell * ell)); }
inline double sin_Px(double x, double ell) { return -0.5 * std::sin(2.0 * x) / (1.0 + 4.0 * ell * ell); }

/// Piecewise-linear u with slope 1 on [-1, 1]: P(0) = (1 - e^{-1/ell}) / 2.
inline double ramp_P0(double ell) { return 0.5 * (1.0 - std::exp(-1.0 / ell)); }

/// Cuspon u0 = a: H(eta) with w = sqrt(eta / (2a + eta)).
inline double cuspon_H(double eta, double a) {
    const double w = std::sqrt(eta / (2.0 * a + eta));
    return 2.0 * std::atanh(std::sqrt(3.0) * w) - 2.0 * std::sqrt(3.0) * std::atanh(w);
}

/// H(eta) for roots u0 <= u1 by double-exponential quadrature of the raw singular integrand.
inline double wave_H(double eta, double u0, double u1) {
    // the second argument is the signed distance to the nearer endpoint, so u0 - v keeps its digits
    auto f = [=](double v, double vc) {
        const double gap = vc > 0.0 ? (u0 - eta) + vc : u0 - v;
        return std::sqrt(3.0 * v / (gap * (u1 - v) * (u0 + u1 + v)));
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, 0.0, eta, 1e-14);
}

/// Burgers blow-up time for smooth data: -1 / inf u0'.
inline double burgers_blowup(double min_slope) { return -1.0 / min_slope; }

/// Hunter-Saxton slope along a characteristic: p0 / (1 + t p0 / 2).
inline double hs_slope(double p0, double t) { return p0 / (1.0 + 0.5 * t * p0); }

/// Riccati H' = -H^2/2 with H(0) = h0.
inline double riccati_free(double h0, double t) { return h0 / (1.0 + 0.5 * t * h0); }

/// Hunter-Saxton forcing at t = 0: (1/4)(int_{-inf}^x - int_x^inf) u0'^2 over [a, b].
inline double hs_forcing0(const Fn& du, double x, double a, double b) {
    auto sq = [&](double s) { const double d = du(s); return d * d; };
    return 0.25 * (gk(sq, a, x) - gk(sq, x, b));
}

} // namespace oracle
