#pragma once

// Semi-linear Lagrangian system in (t, xi) with v = 2 atan(u_x) and
// q = (1 + u_x^2) y_xi:
//
//   y_t = u,  u_t = -ell^2 P_x,  v_t = -P (1 + cos v) - sin^2(v/2),  q_t = q (1/2 - P) sin v
//
// The conservative variant lets v cross -pi. The dissipative variant stops
// a cell at v = -pi, masks it out of P and keeps it there.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "rburgers/greens.hpp"
#include "rburgers/grid.hpp"

namespace rburgers {

enum class LagrangianVariant { conservative, dissipative };

inline const char* to_string(LagrangianVariant v) {
    return v == LagrangianVariant::conservative ? "conservative" : "dissipative";
}

/// Initial datum with its derivative. Breakpoints mark kinks or integrable
/// singularities of u0' that quadrature should not straddle.
struct InitialDatum {
    std::function<double(double)> u;
    std::function<double(double)> du;
    std::vector<double> breakpoints;
};

struct LagrangianGridSpec {
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t xi_count = 4096;
    /// Padding added to both ends, in units of ell.
    double pad_ells = 10.0;
    /// Caps the padding in absolute length; useful when ell is large and the sources vanish there.
    double pad_max = std::numeric_limits<double>::infinity();
    /// Explicit xi range; must lie inside the image of the cumulative map.
    std::optional<double> xi_min, xi_max;
};

struct LagrangianState {
    double xi0 = 0.0;
    double dxi = 1.0;
    std::vector<double> y, u, v, q;
    double t = 0.0;
    LagrangianVariant variant = LagrangianVariant::conservative;
    double ell = 1.0;
    /// Dissipative bookkeeping: frozen cells and their crossing times (+inf if none).
    std::vector<std::uint8_t> frozen;
    std::vector<double> tau;
    /// Sum of ell^2 q dxi over cells at their crossing.
    double energy_lost = 0.0;

    std::size_t size() const { return y.size(); }
    double xi(std::size_t i) const { return xi0 + dxi * static_cast<double>(i); }
    double weight(std::size_t i) const { return (i == 0 || i + 1 == y.size()) ? 0.5 * dxi : dxi; }
    std::size_t crossed_count() const {
        return static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), std::uint8_t{1}));
    }
};

inline constexpr double kCrossingTol = 1e-9;

namespace detail {

inline double gk_integral(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 10, 1e-13);
}

struct LagFields {
    std::vector<double> y, u, v, q;

    void resize(std::size_t n) {
        y.assign(n, 0.0);
        u.assign(n, 0.0);
        v.assign(n, 0.0);
        q.assign(n, 0.0);
    }
};

inline LagFields fields_of(const LagrangianState& s) { return {s.y, s.u, s.v, s.q}; }

inline bool masked(const LagrangianState& s, std::size_t i, double v) {
    return s.variant == LagrangianVariant::dissipative && (s.frozen[i] || v <= -std::numbers::pi);
}

inline NonlocalTerms lagrangian_nonlocal(const LagrangianState& s, const LagFields& f) {
    const std::size_t n = s.size();
    std::vector<double> arc(n), src(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double qb = masked(s, i, f.v[i]) ? 0.0 : f.q[i];
        const double c = std::cos(0.5 * f.v[i]), sn = std::sin(0.5 * f.v[i]);
        arc[i] = qb * c * c;
        src[i] = qb * sn * sn;
    }
    const auto sw = exponential_sweep(src, &arc, s.dxi, s.ell, false);
    NonlocalTerms out;
    out.P.resize(n);
    out.Px.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.P[i] = (sw.L[i] + sw.R[i]) / (4.0 * s.ell);
        out.Px[i] = (sw.R[i] - sw.L[i]) / (4.0 * s.ell * s.ell);
    }
    return out;
}

/// forced replaces the computed P and P_x; used to isolate the local part of the field.
inline LagFields lagrangian_rhs(const LagrangianState& s, const LagFields& f, double sign = 1.0,
                                const NonlocalTerms* forced = nullptr) {
    const std::size_t n = s.size();
    const auto nl = forced ? *forced : lagrangian_nonlocal(s, f);
    LagFields d;
    d.resize(n);
    const double l2 = s.ell * s.ell;
    for (std::size_t i = 0; i < n; ++i) {
        d.y[i] = sign * f.u[i];
        d.u[i] = -sign * l2 * nl.Px[i];
        if (s.variant == LagrangianVariant::dissipative) {
            if (s.frozen[i]) continue;
            if (f.v[i] <= -std::numbers::pi) {
                // continuation below the barrier; matches the field at v = -pi
                d.v[i] = -1.0;
                continue;
            }
        }
        const double sh = std::sin(0.5 * f.v[i]);
        d.v[i] = sign * (-nl.P[i] * (1.0 + std::cos(f.v[i])) - sh * sh);
        d.q[i] = sign * f.q[i] * (0.5 - nl.P[i]) * std::sin(f.v[i]);
    }
    return d;
}

inline void lin(LagFields& out, const LagFields& a, double c, const LagFields& d) {
    const std::size_t n = a.y.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.y[i] = a.y[i] + c * d.y[i];
        out.u[i] = a.u[i] + c * d.u[i];
        out.v[i] = a.v[i] + c * d.v[i];
        out.q[i] = a.q[i] + c * d.q[i];
    }
}

inline LagFields rk4(const LagrangianState& s, double dt, double sign, LagFields* k1_out = nullptr,
                     const NonlocalTerms* forced = nullptr) {
    const LagFields f0 = fields_of(s);
    LagFields k1 = lagrangian_rhs(s, f0, sign, forced);
    LagFields tmp = f0;
    lin(tmp, f0, 0.5 * dt, k1);
    LagFields k2 = lagrangian_rhs(s, tmp, sign, forced);
    lin(tmp, f0, 0.5 * dt, k2);
    LagFields k3 = lagrangian_rhs(s, tmp, sign, forced);
    lin(tmp, f0, dt, k3);
    LagFields k4 = lagrangian_rhs(s, tmp, sign, forced);
    LagFields out = f0;
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < f0.y.size(); ++i) {
        out.y[i] += w * (k1.y[i] + 2.0 * k2.y[i] + 2.0 * k3.y[i] + k4.y[i]);
        out.u[i] += w * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
        out.v[i] += w * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
        out.q[i] += w * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
    }
    if (k1_out) *k1_out = std::move(k1);
    return out;
}

inline void check_finite(const LagFields& f) {
    for (const auto* vec : {&f.y, &f.u, &f.v, &f.q})
        for (double x : *vec)
            if (!std::isfinite(x)) throw NumericalFailure("non-finite Lagrangian state");
}

} // namespace detail

/// Build the xi grid and the initial fields. y0 inverts xi = int_0^y (1 + u0'^2) dx.
inline LagrangianState init_lagrangian(const InitialDatum& datum, const LagrangianGridSpec& spec, double ell,
                                       LagrangianVariant variant = LagrangianVariant::conservative) {
    if (!datum.u || !datum.du) throw InputError("initial datum needs u and u'");
    if (!(ell > 0.0) || !std::isfinite(ell)) throw InputError("ell must be positive");
    if (!(spec.x_max > spec.x_min)) throw InputError("domain must satisfy x_min < x_max");
    if (spec.xi_count < 8) throw InputError("xi_count must be at least 8");
    const double pad = std::min(spec.pad_ells * ell, spec.pad_max);
    const double a = spec.x_min - pad, b = spec.x_max + pad;

    // cumulative table of int_a^x (1 + u0'^2) on a partition including 0 and the breakpoints
    const std::size_t m = std::max<std::size_t>(4 * spec.xi_count, 2048);
    std::vector<double> xs(m + 1);
    for (std::size_t k = 0; k <= m; ++k) xs[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(m);
    for (double p : datum.breakpoints)
        if (p > a && p < b) xs.push_back(p);
    if (0.0 > a && 0.0 < b) xs.push_back(0.0);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double l, double r) { return std::abs(l - r) < 1e-14; }), xs.end());

    auto density = [&](double x) {
        const double d = datum.du(x);
        return std::isfinite(d) ? 1.0 + d * d : 0.0;
    };
    std::vector<std::uint8_t> is_break(xs.size(), 0);
    for (std::size_t k = 0; k < xs.size(); ++k)
        for (double p : datum.breakpoints)
            if (std::abs(xs[k] - p) < 1e-14) is_break[k] = 1;
    // int_{x0}^{y} density over a single partition cell [xs[j], xs[j+1]], y in the cell.
    // Next to a breakpoint x = p + L sigma^3 absorbs |x - p|^{-2/3} behaviour.
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    auto cell_integral = [&](std::size_t j, double y) {
        const double x0 = xs[j], x1 = xs[j + 1], L = x1 - x0;
        if (y <= x0) return 0.0;
        y = std::min(y, x1);
        const bool lb = is_break[j], rb = is_break[j + 1];
        auto from_left = [&](double yy) {
            const double smax = std::cbrt((yy - x0) / L);
            return Gauss::integrate([&](double sg) { return density(x0 + L * sg * sg * sg) * 3.0 * L * sg * sg; }, 0.0, smax);
        };
        auto from_right = [&](double yy) {
            const double smax = std::cbrt((x1 - yy) / L);
            return Gauss::integrate([&](double sg) { return density(x1 - L * sg * sg * sg) * 3.0 * L * sg * sg; }, 0.0, smax);
        };
        if (lb && rb) {
            const double mid = 0.5 * (x0 + x1);
            if (y <= mid) return from_left(y);
            const double half = from_left(mid);
            const double smid = std::cbrt((x1 - mid) / L);
            const double sy = std::cbrt((x1 - y) / L);
            return half + Gauss::integrate([&](double sg) { return density(x1 - L * sg * sg * sg) * 3.0 * L * sg * sg; }, sy, smid);
        }
        if (lb) return from_left(y);
        if (rb) return from_right(x0) - from_right(y);
        return Gauss::integrate(density, x0, y);
    };
    std::vector<double> cum(xs.size(), 0.0);
    for (std::size_t k = 1; k < xs.size(); ++k) cum[k] = cum[k - 1] + cell_integral(k - 1, xs[k]);
    double cum0 = 0.0;
    if (0.0 <= a) cum0 = -detail::gk_integral(density, 0.0, a);
    else if (0.0 >= b) cum0 = cum.back() + detail::gk_integral(density, b, 0.0);
    else cum0 = cum[static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), 0.0 - 1e-14) - xs.begin())];
    const double Xa = -cum0, Xb = cum.back() - cum0;

    double lo = spec.xi_min.value_or(Xa), hi = spec.xi_max.value_or(Xb);
    if (lo < Xa - 1e-12 * std::abs(Xa) || hi > Xb + 1e-12 * std::abs(Xb) || !(hi > lo))
        throw ConfigError("xi range exceeds the image of the cumulative map");
    lo = std::max(lo, Xa);
    hi = std::min(hi, Xb);

    const std::size_t n = spec.xi_count;
    LagrangianState s;
    s.ell = ell;
    s.variant = variant;
    s.xi0 = lo;
    s.dxi = (hi - lo) / static_cast<double>(n - 1);
    s.y.resize(n);
    s.u.resize(n);
    s.v.resize(n);
    s.q.assign(n, 1.0);
    s.frozen.assign(n, 0);
    s.tau.assign(n, std::numeric_limits<double>::infinity());

    for (std::size_t i = 0; i < n; ++i) {
        const double target = s.xi(i) + cum0;  // in table units
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        std::size_t j = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
        j = std::min(j, xs.size() - 2);
        double y;
        if (target <= cum.front()) {
            y = xs.front();
        } else if (target >= cum.back()) {
            y = xs.back();
        } else {
            const double x0 = xs[j], x1 = xs[j + 1];
            const double f0 = cum[j] - target, f1 = cum[j + 1] - target;
            if (f0 >= 0.0) {
                y = x0;
            } else if (f1 <= 0.0) {
                y = x1;
            } else {
                // safeguarded Newton on F(y) = cum_j + int_{x0}^{y} - target
                double lo_b = x0, hi_b = x1;
                y = x0 + (x1 - x0) * (-f0) / (f1 - f0);
                for (int it = 0; it < 60; ++it) {
                    const double F = cum[j] + cell_integral(j, y) - target;
                    if (F > 0.0) hi_b = y; else lo_b = y;
                    const double dF = density(y);
                    double step = dF > 0.0 ? F / dF : 0.0;
                    double yn = y - step;
                    if (!(yn > lo_b && yn < hi_b) || dF <= 0.0) yn = 0.5 * (lo_b + hi_b);
                    if (std::abs(yn - y) <= 4e-16 * std::max(1.0, std::abs(y)) || hi_b - lo_b < 1e-15 * std::max(1.0, std::abs(y))) {
                        y = yn;
                        break;
                    }
                    y = yn;
                }
            }
        }
        s.y[i] = y;
        s.u[i] = datum.u(y);
        s.v[i] = 2.0 * std::atan(datum.du(y));
    }
    return s;
}

/// P and P_x on the xi grid (masked in the dissipative variant).
inline NonlocalTerms lagrangian_P(const LagrangianState& s) { return detail::lagrangian_nonlocal(s, detail::fields_of(s)); }

inline LagrangianState step_conservative(const LagrangianState& s, double dt) {
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    if (s.variant != LagrangianVariant::conservative) throw InputError("state is not conservative");
    auto f = detail::rk4(s, dt, 1.0);
    detail::check_finite(f);
    LagrangianState out = s;
    out.y = std::move(f.y);
    out.u = std::move(f.u);
    out.v = std::move(f.v);
    out.q = std::move(f.q);
    out.t = s.t + dt;
    return out;
}

inline LagrangianState step_dissipative(const LagrangianState& s, double dt) {
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    if (s.variant != LagrangianVariant::dissipative) throw InputError("state is not dissipative");
    detail::LagFields k1;
    auto f = detail::rk4(s, dt, 1.0, &k1);
    detail::check_finite(f);
    LagrangianState out = s;
    out.y = std::move(f.y);
    out.u = std::move(f.u);
    out.q = std::move(f.q);
    out.t = s.t + dt;
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.frozen[i]) {
            out.v[i] = -pi;
            continue;
        }
        const double v1 = f.v[i];
        if (v1 > -pi + kCrossingTol) {
            out.v[i] = v1;
            continue;
        }
        // cubic Hermite in the step fraction; end slope is the field at the barrier
        const double v0 = s.v[i], m0 = dt * k1.v[i], m1 = -dt;
        auto p = [&](double th) {
            const double t2 = th * th, t3 = t2 * th;
            return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + th) * m0 + (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * m1 + pi;
        };
        double lo = 0.0, hi = 1.0;
        if (p(1.0) < 0.0 && p(0.0) > 0.0) {
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (p(mid) > 0.0 ? lo : hi) = mid;
            }
        } else {
            lo = hi = p(0.0) <= 0.0 ? 0.0 : 1.0;
        }
        out.v[i] = -pi;
        out.frozen[i] = 1;
        out.tau[i] = s.t + 0.5 * (lo + hi) * dt;
        out.energy_lost += s.ell * s.ell * out.q[i] * s.weight(i);
    }
    // a run of frozen cells is one plateau in (y, u); they carry no weight in P
    // or the energy, so sharing values only removes discretisation drift
    for (std::size_t i = 1; i < s.size(); ++i)
        if (out.frozen[i] && out.frozen[i - 1]) {
            out.y[i] = out.y[i - 1];
            out.u[i] = out.u[i - 1];
        }
    // near the barrier y_xi = q cos^2(v/2) vanishes and pointwise errors can invert
    // neighbours; y does not feed back into the field, so project onto monotone
    for (std::size_t i = 1; i < s.size(); ++i) out.y[i] = std::max(out.y[i], out.y[i - 1]);
    return out;
}

/// Sign-flipped field; composing with step_conservative over the same steps returns the start.
inline LagrangianState evolve_backward(const LagrangianState& s, double dt) {
    if (!(dt > 0.0)) throw InputError("dt must be positive");
    if (s.variant != LagrangianVariant::conservative) throw InputError("state is not conservative");
    auto f = detail::rk4(s, dt, -1.0);
    detail::check_finite(f);
    LagrangianState out = s;
    out.y = std::move(f.y);
    out.u = std::move(f.u);
    out.v = std::move(f.v);
    out.q = std::move(f.q);
    out.t = s.t - dt;
    return out;
}

inline LagrangianState lagrangian_step(const LagrangianState& s, double dt) {
    return s.variant == LagrangianVariant::conservative ? step_conservative(s, dt) : step_dissipative(s, dt);
}

/// sum over live cells of [(u - phi(y))^2 cos^2(v/2) + ell^2 sin^2(v/2)] q dxi, trapezoid in xi.
inline double lagrangian_energy(const LagrangianState& s, const std::function<double(double)>& phi = {}) {
    double e = 0.0;
    const double l2 = s.ell * s.ell;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.variant == LagrangianVariant::dissipative && s.frozen[i]) continue;
        const double w = s.u[i] - (phi ? phi(s.y[i]) : 0.0);
        const double c = std::cos(0.5 * s.v[i]), sn = std::sin(0.5 * s.v[i]);
        e += (w * w * c * c + l2 * sn * sn) * s.q[i] * s.weight(i);
    }
    return e;
}

/// Energy counting frozen cells at their ell^2 q weight; constant for both variants up to quadrature error.
inline double lagrangian_energy_total(const LagrangianState& s) {
    if (s.variant == LagrangianVariant::conservative) return lagrangian_energy(s);
    return lagrangian_energy(s) + s.energy_lost;
}

struct LagrangianRun {
    double dt = 1e-3;
    std::vector<double> output_times;
};

struct LagrangianTrajectory {
    std::vector<double> times;
    std::vector<LagrangianState> states;
};

/// Fixed-step integration to t_end, shortening steps to land on output times.
inline LagrangianTrajectory evolve_lagrangian(const LagrangianState& s0, double t_end, const LagrangianRun& run) {
    if (!(run.dt > 0.0)) throw InputError("dt must be positive");
    if (!(t_end >= s0.t)) throw InputError("t_end precedes the state time");
    std::vector<double> outs;
    for (double t : run.output_times)
        if (t > s0.t && t < t_end) outs.push_back(t);
    std::sort(outs.begin(), outs.end());
    outs.push_back(t_end);
    LagrangianTrajectory tr;
    tr.times.push_back(s0.t);
    tr.states.push_back(s0);
    LagrangianState s = s0;
    for (double target : outs) {
        while (s.t < target - 1e-13 * std::max(1.0, target)) {
            double dt = std::min(run.dt, target - s.t);
            if (target - (s.t + dt) < 1e-9 * run.dt) dt = target - s.t;
            s = lagrangian_step(s, dt);
        }
        s.t = target;
        tr.times.push_back(target);
        tr.states.push_back(s);
    }
    if (t_end == s0.t) tr.times.pop_back(), tr.states.pop_back();
    return tr;
}

struct EulerianSamples {
    std::vector<double> x, u, ux, P;
    std::vector<std::uint8_t> singular;
};

/// Values at arbitrary abscissae, by inverting the nondecreasing map xi -> y.
inline EulerianSamples reconstruct_at(const LagrangianState& s, const std::vector<double>& xs) {
    const std::size_t n = s.size();
    const double pi = std::numbers::pi;
    std::vector<double> ym(n);
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && s.y[i] < s.y[i - 1] - 1e-10 * s.dxi)
            throw NumericalFailure("y lost monotonicity in xi");
        run = std::max(run, s.y[i]);
        ym[i] = run;
    }
    const auto nl = lagrangian_P(s);
    EulerianSamples out;
    out.x = xs;
    out.u.resize(xs.size());
    out.ux.resize(xs.size());
    out.P.resize(xs.size());
    out.singular.assign(xs.size(), 0);
    auto slope = [&](std::size_t i) { return std::tan(0.5 * s.v[i]); };
    auto is_singular = [&](std::size_t i) { return std::abs(s.v[i] + pi) < kCrossingTol || std::abs(s.v[i]) > pi - kCrossingTol; };
    const double tol = 1e-12 * std::max(1.0, std::abs(ym.back() - ym.front()));
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        if (x < ym.front() - tol || x > ym.back() + tol) throw DomainError("reconstruction point outside y range (no extrapolation)");
        // last node with ym <= x, clamped so that [i, i+1] is a cell
        std::size_t i = static_cast<std::size_t>(std::upper_bound(ym.begin(), ym.end(), x) - ym.begin());
        i = i == 0 ? 0 : i - 1;
        i = std::min(i, n - 2);
        const double w = ym[i + 1] - ym[i];
        if (w <= 1e-14 * std::max(1.0, std::abs(x)) ) {
            out.u[k] = s.u[i];
            out.ux[k] = 0.5 * (slope(i) + slope(i + 1));
            out.P[k] = nl.P[i];
            out.singular[k] = 1;
            continue;
        }
        const double th = std::clamp((x - ym[i]) / w, 0.0, 1.0);
        const bool sing = is_singular(i) || is_singular(i + 1);
        const double c0 = std::cos(0.5 * s.v[i]), c1 = std::cos(0.5 * s.v[i + 1]);
        if (!sing && c0 * c0 > 0.1 && c1 * c1 > 0.1) {
            // cubic Hermite with the exact nodal slopes
            const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
            const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
            out.u[k] = h00 * s.u[i] + h10 * w * slope(i) + h01 * s.u[i + 1] + h11 * w * slope(i + 1);
        } else {
            out.u[k] = (1 - th) * s.u[i] + th * s.u[i + 1];
        }
        if (sing) {
            // the quotient can turn positive where a frozen run and its live neighbour
            // differ in u at rounding level; a live end's exact slope bounds it then
            double d = (s.u[i + 1] - s.u[i]) / w;
            if (!is_singular(i)) d = std::min(d, slope(i));
            if (!is_singular(i + 1)) d = std::min(d, slope(i + 1));
            out.ux[k] = d;
            out.singular[k] = 1;
        } else {
            out.ux[k] = (1 - th) * slope(i) + th * slope(i + 1);
        }
        out.P[k] = (1 - th) * nl.P[i] + th * nl.P[i + 1];
    }
    return out;
}

struct Reconstruction {
    GridFunction1D u;
    GridFunction1D ux;
    GridFunction1D P;
    std::vector<std::uint8_t> singular;
};

inline Reconstruction reconstruct_eulerian(const LagrangianState& s, const UniformGrid& g) {
    auto r = reconstruct_at(s, g.nodes());
    return {GridFunction1D(g, std::move(r.u)), GridFunction1D(g, std::move(r.ux)), GridFunction1D(g, std::move(r.P)),
            std::move(r.singular)};
}

} // namespace rburgers
