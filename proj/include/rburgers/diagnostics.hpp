#pragma once

// Energies, total variation, Oleinik margins and weak-form residuals of
// sampled trajectories, with the conservative / dissipative classification.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"
#include "rburgers/derivative.hpp"
#include "rburgers/errors.hpp"
#include "rburgers/eulerian.hpp"
#include "rburgers/grid.hpp"
#include "rburgers/lagrangian.hpp"
#include "rburgers/waves.hpp"

namespace rburgers {

/// int (u^2 + ell^2 u_x^2) dx by the trapezoid rule (rectangle rule on periodic grids).
inline double energy_eulerian(const UniformGrid& g, std::span<const double> u, std::span<const double> ux, double ell) {
    if (u.size() != g.size() || ux.size() != g.size()) throw InputError("energy samples do not match the grid");
    std::vector<double> e(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) e[i] = u[i] * u[i] + ell * ell * ux[i] * ux[i];
    return grid_integral(g, e);
}

inline double energy_eulerian(const GridFunction1D& u, double ell) {
    const auto ux = derivative(u.grid, u.values);
    return energy_eulerian(u.grid, u.values, ux, ell);
}

/// Sum of |u_{i+1} - u_i|, including the wrap-around increment on periodic grids.
inline double total_variation(const GridFunction1D& u) {
    double tv = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) tv += std::abs(u[i] - u[i - 1]);
    if (u.grid.periodic_bc()) tv += std::abs(u[0] - u[u.size() - 1]);
    return tv;
}

/// TV(0) ((Mt + 2)/2)^2.
inline double tv_bound(double tv0, double M, double t) {
    const double f = 0.5 * (M * t + 2.0);
    return tv0 * f * f;
}

/// C/t for unbounded initial slopes (M = +inf), 2M/(Mt + 2) otherwise.
inline double oleinik_bound(double t, double M, double C = 2.0) {
    if (std::isinf(M)) {
        if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
        return C / t;
    }
    return 2.0 * M / (M * t + 2.0);
}

/// min over samples of bound - u_x; negative values are violations. Non-finite slopes are skipped.
inline double oleinik_margin(std::span<const double> ux, double t, double M, double C = 2.0) {
    const double b = oleinik_bound(t, M, C);
    double m = std::numeric_limits<double>::infinity();
    for (double s : ux)
        if (std::isfinite(s)) m = std::min(m, b - s);
    return m;
}

/// Margin against forward difference slopes.
inline double oleinik_margin(const GridFunction1D& u, double t, double M, double C = 2.0) {
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) d.push_back((u[i + 1] - u[i]) / u.grid.h());
    if (u.grid.periodic_bc()) d.push_back((u[0] - u[u.size() - 1]) / u.grid.h());
    return oleinik_margin(d, t, M, C);
}

/// Sampled fields on one grid at increasing times; P is the nonlocal potential.
struct FieldHistory {
    UniformGrid grid;
    double ell = 1.0;
    std::vector<double> times;
    std::vector<std::vector<double>> u, ux, P;
    /// Optional per-time energies from the producing solver (Lagrangian cell sums).
    std::vector<double> energy, modified_energy;
    /// Optional per-time total variation over the whole computed line, where the solver has it.
    std::vector<double> tv;

    std::size_t size() const { return times.size(); }
};

inline FieldHistory history_from(const SmoothTrajectory& tr) {
    FieldHistory h;
    h.grid = tr.grid;
    h.ell = tr.ell;
    h.times = tr.times;
    h.u = tr.states;
    h.P = tr.P;
    for (const auto& s : tr.states) h.ux.push_back(derivative(tr.grid, s));
    return h;
}

inline FieldHistory history_from(const LagrangianTrajectory& tr, const UniformGrid& g) {
    if (tr.states.empty()) throw InputError("empty trajectory");
    FieldHistory h;
    h.grid = g;
    h.ell = tr.states.front().ell;
    h.times = tr.times;
    const auto xs = g.nodes();
    for (const auto& s : tr.states) {
        auto r = reconstruct_at(s, xs);
        h.u.push_back(std::move(r.u));
        h.ux.push_back(std::move(r.ux));
        h.P.push_back(std::move(r.P));
        h.energy.push_back(lagrangian_energy(s));
        h.modified_energy.push_back(lagrangian_energy_total(s));
        // sampled at the window spacing over the whole image y([xi_0, xi_N]), so that the
        // tails carried in from the padding are counted at every time
        const double y0 = s.y.front(), y1 = s.y.back();
        const auto m = static_cast<std::size_t>(std::ceil((y1 - y0) / g.h())) + 1;
        const auto whole = reconstruct_at(s, UniformGrid::compact(y0, y1, m).nodes());
        double tv = 0.0;
        for (std::size_t i = 1; i < m; ++i) tv += std::abs(whole.u[i] - whole.u[i - 1]);
        h.tv.push_back(tv);
    }
    return h;
}

/// Exact traveling-wave history, with ell^2 P = S - (u - c)^2 / 2. Slopes at the zeros of u - c are set to 0.
inline FieldHistory history_from(const TravelingWave& w, const UniformGrid& g, const std::vector<double>& times) {
    FieldHistory h;
    h.grid = g;
    h.ell = w.ell;
    h.times = times;
    const double l2 = w.ell * w.ell;
    for (double t : times) {
        std::vector<double> u(g.size()), ux(g.size()), P(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.x(i) - w.c * t;
            u[i] = w.u_at(x);
            const double s = w.ux_at(x);
            ux[i] = std::isfinite(s) ? s : 0.0;
            const double r = u[i] - w.c;
            P[i] = (w.S - 0.5 * r * r) / l2;
        }
        h.u.push_back(std::move(u));
        h.ux.push_back(std::move(ux));
        h.P.push_back(std::move(P));
    }
    return h;
}

/// psi(t, x) = a(t) b(x), each a bump exp(1 - 1/(1 - r^2)) of the given center and radius.
struct TestFunction {
    double t_center = 0.5, t_radius = 0.5;
    double x_center = 0.0, x_radius = 1.0;

    struct Jet {
        double f, d1, d2;
    };

    static Jet bump(double s, double c, double r0) {
        const double r = (s - c) / r0;
        if (std::abs(r) >= 1.0) return {0.0, 0.0, 0.0};
        const double w = 1.0 - r * r;
        const double f = std::exp(1.0 - 1.0 / w);
        // g = -1/w, g' = -2r/w^2, g'' = -(2/w^2 + 8r^2/w^3)
        const double g1 = -2.0 * r / (w * w);
        const double g2 = -(2.0 / (w * w) + 8.0 * r * r / (w * w * w));
        return {f, f * g1 / r0, f * (g1 * g1 + g2) / (r0 * r0)};
    }
    Jet a(double t) const { return bump(t, t_center, t_radius); }
    Jet b(double x) const { return bump(x, x_center, x_radius); }
};

struct WeakResidual {
    /// int int [u psi_t + ell^2 u_x psi_tx + (u^2/2 + ell^2 u_x^2/2) psi_x + ell^2 u u_x psi_xx].
    double momentum = 0.0;
    /// -int int [(e)_t + (Phi)_x] psi, nonnegative where energy is dissipated.
    double energy = 0.0;
    /// Integrals of the absolute integrands; residuals are judged relative to these.
    double momentum_scale = 0.0;
    double energy_scale = 0.0;
    /// int int psi(t, x_center) dt at the bump's spatial center, for rate estimates.
    double psi_center_time = 0.0;
};

namespace detail {

inline std::vector<double> time_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double d = 0.5 * (t[k] - t[k - 1]);
        w[k - 1] += d;
        w[k] += d;
    }
    return w;
}

} // namespace detail

/// Space-time quadrature of the momentum and energy weak forms. The u_xx terms
/// are moved onto psi by parts, so singular slopes enter only through u_x and u_x^2.
/// Energy: e = u^2/2 + ell^2 u_x^2/2, Phi = u^3/3 + ell^2 u P + ell^2 u u_x^2/2,
/// residual = int int (e psi_t + Phi psi_x).
inline WeakResidual weak_residual(const FieldHistory& h, const TestFunction& tf) {
    if (h.size() < 3) throw InputError("weak residual needs at least 3 snapshots");
    if (tf.t_center - tf.t_radius < h.times.front() - 1e-12 || tf.t_center + tf.t_radius > h.times.back() + 1e-12)
        throw InputError("test function time support exceeds the trajectory window");
    const auto& g = h.grid;
    if (!g.periodic_bc() &&
        (tf.x_center - tf.x_radius < g.x0() - 1e-12 || tf.x_center + tf.x_radius > g.x_last() + 1e-12))
        throw InputError("test function space support exceeds the grid");
    if (g.periodic_bc() && 2.0 * tf.x_radius > g.period()) throw InputError("test function wider than the period");
    const double l2 = h.ell * h.ell;
    const auto wt = detail::time_weights(h.times);
    std::vector<TestFunction::Jet> bx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.x(i);
        if (g.periodic_bc()) x = tf.x_center + std::remainder(x - tf.x_center, g.period());
        bx[i] = tf.b(x);
    }
    WeakResidual r;
    std::vector<double> m(g.size()), ma(g.size()), e(g.size()), ea(g.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        const auto at = tf.a(h.times[k]);
        r.psi_center_time += wt[k] * at.f;
        if (at.f == 0.0 && at.d1 == 0.0) continue;
        const auto& u = h.u[k];
        const auto& ux = h.ux[k];
        const auto& P = h.P[k];
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double pt = at.d1 * bx[i].f, px = at.f * bx[i].d1, pxx = at.f * bx[i].d2, ptx = at.d1 * bx[i].d1;
            const double s2 = ux[i] * ux[i];
            const double t1 = u[i] * pt, t2 = l2 * ux[i] * ptx, t3 = (0.5 * u[i] * u[i] + 0.5 * l2 * s2) * px,
                         t4 = l2 * u[i] * ux[i] * pxx;
            m[i] = t1 + t2 + t3 + t4;
            ma[i] = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
            const double en = 0.5 * u[i] * u[i] + 0.5 * l2 * s2;
            const double fl = u[i] * u[i] * u[i] / 3.0 + l2 * u[i] * P[i] + 0.5 * l2 * u[i] * s2;
            e[i] = en * pt + fl * px;
            ea[i] = std::abs(en * pt) + std::abs(fl * px);
        }
        r.momentum += wt[k] * grid_integral(g, m);
        r.momentum_scale += wt[k] * grid_integral(g, ma);
        r.energy += wt[k] * grid_integral(g, e);
        r.energy_scale += wt[k] * grid_integral(g, ea);
    }
    return r;
}

/// Weak forms in Lagrangian variables, with x = y(t, xi): dx = q cos^2(v/2) dxi,
/// u_x dx = (q/2) sin v dxi and u_x^2 dx = q sin^2(v/2) dxi. Every density is
/// bounded, so cells at a singularity need no Eulerian reconstruction. Frozen
/// cells of a dissipative run carry no energy and are skipped.
inline WeakResidual weak_residual(const LagrangianTrajectory& tr, const TestFunction& tf) {
    if (tr.states.size() < 3) throw InputError("weak residual needs at least 3 snapshots");
    if (tf.t_center - tf.t_radius < tr.times.front() - 1e-12 || tf.t_center + tf.t_radius > tr.times.back() + 1e-12)
        throw InputError("test function time support exceeds the trajectory window");
    const auto wt = detail::time_weights(tr.times);
    WeakResidual r;
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const auto at = tf.a(tr.times[k]);
        r.psi_center_time += wt[k] * at.f;
        if (at.f == 0.0 && at.d1 == 0.0) continue;
        const auto& s = tr.states[k];
        if (tf.x_center - tf.x_radius < s.y.front() || tf.x_center + tf.x_radius > s.y.back())
            throw InputError("test function space support exceeds the Lagrangian domain");
        const auto P = lagrangian_P(s).P;
        const double l2 = s.ell * s.ell;
        double m = 0.0, ma = 0.0, e = 0.0, ea = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.variant == LagrangianVariant::dissipative && s.frozen[i]) continue;
            const auto bx = tf.b(s.y[i]);
            if (bx.f == 0.0 && bx.d1 == 0.0 && bx.d2 == 0.0) continue;
            const double pt = at.d1 * bx.f, px = at.f * bx.d1, pxx = at.f * bx.d2, ptx = at.d1 * bx.d1;
            const double c2 = std::cos(0.5 * s.v[i]) * std::cos(0.5 * s.v[i]);
            const double s2 = std::sin(0.5 * s.v[i]) * std::sin(0.5 * s.v[i]);
            const double q = s.q[i] * s.weight(i), u = s.u[i];
            const double dx = q * c2, dux = 0.5 * q * std::sin(s.v[i]), dux2 = q * s2;
            const double t1 = u * dx * pt, t2 = l2 * dux * ptx, t3 = (0.5 * u * u * dx + 0.5 * l2 * dux2) * px,
                         t4 = l2 * u * dux * pxx;
            m += t1 + t2 + t3 + t4;
            ma += std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
            const double en = 0.5 * u * u * dx + 0.5 * l2 * dux2;
            const double fl = (u * u * u / 3.0 + l2 * u * P[i]) * dx + 0.5 * l2 * u * dux2;
            e += en * pt + fl * px;
            ea += std::abs(en * pt) + std::abs(fl * px);
        }
        r.momentum += wt[k] * m;
        r.momentum_scale += wt[k] * ma;
        r.energy += wt[k] * e;
        r.energy_scale += wt[k] * ea;
    }
    return r;
}

/// Weak forms of an exact traveling wave. Space integrals run in the moving
/// frame between the zeros of u - c. Each half interval is mapped by
/// s = z + L tau^3 from its zero, which cancels the |s|^{-2/3} growth of
/// u_x^2, and then integrated with fixed Gauss panels. Time uses the
/// trapezoid rule, which is spectrally accurate for the flat bump.
inline WeakResidual weak_residual(const TravelingWave& w, const TestFunction& tf, std::size_t time_nodes = 101,
                                  std::size_t panels = 8) {
    if (!w.u_at) throw InputError("traveling wave has no profile");
    using Rule = boost::math::quadrature::gauss<double, 20>;
    // full node and weight lists on [0, 1]
    std::vector<double> gx, gw;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        const double a = Rule::abscissa()[i], wt = Rule::weights()[i];
        gx.push_back(0.5 * (1 + a)), gw.push_back(0.5 * wt);
        if (a != 0.0) gx.push_back(0.5 * (1 - a)), gw.push_back(0.5 * wt);
    }
    const double l2 = w.ell * w.ell;
    const double t0 = tf.t_center - tf.t_radius, t1 = tf.t_center + tf.t_radius;
    WeakResidual r;
    const double dt = (t1 - t0) / static_cast<double>(time_nodes - 1);
    for (std::size_t k = 1; k + 1 < time_nodes; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        const auto at = tf.a(t);
        r.psi_center_time += dt * at.f * tf.b(tf.x_center).f;
        // breakpoints in the moving frame s = x - c t
        const double lo = tf.x_center - tf.x_radius - w.c * t, hi = tf.x_center + tf.x_radius - w.c * t;
        std::vector<double> br{lo, hi};
        auto add = [&](double z) {
            if (std::isfinite(z) && z > lo && z < hi) br.push_back(z);
        };
        for (const auto& sg : w.segments) {
            if (std::isfinite(w.period)) {
                for (double k0 = std::floor((lo - sg.zero) / w.period); sg.zero + k0 * w.period < hi; k0 += 1.0)
                    add(sg.zero + k0 * w.period);
            } else {
                add(sg.zero);
                add(sg.x_begin);
                add(sg.x_end);
            }
        }
        std::sort(br.begin(), br.end());
        double m = 0.0, ma = 0.0, e = 0.0, ea = 0.0;
        auto accumulate = [&](double sx, double weight) {
            const double u = w.u_at(sx), ux = w.ux_at(sx);
            if (!std::isfinite(ux)) return;
            const auto bx = tf.b(sx + w.c * t);
            const double pt = at.d1 * bx.f, px = at.f * bx.d1, pxx = at.f * bx.d2, ptx = at.d1 * bx.d1;
            const double rel = u - w.c;
            const double P = (w.S - 0.5 * rel * rel) / l2;
            const double s2 = ux * ux;
            const double q1 = u * pt, q2 = l2 * ux * ptx, q3 = (0.5 * u * u + 0.5 * l2 * s2) * px, q4 = l2 * u * ux * pxx;
            const double en = 0.5 * u * u + 0.5 * l2 * s2;
            const double fl = u * u * u / 3.0 + l2 * u * P + 0.5 * l2 * u * s2;
            m += weight * (q1 + q2 + q3 + q4);
            ma += weight * (std::abs(q1) + std::abs(q2) + std::abs(q3) + std::abs(q4));
            e += weight * (en * pt + fl * px);
            ea += weight * (std::abs(en * pt) + std::abs(fl * px));
        };
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            const double a = br[i], b = br[i + 1];
            if (!(b > a)) continue;
            const double mid = 0.5 * (a + b);
            for (int side = 0; side < 2; ++side) {
                const double z = side == 0 ? a : b;
                const double L = side == 0 ? mid - a : mid - b;
                for (std::size_t pn = 0; pn < panels; ++pn)
                    for (std::size_t j = 0; j < gx.size(); ++j) {
                        const double tau = (static_cast<double>(pn) + gx[j]) / static_cast<double>(panels);
                        const double jac = 3.0 * std::abs(L) * tau * tau / static_cast<double>(panels);
                        accumulate(z + L * tau * tau * tau, gw[j] * jac);
                    }
            }
        }
        r.momentum += dt * m;
        r.momentum_scale += dt * ma;
        r.energy += dt * e;
        r.energy_scale += dt * ea;
    }
    return r;
}

enum class SolutionClass { conservative, dissipative, inadmissible };

inline const char* to_string(SolutionClass c) {
    switch (c) {
    case SolutionClass::conservative: return "conservative";
    case SolutionClass::dissipative: return "dissipative";
    case SolutionClass::inadmissible: return "inadmissible";
    }
    return "?";
}

/// Conservative: both residuals within rtol of their scales. Dissipative: momentum
/// within rtol and energy residual >= -rtol. Anything else is inadmissible.
inline SolutionClass classify(const std::vector<WeakResidual>& rs, double rtol = 1e-4) {
    bool mom = true, cons = true, diss = true;
    for (const auto& r : rs) {
        const double mt = rtol * r.momentum_scale, et = rtol * r.energy_scale;
        mom = mom && std::abs(r.momentum) <= mt;
        cons = cons && std::abs(r.energy) <= et;
        diss = diss && r.energy >= -et;
    }
    if (mom && cons) return SolutionClass::conservative;
    if (mom && diss) return SolutionClass::dissipative;
    return SolutionClass::inadmissible;
}

struct DiagnosticsOptions {
    /// sup u0'; +inf selects the C/t form of the Oleinik bound.
    double M = std::numeric_limits<double>::infinity();
    double oleinik_C = 2.0;
    std::vector<TestFunction> test_functions;
    double rtol = 1e-4;
};

struct DiagnosticsReport {
    std::vector<double> times, energy, modified_energy, tv, oleinik_margin;
    std::vector<WeakResidual> weak_residuals;
    std::optional<SolutionClass> classification;
    double tv_bound_ratio = std::numeric_limits<double>::quiet_NaN();
};

inline DiagnosticsReport diagnose(const FieldHistory& h, const DiagnosticsOptions& opt = {}) {
    DiagnosticsReport rep;
    rep.times = h.times;
    double worst = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double e = energy_eulerian(h.grid, h.u[k], h.ux[k], h.ell);
        rep.energy.push_back(h.energy.empty() ? e : h.energy[k]);
        rep.modified_energy.push_back(h.modified_energy.empty() ? e : h.modified_energy[k]);
        const GridFunction1D uk(h.grid, h.u[k]);
        rep.tv.push_back(h.tv.empty() ? total_variation(uk) : h.tv[k]);
        rep.oleinik_margin.push_back(h.times[k] > 0.0 || std::isfinite(opt.M)
                                         ? oleinik_margin(h.ux[k], h.times[k], opt.M, opt.oleinik_C)
                                         : std::numeric_limits<double>::infinity());
        if (std::isfinite(opt.M) && rep.tv.front() > 0.0)
            worst = std::max(worst, rep.tv.back() / tv_bound(rep.tv.front(), opt.M, h.times[k] - h.times.front()));
    }
    if (std::isfinite(opt.M)) rep.tv_bound_ratio = worst;
    for (const auto& tf : opt.test_functions) rep.weak_residuals.push_back(weak_residual(h, tf));
    if (!rep.weak_residuals.empty()) rep.classification = classify(rep.weak_residuals, opt.rtol);
    return rep;
}

inline nlohmann::json to_json(const DiagnosticsReport& r) {
    using nlohmann::json;
    auto finite_or_null = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        return a;
    };
    json j;
    j["times"] = finite_or_null(r.times);
    j["energy"] = finite_or_null(r.energy);
    j["modified_energy"] = finite_or_null(r.modified_energy);
    j["tv"] = finite_or_null(r.tv);
    j["oleinik_margin"] = finite_or_null(r.oleinik_margin);
    j["tv_bound_ratio"] = std::isfinite(r.tv_bound_ratio) ? json(r.tv_bound_ratio) : json(nullptr);
    json w = json::array();
    for (const auto& x : r.weak_residuals)
        w.push_back({{"momentum", x.momentum},
                     {"energy", x.energy},
                     {"momentum_scale", x.momentum_scale},
                     {"energy_scale", x.energy_scale}});
    j["weak_residuals"] = w;
    j["classification"] = r.classification ? json(to_string(*r.classification)) : json(nullptr);
    return j;
}

} // namespace rburgers
