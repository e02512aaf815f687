#pragma once

// Reference models: inviscid Burgers (exact Riemann solution, Godunov,
// characteristics) and Hunter-Saxton along characteristics; the limit study
// that compares the dissipative Lagrangian solver against them.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rburgers/errors.hpp"
#include "rburgers/grid.hpp"
#include "rburgers/lagrangian.hpp"

namespace rburgers {

struct RiemannDatum {
    double ul = 0.0;
    double ur = 0.0;
};

/// Entropy solution of u_t + (u^2/2)_x = 0 at similarity coordinate xi = x/t.
inline double burgers_riemann(const RiemannDatum& d, double xi) {
    if (d.ul > d.ur) return xi < 0.5 * (d.ul + d.ur) ? d.ul : d.ur;
    return std::clamp(xi, d.ul, d.ur);
}

/// Godunov flux for f(u) = u^2/2.
inline double godunov_flux(double ul, double ur) {
    const double a = std::max(ul, 0.0), b = std::min(ur, 0.0);
    return std::max(0.5 * a * a, 0.5 * b * b);
}

struct GodunovConfig {
    double cfl = 0.9;
    /// Fixed step; its CFL number is checked on every step.
    std::optional<double> dt;
    /// Called after every step with (t, values).
    std::function<void(double, const std::vector<double>&)> observer;
};

/// First-order Godunov scheme. Compact grids use transmissive ends.
inline GridFunction1D burgers_godunov(const GridFunction1D& u0, double t_end, const GodunovConfig& cfg = {}) {
    if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0) throw ConfigError("Godunov CFL number must lie in (0, 1]");
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("Godunov dt must be positive");
    if (!(t_end >= 0.0)) throw InputError("t_end must be nonnegative");
    u0.check_finite("Godunov datum");
    const auto& g = u0.grid;
    const std::size_t n = g.size();
    const double h = g.h();
    const bool per = g.periodic_bc();
    std::vector<double> u = u0.values, f(n + 1);
    double t = 0.0;
    while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
        double umax = 0.0;
        for (double v : u) umax = std::max(umax, std::abs(v));
        double dt = cfg.dt ? *cfg.dt : (umax > 0.0 ? cfg.cfl * h / umax : t_end - t);
        dt = std::min(dt, t_end - t);
        if (dt * umax > h * (1.0 + 1e-12)) throw ConfigError("Godunov step violates CFL <= 1");
        // f[i] is the flux through the left face of cell i
        for (std::size_t i = 0; i <= n; ++i) {
            const double l = i == 0 ? (per ? u[n - 1] : u[0]) : u[i - 1];
            const double r = i == n ? (per ? u[0] : u[n - 1]) : u[i];
            f[i] = godunov_flux(l, r);
        }
        const double lam = dt / h;
        for (std::size_t i = 0; i < n; ++i) u[i] -= lam * (f[i + 1] - f[i]);
        t += dt;
        if (cfg.observer) cfg.observer(t, u);
    }
    return {g, std::move(u)};
}

/// Largest time before characteristics of u0 cross: -1 / min u0', sampled on xs.
inline double burgers_breaking_time(const InitialDatum& d, const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m = std::min(m, d.du(x));
    return m < 0.0 ? -1.0 / m : std::numeric_limits<double>::infinity();
}

struct CharacteristicSamples {
    std::vector<double> u, ux;
};

/// Smooth Burgers solution u = u0(x - t u) by solving xi + t u0(xi) = x.
inline CharacteristicSamples burgers_characteristic(const InitialDatum& d, double t, const std::vector<double>& xs) {
    if (!(t >= 0.0)) throw InputError("t must be nonnegative");
    CharacteristicSamples out;
    out.u.resize(xs.size());
    out.ux.resize(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        auto g = [&](double s) { return s + t * d.u(s) - x; };
        // bracket by outward doubling
        double w = std::max(1.0, t * std::abs(d.u(x)));
        double a = x - w, b = x + w;
        int it = 0;
        while (g(a) > 0.0 || g(b) < 0.0) {
            w *= 2.0;
            a = x - w, b = x + w;
            if (++it > 60) throw DomainError("characteristic foot not bracketed");
        }
        double s = x - t * d.u(x);
        if (!(s > a && s < b)) s = 0.5 * (a + b);
        for (int i = 0; i < 100; ++i) {
            const double gs = g(s);
            if (gs > 0.0) b = s; else a = s;
            const double dg = 1.0 + t * d.du(s);
            if (!(dg > 0.0)) throw DomainError("characteristics have crossed; no smooth solution");
            double sn = s - gs / dg;
            if (!(sn > a && sn < b)) sn = 0.5 * (a + b);
            const bool done = std::abs(sn - s) <= 1e-15 * std::max(1.0, std::abs(s));
            s = sn;
            if (done || b - a <= 1e-15 * std::max(1.0, std::abs(s))) break;
        }
        const double p0 = d.du(s);
        if (!(1.0 + t * p0 > 0.0)) throw DomainError("characteristics have crossed; no smooth solution");
        out.u[k] = d.u(s);
        out.ux[k] = p0 / (1.0 + t * p0);
    }
    return out;
}

/// Hunter-Saxton characteristics. J = d eta / d x0 carries the slope measure p^2 J dx0.
struct HSState {
    std::vector<double> x0, eta, u, p, J;
    /// Initial slopes, kept for the Riccati audit.
    std::vector<double> p0;
    double t = 0.0;

    std::size_t size() const { return x0.size(); }
};

inline HSState hs_initial(const InitialDatum& d, const UniformGrid& seeds) {
    if (seeds.periodic_bc()) throw ConfigError("Hunter-Saxton characteristics need a compact seed grid");
    HSState s;
    s.x0 = seeds.nodes();
    s.eta = s.x0;
    for (double x : s.x0) {
        s.u.push_back(d.u(x));
        s.p.push_back(d.du(x));
    }
    s.J.assign(s.size(), 1.0);
    s.p0 = s.p;
    return s;
}

/// First slope blow-up, -2 / min p0 (infinite for nondecreasing data).
inline double hs_blowup_time(const HSState& s) {
    const double m = *std::min_element(s.p0.begin(), s.p0.end());
    return m < 0.0 ? -2.0 / m : std::numeric_limits<double>::infinity();
}

/// Slope measure sum p^2 J dx0, trapezoid in x0.
inline double hs_energy(const HSState& s) {
    const std::size_t n = s.size();
    const double h = s.x0[1] - s.x0[0];
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += (i == 0 || i + 1 == n ? 0.5 : 1.0) * s.p[i] * s.p[i] * s.J[i];
    return e * h;
}

namespace detail {

struct HSFields {
    std::vector<double> eta, u, p, J;
};

/// Forcing (1/4)(int_{-inf}^eta - int_eta^inf) of the slope measure, trapezoid cumulative in x0.
inline std::vector<double> hs_forcing(const std::vector<double>& p, const std::vector<double>& J, double h) {
    const std::size_t n = p.size();
    std::vector<double> A(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        A[i] = A[i - 1] + 0.5 * h * (p[i - 1] * p[i - 1] * J[i - 1] + p[i] * p[i] * J[i]);
    const double total = A.back();
    for (auto& a : A) a = 0.25 * (2.0 * a - total);
    return A;
}

inline HSFields hs_rhs(const HSFields& f, double h) {
    HSFields k;
    k.eta = f.u;
    k.u = hs_forcing(f.p, f.J, h);
    k.p.resize(f.p.size());
    k.J.resize(f.p.size());
    for (std::size_t i = 0; i < f.p.size(); ++i) {
        k.p[i] = -0.5 * f.p[i] * f.p[i];
        k.J[i] = f.p[i] * f.J[i];
    }
    return k;
}

inline HSFields hs_axpy(const HSFields& a, double c, const HSFields& d) {
    HSFields o = a;
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        o.eta[i] += c * d.eta[i];
        o.u[i] += c * d.u[i];
        o.p[i] += c * d.p[i];
        o.J[i] += c * d.J[i];
    }
    return o;
}

} // namespace detail

/// RK4 along characteristics; steps keep dt max|p| below step_theta.
inline HSState hunter_saxton_evolve(const HSState& s0, double t_end, double dt_max = 1e-2, double step_theta = 2e-3) {
    if (s0.size() < 3) throw InputError("need at least 3 Hunter-Saxton seeds");
    if (!(t_end >= s0.t)) throw InputError("t_end precedes the state time");
    const double tb = hs_blowup_time(s0);
    if (t_end >= tb)
        throw DomainError("Hunter-Saxton slopes blow up at t = -2/min u0' = " + std::to_string(tb) +
                          "; refusing t_end = " + std::to_string(t_end));
    const double h = s0.x0[1] - s0.x0[0];
    detail::HSFields f{s0.eta, s0.u, s0.p, s0.J};
    double t = s0.t;
    while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
        double pm = 0.0;
        for (double v : f.p) pm = std::max(pm, std::abs(v));
        double dt = std::min({dt_max, t_end - t, pm > 0.0 ? step_theta / pm : dt_max});
        const auto k1 = detail::hs_rhs(f, h);
        const auto k2 = detail::hs_rhs(detail::hs_axpy(f, 0.5 * dt, k1), h);
        const auto k3 = detail::hs_rhs(detail::hs_axpy(f, 0.5 * dt, k2), h);
        const auto k4 = detail::hs_rhs(detail::hs_axpy(f, dt, k3), h);
        for (std::size_t i = 0; i < f.p.size(); ++i) {
            f.eta[i] += dt / 6.0 * (k1.eta[i] + 2 * k2.eta[i] + 2 * k3.eta[i] + k4.eta[i]);
            f.u[i] += dt / 6.0 * (k1.u[i] + 2 * k2.u[i] + 2 * k3.u[i] + k4.u[i]);
            f.p[i] += dt / 6.0 * (k1.p[i] + 2 * k2.p[i] + 2 * k3.p[i] + k4.p[i]);
            f.J[i] += dt / 6.0 * (k1.J[i] + 2 * k2.J[i] + 2 * k3.J[i] + k4.J[i]);
        }
        t += dt;
        for (double v : f.p)
            if (!std::isfinite(v)) throw NumericalFailure("Hunter-Saxton slope became non-finite");
    }
    HSState s = s0;
    s.eta = std::move(f.eta);
    s.u = std::move(f.u);
    s.p = std::move(f.p);
    s.J = std::move(f.J);
    s.t = t_end;
    return s;
}

/// Values and slopes at xs by cubic Hermite interpolation in eta (du/deta = p).
inline CharacteristicSamples hs_reconstruct(const HSState& s, const std::vector<double>& xs) {
    const std::size_t n = s.size();
    for (std::size_t i = 1; i < n; ++i)
        if (!(s.eta[i] > s.eta[i - 1])) throw NumericalFailure("Hunter-Saxton characteristics crossed");
    CharacteristicSamples out;
    out.u.resize(xs.size());
    out.ux.resize(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        if (x < s.eta.front() || x > s.eta.back()) throw DomainError("point outside the Hunter-Saxton characteristic range");
        std::size_t i = static_cast<std::size_t>(std::upper_bound(s.eta.begin(), s.eta.end(), x) - s.eta.begin());
        i = std::min(i == 0 ? 0 : i - 1, n - 2);
        const double w = s.eta[i + 1] - s.eta[i], th = (x - s.eta[i]) / w;
        const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
        const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
        out.u[k] = h00 * s.u[i] + h10 * w * s.p[i] + h01 * s.u[i + 1] + h11 * w * s.p[i + 1];
        out.ux[k] = (1 - th) * s.p[i] + th * s.p[i + 1];
    }
    return out;
}

/// Smooth bump exp(1 - 1/(1 - r^2)) on |x - c| < r0, with peak 1.
inline double bump(double x, double c, double r0) {
    const double r = (x - c) / r0;
    return std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
}

enum class LimitReference { automatic, burgers, hunter_saxton };

struct LimitStudyOptions {
    LimitReference reference = LimitReference::automatic;
    LagrangianGridSpec grid{};
    double dt = 2.5e-3;
    /// Bump for the nu-gap; defaults to the middle half of the region.
    std::optional<double> bump_center, bump_radius;
    /// Seeds for the Hunter-Saxton reference; zero selects 4 * xi_count.
    std::size_t hs_seeds = 0;
    unsigned threads = 1;
};

struct LimitRow {
    double ell = 0.0;
    double L1_distance = std::numeric_limits<double>::quiet_NaN();
    double mu_proxy = std::numeric_limits<double>::quiet_NaN();
    double nu_gap = std::numeric_limits<double>::quiet_NaN();
    double runtime_seconds = 0.0;
    std::string error;
    bool ok() const { return error.empty(); }
};

struct LimitTable {
    LimitReference reference = LimitReference::burgers;
    /// "characteristic", "godunov" or "hunter_saxton".
    std::string reference_solution;
    std::vector<LimitRow> rows;
};

inline const char* to_string(LimitReference r) {
    switch (r) {
    case LimitReference::burgers: return "burgers";
    case LimitReference::hunter_saxton: return "hunter_saxton";
    default: return "automatic";
    }
}

/// Runs the dissipative solver for each ell and measures the distance to the
/// matching limit: Burgers for a decreasing ladder, Hunter-Saxton for an
/// increasing one. The nu-gap compares the limit of -ell^2 P_xx = u_x^2/2 - P
/// with the reference slope measure.
inline LimitTable limit_study(const InitialDatum& u0, const std::vector<double>& ladder, double t, const UniformGrid& region,
                              const LimitStudyOptions& opt = {}) {
    if (ladder.empty()) throw InputError("empty ell ladder");
    if (!(t > 0.0)) throw InputError("limit study time must be positive");
    if (region.periodic_bc()) throw ConfigError("limit study region must be a compact interval");
    LimitTable table;
    table.reference = opt.reference;
    if (table.reference == LimitReference::automatic) {
        const bool up = ladder.size() > 1 && ladder.back() > ladder.front();
        table.reference = up ? LimitReference::hunter_saxton : LimitReference::burgers;
    }
    const auto xs = region.nodes();
    CharacteristicSamples ref;
    bool ref_has_slope = true;
    if (table.reference == LimitReference::burgers) {
        const auto probe = UniformGrid::compact(opt.grid.x_min, opt.grid.x_max, 8 * opt.grid.xi_count + 1).nodes();
        if (t < burgers_breaking_time(u0, probe)) {
            ref = burgers_characteristic(u0, t, xs);
            table.reference_solution = "characteristic";
        } else {
            auto g = burgers_godunov(GridFunction1D::sample(region, u0.u), t);
            ref.u = std::move(g.values);
            ref_has_slope = false;
            table.reference_solution = "godunov";
        }
    } else {
        const std::size_t ns = opt.hs_seeds ? opt.hs_seeds : 4 * opt.grid.xi_count;
        const auto seeds = UniformGrid::compact(opt.grid.x_min, opt.grid.x_max, ns);
        ref = hs_reconstruct(hunter_saxton_evolve(hs_initial(u0, seeds), t), xs);
        table.reference_solution = "hunter_saxton";
    }
    const double a = region.x0(), b = region.x_last();
    const double bc = opt.bump_center.value_or(0.5 * (a + b));
    const double br = opt.bump_radius.value_or(0.25 * (b - a));
    std::vector<double> phi(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) phi[k] = bump(xs[k], bc, br);

    table.rows.resize(ladder.size());
    auto run_rung = [&](std::size_t r) {
        LimitRow& row = table.rows[r];
        row.ell = ladder[r];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto s0 = init_lagrangian(u0, opt.grid, row.ell, LagrangianVariant::dissipative);
            auto tr = evolve_lagrangian(s0, t, LagrangianRun{opt.dt, {}});
            const auto rec = reconstruct_at(tr.states.back(), xs);
            std::vector<double> d(xs.size()), mu(xs.size()), nu(xs.size());
            const double l2 = row.ell * row.ell;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                d[k] = std::abs(rec.u[k] - ref.u[k]);
                mu[k] = l2 * rec.P[k];
                nu[k] = ref_has_slope ? (0.5 * rec.ux[k] * rec.ux[k] - rec.P[k] - 0.5 * ref.ux[k] * ref.ux[k]) * phi[k] : 0.0;
            }
            row.L1_distance = grid_integral(region, d);
            row.mu_proxy = grid_integral(region, mu);
            row.nu_gap = ref_has_slope ? std::abs(grid_integral(region, nu)) : std::numeric_limits<double>::quiet_NaN();
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(ladder.size())));
    if (nt == 1) {
        for (std::size_t r = 0; r < ladder.size(); ++r) run_rung(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nt; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < ladder.size(); r = next++) run_rung(r);
            });
        for (auto& th : pool) th.join();
    }
    return table;
}

inline std::vector<double> halving_ladder(double start, double stop) {
    std::vector<double> out;
    for (double l = start; l >= stop * (1.0 - 1e-12); l *= 0.5) out.push_back(l);
    return out;
}

inline std::vector<double> doubling_ladder(double start, double stop) {
    std::vector<double> out;
    for (double l = start; l <= stop * (1.0 + 1e-12); l *= 2.0) out.push_back(l);
    return out;
}

} // namespace rburgers
