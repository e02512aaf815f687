#pragma once

// Method-of-lines solver for u_t + (u^2/2)_x + ell^2 P_x = 0 with classical RK4.
//
// Besides the grid field, every node seeds a characteristic (eta, H) obeying
//   eta' = u(eta),  H' = -H^2/2 - P(eta),
// so the slope along characteristics can be followed past the point where the
// grid stops resolving it. Blow-up is declared when the smaller of the grid
// slope and the tracked slope drops below -slope_cap.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rburgers/derivative.hpp"
#include "rburgers/greens.hpp"
#include "rburgers/grid.hpp"

namespace rburgers {

struct TimeStepPolicy {
    double cfl = 0.3;
    double eps = 1e-12;
    double dt_max = std::numeric_limits<double>::infinity();
    /// Positive value forces a constant step (still shortened to land on outputs).
    double fixed_dt = 0.0;
    /// Extra output times in (0, t_end); t = 0 and t_end are always recorded.
    std::vector<double> output_times;
    double slope_cap = 1e4;
    bool track_characteristics = true;
    /// Step bound dt <= riccati_fraction / |min slope|.
    double riccati_fraction = 0.05;
    /// Test hook: drop P from the Riccati equation of the tracked slopes.
    bool riccati_without_P = false;
    bool stop_at_blowup = true;
    std::size_t max_steps = 20'000'000;
};

enum class BlowupStatus { none, detected, non_finite, horizon_reached };

inline const char* to_string(BlowupStatus s) {
    switch (s) {
    case BlowupStatus::none: return "none";
    case BlowupStatus::detected: return "detected";
    case BlowupStatus::non_finite: return "non_finite";
    case BlowupStatus::horizon_reached: return "horizon_reached";
    }
    return "?";
}

struct SlopeSample {
    double t;
    double min_grid_slope;
    double max_grid_slope;
    double min_tracked_slope;
};

struct BlowupBracket {
    double low = 0.0;
    double high = std::numeric_limits<double>::infinity();
    bool contains(double t) const { return t >= low && t <= high; }
};

/// Lower and upper bounds for the blow-up time in terms of inf/sup u0' and
/// t_star, the first time |inf u_x| >= sup u_x (ignored when |m0| >= M0).
inline BlowupBracket blowup_bracket(double m0, double M0, double t_star) {
    if (!(m0 < 0.0)) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    BlowupBracket b;
    b.high = -2.0 / m0;
    if (-m0 >= M0) {
        b.low = -1.0 / m0;
    } else {
        b.low = 1.0 / std::max(-m0, M0);
        if (std::isfinite(t_star) && M0 > 0.0) b.low = std::max(b.low, t_star + 1.0 / M0);
    }
    return b;
}

struct BlowupRecord {
    BlowupStatus status = BlowupStatus::none;
    double t_estimate = std::numeric_limits<double>::quiet_NaN();
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double initial_min_slope = 0.0;
    double initial_max_slope = 0.0;
    BlowupBracket bracket{};
    bool in_bracket = false;
    std::vector<SlopeSample> history;
};

struct SmoothTrajectory {
    UniformGrid grid;
    double ell = 1.0;
    TimeStepPolicy policy;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> P;
    /// Sizes of every accepted step, so characteristics can replay the clock.
    std::vector<double> steps;
    BlowupRecord blowup;
    bool halted = false;

    GridFunction1D state(std::size_t k) const { return {grid, states[k]}; }
};

struct CharacteristicPath {
    std::vector<double> times;
    std::vector<double> eta;
    std::vector<double> H;
    std::vector<double> u;
};

namespace detail {

using Spectrum = std::vector<std::complex<double>>;

struct EulerState {
    std::vector<double> u, eta, H;
};

class EulerianStepper {
public:
    EulerianStepper(UniformGrid g, double ell, const TimeStepPolicy& pol) : g_(g), ell_(ell), pol_(pol), k_(ell) {
        if (g.periodic_bc() && g.size() % 2 != 0) throw ConfigError("periodic grids need an even node count");
    }

    EulerState rhs(const EulerState& s, std::vector<double>* P_out = nullptr, std::vector<double>* ux_out = nullptr) const {
        const std::size_t n = g_.size();
        std::vector<double> ux, P;
        EulerState d;
        if (g_.periodic_bc()) {
            galerkin(s.u, d.u, P, ux);
        } else {
            ux = derivative(g_, s.u);
            auto nl = nonlocal_from_slope(g_, ux, k_);
            std::vector<double> half(n);
            for (std::size_t i = 0; i < n; ++i) half[i] = 0.5 * s.u[i] * s.u[i];
            auto flux_x = derivative(g_, half);
            d.u.resize(n);
            const double l2 = ell_ * ell_;
            for (std::size_t i = 0; i < n; ++i) d.u[i] = -flux_x[i] - l2 * nl.Px[i];
            P = std::move(nl.P);
        }
        const std::size_t m = s.eta.size();
        d.eta.assign(m, 0.0);
        d.H.assign(m, 0.0);
        const double lo = g_.x0(), hi = g_.x_last();
        for (std::size_t j = 0; j < m; ++j) {
            if (!g_.periodic_bc() && (s.eta[j] < lo || s.eta[j] > hi)) continue;
            d.eta[j] = interp_cubic(g_, s.u, s.eta[j]);
            const double p = pol_.riccati_without_P ? 0.0 : interp_cubic(g_, P, s.eta[j]);
            d.H[j] = -0.5 * s.H[j] * s.H[j] - p;
        }
        if (P_out) *P_out = std::move(P);
        if (ux_out) *ux_out = std::move(ux);
        return d;
    }

    // Periodic grids: Fourier-Galerkin with 3/2-padded products and the exact
    // Helmholtz inverse, which keeps momentum and energy invariant for the
    // semi-discrete system.
    void galerkin(const std::vector<double>& u, std::vector<double>& du, std::vector<double>& P,
                  std::vector<double>& ux) const {
        const std::size_t n = g_.size(), M = 3 * n / 2, kc = n / 2;
        auto& pn = detail::plan_for(n);
        auto& pm = detail::plan_for(M);
        auto uh = pn.forward(u);
        Spectrum up(M / 2 + 1), vp(M / 2 + 1), vh(kc + 1);
        const std::complex<double> I(0.0, 1.0);
        for (std::size_t k = 0; k < kc; ++k) {
            vh[k] = I * detail::wavenumber(k, g_) * uh[k];
            up[k] = uh[k];
            vp[k] = vh[k];
        }
        const double to_fine = static_cast<double>(M) / static_cast<double>(n);
        auto uf = pm.inverse(up, to_fine), vf = pm.inverse(vp, to_fine);
        std::vector<double> a(M), b(M);
        for (std::size_t i = 0; i < M; ++i) {
            a[i] = uf[i] * vf[i];
            b[i] = 0.5 * vf[i] * vf[i];
        }
        auto ah = pm.forward(a), bh = pm.forward(b);
        Spectrum rh(kc + 1), Ph(kc + 1);
        const double back = 1.0 / to_fine, l2 = ell_ * ell_;
        for (std::size_t k = 0; k < kc; ++k) {
            const double kk = detail::wavenumber(k, g_);
            Ph[k] = back * bh[k] / (1.0 + l2 * kk * kk);
            rh[k] = -back * ah[k] - l2 * I * kk * Ph[k];
        }
        du = pn.inverse(rh);
        P = pn.inverse(Ph);
        ux = pn.inverse(vh);
    }

    static void axpy(EulerState& y, const EulerState& x, double a, const EulerState& base) {
        for (std::size_t i = 0; i < y.u.size(); ++i) y.u[i] = base.u[i] + a * x.u[i];
        for (std::size_t i = 0; i < y.eta.size(); ++i) {
            y.eta[i] = base.eta[i] + a * x.eta[i];
            y.H[i] = base.H[i] + a * x.H[i];
        }
    }

    EulerState step(const EulerState& s, double dt, const EulerState* k1_given = nullptr) const {
        EulerState k1 = k1_given ? *k1_given : rhs(s);
        EulerState tmp = s;
        axpy(tmp, k1, 0.5 * dt, s);
        EulerState k2 = rhs(tmp);
        axpy(tmp, k2, 0.5 * dt, s);
        EulerState k3 = rhs(tmp);
        axpy(tmp, k3, dt, s);
        EulerState k4 = rhs(tmp);
        EulerState out = s;
        for (std::size_t i = 0; i < s.u.size(); ++i)
            out.u[i] += dt / 6.0 * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
        for (std::size_t i = 0; i < s.eta.size(); ++i) {
            out.eta[i] += dt / 6.0 * (k1.eta[i] + 2.0 * k2.eta[i] + 2.0 * k3.eta[i] + k4.eta[i]);
            out.H[i] += dt / 6.0 * (k1.H[i] + 2.0 * k2.H[i] + 2.0 * k3.H[i] + k4.H[i]);
        }
        return out;
    }

    double min_slope(const EulerState& s, const std::vector<double>& ux) const {
        double m = *std::min_element(ux.begin(), ux.end());
        for (double h : s.H) m = std::min(m, h);
        return m;
    }

    double choose_dt(const EulerState& s, const std::vector<double>& ux) const {
        if (pol_.fixed_dt > 0.0) return pol_.fixed_dt;
        double umax = 0.0;
        for (double v : s.u) umax = std::max(umax, std::abs(v));
        double dt = pol_.cfl * g_.h() / (umax + pol_.eps);
        dt = std::min(dt, pol_.dt_max);
        const double m = min_slope(s, ux);
        if (m < 0.0) dt = std::min(dt, pol_.riccati_fraction / -m);
        return dt;
    }

private:
    UniformGrid g_;
    double ell_;
    TimeStepPolicy pol_;
    KernelSpec k_;
};

inline bool all_finite(const EulerState& s) {
    for (double v : s.u)
        if (!std::isfinite(v)) return false;
    for (double v : s.H)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace detail

/// Integrate from u0 to t_end, recording t = 0, the policy's output times and t_end.
inline SmoothTrajectory evolve_smooth(const GridFunction1D& u0, const KernelSpec& spec, double t_end,
                                      const TimeStepPolicy& policy = {}) {
    u0.check_finite("u0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InputError("t_end must be finite and non-negative");
    if (!(policy.cfl > 0.0)) throw InputError("cfl must be positive");
    spec.wraps(u0.grid);
    const UniformGrid& g = u0.grid;
    detail::EulerianStepper st(g, spec.ell, policy);

    std::vector<double> outs;
    for (double t : policy.output_times)
        if (t > 0.0 && t < t_end) outs.push_back(t);
    std::sort(outs.begin(), outs.end());
    outs.push_back(t_end);

    detail::EulerState s;
    s.u = u0.values;
    std::vector<double> ux0 = derivative(g, s.u);
    if (policy.track_characteristics) {
        s.eta = g.nodes();
        s.H = ux0;
    }

    SmoothTrajectory traj;
    traj.grid = g;
    traj.ell = spec.ell;
    traj.policy = policy;
    BlowupRecord& br = traj.blowup;
    br.initial_min_slope = *std::min_element(ux0.begin(), ux0.end());
    br.initial_max_slope = *std::max_element(ux0.begin(), ux0.end());
    const double slope_scale = std::max(std::abs(br.initial_min_slope), std::abs(br.initial_max_slope));
    if (br.initial_min_slope > -1e-12 * slope_scale) br.initial_min_slope = 0.0;

    double t = 0.0;
    std::vector<double> P, ux;
    detail::EulerState k1 = st.rhs(s, &P, &ux);
    auto record_sample = [&](double tt) {
        const double mg = *std::min_element(ux.begin(), ux.end());
        const double Mg = *std::max_element(ux.begin(), ux.end());
        double mh = mg;
        for (double h : s.H) mh = std::min(mh, h);
        br.history.push_back({tt, mg, Mg, mh});
        if (std::isnan(br.t_star) && -mg >= Mg && br.initial_min_slope < 0.0) br.t_star = tt;
    };
    traj.times.push_back(0.0);
    traj.states.push_back(s.u);
    traj.P.push_back(P);
    record_sample(0.0);

    std::size_t next = 0;
    std::size_t nsteps = 0;
    while (next < outs.size()) {
        if (++nsteps > policy.max_steps) throw NumericalFailure("step budget exhausted");
        double dt = st.choose_dt(s, ux);
        bool lands = false;
        if (t + dt >= outs[next] - 1e-14 * std::max(1.0, outs[next])) {
            dt = outs[next] - t;
            lands = true;
        }
        detail::EulerState s_new = st.step(s, dt, &k1);
        std::vector<double> P_new, ux_new;
        detail::EulerState k1_new;
        bool finite = detail::all_finite(s_new);
        if (finite) {
            k1_new = st.rhs(s_new, &P_new, &ux_new);
            finite = detail::all_finite(k1_new);
        }
        if (!finite) {
            br.status = BlowupStatus::non_finite;
            br.t_estimate = t;
            traj.halted = true;
            break;
        }
        const double m_new = st.min_slope(s_new, ux_new);
        if (m_new < -policy.slope_cap && policy.stop_at_blowup) {
            // bisect the crossing time inside the last step
            double a = 0.0, b = dt;
            for (int it = 0; it < 60 && b - a > 1e-13 * std::max(1.0, t); ++it) {
                const double c = 0.5 * (a + b);
                detail::EulerState sc = st.step(s, c, &k1);
                std::vector<double> uxc = derivative(g, sc.u);
                if (!detail::all_finite(sc) || st.min_slope(sc, uxc) < -policy.slope_cap) b = c;
                else a = c;
            }
            br.status = BlowupStatus::detected;
            br.t_estimate = t + 0.5 * (a + b);
            traj.halted = true;
            s = std::move(s_new);
            ux = std::move(ux_new);
            record_sample(t + dt);
            traj.steps.push_back(dt);
            break;
        }
        t = lands ? outs[next] : t + dt;
        s = std::move(s_new);
        k1 = std::move(k1_new);
        P = std::move(P_new);
        ux = std::move(ux_new);
        traj.steps.push_back(dt);
        record_sample(t);
        if (lands) {
            traj.times.push_back(t);
            traj.states.push_back(s.u);
            traj.P.push_back(P);
            ++next;
        }
    }
    br.bracket = blowup_bracket(br.initial_min_slope, br.initial_max_slope, br.t_star);
    br.in_bracket = br.status == BlowupStatus::detected && br.bracket.contains(br.t_estimate);
    return traj;
}

struct BlowupSearch {
    KernelSpec spec{1.0};
    TimeStepPolicy policy{};
    /// Minimum horizon; data with inf u0' < 0 are followed to at least 1.1 times the upper bracket.
    double horizon = 10.0;
    double max_horizon = 1e3;
};

/// Run until the slope cap trips, the horizon passes, or the state goes non-finite.
inline BlowupRecord detect_blowup(const GridFunction1D& u0, const BlowupSearch& cfg) {
    auto ux0 = derivative(u0.grid, u0.values);
    double m0 = *std::min_element(ux0.begin(), ux0.end());
    double scale = 0.0;
    for (double v : ux0) scale = std::max(scale, std::abs(v));
    if (m0 > -1e-12 * scale) m0 = 0.0;  // round-off of a monotone profile
    double horizon = cfg.horizon;
    if (m0 < 0.0) horizon = std::min(std::max(horizon, 1.1 * (-2.0 / m0)), std::max(cfg.max_horizon, horizon));
    TimeStepPolicy pol = cfg.policy;
    pol.output_times.clear();
    pol.track_characteristics = true;
    pol.stop_at_blowup = true;
    auto traj = evolve_smooth(u0, cfg.spec, horizon, pol);
    BlowupRecord br = std::move(traj.blowup);
    if (br.status == BlowupStatus::none && br.initial_min_slope < 0.0) br.status = BlowupStatus::horizon_reached;
    return br;
}

/// Follow the characteristic from x0 by replaying the trajectory's step sequence.
inline CharacteristicPath evolve_characteristic(double x0, const SmoothTrajectory& traj) {
    if (traj.states.empty()) throw InputError("empty trajectory");
    const UniformGrid& g = traj.grid;
    if (!g.periodic_bc() && (x0 < g.x0() || x0 > g.x_last())) throw DomainError("seed outside the grid");
    TimeStepPolicy pol = traj.policy;
    detail::EulerianStepper st(g, traj.ell, pol);
    detail::EulerState s;
    s.u = traj.states[0];
    s.eta = {x0};
    s.H = {interp_cubic(g, derivative(g, s.u), x0)};
    CharacteristicPath path;
    auto push = [&](double t) {
        path.times.push_back(t);
        path.eta.push_back(s.eta[0]);
        path.H.push_back(s.H[0]);
        path.u.push_back(interp_cubic(g, s.u, s.eta[0]));
    };
    double t = 0.0;
    push(t);
    std::size_t next = 1;
    for (double dt : traj.steps) {
        s = st.step(s, dt);
        t += dt;
        if (next < traj.times.size() && std::abs(t - traj.times[next]) <= 1e-12 * std::max(1.0, t)) {
            t = traj.times[next++];
            push(t);
        }
    }
    return path;
}

} // namespace rburgers
