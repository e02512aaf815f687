#pragma once

// Stationary weak solutions of (u - ell^2 u_xx)_t + (u^2/2 - ell^2 u u_xx - ell^2 u_x^2/2)_x = 0.
// In x/ell a steady profile satisfies
//
//   u u_x^2 / 2 = F - S u + u^3 / 6
//
// on every interval where u != 0, with S global and F allowed to jump at zeros of u.
// For bounded positive pieces the cubic has roots 0 < u0 <= u1 and -(u0 + u1), and
// u = eta(x) inverts x = H(eta) = int_0^eta sqrt(3v / ((u0 - v)(u1 - v)(u0 + u1 + v))) dv.

// pchip.hpp in Boost 1.74 needs boost::math::isnan declared first
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "rburgers/errors.hpp"

namespace rburgers {

struct FluxPair {
    double F = 0.0;
    double S = 0.0;
};

/// F and S from the positive roots u1 >= u0 > 0; negative waves (u1 <= u0 < 0) map to -F.
inline FluxPair cuspon_flux(double u0, double u1) {
    if (u0 < 0.0 && u1 <= u0) {
        const auto f = cuspon_flux(-u0, -u1);
        return {-f.F, f.S};
    }
    if (!(u0 > 0.0) || !std::isfinite(u0)) throw DomainError("cuspon roots need u0 > 0");
    if (!(u1 >= u0) || !std::isfinite(u1)) throw DomainError("cuspon roots need u1 >= u0");
    return {u0 * u1 * (u0 + u1) / 6.0, (u0 * u0 + u0 * u1 + u1 * u1) / 6.0};
}

/// 0 < 3|F| <= (2S)^{3/2}, with a relative slack on the upper bound.
inline bool flux_admissible(double S, double F, double rtol = 1e-12) {
    if (!(S > 0.0) || F == 0.0 || !std::isfinite(F)) return false;
    return 3.0 * std::abs(F) <= std::pow(2.0 * S, 1.5) * (1.0 + rtol);
}

/// Real roots of F - S u + u^3/6 in ascending order.
inline std::vector<double> flux_cubic_roots(double S, double F) {
    // u^3 + p u + q with p = -6S, q = 6F
    const double p = -6.0 * S, q = 6.0 * F;
    std::vector<double> r;
    if (p == 0.0) {
        r.push_back(std::cbrt(-q));
    } else if (p < 0.0 && 4.0 * p * p * p + 27.0 * q * q <= 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) r.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
    } else if (p < 0.0) {
        const double m = std::sqrt(-p / 3.0);
        const double sg = q > 0.0 ? 1.0 : -1.0;
        r.push_back(-2.0 * sg * m * std::cosh(std::acosh(-1.5 * std::abs(q) / p * std::sqrt(-3.0 / p)) / 3.0));
    } else {
        const double m = std::sqrt(p / 3.0);
        r.push_back(-2.0 * m * std::sinh(std::asinh(1.5 * q / p * std::sqrt(3.0 / p)) / 3.0));
    }
    for (double& x : r) {
        for (int it = 0; it < 2; ++it) {
            const double d = 3.0 * x * x + p;
            if (d != 0.0) x -= (x * x * x + p * x + q) / d;
        }
    }
    std::sort(r.begin(), r.end());
    return r;
}

/// Positive roots u0 <= u1 for admissible (S, |F|); equality gives u0 = u1 = sqrt(2S).
inline std::pair<double, double> cuspon_roots(double S, double F) {
    if (!flux_admissible(S, F)) throw AdmissibilityError("fluxes violate 0 < 3|F| <= (2S)^{3/2}");
    const double Fa = std::abs(F);
    if (std::abs(3.0 * Fa - std::pow(2.0 * S, 1.5)) <= 1e-12 * std::pow(2.0 * S, 1.5)) {
        const double a = std::sqrt(2.0 * S);
        return {a, a};
    }
    const auto r = flux_cubic_roots(S, Fa);
    return {r[1], r[2]};
}

/// True if the cubic is positive between two positive roots, the only way to get a
/// smooth periodic wave of one sign. The roots sum to zero, so this never happens.
inline bool admits_smooth_periodic(double S, double F) {
    for (double f : {F, -F}) {
        const auto r = flux_cubic_roots(S, f);
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            if (!(r[i] > 0.0) || !(r[i + 1] > r[i])) continue;
            const double m = 0.5 * (r[i] + r[i + 1]);
            if (f - S * m + m * m * m / 6.0 > 0.0) return true;
        }
    }
    return false;
}

/// Dissipation rate F_- - F_+ of the shock layer joining u_minus > u_plus.
inline double dissipation_rate(double u_minus, double u_plus) {
    if (u_minus < u_plus) throw DomainError("entropy violation: need u_minus >= u_plus");
    const double d = u_minus - u_plus;
    return d * d * d / 12.0;
}

namespace detail {

/// H and its inverse in a parameter t where dH/dt is smooth:
///   u0 < u1: v = u0 sin^2 t on [0, pi/2];  u0 = u1: v = u0 (1 - e^{-t^2}) on [0, inf).
struct WaveParam {
    double u0, u1;
    bool solitary;

    WaveParam(double a, double b) : u0(a), u1(b), solitary(a == b) {
        if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("wave roots need u0 > 0");
        if (!(b >= a) || !std::isfinite(b)) throw DomainError("wave roots need u1 >= u0");
    }

    double v(double t) const {
        if (solitary) return -u0 * std::expm1(-t * t);
        const double s = std::sin(t);
        return u0 * s * s;
    }
    /// u0 - v without cancellation
    double gap(double t) const {
        if (solitary) return u0 * std::exp(-t * t);
        const double c = std::cos(t);
        return u0 * c * c;
    }
    double dHdt(double t) const {
        const double vv = v(t);
        if (solitary) return 2.0 * t * std::sqrt(3.0 * vv / (2.0 * u0 + vv));
        const double s = std::sin(t);
        return 2.0 * std::sqrt(3.0) * u0 * s * s / std::sqrt((u1 - vv) * (u0 + u1 + vv));
    }
    /// d eta / dx at parameter t
    double slope(double t) const {
        const double vv = v(t);
        if (!(vv > 0.0)) return std::numeric_limits<double>::infinity();
        if (solitary) return gap(t) * std::sqrt((2.0 * u0 + vv) / (3.0 * vv));
        return std::sqrt(gap(t) * (u1 - vv) * (u0 + u1 + vv) / (3.0 * vv));
    }
    double t_of_eta(double eta) const {
        if (solitary) return std::sqrt(-std::log1p(-eta / u0));
        return std::asin(std::sqrt(std::min(1.0, eta / u0)));
    }
    double t_end() const { return solitary ? std::numeric_limits<double>::infinity() : 0.5 * std::numbers::pi; }

    double H_direct(double t) const {
        if (t <= 0.0) return 0.0;
        auto f = [this](double s) { return dHdt(s); };
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-14);
    }
};

/// Tabulated H on 4096 parameter nodes, monotone cubic guess for the inverse, Newton polish.
class WaveTable {
public:
    WaveTable(double u0, double u1, std::size_t nodes = 4096) : p_(u0, u1) {
        t_max_ = p_.solitary ? kSolitaryTail : p_.t_end();
        t_.resize(nodes);
        G_.resize(nodes);
        auto f = [this](double s) { return p_.dHdt(s); };
        for (std::size_t k = 0; k < nodes; ++k) t_[k] = t_max_ * static_cast<double>(k) / static_cast<double>(nodes - 1);
        G_[0] = 0.0;
        for (std::size_t k = 1; k < nodes; ++k)
            G_[k] = G_[k - 1] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, t_[k - 1], t_[k], 6, 1e-13);
        inverse_ = std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(std::vector<double>(G_),
                                                                                            std::vector<double>(t_));
    }

    const WaveParam& param() const { return p_; }
    /// H(u0); infinite for the solitary cuspon
    double x_star() const { return p_.solitary ? std::numeric_limits<double>::infinity() : G_.back(); }

    double H(double t) const {
        if (t <= 0.0) return 0.0;
        if (p_.solitary && t >= t_max_) return G_.back() + t * t - t_max_ * t_max_;
        t = std::min(t, t_max_);
        const std::size_t k = cell(t);
        return G_[k] + partial(k, t);
    }

    double t_of_x(double x) const {
        if (!(x >= 0.0)) throw DomainError("wave abscissa must be nonnegative");
        if (x == 0.0) return 0.0;
        if (x >= G_.back()) {
            // past the table the solitary integrand is 2t to double precision
            if (p_.solitary) return std::sqrt(x - G_.back() + t_max_ * t_max_);
            return t_max_;
        }
        const std::size_t k = static_cast<std::size_t>(std::upper_bound(G_.begin(), G_.end(), x) - G_.begin()) - 1;
        double lo = t_[k], hi = t_[k + 1];
        double t = std::clamp((*inverse_)(x), lo, hi);
        for (int it = 0; it < 60; ++it) {
            const double r = G_[k] + partial(k, t) - x;
            (r > 0.0 ? hi : lo) = t;
            const double d = p_.dHdt(t);
            double tn = d > 0.0 ? t - r / d : 0.5 * (lo + hi);
            if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
            const bool done = std::abs(tn - t) <= 1e-16 * t || hi - lo <= 1e-16 * hi;
            t = tn;
            if (done) break;
        }
        return t;
    }

    double eta(double x) const { return p_.v(t_of_x(x)); }
    double deta(double x) const { return x == 0.0 ? std::numeric_limits<double>::infinity() : p_.slope(t_of_x(x)); }

private:
    static constexpr double kSolitaryTail = 7.0;

    std::size_t cell(double t) const {
        const double h = t_[1] - t_[0];
        return std::min(static_cast<std::size_t>(t / h), t_.size() - 2);
    }
    double partial(std::size_t k, double t) const {
        if (t <= t_[k]) return 0.0;
        return boost::math::quadrature::gauss<double, 20>::integrate([this](double s) { return p_.dHdt(s); }, t_[k], t);
    }

    WaveParam p_;
    double t_max_;
    std::vector<double> t_, G_;
    std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> inverse_;
};

} // namespace detail

/// H(eta) for roots u0 <= u1 by adaptive quadrature in the smoothing parameter.
inline double wave_profile(double eta, double u0, double u1) {
    const detail::WaveParam p(u0, u1);
    if (!(eta >= 0.0)) throw DomainError("eta must be nonnegative");
    if (!(eta < u0)) throw DomainError("eta must stay below u0 (H(u0) is the half period, infinite for cuspons)");
    return p.H_direct(p.t_of_eta(eta));
}

/// x* = H(u0), the half period of the periodic cuspon with roots u0 < u1 (in units of ell).
inline double periodic_half_period(double u0, double u1) {
    if (!(u1 > u0)) throw DomainError("periodic cuspons need u0 < u1");
    const detail::WaveParam p(u0, u1);
    return p.H_direct(p.t_end());
}

enum class WaveKind { cuspon, periodic_cuspon, shock_layer, composite };
enum class SegmentShape { left_tail, right_tail, arch, cuspon };
enum class JunctionType { dissipative, conservative, energy_generating };
enum class WaveClass { conservative, dissipative_flux, energy_generating };

inline const char* to_string(WaveKind k) {
    switch (k) {
    case WaveKind::cuspon: return "cuspon";
    case WaveKind::periodic_cuspon: return "periodic_cuspon";
    case WaveKind::shock_layer: return "shock_layer";
    case WaveKind::composite: return "composite";
    }
    return "?";
}
inline const char* to_string(JunctionType k) {
    switch (k) {
    case JunctionType::dissipative: return "dissipative";
    case JunctionType::conservative: return "conservative";
    case JunctionType::energy_generating: return "energy_generating";
    }
    return "?";
}
inline const char* to_string(WaveClass k) {
    switch (k) {
    case WaveClass::conservative: return "conservative";
    case WaveClass::dissipative_flux: return "dissipative_flux";
    case WaveClass::energy_generating: return "energy_generating";
    }
    return "?";
}

/// Input to compose_wave: one piece between consecutive zeros (tails run to infinity).
struct WaveSegment {
    SegmentShape shape = SegmentShape::arch;
    double S = 0.5;
    double F = 1.0 / 3.0;
};

/// A placed piece of a wave in the moving frame.
struct SegmentInfo {
    SegmentShape shape = SegmentShape::cuspon;
    double x_begin = 0.0, x_end = 0.0;
    double zero = 0.0;
    double F = 0.0;
    double u0 = 0.0, u1 = 0.0;
    int sign = 1;
};

struct Junction {
    double x = 0.0;
    double F_left = 0.0, F_right = 0.0;
    double dF = 0.0;
    JunctionType type = JunctionType::conservative;
};

struct TravelingWave {
    WaveKind kind = WaveKind::cuspon;
    double u0 = 0.0, u1 = 0.0;
    double S = 0.0;
    std::vector<double> F;  // per segment
    double c = 0.0;
    double ell = 1.0;
    double period = std::numeric_limits<double>::infinity();
    std::vector<SegmentInfo> segments;
    std::vector<Junction> junctions;
    WaveClass classification = WaveClass::conservative;
    bool nonincreasing = false;

    // sampled profile at t = 0; u_x is NaN at zeros of u - c
    std::vector<double> x, u, ux;
    std::vector<int> segment_id;
    std::vector<double> F_segment;

    // exact evaluation at t = 0
    std::function<double(double)> u_at, ux_at;
    std::function<int(double)> segment_at;

    double value(double xx, double t = 0.0) const { return u_at(xx - c * t); }
};

namespace detail {

struct Piece {
    SegmentInfo info;
    std::shared_ptr<const WaveTable> table;
};

struct PiecewiseProfile {
    std::vector<Piece> pieces;
    double ell = 1.0;
    double period = std::numeric_limits<double>::infinity();
    double c = 0.0;

    int index(double& x) const {
        if (std::isfinite(period)) {
            const double k = std::floor(x / period);
            x -= k * period;
            return static_cast<int>(k);
        }
        for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
            if (x < pieces[i].info.x_end) return static_cast<int>(i);
        return static_cast<int>(pieces.size()) - 1;
    }
    const Piece& piece(int idx) const { return std::isfinite(period) ? pieces[0] : pieces[static_cast<std::size_t>(idx)]; }

    // distance to the zero in units of ell, and the orientation ds/dx
    static std::pair<double, double> local(const SegmentInfo& s, double x, double ell) {
        switch (s.shape) {
        case SegmentShape::left_tail: return {std::max(0.0, (s.zero - x) / ell), -1.0};
        case SegmentShape::right_tail: return {std::max(0.0, (x - s.zero) / ell), 1.0};
        case SegmentShape::cuspon: return {std::abs(x - s.zero) / ell, x < s.zero ? -1.0 : 1.0};
        case SegmentShape::arch: {
            const double dl = x - s.x_begin, dr = s.x_end - x;
            return dl <= dr ? std::pair{std::max(0.0, dl) / ell, 1.0} : std::pair{std::max(0.0, dr) / ell, -1.0};
        }
        }
        return {0.0, 1.0};
    }

    double u(double x) const {
        const int i = index(x);
        const auto& p = piece(i);
        const auto [s, o] = local(p.info, x, ell);
        (void)o;
        return c + p.info.sign * p.table->eta(s);
    }
    double ux(double x) const {
        const int i = index(x);
        const auto& p = piece(i);
        const auto [s, o] = local(p.info, x, ell);
        if (s == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return p.info.sign * o * p.table->deta(s) / ell;
    }
};

inline void check_ell(double ell) {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw InputError("ell must be positive");
}

inline void finish(TravelingWave& w, std::shared_ptr<const PiecewiseProfile> prof, const std::vector<double>& xs) {
    w.u_at = [prof](double x) { return prof->u(x); };
    w.ux_at = [prof](double x) { return prof->ux(x); };
    w.segment_at = [prof](double x) { return prof->index(x); };
    w.x = xs;
    w.u.resize(xs.size());
    w.ux.resize(xs.size());
    w.segment_id.resize(xs.size());
    w.F_segment.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        w.u[i] = prof->u(xs[i]);
        w.ux[i] = prof->ux(xs[i]);
        const int id = w.segment_at(xs[i]);
        w.segment_id[i] = id;
        w.F_segment[i] = std::isfinite(w.period) ? w.F[0] : w.F[static_cast<std::size_t>(id)];
    }
}

inline JunctionType classify_jump(double dF, double scale) {
    if (std::abs(dF) <= 1e-12 * scale) return JunctionType::conservative;
    return dF < 0.0 ? JunctionType::dissipative : JunctionType::energy_generating;
}

inline WaveClass classify_wave(const std::vector<Junction>& js) {
    bool all_zero = true, all_nonpos = true;
    for (const auto& j : js) {
        if (j.type != JunctionType::conservative) all_zero = false;
        if (j.type == JunctionType::energy_generating) all_nonpos = false;
    }
    if (all_zero) return WaveClass::conservative;
    return all_nonpos ? WaveClass::dissipative_flux : WaveClass::energy_generating;
}

} // namespace detail

/// Solitary cuspon u = eta(|x|/ell) sgn(u0), tending to u0 at infinity, cusp at 0.
inline TravelingWave sample_cuspon(double u0, double ell, const std::vector<double>& x_grid) {
    detail::check_ell(ell);
    if (u0 == 0.0 || !std::isfinite(u0)) throw DomainError("cuspon amplitude must be nonzero");
    const double a = std::abs(u0);
    const int sg = u0 > 0.0 ? 1 : -1;
    auto prof = std::make_shared<detail::PiecewiseProfile>();
    prof->ell = ell;
    SegmentInfo s;
    s.shape = SegmentShape::cuspon;
    s.x_begin = -std::numeric_limits<double>::infinity();
    s.x_end = std::numeric_limits<double>::infinity();
    s.F = sg * a * a * a / 3.0;
    s.u0 = s.u1 = a;
    s.sign = sg;
    prof->pieces.push_back({s, std::make_shared<detail::WaveTable>(a, a)});
    TravelingWave w;
    w.kind = WaveKind::cuspon;
    w.u0 = w.u1 = u0;
    w.S = 0.5 * a * a;
    w.F = {s.F};
    w.ell = ell;
    w.segments = {s};
    w.classification = WaveClass::conservative;
    detail::finish(w, prof, x_grid);
    return w;
}

/// Periodic cuspon with roots 0 < u0 < u1: zeros at even multiples of x* ell,
/// maximum u0 at odd multiples. Default sampling is one period centred on a zero.
inline TravelingWave sample_periodic_cuspon(double u0, double u1, double ell,
                                            std::optional<std::vector<double>> x_grid = std::nullopt) {
    detail::check_ell(ell);
    if (u0 == u1) throw DomainError("u0 = u1 gives the solitary cuspon; use sample_cuspon");
    if (!(u0 > 0.0) || !(u1 > u0) || !std::isfinite(u1)) throw DomainError("periodic cuspons need 0 < u0 < u1");
    auto table = std::make_shared<detail::WaveTable>(u0, u1);
    const double half = table->x_star() * ell;
    auto prof = std::make_shared<detail::PiecewiseProfile>();
    prof->ell = ell;
    prof->period = 2.0 * half;
    SegmentInfo s;
    s.shape = SegmentShape::arch;
    s.x_begin = 0.0;
    s.x_end = 2.0 * half;
    s.zero = 0.0;
    const auto fl = cuspon_flux(u0, u1);
    s.F = fl.F;
    s.u0 = u0;
    s.u1 = u1;
    prof->pieces.push_back({s, table});
    TravelingWave w;
    w.kind = WaveKind::periodic_cuspon;
    w.u0 = u0;
    w.u1 = u1;
    w.S = fl.S;
    w.F = {fl.F};
    w.ell = ell;
    w.period = 2.0 * half;
    w.segments = {s};
    w.classification = WaveClass::conservative;
    std::vector<double> xs;
    if (x_grid) {
        xs = *x_grid;
    } else {
        const std::size_t n = 1025;
        xs.resize(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    detail::finish(w, prof, xs);
    return w;
}

/// Shock layer u = c - eta(|x|/ell) sgn(x) at t = 0 with c = (u_- + u_+)/2 and
/// amplitude (u_- - u_+)/2. Fluxes are reported in the frame moving with c.
inline TravelingWave sample_shock_layer(double u_minus, double u_plus, double ell, const std::vector<double>& x_grid) {
    detail::check_ell(ell);
    if (!(u_minus > u_plus)) throw DomainError("entropy violation: shock layers need u_minus > u_plus");
    const double a = 0.5 * (u_minus - u_plus);
    auto table = std::make_shared<detail::WaveTable>(a, a);
    auto prof = std::make_shared<detail::PiecewiseProfile>();
    prof->ell = ell;
    prof->c = 0.5 * (u_minus + u_plus);
    const double inf = std::numeric_limits<double>::infinity();
    SegmentInfo l{SegmentShape::left_tail, -inf, 0.0, 0.0, a * a * a / 3.0, a, a, 1};
    SegmentInfo r{SegmentShape::right_tail, 0.0, inf, 0.0, -a * a * a / 3.0, a, a, -1};
    prof->pieces = {{l, table}, {r, table}};
    TravelingWave w;
    w.kind = WaveKind::shock_layer;
    w.u0 = w.u1 = a;
    w.S = 0.5 * a * a;
    w.F = {l.F, r.F};
    w.c = prof->c;
    w.ell = ell;
    w.segments = {l, r};
    w.junctions = {{0.0, l.F, r.F, r.F - l.F, JunctionType::dissipative}};
    w.classification = WaveClass::dissipative_flux;
    w.nonincreasing = true;
    detail::finish(w, prof, x_grid);
    return w;
}

/// Stationary composite: a single cuspon segment, or left_tail, arch..., right_tail with
/// a shared S. Tails need 3|F| = (2S)^{3/2}; arches need strict inequality. The first
/// zero is placed at x = 0.
inline TravelingWave compose_wave(const std::vector<WaveSegment>& segs, double ell, const std::vector<double>& x_grid) {
    detail::check_ell(ell);
    if (segs.empty()) throw InputError("composite wave needs at least one segment");
    const double S = segs[0].S;
    for (const auto& s : segs) {
        if (!(std::abs(s.S - S) <= 1e-12 * std::abs(S))) throw InputError("composite segments must share S");
        if (!flux_admissible(s.S, s.F)) throw AdmissibilityError("segment fluxes violate 0 < 3|F| <= (2S)^{3/2}");
    }
    const bool single = segs.size() == 1;
    if (single && segs[0].shape != SegmentShape::cuspon)
        throw AdmissibilityError("a single segment must be a whole cuspon");
    if (!single) {
        if (segs.front().shape != SegmentShape::left_tail || segs.back().shape != SegmentShape::right_tail)
            throw AdmissibilityError("composite waves run from a left tail to a right tail");
        for (std::size_t i = 1; i + 1 < segs.size(); ++i)
            if (segs[i].shape != SegmentShape::arch) throw AdmissibilityError("interior segments must be arches");
    }
    const double inf = std::numeric_limits<double>::infinity();
    auto prof = std::make_shared<detail::PiecewiseProfile>();
    prof->ell = ell;
    TravelingWave w;
    w.kind = single ? WaveKind::cuspon : WaveKind::composite;
    w.S = S;
    w.ell = ell;
    double pos = 0.0;
    double fmax = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& sp = segs[i];
        auto [r0, r1] = cuspon_roots(sp.S, sp.F);
        const bool tail = sp.shape != SegmentShape::arch;
        if (tail && r0 != r1) throw AdmissibilityError("tails and cuspons need 3|F| = (2S)^{3/2}");
        if (!tail && r0 == r1) throw AdmissibilityError("arches need 3|F| < (2S)^{3/2}");
        SegmentInfo s;
        s.shape = sp.shape;
        s.F = sp.F;
        s.u0 = r0;
        s.u1 = r1;
        s.sign = sp.F > 0.0 ? 1 : -1;
        auto table = std::make_shared<detail::WaveTable>(r0, r1);
        switch (sp.shape) {
        case SegmentShape::cuspon: s.x_begin = -inf, s.x_end = inf, s.zero = 0.0; break;
        case SegmentShape::left_tail: s.x_begin = -inf, s.x_end = 0.0, s.zero = 0.0; break;
        case SegmentShape::arch:
            s.x_begin = pos;
            s.x_end = pos + 2.0 * table->x_star() * ell;
            s.zero = pos;
            pos = s.x_end;
            break;
        case SegmentShape::right_tail: s.x_begin = pos, s.x_end = inf, s.zero = pos; break;
        }
        fmax = std::max(fmax, std::abs(sp.F));
        prof->pieces.push_back({s, table});
        w.segments.push_back(s);
        w.F.push_back(sp.F);
    }
    for (std::size_t i = 0; i + 1 < w.segments.size(); ++i) {
        const double dF = w.F[i + 1] - w.F[i];
        w.junctions.push_back({w.segments[i].x_end, w.F[i], w.F[i + 1], dF, detail::classify_jump(dF, fmax)});
    }
    w.classification = detail::classify_wave(w.junctions);
    w.nonincreasing = segs.size() == 2 && w.segments[0].sign > 0 && w.segments[1].sign < 0;
    w.u0 = w.segments[0].sign * w.segments[0].u0;
    w.u1 = w.segments[0].sign * w.segments[0].u1;
    detail::finish(w, prof, x_grid);
    return w;
}

/// Galilean boost: the same profile carried at speed c + dc.
inline TravelingWave boost_wave(const TravelingWave& w, double dc) {
    TravelingWave b = w;
    b.c = w.c + dc;
    auto uf = w.u_at;
    b.u_at = [uf, dc](double x) { return uf(x) + dc; };
    for (double& v : b.u) v += dc;
    return b;
}

/// Refit (S, F) on each segment from the sampled profile in the frame moving with c:
/// least squares of u u_x^2/2 - u^3/6 = F - S u over samples away from the zeros.
inline std::vector<FluxPair> rederive_fluxes(const TravelingWave& w) {
    std::vector<FluxPair> out;
    const std::size_t nseg = std::isfinite(w.period) ? 1 : w.segments.size();
    for (std::size_t k = 0; k < nseg; ++k) {
        double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double scale = std::max(std::abs(w.segments[k].u0), std::abs(w.segments[k].u1));
        for (std::size_t i = 0; i < w.x.size(); ++i) {
            if (!std::isfinite(w.period) && w.segment_id[i] != static_cast<int>(k)) continue;
            const double v = w.u[i] - w.c;
            if (!std::isfinite(w.ux[i]) || std::abs(v) < 1e-3 * scale) continue;
            const double y = 0.5 * v * w.ux[i] * w.ux[i] * w.ell * w.ell - v * v * v / 6.0;
            const double xx = -v;
            n += 1;
            sx += xx;
            sy += y;
            sxx += xx * xx;
            sxy += xx * y;
        }
        const double det = n * sxx - sx * sx;
        if (n < 2 || det <= 0.0) throw InputError("segment has too few samples to refit its fluxes");
        out.push_back({(sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det});
    }
    return out;
}

/// max |u u_x^2/2 - (F - S u + u^3/6)| / max|u0|^3 over the samples, with u_x taken by
/// central differences of the exact evaluator. Points within 10^-3 ell of a zero are skipped.
inline double flux_residual(const TravelingWave& w) {
    const double scale = std::max(std::abs(w.u0), std::abs(w.u1));
    double worst = 0.0;
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        const double x = w.x[i];
        double dist = std::numeric_limits<double>::infinity();
        if (std::isfinite(w.period)) {
            const double r = x - w.period * std::floor(x / w.period);
            dist = std::min(r, w.period - r);
        } else {
            for (const auto& s : w.segments) {
                if (std::isfinite(s.x_begin)) dist = std::min(dist, std::abs(x - s.x_begin));
                if (std::isfinite(s.x_end)) dist = std::min(dist, std::abs(x - s.x_end));
                dist = std::min(dist, std::abs(x - s.zero));
            }
        }
        if (dist < 1e-3 * w.ell) continue;
        const double h = std::min(1e-3 * w.ell, 2e-3 * dist);
        const double d1 = (w.u_at(x + h) - w.u_at(x - h)) / (2 * h);
        const double d2 = (w.u_at(x + 2 * h) - w.u_at(x - 2 * h)) / (4 * h);
        const double ux = (4.0 * d1 - d2) / 3.0 * w.ell;
        const double v = w.u_at(x) - w.c;
        const double F = w.F_segment[i];
        const double r = 0.5 * v * ux * ux - (F - w.S * v + v * v * v / 6.0);
        worst = std::max(worst, std::abs(r) / (scale * scale * scale));
    }
    return worst;
}

/// Log-log slope of |u - c| against distance from x0 on the side sgn(side),
/// distances log-spaced in [lo, hi] ell.
inline double cusp_exponent(const TravelingWave& w, double x0, int side = 1, double lo = 1e-6, double hi = 1e-3,
                            int samples = 32) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < samples; ++k) {
        const double d = w.ell * lo * std::pow(hi / lo, static_cast<double>(k) / (samples - 1));
        const double v = std::abs(w.u_at(x0 + (side >= 0 ? d : -d)) - w.c);
        const double X = std::log(d), Y = std::log(v);
        n += 1;
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace rburgers
