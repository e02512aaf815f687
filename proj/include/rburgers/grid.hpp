#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rburgers/errors.hpp"

namespace rburgers {

enum class BoundaryKind { periodic, compact_support };

struct Boundary {
    BoundaryKind kind = BoundaryKind::compact_support;
    /// Pad length in units of ell. Data inside the pad must vanish on compact grids.
    double pad_ells = 10.0;

    static Boundary periodic() { return {BoundaryKind::periodic, 0.0}; }
    static Boundary compact(double pad_ells = 10.0) { return {BoundaryKind::compact_support, pad_ells}; }
    bool is_periodic() const { return kind == BoundaryKind::periodic; }
};

inline std::string to_string(BoundaryKind k) {
    return k == BoundaryKind::periodic ? "periodic" : "compact";
}

/// Uniform grid x_i = x0 + i*h, i < n. A periodic grid has period n*h.
class UniformGrid {
public:
    UniformGrid() = default;

    static UniformGrid periodic(double x0, double period, std::size_t n) {
        if (n < 4) throw InputError("periodic grid needs at least 4 nodes");
        if (!(period > 0.0) || !std::isfinite(period)) throw InputError("period must be positive");
        return UniformGrid(x0, period / static_cast<double>(n), n, Boundary::periodic());
    }

    /// Closed interval [a, b] sampled with n nodes including both ends.
    static UniformGrid compact(double a, double b, std::size_t n, double pad_ells = 10.0) {
        if (n < 5) throw InputError("compact grid needs at least 5 nodes");
        if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw InputError("grid interval must satisfy a < b");
        return UniformGrid(a, (b - a) / static_cast<double>(n - 1), n, Boundary::compact(pad_ells));
    }

    double x(std::size_t i) const { return x0_ + h_ * static_cast<double>(i); }
    double x0() const { return x0_; }
    double h() const { return h_; }
    std::size_t size() const { return n_; }
    const Boundary& boundary() const { return bc_; }
    bool periodic_bc() const { return bc_.is_periodic(); }
    double period() const { return h_ * static_cast<double>(n_); }
    double x_last() const { return x(n_ - 1); }

    std::vector<double> nodes() const {
        std::vector<double> xs(n_);
        for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
        return xs;
    }

    bool same_as(const UniformGrid& o) const {
        return n_ == o.n_ && bc_.kind == o.bc_.kind && std::abs(x0_ - o.x0_) <= 1e-12 * std::max(1.0, std::abs(x0_)) &&
               std::abs(h_ - o.h_) <= 1e-12 * h_;
    }

private:
    UniformGrid(double x0, double h, std::size_t n, Boundary bc) : x0_(x0), h_(h), n_(n), bc_(bc) {}

    double x0_ = 0.0;
    double h_ = 1.0;
    std::size_t n_ = 0;
    Boundary bc_{};
};

/// Samples of a field on a uniform grid.
struct GridFunction1D {
    UniformGrid grid;
    std::vector<double> values;

    GridFunction1D() = default;
    GridFunction1D(UniformGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw InputError("value count does not match grid size");
    }

    static GridFunction1D sample(const UniformGrid& g, const std::function<double(double)>& f) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
        return {g, std::move(v)};
    }

    /// Build from tabulated (x, value) pairs. Spacing must be uniform to 1e-12 relative.
    static GridFunction1D from_samples(std::span<const double> xs, std::span<const double> vs, Boundary bc) {
        if (xs.size() != vs.size()) throw InputError("x and value columns differ in length");
        if (xs.size() < 5) throw InputError("need at least 5 samples");
        const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
        if (!(h > 0.0)) throw InputError("samples must be increasing");
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-12 * std::max(1.0, std::abs(xs[i])) + 1e-12 * h)
                throw ConfigError("samples are not uniformly spaced");
        }
        UniformGrid g = bc.is_periodic()
                            ? UniformGrid::periodic(xs.front(), h * static_cast<double>(xs.size()), xs.size())
                            : UniformGrid::compact(xs.front(), xs.back(), xs.size(), bc.pad_ells);
        return {g, std::vector<double>(vs.begin(), vs.end())};
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    void check_finite(const char* what) const {
        for (double v : values)
            if (!std::isfinite(v)) throw InputError(std::string(what) + " contains non-finite samples");
    }
};

/// Kernel G(x) = exp(-|x|/ell) / (2 ell).
struct KernelSpec {
    enum class Wrap { follow_grid, periodic, whole_line };

    double ell = 1.0;
    Wrap wrap = Wrap::follow_grid;

    KernelSpec() = default;
    explicit KernelSpec(double l, Wrap w = Wrap::follow_grid) : ell(l), wrap(w) {
        if (!(l > 0.0) || !std::isfinite(l)) throw InputError("ell must be positive and finite");
    }

    bool wraps(const UniformGrid& g) const {
        if (wrap == Wrap::periodic && !g.periodic_bc()) throw ConfigError("periodic kernel applied to compact-support data");
        if (wrap == Wrap::whole_line && g.periodic_bc()) throw ConfigError("whole-line kernel applied to periodic data");
        return g.periodic_bc();
    }
};

inline double green_kernel(double x, double ell) { return std::exp(-std::abs(x) / ell) / (2.0 * ell); }

/// Trapezoid integral of samples; a periodic grid uses the rectangle rule.
inline double grid_integral(const UniformGrid& g, std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s += v;
    if (!g.periodic_bc()) s -= 0.5 * (f.front() + f.back());
    return s * g.h();
}

} // namespace rburgers

namespace rburgers {

/// Four-point Lagrange interpolation of grid samples. Compact grids extrapolate
/// from the end stencils; periodic grids wrap.
inline double interp_cubic(const UniformGrid& g, const std::vector<double>& f, double x) {
    const std::size_t n = g.size();
    double s = (x - g.x0()) / g.h();
    long i;
    if (g.periodic_bc()) {
        const double nn = static_cast<double>(n);
        s = std::fmod(s, nn);
        if (s < 0) s += nn;
        i = static_cast<long>(std::floor(s));
    } else {
        i = std::clamp(static_cast<long>(std::floor(s)), 1L, static_cast<long>(n) - 3);
    }
    const double t = s - static_cast<double>(i);
    auto at = [&](long k) {
        const long nn = static_cast<long>(n);
        return f[static_cast<std::size_t>(((k % nn) + nn) % nn)];
    };
    const double a = at(i - 1), b = at(i), c = at(i + 1), d = at(i + 2);
    const double tm = t - 1.0, tp = t + 1.0, t2 = t - 2.0;
    return (-t * tm * t2 * a + d * tp * t * tm) / 6.0 + 0.5 * (tp * tm * t2 * b - tp * t * t2 * c);
}

} // namespace rburgers
