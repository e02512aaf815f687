#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "rburgers/grid.hpp"

namespace rburgers {

namespace detail {

// FFTW planning is not thread safe; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Half-spectrum of a real signal (unnormalised forward transform).
using Spectrum = std::vector<std::complex<double>>;

class SpectralPlan {
public:
    explicit SpectralPlan(std::size_t n) : n_(n) {
        std::lock_guard lock(fftw_planner_mutex());
        real_ = fftw_alloc_real(n);
        spec_ = fftw_alloc_complex(n / 2 + 1);
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_, real_, FFTW_ESTIMATE);
    }
    ~SpectralPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    Spectrum forward(const std::vector<double>& f) {
        std::copy(f.begin(), f.end(), real_);
        fftw_execute(fwd_);
        Spectrum out(n_ / 2 + 1);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
        return out;
    }

    /// Inverse including the 1/n normalisation of `forward`.
    std::vector<double> inverse(const Spectrum& c, double scale = 1.0) {
        const double s = scale / static_cast<double>(n_);
        for (std::size_t k = 0; k <= n_ / 2; ++k) {
            const auto v = k < c.size() ? c[k] * s : std::complex<double>{};
            spec_[k][0] = v.real();
            spec_[k][1] = v.imag();
        }
        fftw_execute(bwd_);
        return std::vector<double>(real_, real_ + n_);
    }

private:
    std::size_t n_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_{};
    fftw_plan bwd_{};
};

inline SpectralPlan& plan_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<SpectralPlan>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<SpectralPlan>(n);
    return *slot;
}

template <class Mult>
void spectral_apply(std::vector<double>& f, Mult&& mult) {
    auto& plan = plan_for(f.size());
    auto c = plan.forward(f);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= mult(k);
    f = plan.inverse(c);
}

inline double wavenumber(std::size_t k, const UniformGrid& g) {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / g.period();
}

} // namespace detail

/// d/dx of samples. Spectral on periodic grids, fourth-order differences otherwise.
inline std::vector<double> derivative(const UniformGrid& g, const std::vector<double>& f) {
    const std::size_t n = g.size();
    std::vector<double> d(f);
    if (g.periodic_bc()) {
        detail::spectral_apply(d, [&](std::size_t k) {
            if (2 * k == n) return std::complex<double>(0.0, 0.0);
            return std::complex<double>(0.0, detail::wavenumber(k, g));
        });
        return d;
    }
    const double c = 1.0 / (12.0 * g.h());
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    const std::size_t m = n - 1;
    d[m] = -c * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
    d[m - 1] = -c * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
    return d;
}

inline std::vector<double> second_derivative(const UniformGrid& g, const std::vector<double>& f) {
    const std::size_t n = g.size();
    std::vector<double> d(f);
    if (g.periodic_bc()) {
        detail::spectral_apply(d, [&](std::size_t k) {
            const double kk = detail::wavenumber(k, g);
            return std::complex<double>(-kk * kk, 0.0);
        });
        return d;
    }
    if (n < 6) throw InputError("second derivative needs at least 6 nodes");
    const double c = 1.0 / (12.0 * g.h() * g.h());
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = c * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    d[0] = c * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]);
    d[1] = c * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]);
    const std::size_t m = n - 1;
    d[m] = c * (45.0 * f[m] - 154.0 * f[m - 1] + 214.0 * f[m - 2] - 156.0 * f[m - 3] + 61.0 * f[m - 4] - 10.0 * f[m - 5]);
    d[m - 1] = c * (10.0 * f[m] - 15.0 * f[m - 1] - 4.0 * f[m - 2] + 14.0 * f[m - 3] - 6.0 * f[m - 4] + f[m - 5]);
    return d;
}

/// Band-limited translation f(x) -> f(x - a) on a periodic grid.
inline std::vector<double> spectral_shift(const UniformGrid& g, const std::vector<double>& f, double a) {
    if (!g.periodic_bc()) throw ConfigError("spectral shift needs a periodic grid");
    const std::size_t n = g.size();
    std::vector<double> out(f);
    detail::spectral_apply(out, [&](std::size_t k) {
        const double kk = detail::wavenumber(k, g);
        if (2 * k == n) return std::complex<double>(std::cos(kk * a), 0.0);
        return std::exp(std::complex<double>(0.0, -kk * a));
    });
    return out;
}

inline GridFunction1D derivative(const GridFunction1D& f) { return {f.grid, derivative(f.grid, f.values)}; }

} // namespace rburgers
