#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rburgers/greens.hpp"

using namespace rburgers;

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST(Greens, SinPeriodicMatchesClosedForm) {
    for (double ell : {0.25, 0.5, 1.0, 2.0}) {
        auto g = UniformGrid::periodic(0.0, 2.0 * std::numbers::pi, 1024);
        auto u = GridFunction1D::sample(g, [](double x) { return std::sin(x); });
        auto nl = compute_nonlocal(u, KernelSpec(ell));
        double errP = 0.0, errPx = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            errP = std::max(errP, std::abs(nl.P[i] - oracle::sin_P(g.x(i), ell)));
            errPx = std::max(errPx, std::abs(nl.Px[i] - oracle::sin_Px(g.x(i), ell)));
        }
        EXPECT_LT(errP / 0.5, 1e-6) << "ell=" << ell;
        EXPECT_LT(errPx / 0.5, 1e-6) << "ell=" << ell;
    }
}

TEST(Greens, HelmholtzResidualPeriodic) {
    const double ell = 1.0;
    auto g = UniformGrid::periodic(0.0, 2.0 * std::numbers::pi, 1024);
    auto u = GridFunction1D::sample(g, [](double x) { return std::sin(x); });
    auto P = compute_P(u, KernelSpec(ell));
    auto Pxx = second_derivative(g, P.values);
    auto ux = derivative(g, u.values);
    std::vector<double> res(g.size()), f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f[i] = 0.5 * ux[i] * ux[i];
        res[i] = P[i] - ell * ell * Pxx[i] - f[i];
    }
    EXPECT_LT(max_abs(res) / max_abs(f), 1e-6);
}

TEST(Greens, GaussianCompactMatchesDirectQuadrature) {
    const double ell = 0.7;
    auto du = [](double x) { return -2.0 * x * std::exp(-x * x); };
    auto f = [&](double x) { return 0.5 * du(x) * du(x); };
    auto g = UniformGrid::compact(-12.0, 12.0, 2049);
    auto u = GridFunction1D::sample(g, [](double x) { return std::exp(-x * x); });
    auto nl = compute_nonlocal(u, KernelSpec(ell));
    double pmax = 0.0, err = 0.0, errx = 0.0, pxmax = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 16) {
        const double Pd = oracle::direct_P(f, g.x(i), -12.0, 12.0, ell);
        const double Pxd = oracle::direct_Px(f, g.x(i), -12.0, 12.0, ell);
        pmax = std::max(pmax, std::abs(Pd));
        pxmax = std::max(pxmax, std::abs(Pxd));
        err = std::max(err, std::abs(nl.P[i] - Pd));
        errx = std::max(errx, std::abs(nl.Px[i] - Pxd));
    }
    EXPECT_LT(err / pmax, 1e-6);
    EXPECT_LT(errx / pxmax, 1e-6);
}

TEST(Greens, PiecewiseLinearRampAtOrigin) {
    for (double ell : {0.5, 1.0, 2.0}) {
        auto g = UniformGrid::compact(-30.0, 30.0, 6001);
        auto u = GridFunction1D::sample(g, [](double x) { return std::clamp(x, -1.0, 1.0); });
        auto P = compute_P(u, KernelSpec(ell), SourceRule::piecewise_linear);
        EXPECT_NEAR(P[3000], oracle::ramp_P0(ell), 1e-6) << "ell=" << ell;
    }
}

TEST(Greens, ConstantStateHasZeroNonlocalTerm) {
    auto g = UniformGrid::periodic(-5.0, 10.0, 256);
    auto u = GridFunction1D::sample(g, [](double) { return 3.0; });
    auto nl = compute_nonlocal(u, KernelSpec(0.8));
    EXPECT_LT(max_abs(nl.P), 1e-14);
    EXPECT_LT(max_abs(nl.Px), 1e-14);
}

TEST(Greens, ImpulseResponseIsPositive) {
    for (double ell : {0.01, 0.05, 0.2, 1.0, 5.0}) {
        for (bool periodic : {false, true}) {
            const std::size_t n = 200;
            auto g = periodic ? UniformGrid::periodic(0.0, 10.0, n) : UniformGrid::compact(0.0, 10.0, n);
            for (std::size_t spike : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{100}, n - 2, n - 1}) {
                std::vector<double> ux(n, 0.0);
                ux[spike] = 1.0;
                auto nl = nonlocal_from_slope(g, ux, KernelSpec(ell));
                for (double p : nl.P) ASSERT_GE(p, 0.0) << "ell=" << ell << " spike=" << spike;
            }
        }
    }
}

TEST(Greens, PositivityAndYoungBound) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = UniformGrid::periodic(0.0, 2.0 * std::numbers::pi, 256);
        std::array<double, 6> c{};
        for (double& a : c) a = amp(rng);
        auto u = GridFunction1D::sample(g, [&](double x) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k) s += c[k] * std::sin((k + 1) * x + k);
            return s;
        });
        auto ux = derivative(g, u.values);
        double fmax = 0.0;
        for (double v : ux) fmax = std::max(fmax, 0.5 * v * v);
        const double ell = 0.1 + 0.3 * trial;
        auto nl = nonlocal_from_slope(g, ux, KernelSpec(ell));
        for (double p : nl.P) {
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, fmax * (1.0 + 1e-9));
        }
    }
}

TEST(Greens, TranslationCommutes) {
    const double ell = 0.6;
    auto g = UniformGrid::periodic(-10.0, 20.0, 512);
    auto u = GridFunction1D::sample(g, [](double x) { return std::exp(-x * x) + 0.3 * std::exp(-(x - 2) * (x - 2)); });
    auto P = compute_P(u, KernelSpec(ell));
    for (int shift : {1, 7, 100}) {
        std::vector<double> us(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) us[i] = u[(i + g.size() - shift) % g.size()];
        auto Ps = compute_P(GridFunction1D(g, us), KernelSpec(ell));
        for (std::size_t i = 0; i < g.size(); ++i)
            EXPECT_NEAR(Ps[i], P[(i + g.size() - shift) % g.size()], 1e-13);
    }
}

TEST(Greens, QuadraticInAmplitude) {
    const double ell = 0.9;
    auto g = UniformGrid::compact(-15.0, 15.0, 801);
    auto u = GridFunction1D::sample(g, [](double x) { return std::exp(-x * x); });
    auto P = compute_P(u, KernelSpec(ell));
    for (double lam : {-2.0, 0.5, 3.0}) {
        GridFunction1D v = u;
        for (double& x : v.values) x *= lam;
        auto Pl = compute_P(v, KernelSpec(ell));
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(Pl[i], lam * lam * P[i], 1e-13 * lam * lam);
    }
}

TEST(Greens, RejectsBadInput) {
    auto g = UniformGrid::compact(0.0, 1.0, 16);
    std::vector<double> v(16, 0.0);
    v[3] = std::nan("");
    EXPECT_THROW(compute_P(GridFunction1D(g, v), KernelSpec(1.0)), InputError);
    EXPECT_THROW(KernelSpec(0.0), InputError);
    EXPECT_THROW(KernelSpec(-1.0), InputError);
    std::vector<double> ok(16, 0.0);
    EXPECT_THROW(compute_P(GridFunction1D(g, ok), KernelSpec(1.0, KernelSpec::Wrap::periodic)), ConfigError);
    auto gp = UniformGrid::periodic(0.0, 1.0, 16);
    EXPECT_THROW(compute_P(GridFunction1D(gp, ok), KernelSpec(1.0, KernelSpec::Wrap::whole_line)), ConfigError);
}
