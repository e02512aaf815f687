#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rburgers/diagnostics.hpp"

using namespace rburgers;

namespace {

const double kPi = std::numbers::pi;

InitialDatum gaussian_datum() {
    return {[](double x) { return std::exp(-x * x); }, [](double x) { return -2.0 * x * std::exp(-x * x); }, {}};
}

std::vector<double> uniform_times(double t0, double t1, int n) {
    std::vector<double> t;
    for (int k = 0; k <= n; ++k) t.push_back(t0 + (t1 - t0) * k / n);
    return t;
}

LagrangianTrajectory shock_layer_run(std::size_t n, double t_end) {
    const auto w = sample_shock_layer(1.0, -1.0, 1.0, {});
    LagrangianGridSpec gs;
    gs.x_min = -12;
    gs.x_max = 12;
    gs.xi_count = n;
    gs.pad_ells = 0;
    const auto s0 = init_lagrangian({w.u_at, w.ux_at, {0.0}}, gs, 1.0, LagrangianVariant::dissipative);
    LagrangianRun run;
    run.dt = 5e-3;
    for (double t : uniform_times(0, t_end, 40)) run.output_times.push_back(t);
    return evolve_lagrangian(s0, t_end, run);
}

} // namespace

TEST(Energy, ZeroAndSine) {
    const auto g = UniformGrid::periodic(0, 2 * kPi, 256);
    EXPECT_EQ(energy_eulerian(GridFunction1D::sample(g, [](double) { return 0.0; }), 1.0), 0.0);
    EXPECT_NEAR(energy_eulerian(GridFunction1D::sample(g, [](double x) { return std::sin(x); }), 1.0), 2 * kPi, 1e-8);
    EXPECT_NEAR(energy_eulerian(GridFunction1D::sample(g, [](double x) { return std::sin(x); }), 0.5), 1.25 * kPi, 1e-8);
}

TEST(Energy, GaussianOnCompactGrid) {
    // int e^{-2x^2} = int (2x e^{-x^2})^2 = sqrt(pi/2)
    const auto g = UniformGrid::compact(-8, 8, 3201);
    const auto u = GridFunction1D::sample(g, gaussian_datum().u);
    for (double ell : {0.5, 1.0, 2.0})
        EXPECT_NEAR(energy_eulerian(u, ell), std::sqrt(kPi / 2) * (1 + ell * ell), 1e-8);
}

TEST(Energy, ConservativeTrajectoryKeepsEnergy) {
    const double ell = 1.0;
    const auto g = UniformGrid::compact(-12, 12, 2401);
    TimeStepPolicy pol;
    pol.output_times = {0.25, 0.5, 0.75};
    const auto tr = evolve_smooth(GridFunction1D::sample(g, gaussian_datum().u), KernelSpec(ell), 1.0, pol);
    const double e0 = energy_eulerian(tr.state(0), ell);
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        EXPECT_LT(std::abs(energy_eulerian(tr.state(k), ell) - e0) / e0, 1e-6) << tr.times[k];
}

TEST(Energy, EulerianMatchesLagrangianBeforeCrossing) {
    LagrangianGridSpec gs;
    gs.x_min = -8;
    gs.x_max = 8;
    gs.xi_count = 8192;
    const double ell = 1.0;
    auto s = init_lagrangian(gaussian_datum(), gs, ell, LagrangianVariant::dissipative);
    s = evolve_lagrangian(s, 1.0, LagrangianRun{5e-3, {}}).states.back();
    ASSERT_EQ(s.crossed_count(), 0u);
    const auto g = UniformGrid::compact(s.y.front(), s.y.back(), 8001);
    const auto r = reconstruct_eulerian(s, g);
    EXPECT_NEAR(energy_eulerian(g, r.u.values, r.ux.values, ell), lagrangian_energy(s), 1e-5);
}

TEST(TotalVariation, MonotoneAndStepTrain) {
    const auto g = UniformGrid::compact(-3, 3, 301);
    const auto m = GridFunction1D::sample(g, [](double x) { return std::atan(x); });
    EXPECT_NEAR(total_variation(m), std::atan(3.0) - std::atan(-3.0), 1e-14);
    for (int k : {1, 2, 5}) {
        // k unit jumps alternating up and down, none at a node
        const auto s = GridFunction1D::sample(g, [k](double x) {
            const int cell = static_cast<int>(std::floor((x + 3.0) / (6.0 / (k + 1)) + 1e-9));
            return (std::min(cell, k) % 2 == 1) ? 1.0 : 0.0;
        });
        EXPECT_DOUBLE_EQ(total_variation(s), static_cast<double>(k)) << k;
    }
    const auto p = GridFunction1D::sample(UniformGrid::periodic(0, 2 * kPi, 400), [](double x) { return std::sin(x); });
    EXPECT_NEAR(total_variation(p), 4.0, 1e-4);
}

TEST(TotalVariation, DissipativeRunObeysQuadraticBound) {
    const double w = 0.5;
    InitialDatum d{[=](double x) { return 0.5 * (1.0 - std::tanh(x / w)) + 0.3 * std::exp(-(x - 2) * (x - 2)); },
                   [=](double x) {
                       const double c = std::cosh(x / w);
                       return -0.5 / (w * c * c) - 0.6 * (x - 2) * std::exp(-(x - 2) * (x - 2));
                   },
                   {}};
    double M = 0.0;
    for (double x = -8; x <= 8; x += 1e-3) M = std::max(M, d.du(x));
    LagrangianGridSpec gs;
    gs.x_min = -8;
    gs.x_max = 8;
    gs.xi_count = 2048;
    gs.pad_ells = 2;
    const auto s0 = init_lagrangian(d, gs, 0.5, LagrangianVariant::dissipative);
    LagrangianRun run;
    run.dt = 5e-3;
    run.output_times = uniform_times(0, 3, 12);
    const auto tr = evolve_lagrangian(s0, 3.0, run);
    const auto h = history_from(tr, UniformGrid::compact(-6, 7, 1301));
    DiagnosticsOptions opt;
    opt.M = M;
    const auto rep = diagnose(h, opt);
    EXPECT_GT(tr.states.back().crossed_count(), 0u);
    for (std::size_t k = 0; k < rep.times.size(); ++k) EXPECT_LE(rep.tv[k], tv_bound(rep.tv[0], M, rep.times[k]));
    EXPECT_LE(rep.tv_bound_ratio, 1.0);
}

TEST(Oleinik, Bounds) {
    EXPECT_DOUBLE_EQ(oleinik_bound(1.0, std::numeric_limits<double>::infinity()), 2.0);
    EXPECT_DOUBLE_EQ(oleinik_bound(0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(oleinik_bound(1.0, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(oleinik_bound(2.0, std::numeric_limits<double>::infinity(), 1.0), 0.5);
    EXPECT_TRUE(std::isinf(oleinik_bound(0.0, std::numeric_limits<double>::infinity())));
}

TEST(Oleinik, MarginSignsViolations) {
    const auto g = UniformGrid::compact(-2, 2, 401);
    const auto u = GridFunction1D::sample(g, [](double x) { return 1.5 * x; });
    EXPECT_NEAR(oleinik_margin(u, 1.0, std::numeric_limits<double>::infinity()), 0.5, 1e-12);
    EXPECT_NEAR(oleinik_margin(u, 1.0, 2.0), -0.5, 1e-12);
    const std::vector<double> ux{0.1, std::nan(""), -std::numeric_limits<double>::infinity(), 0.5};
    EXPECT_NEAR(oleinik_margin(ux, 4.0, std::numeric_limits<double>::infinity()), 0.0, 1e-15);
}

TEST(WeakResidual, SmoothTrajectoryConverges) {
    const double ell = 1.0;
    std::vector<double> mom, en;
    for (std::size_t n : {301u, 601u, 1201u}) {
        const auto g = UniformGrid::compact(-12, 12, n);
        TimeStepPolicy pol;
        pol.output_times = uniform_times(0, 1.5, 60);
        const auto tr = evolve_smooth(GridFunction1D::sample(g, gaussian_datum().u), KernelSpec(ell), 1.5, pol);
        const auto h = history_from(tr);
        const auto r = weak_residual(h, {0.75, 0.7, 0.5, 1.5});
        mom.push_back(std::abs(r.momentum) / r.momentum_scale);
        en.push_back(std::abs(r.energy) / r.energy_scale);
    }
    for (std::size_t i = 1; i < mom.size(); ++i) {
        EXPECT_LT(mom[i], 0.5 * mom[i - 1]);
        EXPECT_LT(en[i], 0.5 * en[i - 1]);
    }
    EXPECT_LT(mom.back(), 1e-4);
    EXPECT_LT(en.back(), 1e-4);
}

TEST(WeakResidual, CusponIsConservative) {
    const auto w = sample_cuspon(1.0, 1.0, {});
    const std::vector<TestFunction> tfs{{0.5, 0.45, 0.0, 2.0}, {0.5, 0.45, 0.7, 1.5}, {0.5, 0.3, -1.0, 3.0}};
    std::vector<WeakResidual> rs;
    for (const auto& tf : tfs) rs.push_back(weak_residual(w, tf));
    EXPECT_EQ(classify(rs), SolutionClass::conservative);
    EXPECT_EQ(classify(rs, 5e-5), SolutionClass::conservative);
    const auto pc = sample_periodic_cuspon(1.0, 2.0, 1.0);
    const double xs = periodic_half_period(1.0, 2.0);
    EXPECT_EQ(classify({weak_residual(pc, {0.5, 0.45, 0.3 * xs, 1.7 * xs}), weak_residual(pc, {0.5, 0.45, 2 * xs, xs})}),
              SolutionClass::conservative);
}

TEST(WeakResidual, SampledCusponConvergesUnderRefinement) {
    // grid quadrature of the |x|^{-2/3} source loses accuracy like h^{1/3} where psi_x does not vanish
    const auto w = sample_cuspon(1.0, 1.0, {});
    std::vector<double> rel;
    for (std::size_t n : {601u, 4801u}) {
        const auto h = history_from(w, UniformGrid::compact(-3, 3, n), uniform_times(0, 1, 20));
        const auto r = weak_residual(h, {0.5, 0.45, 0.7, 1.5});
        rel.push_back(std::abs(r.momentum) / r.momentum_scale);
    }
    EXPECT_LT(rel[1], 0.7 * rel[0]);
    // centered on the cusp, psi_x vanishes there and the sampled residual is already tiny
    const auto h = history_from(w, UniformGrid::compact(-3, 3, 1201), uniform_times(0, 1, 20));
    EXPECT_EQ(classify({weak_residual(h, {0.5, 0.45, 0.0, 2.0})}), SolutionClass::conservative);
}

TEST(WeakResidual, ShockLayerDissipatesCubicRate) {
    const auto w = sample_shock_layer(1.0, -1.0, 1.0, {});
    const auto r = weak_residual(w, {0.5, 0.45, 0.3, 2.0});
    EXPECT_NEAR(r.energy / (r.psi_center_time * TestFunction::bump(0.0, 0.3, 2.0).f), dissipation_rate(1.0, -1.0), 1e-8);
    EXPECT_EQ(classify({r}), SolutionClass::dissipative);
    EXPECT_EQ(classify({r}, 5e-5), SolutionClass::dissipative);
    // sampled history with the bump centered on the layer
    const auto h = history_from(w, UniformGrid::compact(-4, 4, 1601), uniform_times(0, 1, 40));
    const auto rh = weak_residual(h, {0.5, 0.45, 0.0, 2.0});
    EXPECT_NEAR(rh.energy / rh.psi_center_time, 2.0 / 3.0, 1e-4);
    EXPECT_EQ(classify({rh}), SolutionClass::dissipative);
}

TEST(WeakResidual, MovingShockLayer) {
    // u_- = 1.5, u_+ = -0.5 travels at c = 0.5; the residual is (2^3/12) int a(t) b(ct) dt
    const auto w = sample_shock_layer(1.5, -0.5, 0.7, {});
    const TestFunction tf{0.5, 0.45, 0.25, 2.0};
    const auto r = weak_residual(w, tf);
    double expect = 0.0;
    const std::size_t n = 4001;
    const double dt = 0.9 / (n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = 0.05 + dt * k;
        expect += dt * tf.a(t).f * tf.b(0.5 * t).f;
    }
    EXPECT_NEAR(r.energy, dissipation_rate(1.5, -0.5) * expect, 1e-6);
    EXPECT_EQ(classify({r}), SolutionClass::dissipative);
}

TEST(WeakResidual, EnergyGeneratingJunctionIsInadmissible) {
    const double S = 7.0 / 6.0;
    const double Ft = std::pow(2.0 * S, 1.5) / 3.0;
    std::vector<WaveSegment> segs = {{SegmentShape::left_tail, S, Ft},
                                     {SegmentShape::arch, S, -1.0},
                                     {SegmentShape::arch, S, 1.0},
                                     {SegmentShape::right_tail, S, -Ft}};
    const auto w = compose_wave(segs, 1.0, {});
    ASSERT_EQ(w.junctions[1].type, JunctionType::energy_generating);
    const double xj = w.junctions[1].x;
    const double gap = std::min(xj - w.junctions[0].x, w.junctions[2].x - xj);
    const auto r = weak_residual(w, {0.5, 0.45, xj, 0.9 * gap});
    EXPECT_LT(r.energy, 0.0);
    EXPECT_NEAR(r.energy / r.psi_center_time, -w.junctions[1].dF, 1e-6);
    EXPECT_EQ(classify({r}), SolutionClass::inadmissible);
    // the dissipative neighbours alone pass, the full set does not
    const auto r0 = weak_residual(w, {0.5, 0.45, w.junctions[0].x, 0.9 * gap});
    EXPECT_EQ(classify({r0}), SolutionClass::dissipative);
    EXPECT_EQ(classify({r0, r}), SolutionClass::inadmissible);
}

TEST(WeakResidual, SimulatedShockLayerDissipatesCubicRate) {
    const auto tr = shock_layer_run(2048, 1.0);
    const auto r = weak_residual(tr, {0.5, 0.45, 0.0, 2.0});
    EXPECT_NEAR(r.energy / r.psi_center_time, 2.0 / 3.0, 0.02 * 2.0 / 3.0);
    EXPECT_LT(std::abs(r.momentum), 1e-4 * r.momentum_scale);
    EXPECT_EQ(classify({r}), SolutionClass::dissipative);
}

TEST(WeakResidual, RejectsTestFunctionsOutsideTheWindow) {
    const auto w = sample_cuspon(1.0, 1.0, {});
    const auto h = history_from(w, UniformGrid::compact(-3, 3, 301), uniform_times(0, 1, 10));
    EXPECT_THROW(weak_residual(h, {0.5, 0.6, 0.0, 1.0}), InputError);
    EXPECT_THROW(weak_residual(h, {0.5, 0.4, 2.5, 1.0}), InputError);
    EXPECT_NO_THROW(weak_residual(h, {0.5, 0.4, 1.5, 1.0}));
}

TEST(Report, SeriesAndJson) {
    const auto w = sample_shock_layer(1.0, -1.0, 1.0, {});
    const auto h = history_from(w, UniformGrid::compact(-4, 4, 801), uniform_times(0, 1, 20));
    DiagnosticsOptions opt;
    opt.test_functions = {{0.5, 0.45, 0.0, 2.0}};
    const auto rep = diagnose(h, opt);
    ASSERT_EQ(rep.energy.size(), rep.times.size());
    ASSERT_EQ(rep.tv.size(), rep.times.size());
    ASSERT_EQ(rep.oleinik_margin.size(), rep.times.size());
    ASSERT_TRUE(rep.classification);
    EXPECT_EQ(*rep.classification, SolutionClass::dissipative);
    const auto j = to_json(rep);
    EXPECT_EQ(j["classification"], "dissipative");
    EXPECT_EQ(j["times"].size(), rep.times.size());
    EXPECT_TRUE(j["oleinik_margin"][0].is_null());
    EXPECT_TRUE(j["tv_bound_ratio"].is_null());
    EXPECT_EQ(j["weak_residuals"].size(), 1u);
}
