#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "rburgers/derivative.hpp"
#include "rburgers/grid.hpp"

namespace rburgers {

/// P and P_x on the nodes of a grid.
struct NonlocalTerms {
    std::vector<double> P;
    std::vector<double> Px;
};

namespace detail {

// Cells between consecutive nodes are integrated with a cubic interpolant of
// the source, sampled at five Gauss points, against the exact exponential.
// Above kMaxCellTheta (cell width over ell) the exp-linear closed form takes over.
inline constexpr double kMaxCellTheta = 2.0;

struct CellRule {
    static constexpr int kGauss = 5;
    std::array<double, kGauss> tau{};
    std::array<double, kGauss> w{};
    // phi[s][g][k]: basis k of stencil shape s at Gauss point g; Phi the running integral.
    std::array<std::array<std::array<double, 4>, kGauss>, 3> phi{};
    std::array<std::array<std::array<double, 4>, kGauss>, 3> Phi{};
    std::array<std::array<double, 4>, 3> Phi1{};

    // Stencil shape 0: nodes at tau = -1,0,1,2; 1: 0,1,2,3; 2: -2,-1,0,1.
    static constexpr std::array<std::array<double, 4>, 3> kNodes{{{-1, 0, 1, 2}, {0, 1, 2, 3}, {-2, -1, 0, 1}}};

    CellRule() {
        const std::array<double, kGauss> xg{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
        const std::array<double, kGauss> wg{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                            0.4786286704993665, 0.2369268850561891};
        for (int g = 0; g < kGauss; ++g) {
            tau[g] = 0.5 * (xg[g] + 1.0);
            w[g] = 0.5 * wg[g];
        }
        for (int s = 0; s < 3; ++s) {
            for (int g = 0; g < kGauss; ++g)
                for (int k = 0; k < 4; ++k) {
                    phi[s][g][k] = basis(s, k, tau[g]);
                    Phi[s][g][k] = basis_integral(s, k, tau[g]);
                }
            for (int k = 0; k < 4; ++k) Phi1[s][k] = basis_integral(s, k, 1.0);
        }
    }

    static double basis(int s, int k, double t) {
        double v = 1.0;
        for (int m = 0; m < 4; ++m)
            if (m != k) v *= (t - kNodes[s][m]) / (kNodes[s][k] - kNodes[s][m]);
        return v;
    }

    // Integral of a cubic over [0, t], exact with three-point Gauss.
    static double basis_integral(int s, int k, double t) {
        static constexpr double r = 0.7745966692414834;
        const double a = 0.5 * t;
        return a * (5.0 / 9.0 * basis(s, k, a * (1.0 - r)) + 8.0 / 9.0 * basis(s, k, a) +
                    5.0 / 9.0 * basis(s, k, a * (1.0 + r)));
    }

    static const CellRule& get() {
        static const CellRule rule;
        return rule;
    }
};

// Weights of the exp-linear rule on a unit cell: far node and near node.
inline void exp_linear_weights(double theta, double& far, double& near) {
    if (theta < 1e-3) {
        far = 0.5 - theta / 3.0 + theta * theta / 8.0;
        near = 0.5 - theta / 6.0 + theta * theta / 24.0;
        return;
    }
    const double e = std::exp(-theta);
    far = (1.0 - e * (1.0 + theta)) / (theta * theta);
    near = (1.0 - e) / theta - far;
}

struct ExpSweep {
    std::vector<double> L;
    std::vector<double> R;
    std::vector<double> ds;  // arc measure of cell j (between nodes j-1 and j), ds[0] unused
};

/// Two-sided recursions
///   L_i = int_{s < s_i} e^{-(s_i - s)/ell} g dxi,  R_i = int_{s > s_i} e^{-(s - s_i)/ell} g dxi
/// where s is the cumulative integral of `a` (nullptr means a = 1, i.e. s = xi).
inline ExpSweep exponential_sweep(const std::vector<double>& g, const std::vector<double>* a, double dxi, double ell,
                                  bool periodic) {
    const std::size_t n = g.size();
    if (n < 4) throw InputError("exponential sweep needs at least 4 nodes");
    const CellRule& rule = CellRule::get();
    constexpr int G = CellRule::kGauss;
    const std::size_t ncell = periodic ? n : n - 1;

    std::vector<double> IL(ncell + 1, 0.0), IR(ncell + 1, 0.0), dec(ncell + 1, 1.0), ds(ncell + 1, 0.0);

    // Uniform arc: exponential factors are the same in every cell.
    std::array<double, G> eL{}, eR{};
    double dec_u = std::exp(-dxi / ell), farU = 0.0, nearU = 0.0;
    const bool uniform = (a == nullptr);
    if (uniform) {
        for (int q = 0; q < G; ++q) {
            eL[q] = std::exp(-(1.0 - rule.tau[q]) * dxi / ell);
            eR[q] = std::exp(-rule.tau[q] * dxi / ell);
        }
        exp_linear_weights(dxi / ell, farU, nearU);
    }

    auto wrap = [&](long i) -> std::size_t {
        const long nn = static_cast<long>(n);
        return static_cast<std::size_t>(((i % nn) + nn) % nn);
    };

    for (std::size_t j = 1; j <= ncell; ++j) {
        // Cell between nodes j-1 and j (wrapping to 0 for the periodic closing cell).
        int shape = 0;
        long first = static_cast<long>(j) - 2;
        if (!periodic) {
            if (j == 1) { shape = 1; first = 0; }
            else if (j == n - 1) { shape = 2; first = static_cast<long>(n) - 4; }
        }
        std::array<std::size_t, 4> idx{};
        for (int k = 0; k < 4; ++k) idx[k] = wrap(first + k);
        const std::size_t jl = wrap(static_cast<long>(j) - 1), jr = wrap(static_cast<long>(j));

        double cell_s = dxi;
        std::array<double, G> sg{};
        if (!uniform) {
            const auto& A = *a;
            double tot = 0.0;
            for (int k = 0; k < 4; ++k) tot += rule.Phi1[shape][k] * A[idx[k]];
            cell_s = std::max(0.0, tot * dxi);
            double prev = 0.0;
            for (int q = 0; q < G; ++q) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) s += rule.Phi[shape][q][k] * A[idx[k]];
                s = std::clamp(s * dxi, prev, cell_s);
                sg[q] = prev = s;
            }
        }
        ds[j] = cell_s;
        const double theta = cell_s / ell;

        if (theta <= kMaxCellTheta) {
            double sl = 0.0, sr = 0.0;
            for (int q = 0; q < G; ++q) {
                double gq = 0.0;
                for (int k = 0; k < 4; ++k) gq += rule.phi[shape][q][k] * g[idx[k]];
                gq = std::max(gq, 0.0);
                if (uniform) {
                    sl += rule.w[q] * eL[q] * gq;
                    sr += rule.w[q] * eR[q] * gq;
                } else {
                    sl += rule.w[q] * std::exp(-(cell_s - sg[q]) / ell) * gq;
                    sr += rule.w[q] * std::exp(-sg[q] / ell) * gq;
                }
            }
            IL[j] = sl * dxi;
            IR[j] = sr * dxi;
        } else {
            double far = farU, near = nearU;
            if (!uniform) exp_linear_weights(theta, far, near);
            IL[j] = dxi * (far * g[jl] + near * g[jr]);
            IR[j] = dxi * (near * g[jl] + far * g[jr]);
        }
        dec[j] = uniform ? dec_u : std::exp(-theta);
    }

    ExpSweep out;
    out.L.assign(n, 0.0);
    out.R.assign(n, 0.0);
    out.ds = std::move(ds);
    if (periodic) {
        double acc = 0.0, D = 1.0;
        for (std::size_t j = 1; j <= n; ++j) {
            acc = dec[j] * acc + IL[j];
            D *= dec[j];
        }
        const double wrapgain = 1.0 / (1.0 - D);
        out.L[0] = acc * wrapgain;
        for (std::size_t j = 1; j < n; ++j) out.L[j] = dec[j] * out.L[j - 1] + IL[j];

        acc = 0.0;
        for (std::size_t j = n; j >= 1; --j) acc = dec[j] * acc + IR[j];
        out.R[0] = acc * wrapgain;
        double r = out.R[0];
        for (std::size_t j = n; j >= 2; --j) {
            r = dec[j] * r + IR[j];
            out.R[j - 1] = r;
        }
    } else {
        for (std::size_t j = 1; j < n; ++j) out.L[j] = dec[j] * out.L[j - 1] + IL[j];
        for (std::size_t j = n - 1; j >= 1; --j) out.R[j - 1] = dec[j] * out.R[j] + IR[j];
    }
    return out;
}

/// Same recursions for a source that is constant on each cell (cell j between nodes j-1 and j).
inline ExpSweep cellwise_constant_sweep(const std::vector<double>& cell_f, double h, double ell, bool periodic) {
    const std::size_t n = cell_f.size();
    const std::size_t ncell = periodic ? n : n - 1;
    const double d = std::exp(-h / ell), in = ell * (-std::expm1(-h / ell));
    ExpSweep out;
    out.L.assign(n, 0.0);
    out.R.assign(n, 0.0);
    out.ds.assign(ncell + 1, h);
    auto I = [&](std::size_t j) { return cell_f[j % n] * in; };
    if (periodic) {
        const double gain = 1.0 / (1.0 - std::pow(d, static_cast<double>(n)));
        double acc = 0.0;
        for (std::size_t j = 1; j <= n; ++j) acc = d * acc + I(j);
        out.L[0] = acc * gain;
        for (std::size_t j = 1; j < n; ++j) out.L[j] = d * out.L[j - 1] + I(j);
        acc = 0.0;
        for (std::size_t j = n; j >= 1; --j) acc = d * acc + I(j);
        out.R[0] = acc * gain;
        double r = out.R[0];
        for (std::size_t j = n; j >= 2; --j) out.R[j - 1] = r = d * r + I(j);
    } else {
        for (std::size_t j = 1; j < n; ++j) out.L[j] = d * out.L[j - 1] + I(j);
        for (std::size_t j = n - 1; j >= 1; --j) out.R[j - 1] = d * out.R[j] + I(j);
    }
    return out;
}

inline NonlocalTerms terms_from_sweep(const ExpSweep& sw, double ell) {
    NonlocalTerms out;
    out.P.resize(sw.L.size());
    out.Px.resize(sw.L.size());
    for (std::size_t i = 0; i < sw.L.size(); ++i) {
        out.P[i] = (sw.L[i] + sw.R[i]) / (2.0 * ell);
        out.Px[i] = (sw.R[i] - sw.L[i]) / (2.0 * ell * ell);
    }
    return out;
}

} // namespace detail

/// How grid samples of u are read when forming the source u_x^2 / 2.
enum class SourceRule {
    smooth,            ///< spectral or fourth-order slope, cubic source interpolation
    piecewise_linear,  ///< u is the linear interpolant of its samples; exact for kinked data
};

/// P = G * (u_x^2 / 2) and P_x from the slope samples directly.
inline NonlocalTerms nonlocal_from_slope(const UniformGrid& grid, const std::vector<double>& ux, const KernelSpec& k) {
    if (ux.size() != grid.size()) throw InputError("slope samples do not match grid");
    const bool periodic = k.wraps(grid);
    std::vector<double> f(ux.size());
    for (std::size_t i = 0; i < ux.size(); ++i) {
        if (!std::isfinite(ux[i])) throw InputError("non-finite slope sample");
        f[i] = 0.5 * ux[i] * ux[i];
    }
    return detail::terms_from_sweep(detail::exponential_sweep(f, nullptr, grid.h(), k.ell, periodic), k.ell);
}

inline NonlocalTerms compute_nonlocal(const GridFunction1D& u, const KernelSpec& k,
                                      SourceRule rule = SourceRule::smooth) {
    u.check_finite("u");
    if (rule == SourceRule::smooth) return nonlocal_from_slope(u.grid, derivative(u.grid, u.values), k);
    const bool periodic = k.wraps(u.grid);
    const std::size_t n = u.size();
    std::vector<double> cell(n, 0.0);
    for (std::size_t j = 1; j <= (periodic ? n : n - 1); ++j) {
        const double du = u[j % n] - u[j - 1];
        const double s = du / u.grid.h();
        cell[j % n] = 0.5 * s * s;
    }
    return detail::terms_from_sweep(detail::cellwise_constant_sweep(cell, u.grid.h(), k.ell, periodic), k.ell);
}

inline GridFunction1D compute_P(const GridFunction1D& u, const KernelSpec& k, SourceRule rule = SourceRule::smooth) {
    return {u.grid, compute_nonlocal(u, k, rule).P};
}

inline GridFunction1D compute_Px(const GridFunction1D& u, const KernelSpec& k, SourceRule rule = SourceRule::smooth) {
    return {u.grid, compute_nonlocal(u, k, rule).Px};
}

} // namespace rburgers
