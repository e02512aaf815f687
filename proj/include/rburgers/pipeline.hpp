#pragma once

// Scenario execution. Each scenario writes into <out>/<name>/:
//   solve: profiles.csv (t, x, u, u_x), diagnostics.json, manifest.json
//   wave:  wave.csv (x, u, u_x, segment-id, F-segment), diagnostics.json, manifest.json
//   limit: limits.csv (ell, L1_distance, mu_proxy, nu_gap, runtime_seconds), diagnostics.json, manifest.json
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/version.hpp>
#include <fftw3.h>

#include "json.hpp"
#include "rburgers/csv.hpp"
#include "rburgers/diagnostics.hpp"
#include "rburgers/eulerian.hpp"
#include "rburgers/lagrangian.hpp"
#include "rburgers/reference.hpp"
#include "rburgers/scenario.hpp"
#include "rburgers/waves.hpp"

namespace rburgers {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
    /// Replaces [output] directory when set.
    std::optional<std::filesystem::path> out_root;
    unsigned threads = 1;
    std::function<void(const std::string&)> log;
};

struct RunResult {
    std::string name;
    std::filesystem::path directory;
    int exit_code = kExitOk;
    std::string message;
    std::vector<std::string> artifacts;
};

namespace detail {

using nlohmann::json;

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json versions() {
    json v;
    v["rburgers"] = kVersion;
    v["boost"] = BOOST_LIB_VERSION;
    v["fftw"] = std::string(fftw_version);
    v["compiler"] = __VERSION__;
    return v;
}

inline void write_json(const std::filesystem::path& p, const json& j) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << j.dump(2) << '\n';
}

/// t = 0, the requested outputs and t_end; the CSV rows use exactly these.
inline std::vector<double> requested_times(const ScenarioConfig& c) {
    std::vector<double> ts{0.0};
    for (double t : c.time.output_times) ts.push_back(t);
    ts.push_back(c.time.t_end);
    std::sort(ts.begin(), ts.end());
    std::vector<double> out;
    for (double t : ts)
        if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, t)) out.push_back(t);
    return out;
}

/// Requested times plus the uniform snapshots the weak-form quadrature needs.
inline std::vector<double> solver_times(const ScenarioConfig& c) {
    std::vector<double> ts = requested_times(c);
    if (c.diagnostics.weak_form && c.time.t_end > 0.0)
        for (std::size_t k = 0; k < c.diagnostics.time_samples; ++k)
            ts.push_back(c.time.t_end * static_cast<double>(k) / static_cast<double>(c.diagnostics.time_samples - 1));
    std::sort(ts.begin(), ts.end());
    std::vector<double> out;
    for (double t : ts)
        if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, t)) out.push_back(t);
    return out;
}

inline bool is_requested(double t, const std::vector<double>& req) {
    for (double r : req)
        if (std::abs(t - r) <= 1e-12 * std::max(1.0, r)) return true;
    return false;
}

inline TestFunction default_test_function(const ScenarioConfig& c, double x_lo, double x_hi) {
    if (c.diagnostics.test_function) {
        const auto& a = *c.diagnostics.test_function;
        return {a[0], a[1], a[2], a[3]};
    }
    const double T = c.time.t_end;
    return {0.5 * T, 0.45 * T, 0.5 * (x_lo + x_hi), 0.25 * (x_hi - x_lo)};
}

inline double sup_slope(const InitialDatum& d, double a, double b, std::size_t n, bool absolute) {
    double m = absolute ? 0.0 : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = d.du(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
        m = std::max(m, absolute ? std::abs(v) : v);
    }
    return m;
}

inline void write_profiles(const std::filesystem::path& p, const FieldHistory& h, const std::vector<double>& req) {
    CsvWriter csv(p, {"t", "x", "u", "u_x"});
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (!is_requested(h.times[k], req)) continue;
        for (std::size_t i = 0; i < h.grid.size(); ++i) {
            csv << h.times[k] << h.grid.x(i) << h.u[k][i] << h.ux[k][i];
            csv.end_row();
        }
    }
    csv.close();
}

/// Drops keys for disabled toggles and adds summary drifts.
inline void finish_diagnostics(json& j, const ScenarioConfig& c, const DiagnosticsReport& rep) {
    const auto& dg = c.diagnostics;
    if (dg.energy && !rep.energy.empty()) {
        auto drift = [](const std::vector<double>& e) {
            double d = 0.0;
            for (double v : e) d = std::max(d, std::abs(v - e.front()));
            return e.front() != 0.0 ? d / std::abs(e.front()) : d;
        };
        double rise = 0.0;
        for (std::size_t k = 1; k < rep.energy.size(); ++k) rise = std::max(rise, rep.energy[k] - rep.energy[k - 1]);
        j["energy_relative_drift"] = num(drift(rep.energy));
        j["modified_energy_relative_drift"] = num(drift(rep.modified_energy));
        j["energy_max_increase_relative"] = num(rep.energy.front() != 0.0 ? rise / std::abs(rep.energy.front()) : rise);
    } else {
        j.erase("energy");
        j.erase("modified_energy");
    }
    if (!dg.tv) {
        j.erase("tv");
        j.erase("tv_bound_ratio");
    }
    if (dg.oleinik) {
        double worst = std::numeric_limits<double>::infinity();
        for (double m : rep.oleinik_margin) worst = std::min(worst, m);
        j["oleinik_min_margin"] = num(worst);
        j["oleinik_C"] = dg.oleinik_C;
    } else {
        j.erase("oleinik_margin");
    }
    if (!dg.weak_form) {
        j.erase("weak_residuals");
        j.erase("classification");
    }
}

struct Artifacts {
    std::vector<std::string> files;
    json diagnostics = json::object();
};

inline int run_solve(const ScenarioConfig& c, const std::filesystem::path& dir, Artifacts& art) {
    const InitialDatum datum = make_datum(c.initial);
    const auto req = requested_times(c);
    const auto all = solver_times(c);
    const double a = c.grid.x_min, b = c.grid.x_max;
    json& j = art.diagnostics;
    j["solver"] = to_string(c.solver);
    j["output_times"] = req;

    DiagnosticsOptions opt;
    opt.oleinik_C = c.diagnostics.oleinik_C;
    opt.rtol = c.diagnostics.rtol;
    // the whole-line sup of u0' is never negative; the window maximum can be
    if (c.diagnostics.oleinik) opt.M = std::max(0.0, sup_slope(datum, a, b, 8 * c.grid.N + 1, false));
    const TestFunction tf = default_test_function(c, a, b);
    const bool weak = c.diagnostics.weak_form && c.time.t_end > 0.0;

    FieldHistory h;
    int code = kExitOk;
    std::vector<WeakResidual> lag_residuals;
    if (c.solver == SolverKind::eulerian) {
        const UniformGrid g = solver_grid(c);
        TimeStepPolicy pol;
        pol.cfl = c.time.cfl;
        pol.output_times = all;
        const auto tr = evolve_smooth(GridFunction1D::sample(g, datum.u), KernelSpec(c.ell), c.time.t_end, pol);
        h = history_from(tr);
        const auto& br = tr.blowup;
        j["blowup"] = {{"status", to_string(br.status)},
                       {"t_estimate", num(br.t_estimate)},
                       {"bracket", {num(br.bracket.low), num(br.bracket.high)}},
                       {"in_bracket", br.in_bracket}};
        if (tr.halted) {
            code = kExitNumerical;
            j["message"] = std::string("smooth solution ended before t_end (") + to_string(br.status) + " at t = " +
                           std::to_string(br.t_estimate) + ")";
        }
    } else {
        const auto variant = c.solver == SolverKind::lagrangian_conservative ? LagrangianVariant::conservative
                                                                             : LagrangianVariant::dissipative;
        LagrangianGridSpec gs;
        gs.x_min = a;
        gs.x_max = b;
        gs.xi_count = c.grid.N;
        gs.pad_ells = c.grid.pad_ells;
        const auto s0 = init_lagrangian(datum, gs, c.ell, variant);
        LagrangianRun run;
        run.dt = c.time.dt.value_or(c.time.cfl * (b - a) / static_cast<double>(c.grid.N));
        run.output_times = all;
        const auto tr = evolve_lagrangian(s0, c.time.t_end, run);
        const std::size_t np = c.output.profile_points ? c.output.profile_points : c.grid.N + 1;
        h = history_from(tr, UniformGrid::compact(a, b, np, c.grid.pad_ells));
        const auto& last = tr.states.back();
        j["energy_lost"] = last.energy_lost;
        j["crossed_cells"] = last.crossed_count();
        j["dt"] = run.dt;
        if (weak && tr.states.size() >= 3) lag_residuals.push_back(weak_residual(tr, tf));
    }

    std::vector<TestFunction> tfs;
    if (weak && c.solver == SolverKind::eulerian && h.size() >= 3 && code == kExitOk) opt.test_functions.push_back(tf);
    DiagnosticsReport rep = diagnose(h, opt);
    if (!lag_residuals.empty()) {
        rep.weak_residuals = lag_residuals;
        rep.classification = classify(rep.weak_residuals, opt.rtol);
    }

    write_profiles(dir / "profiles.csv", h, req);
    art.files.push_back("profiles.csv");
    json d = to_json(rep);
    d.update(j);
    if (weak) d["test_function"] = {tf.t_center, tf.t_radius, tf.x_center, tf.x_radius};
    finish_diagnostics(d, c, rep);
    j = std::move(d);
    return code;
}

inline int run_wave(const ScenarioConfig& c, const std::filesystem::path& dir, Artifacts& art) {
    const auto xs = UniformGrid::compact(c.grid.x_min, c.grid.x_max, c.grid.N).nodes();
    const auto& wc = c.wave;
    TravelingWave w;
    switch (wc.type) {
    case WaveType::shock_layer: w = sample_shock_layer(wc.u_minus, wc.u_plus, c.ell, xs); break;
    case WaveType::cuspon: w = sample_cuspon(wc.u0, c.ell, xs); break;
    case WaveType::periodic_cuspon: w = sample_periodic_cuspon(wc.u0, wc.u1, c.ell, xs); break;
    }
    CsvWriter csv(dir / "wave.csv", {"x", "u", "u_x", "segment-id", "F-segment"});
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        csv << w.x[i] << w.u[i] << w.ux[i] << w.segment_id[i] << w.F_segment[i];
        csv.end_row();
    }
    csv.close();
    art.files.push_back("wave.csv");

    json& j = art.diagnostics;
    j["kind"] = to_string(w.kind);
    j["ell"] = w.ell;
    j["speed"] = w.c;
    j["S"] = w.S;
    j["F"] = w.F;
    j["period"] = num(w.period);
    j["classification"] = to_string(w.classification);
    j["flux_residual"] = num(flux_residual(w));
    // energy lost per unit time at the junctions: the drop of F across each
    double dissipation = 0.0;
    json js = json::array();
    for (const auto& jn : w.junctions) {
        js.push_back({{"x", jn.x}, {"F_left", jn.F_left}, {"F_right", jn.F_right}, {"type", to_string(jn.type)},
                      {"dissipation", -jn.dF}});
        dissipation -= jn.dF;
    }
    j["junctions"] = js;
    j["dissipation"] = dissipation;
    if (wc.type == WaveType::shock_layer) j["dissipation_rate"] = dissipation_rate(wc.u_minus, wc.u_plus);
    if (wc.type == WaveType::cuspon) j["cusp_exponent"] = num(cusp_exponent(w, 0.0));
    if (c.diagnostics.weak_form) {
        const double half = 0.5 * (c.grid.x_max - c.grid.x_min);
        TestFunction tf{0.5, 0.45, 0.0, std::min(2.0 * c.ell, half)};
        if (c.diagnostics.test_function) {
            const auto& a = *c.diagnostics.test_function;
            tf = {a[0], a[1], a[2], a[3]};
        }
        const auto r = weak_residual(w, tf);
        j["weak_residual"] = {{"momentum", r.momentum},
                              {"energy", r.energy},
                              {"momentum_scale", r.momentum_scale},
                              {"energy_scale", r.energy_scale},
                              {"test_function", {tf.t_center, tf.t_radius, tf.x_center, tf.x_radius}},
                              {"classification", to_string(classify({r}, c.diagnostics.rtol))}};
    }
    return kExitOk;
}

inline int run_limit(const ScenarioConfig& c, const std::filesystem::path& dir, Artifacts& art, unsigned threads) {
    const InitialDatum datum = make_datum(c.initial);
    const auto& L = c.limit;
    double t = 0.0;
    if (L.t) {
        t = *L.t;
    } else {
        const double m = sup_slope(datum, c.grid.x_min, c.grid.x_max, 8 * c.grid.N + 1, true);
        if (!(m > 0.0)) throw ConfigError(c.source + ": [limit] t: the datum is constant; give t explicitly");
        t = 0.5 / m;
    }
    LimitStudyOptions opt;
    opt.reference = L.reference == "burgers"         ? LimitReference::burgers
                    : L.reference == "hunter_saxton" ? LimitReference::hunter_saxton
                                                     : LimitReference::automatic;
    opt.grid.x_min = c.grid.x_min;
    opt.grid.x_max = c.grid.x_max;
    opt.grid.xi_count = c.grid.N;
    opt.grid.pad_ells = c.grid.pad_ells;
    opt.grid.pad_max = L.pad_max;
    opt.dt = L.dt;
    opt.hs_seeds = L.hs_seeds;
    opt.threads = std::max(1u, threads);
    const auto region = UniformGrid::compact(L.region_min, L.region_max, L.region_points);
    const auto table = limit_study(datum, L.ells, t, region, opt);

    CsvWriter csv(dir / "limits.csv", {"ell", "L1_distance", "mu_proxy", "nu_gap", "runtime_seconds"});
    int code = kExitOk;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        csv << r.ell << r.L1_distance << r.mu_proxy << r.nu_gap << (L.record_runtime ? r.runtime_seconds : 0.0);
        csv.end_row();
        rows.push_back({{"ell", r.ell}, {"ok", r.ok()}, {"error", r.error}});
        if (!r.ok()) code = kExitNumerical;
    }
    csv.close();
    art.files.push_back("limits.csv");
    auto& j = art.diagnostics;
    j["reference"] = to_string(table.reference);
    j["reference_solution"] = table.reference_solution;
    j["t"] = t;
    j["rows"] = rows;
    if (code != kExitOk) j["message"] = "one or more rungs failed";
    return code;
}

inline nlohmann::json grid_json(const ScenarioConfig& c) {
    return {{"N", c.grid.N}, {"domain", {c.grid.x_min, c.grid.x_max}}, {"boundary", to_string(c.grid.boundary)}};
}

} // namespace detail

inline std::filesystem::path output_directory(const ScenarioConfig& c, const RunOptions& opt) {
    return (opt.out_root ? *opt.out_root : c.output.directory) / c.name;
}

/// Run one validated scenario. Partial diagnostics and a manifest are written on numerical failure.
inline RunResult run_scenario(const ScenarioConfig& c, const RunOptions& opt = {}) {
    using nlohmann::json;
    RunResult res;
    res.name = c.name;
    res.directory = output_directory(c, opt);
    detail::Artifacts art;
    try {
        std::filesystem::create_directories(res.directory);
        art.diagnostics["scenario"] = c.name;
        switch (c.pipeline) {
        case Pipeline::solve: res.exit_code = detail::run_solve(c, res.directory, art); break;
        case Pipeline::wave: res.exit_code = detail::run_wave(c, res.directory, art); break;
        case Pipeline::limit: res.exit_code = detail::run_limit(c, res.directory, art, opt.threads); break;
        }
        if (art.diagnostics.contains("message")) res.message = art.diagnostics["message"].get<std::string>();
    } catch (const NumericalFailure& e) {
        res.exit_code = kExitNumerical;
        res.message = e.what();
    } catch (const ConfigError& e) {
        res.exit_code = kExitConfig;
        res.message = e.what();
    } catch (const std::invalid_argument& e) {
        res.exit_code = kExitConfig;
        res.message = e.what();
    } catch (const std::domain_error& e) {
        res.exit_code = kExitConfig;
        res.message = e.what();
    } catch (const std::exception& e) {
        res.exit_code = kExitNumerical;
        res.message = e.what();
    }

    art.diagnostics["status"] = res.exit_code == kExitOk ? "ok" : "failed";
    if (!res.message.empty()) art.diagnostics["message"] = res.message;
    json m;
    m["name"] = c.name;
    m["pipeline"] = to_string(c.pipeline);
    m["solver"] = c.pipeline == Pipeline::solve    ? to_string(c.solver)
                  : c.pipeline == Pipeline::limit ? "lagrangian_dissipative"
                                                  : "exact_profile";
    if (c.pipeline == Pipeline::limit) m["ell"] = c.limit.ells;
    else m["ell"] = c.ell;
    m["grid"] = detail::grid_json(c);
    m["config_hash"] = c.config_hash;
    m["config_source"] = c.source;
    m["versions"] = detail::versions();
    m["exit_code"] = res.exit_code;
    m["status"] = art.diagnostics["status"];
    try {
        std::filesystem::create_directories(res.directory);
        detail::write_json(res.directory / "diagnostics.json", art.diagnostics);
        art.files.push_back("diagnostics.json");
        art.files.push_back("manifest.json");
        m["artifacts"] = art.files;
        detail::write_json(res.directory / "manifest.json", m);
    } catch (const std::exception& e) {
        if (res.exit_code == kExitOk) res.exit_code = kExitConfig;
        res.message = e.what();
    }
    res.artifacts = art.files;
    return res;
}

/// Run scenarios on a pool of worker threads. Each scenario owns its output
/// directory; two scenarios resolving to the same directory are rejected.
/// With a single scenario the threads go to its limit ladder instead.
inline std::vector<RunResult> run_pool(const std::vector<ScenarioConfig>& cfgs, const RunOptions& opt = {}) {
    std::vector<RunResult> out(cfgs.size());
    std::vector<char> todo(cfgs.size(), 1);
    std::set<std::filesystem::path> dirs;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const auto d = std::filesystem::weakly_canonical(output_directory(cfgs[i], opt));
        if (!dirs.insert(d).second) {
            out[i] = {cfgs[i].name, d, kExitConfig, "output directory '" + d.string() + "' is used by another scenario", {}};
            todo[i] = 0;
        }
    }
    const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(cfgs.size())));
    RunOptions inner = opt;
    inner.threads = cfgs.size() == 1 ? opt.threads : 1;
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) {
            if (!todo[i]) continue;
            out[i] = run_scenario(cfgs[i], inner);
            if (opt.log) {
                std::lock_guard lock(log_mutex);
                opt.log(cfgs[i].name + ": " + (out[i].exit_code == kExitOk ? "ok" : "failed") +
                        (out[i].message.empty() ? "" : " (" + out[i].message + ")") + " -> " + out[i].directory.string());
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

} // namespace rburgers
