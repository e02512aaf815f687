#pragma once

// Scenario configuration: a sectioned key/value file, parsed with line numbers
// kept so every validation message can point at the offending line.
//
//   [scenario]   name, pipeline = solve | wave | limit
//   [initial]    type = gaussian | smoothed_step | bump_derivative | tabulated
//   [model]      ell, solver = eulerian | lagrangian_conservative | lagrangian_dissipative
//   [grid]       N, domain = a, b, boundary = compact | periodic, pad_ells
//   [time]       t_end, output_times | output_count, cfl, dt
//   [diagnostics] energy, tv, oleinik, weak_form, time_samples, oleinik_C, rtol, test_function
//   [output]     directory, profile_points
//   [wave]       type = shock_layer | cuspon | periodic_cuspon, u_minus, u_plus, u0, u1
//   [limit]      ells | ladder + ell_start + ell_stop, t, region, region_points, dt, pad_max,
//                reference, hs_seeds, record_runtime
//
// configs/reference.ini documents every key.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/uuid/detail/sha1.hpp>

#include "rburgers/errors.hpp"
#include "rburgers/grid.hpp"
#include "rburgers/lagrangian.hpp"
#include "rburgers/derivative.hpp"

namespace rburgers {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// INI document

struct IniEntry {
    std::string value;
    int line = 0;
};

struct ConfigIssue {
    int line = 0;  // 0 when no line applies
    std::string field;
    std::string message;
};

/// Collected validation failures, printable as "source:line: field: message".
struct ValidationReport {
    std::string source;
    std::vector<ConfigIssue> issues;

    bool ok() const { return issues.empty(); }
    void add(int line, std::string field, std::string message) {
        issues.push_back({line, std::move(field), std::move(message)});
    }
    std::string format() const {
        std::ostringstream os;
        for (const auto& i : issues) {
            os << source;
            if (i.line > 0) os << ':' << i.line;
            os << ": " << i.field << ": " << i.message << '\n';
        }
        return os.str();
    }
};

/// Thrown when a config fails to parse or validate; carries the full report.
class ScenarioError : public ConfigError {
public:
    explicit ScenarioError(ValidationReport r) : ConfigError(r.format()), report(std::move(r)) {}
    ValidationReport report;
};

class IniDocument {
public:
    std::string source;
    std::string text;

    static IniDocument parse(std::string text, std::string source, ValidationReport& rep) {
        IniDocument d;
        d.source = std::move(source);
        d.text = std::move(text);
        std::istringstream is(d.text);
        std::string raw, section;
        int line = 0;
        while (std::getline(is, raw)) {
            ++line;
            std::string s = trim(raw);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']') {
                    rep.add(line, "syntax", "unterminated section header");
                    continue;
                }
                section = trim(s.substr(1, s.size() - 2));
                if (d.sections_.count(section)) rep.add(line, "[" + section + "]", "duplicate section");
                d.sections_[section];
                d.section_lines_[section] = line;
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                rep.add(line, "syntax", "expected key = value");
                continue;
            }
            if (section.empty()) {
                rep.add(line, "syntax", "key outside of any section");
                continue;
            }
            const std::string key = trim(s.substr(0, eq));
            std::string value = strip_comment(trim(s.substr(eq + 1)));
            auto& sec = d.sections_[section];
            if (sec.count(key)) {
                rep.add(line, field(section, key), "duplicate key (first set on line " + std::to_string(sec[key].line) + ")");
                continue;
            }
            sec[key] = {value, line};
        }
        return d;
    }

    const IniEntry* find(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }
    bool has_section(const std::string& section) const { return sections_.count(section) != 0; }
    int section_line(const std::string& section) const {
        auto s = section_lines_.find(section);
        return s == section_lines_.end() ? 0 : s->second;
    }
    const std::map<std::string, std::map<std::string, IniEntry>>& sections() const { return sections_; }

    static std::string field(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

private:
    // "value  # note" keeps "value"; a '#' not preceded by whitespace is part of the value
    static std::string strip_comment(const std::string& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if ((v[i] == '#' || v[i] == ';') && (v[i - 1] == ' ' || v[i - 1] == '\t')) return trim(v.substr(0, i));
        return v;
    }

    std::map<std::string, std::map<std::string, IniEntry>> sections_;
    std::map<std::string, int> section_lines_;
};

/// Git blob id of the bytes: sha1("blob <len>\0" + content).
inline std::string git_blob_hash(const std::string& content) {
    boost::uuids::detail::sha1 h;
    const std::string header = "blob " + std::to_string(content.size());
    h.process_bytes(header.data(), header.size());
    const char nul = '\0';
    h.process_bytes(&nul, 1);
    h.process_bytes(content.data(), content.size());
    boost::uuids::detail::sha1::digest_type d;
    h.get_digest(d);
    char buf[41];
    for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", d[i]);
    return std::string(buf, 40);
}

// ---------------------------------------------------------------------------
// Scenario types

enum class Pipeline { solve, wave, limit };
enum class InitialKind { gaussian, smoothed_step, bump_derivative, tabulated };
enum class SolverKind { eulerian, lagrangian_conservative, lagrangian_dissipative };
enum class WaveType { shock_layer, cuspon, periodic_cuspon };

inline const char* to_string(Pipeline p) {
    switch (p) {
    case Pipeline::solve: return "solve";
    case Pipeline::wave: return "wave";
    case Pipeline::limit: return "limit";
    }
    return "?";
}
inline const char* to_string(InitialKind k) {
    switch (k) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::smoothed_step: return "smoothed_step";
    case InitialKind::bump_derivative: return "bump_derivative";
    case InitialKind::tabulated: return "tabulated";
    }
    return "?";
}
inline const char* to_string(SolverKind k) {
    switch (k) {
    case SolverKind::eulerian: return "eulerian";
    case SolverKind::lagrangian_conservative: return "lagrangian_conservative";
    case SolverKind::lagrangian_dissipative: return "lagrangian_dissipative";
    }
    return "?";
}
inline const char* to_string(WaveType k) {
    switch (k) {
    case WaveType::shock_layer: return "shock_layer";
    case WaveType::cuspon: return "cuspon";
    case WaveType::periodic_cuspon: return "periodic_cuspon";
    }
    return "?";
}

/// gaussian:        amplitude * exp(-((x - center) / width)^2)
/// smoothed_step:   u_r + (u_l - u_r) (1 - tanh((x - center) / width)) / 2
/// bump_derivative: -amplitude (x - center) / width * exp(-(x - center)^2 / (2 width^2))
/// tabulated:       two columns x, u on a uniform grid, cubic interpolation, held constant outside
struct InitialSpec {
    InitialKind kind = InitialKind::gaussian;
    double center = 0.0, width = 1.0, amplitude = 1.0;
    double u_l = 1.0, u_r = 0.0;
    std::filesystem::path file;
};

struct GridConfig {
    std::size_t N = 1024;
    double x_min = -10.0, x_max = 10.0;
    BoundaryKind boundary = BoundaryKind::compact_support;
    double pad_ells = 10.0;
};

struct TimeConfig {
    double t_end = 1.0;
    std::vector<double> output_times;
    double cfl = 0.3;
    /// Lagrangian step; defaults to cfl * (x_max - x_min) / N.
    std::optional<double> dt;
};

struct DiagnosticsToggles {
    bool energy = true, tv = true, oleinik = true, weak_form = true;
    /// Snapshots kept for the weak-form quadrature in time.
    std::size_t time_samples = 201;
    double oleinik_C = 2.0;
    double rtol = 1e-4;
    /// t_center, t_radius, x_center, x_radius; defaults to the middle of the run.
    std::optional<std::array<double, 4>> test_function;
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    /// Reconstruction nodes for Lagrangian profiles; 0 selects N + 1.
    std::size_t profile_points = 0;
};

struct WaveConfig {
    WaveType type = WaveType::shock_layer;
    double u_minus = 1.0, u_plus = -1.0;
    double u0 = 1.0, u1 = 2.0;
};

struct LimitConfig {
    std::vector<double> ells;
    /// Comparison time; empty selects 0.5 / sup|u0'|.
    std::optional<double> t;
    double region_min = -2.0, region_max = 2.0;
    std::size_t region_points = 801;
    double dt = 2.5e-3;
    double pad_max = std::numeric_limits<double>::infinity();
    std::string reference = "automatic";
    std::size_t hs_seeds = 0;
    bool record_runtime = true;
};

struct ScenarioConfig {
    std::string name = "scenario";
    Pipeline pipeline = Pipeline::solve;
    InitialSpec initial;
    double ell = 1.0;
    SolverKind solver = SolverKind::eulerian;
    GridConfig grid;
    TimeConfig time;
    DiagnosticsToggles diagnostics;
    OutputConfig output;
    WaveConfig wave;
    LimitConfig limit;

    std::string source;       // file path or "<command line>"
    std::string config_hash;  // git blob id of the config bytes
    std::string text;
};

// ---------------------------------------------------------------------------
// Field readers

namespace detail {

class FieldReader {
public:
    FieldReader(const IniDocument& d, ValidationReport& r) : doc_(d), rep_(r) {}

    const IniEntry* entry(const std::string& sec, const std::string& key) {
        used_.insert({sec, key});
        return doc_.find(sec, key);
    }
    int line(const std::string& sec, const std::string& key) const {
        const IniEntry* e = doc_.find(sec, key);
        return e ? e->line : doc_.section_line(sec);
    }
    void fail(const std::string& sec, const std::string& key, const std::string& msg) {
        rep_.add(line(sec, key), IniDocument::field(sec, key), msg);
    }

    static std::optional<double> to_double(const std::string& s) {
        double v = 0.0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        if (b != e && *b == '+') ++b;
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e) return std::nullopt;
        return v;
    }

    void real(const std::string& sec, const std::string& key, double& out) {
        const IniEntry* e = entry(sec, key);
        if (!e) return;
        auto v = to_double(e->value);
        if (!v) return fail(sec, key, "expected a number, got '" + e->value + "'");
        if (!std::isfinite(*v)) return fail(sec, key, "must be finite");
        out = *v;
    }
    void real(const std::string& sec, const std::string& key, std::optional<double>& out) {
        if (!doc_.find(sec, key)) {
            entry(sec, key);
            return;
        }
        double v = 0.0;
        const std::size_t before = rep_.issues.size();
        real(sec, key, v);
        if (rep_.issues.size() == before) out = v;
    }
    void count(const std::string& sec, const std::string& key, std::size_t& out) {
        const IniEntry* e = entry(sec, key);
        if (!e) return;
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (ec != std::errc() || p != e->value.data() + e->value.size())
            return fail(sec, key, "expected a non-negative integer, got '" + e->value + "'");
        out = v;
    }
    void flag(const std::string& sec, const std::string& key, bool& out) {
        const IniEntry* e = entry(sec, key);
        if (!e) return;
        if (e->value == "true" || e->value == "yes" || e->value == "on" || e->value == "1") out = true;
        else if (e->value == "false" || e->value == "no" || e->value == "off" || e->value == "0") out = false;
        else fail(sec, key, "expected true or false, got '" + e->value + "'");
    }
    void text(const std::string& sec, const std::string& key, std::string& out) {
        const IniEntry* e = entry(sec, key);
        if (e) out = e->value;
    }
    bool list(const std::string& sec, const std::string& key, std::vector<double>& out) {
        const IniEntry* e = entry(sec, key);
        if (!e) return false;
        std::vector<double> vs;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto v = to_double(IniDocument::trim(item));
            if (!v) {
                fail(sec, key, "expected a comma-separated list of numbers, got '" + item + "'");
                return false;
            }
            if (!std::isfinite(*v)) {
                fail(sec, key, "entries must be finite");
                return false;
            }
            vs.push_back(*v);
        }
        out = std::move(vs);
        return true;
    }
    template <class E>
    void choice(const std::string& sec, const std::string& key, E& out, const std::vector<std::pair<const char*, E>>& opts) {
        const IniEntry* e = entry(sec, key);
        if (!e) return;
        std::string names;
        for (const auto& [n, v] : opts) {
            if (e->value == n) {
                out = v;
                return;
            }
            names += names.empty() ? n : std::string(", ") + n;
        }
        fail(sec, key, "unknown value '" + e->value + "' (expected one of: " + names + ")");
    }

    void reject_unknown(const std::set<std::string>& known_sections) {
        for (const auto& [sec, keys] : doc_.sections()) {
            if (!known_sections.count(sec)) {
                rep_.add(doc_.section_line(sec), "[" + sec + "]", "unknown section");
                continue;
            }
            for (const auto& [k, e] : keys)
                if (!used_.count({sec, k})) rep_.add(e.line, IniDocument::field(sec, k), "unknown key");
        }
    }

private:
    const IniDocument& doc_;
    ValidationReport& rep_;
    std::set<std::pair<std::string, std::string>> used_;
};

struct Table {
    std::vector<double> x, u;
};

/// Two numeric columns separated by commas or whitespace; '#' lines and one header line are skipped.
inline Table read_table(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot read tabulated datum '" + p.string() + "'");
    Table t;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::string s = IniDocument::trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::istringstream is(s);
        std::string a, b;
        is >> a >> b;
        auto x = FieldReader::to_double(a), u = FieldReader::to_double(b);
        if (!x || !u) {
            if (t.x.empty() && ln == 1) continue;  // header
            throw ConfigError(p.string() + ":" + std::to_string(ln) + ": expected two numeric columns");
        }
        if (!std::isfinite(*x) || !std::isfinite(*u))
            throw ConfigError(p.string() + ":" + std::to_string(ln) + ": non-finite sample");
        t.x.push_back(*x);
        t.u.push_back(*u);
    }
    return t;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace detail

// ---------------------------------------------------------------------------
// Parsing and validation

/// Parse and validate; issues go to the report and the config holds whatever was readable.
inline ScenarioConfig parse_scenario(const IniDocument& doc, ValidationReport& rep,
                                     const std::filesystem::path& base_dir = {},
                                     std::optional<Pipeline> force_pipeline = std::nullopt) {
    ScenarioConfig c;
    c.source = doc.source;
    c.text = doc.text;
    c.config_hash = git_blob_hash(doc.text);
    detail::FieldReader r(doc, rep);

    // [scenario]
    if (!doc.has_section("scenario")) rep.add(0, "[scenario]", "missing section");
    r.text("scenario", "name", c.name);
    if (c.name.empty() || c.name.find_first_of("/\\ \t") != std::string::npos || c.name == "." || c.name == "..")
        r.fail("scenario", "name", "must be a non-empty name without spaces or path separators");
    r.choice<Pipeline>("scenario", "pipeline", c.pipeline,
                       {{"solve", Pipeline::solve}, {"wave", Pipeline::wave}, {"limit", Pipeline::limit}});
    if (force_pipeline) c.pipeline = *force_pipeline;

    // [model]
    r.real("model", "ell", c.ell);
    if (!(c.ell > 0.0)) r.fail("model", "ell", "must be positive");
    r.choice<SolverKind>("model", "solver", c.solver,
                         {{"eulerian", SolverKind::eulerian},
                          {"lagrangian_conservative", SolverKind::lagrangian_conservative},
                          {"lagrangian_dissipative", SolverKind::lagrangian_dissipative}});

    // [grid]
    r.count("grid", "N", c.grid.N);
    std::vector<double> dom;
    if (r.list("grid", "domain", dom)) {
        if (dom.size() != 2 || !(dom[0] < dom[1])) r.fail("grid", "domain", "expected 'a, b' with a < b");
        else c.grid.x_min = dom[0], c.grid.x_max = dom[1];
    }
    r.choice<BoundaryKind>("grid", "boundary", c.grid.boundary,
                           {{"compact", BoundaryKind::compact_support}, {"periodic", BoundaryKind::periodic}});
    r.real("grid", "pad_ells", c.grid.pad_ells);
    if (!(c.grid.pad_ells >= 0.0)) r.fail("grid", "pad_ells", "must be non-negative");
    const bool periodic = c.grid.boundary == BoundaryKind::periodic;
    if (c.grid.N < 8) r.fail("grid", "N", "must be at least 8, got " + std::to_string(c.grid.N));
    else if (c.pipeline == Pipeline::solve && c.solver == SolverKind::eulerian && periodic && !detail::is_power_of_two(c.grid.N))
        r.fail("grid", "N", "must be a power of two on a periodic (spectral) grid, got " + std::to_string(c.grid.N));
    if (periodic && c.pipeline == Pipeline::solve && c.solver != SolverKind::eulerian)
        r.fail("grid", "boundary", "Lagrangian solvers work on the whole line; use boundary = compact");
    if (periodic && c.pipeline == Pipeline::limit)
        r.fail("grid", "boundary", "the limit study needs boundary = compact");

    // [time]
    r.real("time", "t_end", c.time.t_end);
    if (c.time.t_end < 0.0) r.fail("time", "t_end", "must be non-negative");
    const bool has_times = r.list("time", "output_times", c.time.output_times);
    std::size_t output_count = 0;
    r.count("time", "output_count", output_count);
    if (has_times && doc.find("time", "output_count"))
        r.fail("time", "output_count", "give either output_times or output_count, not both");
    else if (output_count > 0)
        for (std::size_t k = 1; k <= output_count; ++k)
            c.time.output_times.push_back(c.time.t_end * static_cast<double>(k) / static_cast<double>(output_count));
    for (double t : c.time.output_times)
        if (t < 0.0 || t > c.time.t_end) {
            r.fail("time", "output_times", "entries must lie in [0, t_end]");
            break;
        }
    std::sort(c.time.output_times.begin(), c.time.output_times.end());
    r.real("time", "cfl", c.time.cfl);
    if (!(c.time.cfl > 0.0 && c.time.cfl <= 1.0)) r.fail("time", "cfl", "must lie in (0, 1]");
    r.real("time", "dt", c.time.dt);
    if (c.time.dt && !(*c.time.dt > 0.0)) r.fail("time", "dt", "must be positive");

    // [initial]
    auto& in = c.initial;
    r.choice<InitialKind>("initial", "type", in.kind,
                          {{"gaussian", InitialKind::gaussian},
                           {"smoothed_step", InitialKind::smoothed_step},
                           {"bump_derivative", InitialKind::bump_derivative},
                           {"tabulated", InitialKind::tabulated}});
    r.real("initial", "center", in.center);
    r.real("initial", "width", in.width);
    r.real("initial", "amplitude", in.amplitude);
    r.real("initial", "u_l", in.u_l);
    r.real("initial", "u_r", in.u_r);
    std::string file;
    r.text("initial", "file", file);
    if (!(in.width > 0.0)) r.fail("initial", "width", "must be positive");
    if (in.kind == InitialKind::tabulated) {
        if (file.empty()) {
            r.fail("initial", "file", "tabulated data need a file");
        } else {
            in.file = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base_dir / file;
            try {
                auto t = detail::read_table(in.file);
                GridFunction1D::from_samples(t.x, t.u, Boundary::compact());
            } catch (const std::exception& e) {
                r.fail("initial", "file", e.what());
            }
        }
    }

    // [diagnostics]
    auto& dg = c.diagnostics;
    r.flag("diagnostics", "energy", dg.energy);
    r.flag("diagnostics", "tv", dg.tv);
    r.flag("diagnostics", "oleinik", dg.oleinik);
    r.flag("diagnostics", "weak_form", dg.weak_form);
    r.count("diagnostics", "time_samples", dg.time_samples);
    if (dg.weak_form && dg.time_samples < 3) r.fail("diagnostics", "time_samples", "must be at least 3");
    r.real("diagnostics", "oleinik_C", dg.oleinik_C);
    if (!(dg.oleinik_C > 0.0)) r.fail("diagnostics", "oleinik_C", "must be positive");
    r.real("diagnostics", "rtol", dg.rtol);
    if (!(dg.rtol > 0.0)) r.fail("diagnostics", "rtol", "must be positive");
    std::vector<double> tf;
    if (r.list("diagnostics", "test_function", tf)) {
        if (tf.size() != 4 || !(tf[1] > 0.0) || !(tf[3] > 0.0))
            r.fail("diagnostics", "test_function", "expected 't_center, t_radius, x_center, x_radius' with positive radii");
        else dg.test_function = std::array<double, 4>{tf[0], tf[1], tf[2], tf[3]};
    }

    // [output]
    std::string dir;
    r.text("output", "directory", dir);
    if (!dir.empty()) c.output.directory = dir;
    r.count("output", "profile_points", c.output.profile_points);
    if (c.output.profile_points != 0 && c.output.profile_points < 5)
        r.fail("output", "profile_points", "must be 0 (automatic) or at least 5");

    // [wave]
    auto& w = c.wave;
    r.choice<WaveType>("wave", "type", w.type,
                       {{"shock_layer", WaveType::shock_layer},
                        {"cuspon", WaveType::cuspon},
                        {"periodic_cuspon", WaveType::periodic_cuspon}});
    r.real("wave", "u_minus", w.u_minus);
    r.real("wave", "u_plus", w.u_plus);
    r.real("wave", "u0", w.u0);
    r.real("wave", "u1", w.u1);
    if (c.pipeline == Pipeline::wave) {
        if (w.type == WaveType::shock_layer && !(w.u_minus > w.u_plus))
            r.fail("wave", "u_plus", "shock layers need u_minus > u_plus");
        if (w.type == WaveType::cuspon && w.u0 == 0.0) r.fail("wave", "u0", "must be nonzero");
        if (w.type == WaveType::periodic_cuspon && !(w.u0 > 0.0)) r.fail("wave", "u0", "must be positive");
        if (w.type == WaveType::periodic_cuspon && !(w.u1 > w.u0))
            r.fail("wave", "u1", "periodic cuspons need 0 < u0 < u1");
    }

    // [limit]
    auto& L = c.limit;
    const bool has_ells = r.list("limit", "ells", L.ells);
    std::string ladder;
    r.text("limit", "ladder", ladder);
    double l0 = 0.0, l1 = 0.0;
    r.real("limit", "ell_start", l0);
    r.real("limit", "ell_stop", l1);
    if (!ladder.empty()) {
        if (has_ells) r.fail("limit", "ladder", "give either ells or ladder, not both");
        else if (!(l0 > 0.0) || !(l1 > 0.0)) r.fail("limit", "ell_start", "ladders need positive ell_start and ell_stop");
        else if (ladder == "halving") {
            if (!(l1 <= l0)) r.fail("limit", "ell_stop", "a halving ladder needs ell_stop <= ell_start");
            for (double l = l0; l >= l1 * (1.0 - 1e-12); l *= 0.5) L.ells.push_back(l);
        } else if (ladder == "doubling") {
            if (!(l1 >= l0)) r.fail("limit", "ell_stop", "a doubling ladder needs ell_stop >= ell_start");
            for (double l = l0; l <= l1 * (1.0 + 1e-12); l *= 2.0) L.ells.push_back(l);
        } else {
            r.fail("limit", "ladder", "unknown value '" + ladder + "' (expected one of: halving, doubling)");
        }
    }
    r.real("limit", "t", L.t);
    if (L.t && !(*L.t > 0.0)) r.fail("limit", "t", "must be positive");
    std::vector<double> reg;
    if (r.list("limit", "region", reg)) {
        if (reg.size() != 2 || !(reg[0] < reg[1])) r.fail("limit", "region", "expected 'a, b' with a < b");
        else L.region_min = reg[0], L.region_max = reg[1];
    }
    r.count("limit", "region_points", L.region_points);
    r.real("limit", "dt", L.dt);
    r.real("limit", "pad_max", L.pad_max);
    r.text("limit", "reference", L.reference);
    r.count("limit", "hs_seeds", L.hs_seeds);
    r.flag("limit", "record_runtime", L.record_runtime);
    if (c.pipeline == Pipeline::limit) {
        if (L.ells.empty()) rep.add(doc.section_line("limit"), "[limit] ells", "the limit study needs ells or a ladder");
        for (double l : L.ells)
            if (!(l > 0.0)) {
                r.fail("limit", "ells", "entries must be positive");
                break;
            }
        if (L.region_points < 5) r.fail("limit", "region_points", "must be at least 5");
        if (!(L.dt > 0.0)) r.fail("limit", "dt", "must be positive");
        if (!(L.pad_max >= 0.0)) r.fail("limit", "pad_max", "must be non-negative");
        if (L.reference != "automatic" && L.reference != "burgers" && L.reference != "hunter_saxton")
            r.fail("limit", "reference", "unknown value '" + L.reference + "' (expected one of: automatic, burgers, hunter_saxton)");
    }

    r.reject_unknown({"scenario", "initial", "model", "grid", "time", "diagnostics", "output", "wave", "limit"});
    return c;
}

/// Validation report for text; never touches the file system beyond reading a tabulated datum.
inline ValidationReport validate_text(const std::string& text, const std::string& source,
                                      const std::filesystem::path& base_dir = {}, ScenarioConfig* out = nullptr,
                                      std::optional<Pipeline> force_pipeline = std::nullopt) {
    ValidationReport rep;
    rep.source = source;
    auto doc = IniDocument::parse(text, source, rep);
    auto cfg = parse_scenario(doc, rep, base_dir, force_pipeline);
    if (out) *out = std::move(cfg);
    return rep;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline ValidationReport validate_file(const std::filesystem::path& p, ScenarioConfig* out = nullptr,
                                      std::optional<Pipeline> force_pipeline = std::nullopt) {
    return validate_text(read_file(p), p.string(), p.parent_path(), out, force_pipeline);
}

/// Load and validate, throwing ScenarioError on any issue.
inline ScenarioConfig load_scenario(const std::filesystem::path& p, std::optional<Pipeline> force_pipeline = std::nullopt) {
    ScenarioConfig c;
    auto rep = validate_file(p, &c, force_pipeline);
    if (!rep.ok()) throw ScenarioError(std::move(rep));
    return c;
}

inline ScenarioConfig scenario_from_text(const std::string& text, const std::string& source = "<text>",
                                         const std::filesystem::path& base_dir = {}) {
    ScenarioConfig c;
    auto rep = validate_text(text, source, base_dir, &c);
    if (!rep.ok()) throw ScenarioError(std::move(rep));
    return c;
}

struct ScenarioListing {
    std::filesystem::path path;
    std::string name;
    bool valid = true;
};

/// The *.ini files of a directory, sorted by file name, with their scenario names.
inline std::vector<ScenarioListing> list_scenarios(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw ConfigError("cannot read directory '" + dir.string() + "'");
    std::vector<ScenarioListing> out;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        if (!e.is_regular_file() || e.path().extension() != ".ini") continue;
        ScenarioConfig c;
        ScenarioListing item;
        item.path = e.path();
        try {
            item.valid = validate_file(e.path(), &c).ok();
            item.name = c.name;
        } catch (const ConfigError&) {
            item.valid = false;
        }
        out.push_back(std::move(item));
    }
    if (ec) throw ConfigError("cannot read directory '" + dir.string() + "': " + ec.message());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path.filename() < b.path.filename(); });
    return out;
}

// ---------------------------------------------------------------------------
// Initial data

inline InitialDatum make_datum(const InitialSpec& s) {
    const double c = s.center, w = s.width, A = s.amplitude;
    switch (s.kind) {
    case InitialKind::gaussian:
        return {[=](double x) { const double z = (x - c) / w; return A * std::exp(-z * z); },
                [=](double x) { const double z = (x - c) / w; return -2.0 * A * z / w * std::exp(-z * z); },
                {}};
    case InitialKind::smoothed_step: {
        const double ul = s.u_l, ur = s.u_r;
        return {[=](double x) { return ur + 0.5 * (ul - ur) * (1.0 - std::tanh((x - c) / w)); },
                [=](double x) { const double ch = std::cosh((x - c) / w); return -0.5 * (ul - ur) / (w * ch * ch); },
                {}};
    }
    case InitialKind::bump_derivative:
        return {[=](double x) { const double z = (x - c) / w; return -A * z * std::exp(-0.5 * z * z); },
                [=](double x) { const double z = (x - c) / w; return -A / w * (1.0 - z * z) * std::exp(-0.5 * z * z); },
                {}};
    case InitialKind::tabulated: {
        auto t = detail::read_table(s.file);
        auto f = std::make_shared<GridFunction1D>(GridFunction1D::from_samples(t.x, t.u, Boundary::compact()));
        auto df = std::make_shared<std::vector<double>>(derivative(f->grid, f->values));
        const double a = f->grid.x0(), b = f->grid.x_last();
        return {[=](double x) {
                    if (x <= a) return f->values.front();
                    if (x >= b) return f->values.back();
                    return interp_cubic(f->grid, f->values, x);
                },
                [=](double x) { return (x <= a || x >= b) ? 0.0 : interp_cubic(f->grid, *df, x); },
                {a, b}};
    }
    }
    throw InputError("unknown initial datum");
}

/// Solver grid for Eulerian runs: N nodes on [a, b], or N nodes of period b - a.
inline UniformGrid solver_grid(const ScenarioConfig& c) {
    if (c.grid.boundary == BoundaryKind::periodic)
        return UniformGrid::periodic(c.grid.x_min, c.grid.x_max - c.grid.x_min, c.grid.N);
    return UniformGrid::compact(c.grid.x_min, c.grid.x_max, c.grid.N, c.grid.pad_ells);
}

} // namespace rburgers
