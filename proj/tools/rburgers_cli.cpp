// rburgers: run, validate and list scenarios; sample traveling waves; run limit studies.
//
//   rburgers run <config|dir>... [--out DIR] [--threads N] [--quiet]
//   rburgers validate <config>...
//   rburgers list <dir>
//   rburgers waves <shock_layer|cuspon|periodic_cuspon> [key=value ...]
//   rburgers limits <config>
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rburgers/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rburgers;

namespace {

struct Flags {
    std::string out;
    unsigned threads = 1;
    bool quiet = false;
};

RunOptions run_options(const Flags& f) {
    RunOptions o;
    if (!f.out.empty()) o.out_root = fs::path(f.out);
    o.threads = std::max(1u, f.threads);
    if (!f.quiet) o.log = [](const std::string& s) { std::cerr << s << '\n'; };
    return o;
}

int worst(const std::vector<RunResult>& rs) {
    int code = kExitOk;
    for (const auto& r : rs) code = std::max(code, r.exit_code);
    return code;
}

/// Expand directories to their *.ini files, in file-name order.
std::vector<fs::path> expand(const std::vector<std::string>& args) {
    std::vector<fs::path> out;
    for (const auto& a : args) {
        if (fs::is_directory(a)) {
            for (const auto& item : list_scenarios(a)) out.push_back(item.path);
        } else {
            out.emplace_back(a);
        }
    }
    return out;
}

int run_configs(const std::vector<fs::path>& files, const Flags& f, std::optional<Pipeline> force = std::nullopt) {
    std::vector<ScenarioConfig> cfgs;
    bool bad = false;
    for (const auto& p : files) {
        try {
            cfgs.push_back(load_scenario(p, force));
        } catch (const ConfigError& e) {
            std::cerr << e.what();
            if (std::string(e.what()).back() != '\n') std::cerr << '\n';
            bad = true;
        }
    }
    if (bad) return kExitConfig;
    const auto results = run_pool(cfgs, run_options(f));
    for (const auto& r : results) {
        if (r.exit_code != kExitOk) std::cerr << r.name << ": " << r.message << '\n';
        else if (!f.quiet) std::cout << r.directory.string() << '\n';
    }
    return worst(results);
}

int validate(const std::vector<std::string>& files, const Flags& f) {
    int code = kExitOk;
    for (const auto& p : files) {
        try {
            ScenarioConfig c;
            const auto rep = validate_file(p, &c);
            if (rep.ok()) {
                if (!f.quiet) std::cout << p << ": ok (" << c.name << ", " << to_string(c.pipeline) << ", " << c.config_hash << ")\n";
            } else {
                std::cerr << rep.format();
                code = kExitConfig;
            }
        } catch (const ConfigError& e) {
            std::cerr << e.what() << '\n';
            code = kExitConfig;
        }
    }
    return code;
}

int list(const std::string& dir) {
    try {
        for (const auto& item : list_scenarios(dir))
            std::cout << (item.valid ? item.name : std::string("(invalid)")) << '\t' << item.path.string() << '\n';
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

/// waves: key=value parameters become a generated config, so the same validation applies.
int waves(const std::string& kind, const std::vector<std::string>& params, const Flags& f) {
    static const std::map<std::string, std::string> section_of = {
        {"name", "scenario"},     {"ell", "model"},       {"N", "grid"},         {"domain", "grid"},
        {"u_minus", "wave"},      {"u_plus", "wave"},     {"u0", "wave"},        {"u1", "wave"},
        {"weak_form", "diagnostics"}, {"test_function", "diagnostics"}, {"rtol", "diagnostics"}};
    std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> by_section;
    bool named = false;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto eq = params[i].find('=');
        const std::string key = params[i].substr(0, eq);
        auto s = section_of.find(key);
        if (eq == std::string::npos || s == section_of.end()) {
            std::cerr << "waves: argument " << i + 1 << " '" << params[i] << "': expected key=value with key one of:";
            for (const auto& [k, _] : section_of) std::cerr << ' ' << k;
            std::cerr << '\n';
            return kExitConfig;
        }
        named = named || key == "name";
        by_section[s->second].push_back({params[i], i});
    }
    std::string text;
    std::map<int, std::size_t> arg_of_line;
    int line = 0;
    auto emit = [&](const std::string& s, std::optional<std::size_t> arg = std::nullopt) {
        text += s + '\n';
        ++line;
        if (arg) arg_of_line[line] = *arg;
    };
    emit("[scenario]");
    emit("pipeline = wave");
    if (!named) emit("name = " + kind);
    for (auto& [k, a] : by_section["scenario"]) emit(k, a);
    emit("[wave]");
    emit("type = " + kind);
    for (const char* sec : {"wave", "model", "grid", "diagnostics"}) {
        if (std::string(sec) != "wave") emit(std::string("[") + sec + "]");
        for (auto& [k, a] : by_section[sec]) emit(k, a);
    }
    ScenarioConfig c;
    auto rep = validate_text(text, "waves", {}, &c);
    if (!rep.ok()) {
        for (const auto& is : rep.issues) {
            auto a = arg_of_line.find(is.line);
            std::cerr << "waves: ";
            if (a != arg_of_line.end()) std::cerr << "argument " << a->second + 1 << " '" << params[a->second] << "': ";
            std::cerr << is.field << ": " << is.message << '\n';
        }
        return kExitConfig;
    }
    const auto r = run_scenario(c, run_options(f));
    if (r.exit_code != kExitOk) std::cerr << r.name << ": " << r.message << '\n';
    else if (!f.quiet) std::cout << r.directory.string() << '\n';
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the regularised Burgers equation"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--out", f.out, "Output root; replaces [output] directory");
    app.add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", f.quiet, "Only report errors");

    std::vector<std::string> run_args, validate_args, wave_params;
    std::string list_dir, wave_kind, limit_cfg;
    auto* run = app.add_subcommand("run", "Run scenarios (files or directories of *.ini)");
    run->add_option("configs", run_args)->required();
    auto* val = app.add_subcommand("validate", "Check configs without running them");
    val->add_option("configs", validate_args)->required();
    auto* lst = app.add_subcommand("list", "List the scenarios in a directory");
    lst->add_option("dir", list_dir)->required();
    auto* wav = app.add_subcommand("waves", "Sample a traveling wave");
    wav->add_option("kind", wave_kind)->required()->check(CLI::IsMember({"shock_layer", "cuspon", "periodic_cuspon"}));
    wav->add_option("params", wave_params, "key=value: ell, N, domain, u_minus, u_plus, u0, u1, name, ...");
    auto* lim = app.add_subcommand("limits", "Run the [limit] section of a config");
    lim->add_option("config", limit_cfg)->required();
    for (auto* s : {run, val, lst, wav, lim}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return run_configs(expand(run_args), f);
        if (*val) return validate(validate_args, f);
        if (*lst) return list(list_dir);
        if (*wav) return waves(wave_kind, wave_params, f);
        if (*lim) return run_configs({fs::path(limit_cfg)}, f, Pipeline::limit);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
