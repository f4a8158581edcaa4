// jumpfb: solve two-phase conductivity-jump problems and run the audits
// listed in a config file.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <jumpfb/cli/experiment.hpp>

namespace fs = std::filesystem;
using namespace jumpfb;

namespace {

const std::map<std::string, std::vector<std::string>> kModuleAudits{
    {"solve", {"solve-residual"}},
    {"acf", {"acf-monotonicity", "acf-friedland-hayman"}},
    {"fb", {"fb-mu", "fb-flux", "fb-classify", "fb-lipschitz", "fb-perimeter"}},
    {"blowup", {"blowup-fit", "blowup-cascade", "blowup-envelope"}},
    {"matrix", {"matrix-kappa", "matrix-acf"}},
};

struct Overrides {
    std::string out;
    std::string sweep;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

std::map<std::string, std::string> load_with_overrides(const std::string& path, const Overrides& o,
                                                       const std::string& out_dir) {
    auto entries = load_config_file(path);
    if (!out_dir.empty()) entries["output.dir"] = out_dir;
    if (!o.sweep.empty()) entries["grid.sweep"] = o.sweep;
    if (o.has_seed) entries["seed"] = std::to_string(o.seed);
    return entries;
}

// Keeps the config's audits of one module, or the module defaults when the
// config lists none of them.
void restrict_audits(ExperimentConfig& cfg, const std::string& module) {
    const auto& mine = kModuleAudits.at(module);
    std::vector<std::string> kept;
    for (const auto& a : cfg.audits)
        if (std::find(mine.begin(), mine.end(), a) != mine.end()) kept.push_back(a);
    cfg.audits = kept.empty() ? mine : kept;
}

void print_summary(const RunReport& r) {
    std::cout << r.name << " (" << r.status << ")\n";
    for (const auto& a : r.audits) std::cout << "  " << to_string(a.verdict) << "  " << a.name << '\n';
}

int run_one(const std::string& path, const std::string& module, const Overrides& o) {
    auto cfg = make_config(load_with_overrides(path, o, o.out));
    if (!module.empty()) restrict_audits(cfg, module);
    const auto r = run_experiment(cfg);
    print_summary(r);
    if (!cfg.out_dir.empty()) std::cout << "  reports in " << cfg.out_dir << '\n';
    return r.any_fail() ? 1 : 0;
}

// every *.cfg of a directory (sorted), or a single file
int run_suite(const std::string& path, const Overrides& o) {
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path))
            if (e.path().extension() == ".cfg") files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    if (files.empty()) throw ConfigError("no .cfg files in '" + path + "'");
    // validate everything before any solve
    std::vector<ExperimentConfig> cfgs;
    for (const auto& f : files) {
        const std::string sub = o.out.empty() ? "" : (fs::path(o.out) / fs::path(f).stem()).string();
        cfgs.push_back(make_config(load_with_overrides(f, o, sub)));
    }
    int failed = 0;
    for (const auto& c : cfgs) {
        const auto r = run_experiment(c);
        print_summary(r);
        failed += r.any_fail();
    }
    std::cout << cfgs.size() - failed << " of " << cfgs.size() << " experiments without FAIL\n";
    return failed ? 1 : 0;
}

int rewrite_report(const std::string& path, const std::string& out) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read report '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const auto r = report_from_json(j);
    const fs::path dir = out.empty() ? fs::path(path).parent_path() : fs::path(out);
    for (const auto& p : emit_report(r, dir.empty() ? fs::path(".") : dir)) std::cout << p.string() << '\n';
    print_summary(r);
    return r.any_fail() ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-phase conductivity-jump solver and audits"};
    app.require_subcommand(1);
    Overrides o;
    std::string config;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "config file")->required();
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--grid-sweep", o.sweep, "grid spacings h1,h2,... for a refinement sweep");
        sub->add_option("--seed", o.seed, "seed for randomized bump families")->each([&](const std::string&) {
            o.has_seed = true;
        });
    };
    for (const auto& [name, audits] : kModuleAudits) {
        auto* sub = app.add_subcommand(name, name == "solve" ? "solve and check the residual"
                                                             : "run the " + name + " audits");
        add_common(sub);
    }
    auto* suite = app.add_subcommand("suite", "run every audit of a config, or of every .cfg in a directory");
    add_common(suite);
    std::string report_path;
    auto* report = app.add_subcommand("report", "re-emit report.json as json, csv and text");
    report->add_option("report", report_path, "path to report.json")->required();
    report->add_option("--out", o.out, "output directory");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*report) return rewrite_report(report_path, o.out);
        if (*suite) return run_suite(config, o);
        for (const auto& [name, audits] : kModuleAudits)
            if (*app.get_subcommand(name)) return run_one(config, name, o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
