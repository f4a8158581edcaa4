#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../field/coefficient.hpp"
#include "../matrixext/matrix_model.hpp"
#include "../solver/picard.hpp"

namespace jumpfb {

inline const std::vector<std::string>& known_audits() {
    static const std::vector<std::string> names{
        "solve-residual", "acf-monotonicity", "acf-friedland-hayman", "fb-mu",          "fb-flux",
        "fb-classify",    "fb-lipschitz",     "fb-perimeter",         "blowup-fit",     "blowup-cascade",
        "blowup-envelope", "matrix-kappa",    "matrix-acf"};
    return names;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

// decimal or "p/q"
inline double parse_number(const std::string& text, const std::string& key) {
    const std::string s = trim(text);
    const auto bad = [&] { return ConfigError("key '" + key + "': '" + text + "' is not a number"); };
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double p = parse_number(s.substr(0, slash), key), q = parse_number(s.substr(slash + 1), key);
        if (q == 0.0) throw bad();
        return p / q;
    }
    if (s.empty()) throw bad();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw bad();
    return v;
}

inline std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
    std::string s = trim(text);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<double> out;
    for (const auto& part : split(s, ','))
        if (!part.empty()) out.push_back(parse_number(part, key));
    return out;
}

inline bool parse_bool(const std::string& text, const std::string& key) {
    const std::string s = trim(text);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("key '" + key + "': '" + text + "' is not a boolean");
}

} // namespace detail

/// Flat `key = value` text with `#` comments. Keys are dotted paths; a key
/// may appear once.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    for (int n = 1; std::getline(is, line); ++n) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
        if (!out.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(n) + ": duplicate key '" + key + "'");
    }
    return out;
}

inline std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Typed view of a config. Audit parameters stay as strings in `entries`
/// and are read through the accessors with their defaults.
struct ExperimentConfig {
    std::string name = "experiment";
    int dim = 2;
    double radius = 1.0;
    int cells = 128;
    double lambda = 0.4;
    std::string aplus = "constant(1)";
    std::string aminus = "constant(1)";
    std::string matrix;  // empty for scalar problems
    std::string boundary = "zero()";
    std::string field = "solve";  // solve | exact
    bool reference = false;       // boundary data is an exact solution
    std::string eps_schedule = "default";
    SolverOptions solver;
    double residual_tol = 1e-6;
    std::vector<std::string> audits;
    std::vector<double> center;
    std::string out_dir;
    std::vector<double> sweep;  // grid spacings of a refinement sweep
    std::uint64_t seed = 1;
    std::map<std::string, std::string> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    double number(const std::string& key, double fallback) const {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : detail::parse_number(it->second, key);
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : detail::parse_numbers(it->second, key);
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : it->second;
    }
    bool flag(const std::string& key, bool fallback) const {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : detail::parse_bool(it->second, key);
    }
};

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys{
        "name", "dim", "grid.radius", "grid.cells", "grid.sweep", "problem.lambda", "problem.aplus",
        "problem.aminus", "problem.matrix", "problem.boundary", "problem.field", "problem.reference",
        "solver.eps_schedule", "solver.tol", "solver.max_iters", "solver.linear_tol", "solver.face",
        "solver.residual_tol", "audits", "audit.center", "audit.snap", "output.dir", "output.formats", "output.dump", "seed",
        "acf.radii", "acf.cbar", "acf.tol_factor", "acf.caps", "fh.radii", "fb.bumps", "fb.bump_radius",
        "fb.mu_constant", "fb.eta_radius", "fb.eta_center", "fb.flux_tol", "fb.flux_levels", "fb.classify_rmax",
        "fb.classify_threshold", "fb.expect", "fb.lipschitz_rho", "fb.lipschitz_tol", "fb.two_sided_min",
        "blowup.fit_radius", "blowup.fit_tol", "blowup.unit_cells", "blowup.rbar", "blowup.alpha", "blowup.steps",
        "blowup.floor_cells", "blowup.flat_floor", "blowup.initial", "blowup.envelope_c", "matrix.minus"};
    return keys;
}

/// Builds and validates a config: every key known, every model string
/// parses, every audit name known, output directory writable. Nothing is
/// solved here.
inline ExperimentConfig make_config(const std::map<std::string, std::string>& entries) {
    ExperimentConfig c;
    c.entries = entries;
    for (const auto& [k, v] : entries)
        if (!known_config_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
    c.name = c.text("name", c.name);
    c.dim = static_cast<int>(c.number("dim", 2));
    if (c.dim != 2 && c.dim != 3) throw ConfigError("dim must be 2 or 3");
    c.radius = c.number("grid.radius", c.radius);
    const double cells = c.number("grid.cells", c.cells);
    if (cells != std::floor(cells)) throw ConfigError("grid.cells must be an integer");
    c.cells = static_cast<int>(cells);
    if (!(c.radius > 0.0)) throw ConfigError("grid.radius must be positive");
    if (c.cells < 16 || c.cells % 2) throw ConfigError("grid.cells must be an even integer >= 16");
    c.lambda = c.number("problem.lambda", c.lambda);
    c.aplus = c.text("problem.aplus", c.aplus);
    c.aminus = c.text("problem.aminus", c.aminus);
    c.matrix = c.text("problem.matrix", "");
    c.boundary = c.text("problem.boundary", c.boundary);
    c.field = c.text("problem.field", c.field);
    if (c.field != "solve" && c.field != "exact") throw ConfigError("problem.field must be solve or exact");
    c.reference = c.flag("problem.reference", c.field == "exact");
    c.eps_schedule = c.text("solver.eps_schedule", c.eps_schedule);
    c.solver.tol = c.number("solver.tol", c.solver.tol);
    c.solver.max_iters = static_cast<int>(c.number("solver.max_iters", c.solver.max_iters));
    c.solver.linear_tol = c.number("solver.linear_tol", c.solver.linear_tol);
    const std::string face = c.text("solver.face", "edge_mean");
    if (face == "edge_mean")
        c.solver.face = FaceAverage::edge_mean;
    else if (face == "harmonic")
        c.solver.face = FaceAverage::harmonic;
    else
        throw ConfigError("solver.face must be edge_mean or harmonic");
    c.residual_tol = c.number("solver.residual_tol", c.residual_tol);
    c.seed = static_cast<std::uint64_t>(c.number("seed", 1));
    c.center = c.numbers("audit.center", std::vector<double>(c.dim, 0.0));
    if (static_cast<int>(c.center.size()) != c.dim) throw ConfigError("audit.center must have dim entries");
    c.sweep = c.numbers("grid.sweep", {});

    for (const auto& a : detail::split(c.text("audits", ""), ','))
        if (!a.empty()) c.audits.push_back(a);
    for (const auto& a : c.audits) {
        if (std::find(known_audits().begin(), known_audits().end(), a) == known_audits().end())
            throw ConfigError("unknown audit '" + a + "'");
        if (std::count(c.audits.begin(), c.audits.end(), a) > 1) throw ConfigError("audit '" + a + "' listed twice");
    }

    // model strings
    for (const auto* model : {&c.aplus, &c.aminus}) {
        const auto a = parse_coefficient(*model, c.lambda);
        const double v = c.dim == 2 ? a(Point<2>{}) : a(Point<3>{});
        if (!(v >= c.lambda && v <= 1.0 / c.lambda))
            throw ConfigError("coefficient '" + *model + "' leaves [lambda, 1/lambda] at the origin");
    }
    if (!c.matrix.empty()) {
        const auto m = parse_matrix_model(c.matrix, c.lambda);
        if (m.dim() != c.dim) throw ConfigError("problem.matrix dimension does not match dim");
    }
    if (c.has("matrix.minus")) {
        const auto m = parse_matrix_model(c.text("matrix.minus", ""), c.lambda);
        if (m.dim() != c.dim) throw ConfigError("matrix.minus dimension does not match dim");
    }
    if (c.dim == 2)
        (void)parse_boundary<2>(c.boundary, 1.0, 1.0);
    else
        (void)parse_boundary<3>(c.boundary, 1.0, 1.0);
    if (c.eps_schedule != "default")
        for (double e : detail::parse_numbers(c.eps_schedule, "solver.eps_schedule"))
            if (!(e > 0.0)) throw ConfigError("solver.eps_schedule entries must be positive");
    for (double h : c.sweep) {
        const double n = 2.0 * c.radius / h;
        if (!(h > 0.0) || std::abs(n - std::round(n)) > 1e-9 * n)
            throw ConfigError("grid.sweep spacing " + format_real(h) + " does not divide the box");
    }
    const std::string expect = c.text("fb.expect", "any");
    if (expect != "any" && expect != "nondegenerate" && expect != "degenerate")
        throw ConfigError("fb.expect must be any, nondegenerate or degenerate");

    c.out_dir = c.text("output.dir", "");
    if (!c.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(c.out_dir, ec);
        const auto probe = std::filesystem::path(c.out_dir) / ".write-test";
        std::ofstream os(probe);
        if (ec || !os) throw ConfigError("output directory '" + c.out_dir + "' is not writable");
        os.close();
        std::filesystem::remove(probe, ec);
    }
    return c;
}

} // namespace jumpfb
