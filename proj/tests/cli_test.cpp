#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include <jumpfb/cli/experiment.hpp>

using namespace jumpfb;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = JUMPFB_CONFIG_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("jumpfb-cli-test-" + name);
    fs::remove_all(d);
    return d;
}

std::map<std::string, std::string> small_two_plane() {
    return parse_config_text(R"(
name = small
grid.cells = 32
problem.aplus = constant(2)
problem.aminus = constant(1)
problem.boundary = twoplane(1, [1, 0])
problem.reference = true
acf.radii = 0.25, 0.3, 0.4, 0.5
audits = solve-residual, acf-monotonicity, fb-perimeter
)");
}

// every number in a string, rounded through format_real
std::multiset<std::string> numbers_in(const std::string& s) {
    static const std::regex num(R"([-+]?\d+\.?\d*(?:[eE][-+]?\d+)?)");
    std::multiset<std::string> out;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it)
        out.insert(format_real(std::stod(it->str())));
    return out;
}

int run_cli(const std::string& args) {
    const int rc = std::system((std::string(JUMPFB_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST(ParseConfigText, CommentsAndWhitespace) {
    const auto m = parse_config_text("# header\n  dim = 3   # trailing\n\nname=x\n");
    EXPECT_EQ(m.at("dim"), "3");
    EXPECT_EQ(m.at("name"), "x");
    EXPECT_EQ(m.size(), 2u);
}

TEST(ParseConfigText, Errors) {
    try {
        parse_config_text("dim = 2\ndim = 3\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(parse_config_text("dim 2\n"), ConfigError);
    EXPECT_THROW(parse_config_text(" = 2\n"), ConfigError);
}

TEST(MakeConfig, Defaults) {
    const auto c = make_config({});
    EXPECT_EQ(c.dim, 2);
    EXPECT_EQ(c.cells, 128);
    EXPECT_TRUE(c.audits.empty());
    EXPECT_EQ(c.center, (std::vector<double>{0.0, 0.0}));
}

TEST(MakeConfig, Rejections) {
    const std::vector<std::map<std::string, std::string>> bad{
        {{"grid.spacing", "0.1"}},
        {{"audits", "solve-residual, acf-bogus"}},
        {{"audits", "fb-mu, fb-mu"}},
        {{"dim", "4"}},
        {{"grid.cells", "33"}},
        {{"grid.cells", "8"}},
        {{"problem.aplus", "hoelder(2, 0.25)"}},
        {{"problem.aplus", "constant(5)"}},
        {{"problem.matrix", "identity(3)"}},
        {{"problem.boundary", "cone()"}},
        {{"grid.sweep", "0.3"}},
        {{"solver.face", "upwind"}},
        {{"fb.expect", "maybe"}},
        {{"audit.center", "[0, 0, 0]"}},
    };
    for (const auto& e : bad) EXPECT_THROW(make_config(e), ConfigError) << e.begin()->first << " = " << e.begin()->second;
}

TEST(RunExperiment, UnknownAuditFailsBeforeSolve) {
    auto e = small_two_plane();
    e["audits"] = "solve-residual, nonsense";
    e["grid.cells"] = "4096";
    EXPECT_THROW(make_config(e), ConfigError);
}

TEST(RunExperiment, EmptyAuditList) {
    auto e = small_two_plane();
    e["audits"] = "";
    const auto r = run_experiment(make_config(e));
    EXPECT_TRUE(r.audits.empty());
    const auto j = to_json(r);
    ASSERT_TRUE(j.at("audits").is_array());
    EXPECT_TRUE(j.at("audits").empty());
    EXPECT_EQ(r.status, "complete");
}

TEST(RunExperiment, SmallTwoPlanePasses) {
    const auto r = run_experiment(make_config(small_two_plane()));
    ASSERT_EQ(r.audits.size(), 3u);
    for (const auto& a : r.audits) EXPECT_EQ(a.verdict, Verdict::pass) << a.name;
    EXPECT_FALSE(r.any_fail());
}

TEST(RunExperiment, RefinementSweepTable) {
    auto e = small_two_plane();
    e["grid.sweep"] = "1/64, 1/128, 1/256";
    e["audits"] = "solve-residual";
    const auto r = run_experiment(make_config(e));
    ASSERT_EQ(r.refinement_rows.size(), 3u);
    EXPECT_EQ(r.refinement_columns.size(), r.refinement_rows[0].size());
    EXPECT_DOUBLE_EQ(r.refinement_rows[0][0], 1.0 / 64);
    EXPECT_DOUBLE_EQ(r.refinement_rows[2][0], 1.0 / 256);
    // error column shrinks with h
    EXPECT_LT(r.refinement_rows[2][4], r.refinement_rows[0][4]);
}

TEST(RunExperiment, ShippedTwoPlaneAllPass) {
    const auto r = run_experiment(make_config(load_config_file((kConfigs / "twoplane-2d.cfg").string())));
    ASSERT_FALSE(r.audits.empty());
    for (const auto& a : r.audits) EXPECT_EQ(a.verdict, Verdict::pass) << a.name;
}

TEST(Emit, ByteIdenticalTwice) {
    auto e = small_two_plane();
    const auto a = scratch("a"), b = scratch("b");
    e["output.dir"] = a.string();
    run_experiment(make_config(e));
    e["output.dir"] = b.string();
    run_experiment(make_config(e));
    for (const char* f : {"report.json", "report.csv", "report.txt", "solution.grid"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_TRUE(fs::exists(a / "timing.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Emit, FormatsCarrySameNumbers) {
    const auto r = run_experiment(make_config(small_two_plane()));
    const auto j = to_json(r);
    std::string json_values;
    for (const auto& a : j.at("audits")) {
        json_values += a.at("tolerance").dump() + " ";
        for (const auto& v : a.at("values")) json_values += v.at("value").dump() + " ";
    }
    std::string csv_values, text_values;
    std::istringstream csv(render_csv(r));
    std::string line;
    std::getline(csv, line);
    std::string last_head;
    while (std::getline(csv, line)) {
        const auto value_at = line.rfind(',');
        const auto tol_end = line.rfind(',', value_at - 1);
        const auto tol_begin = line.rfind(',', tol_end - 1);
        const std::string head = line.substr(0, tol_end);
        if (head != last_head) csv_values += line.substr(tol_begin + 1, tol_end - tol_begin - 1) + " ";
        last_head = head;
        csv_values += line.substr(value_at + 1) + " ";
    }
    std::istringstream text(render_text(r));
    while (std::getline(text, line)) {
        if (const auto t = line.find("tolerance "); t != std::string::npos) text_values += line.substr(t + 10) + " ";
        if (const auto eq = line.find(" = "); eq != std::string::npos) text_values += line.substr(eq + 3) + " ";
    }
    EXPECT_FALSE(numbers_in(json_values).empty());
    EXPECT_EQ(numbers_in(json_values), numbers_in(csv_values));
    EXPECT_EQ(numbers_in(json_values), numbers_in(text_values));
}

TEST(Emit, JsonRoundTrip) {
    auto e = small_two_plane();
    e["grid.sweep"] = "1/16, 1/32";
    const auto r = run_experiment(make_config(e));
    const auto back = report_from_json(to_json(r));
    EXPECT_EQ(render_json(back), render_json(r));
    EXPECT_EQ(render_csv(back), render_csv(r));
    EXPECT_EQ(render_text(back), render_text(r));
    EXPECT_THROW(report_from_json(nlohmann::json::object()), ConfigError);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("exit");
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream(dir / name) << body;
        return (dir / name).string();
    };
    const std::string good = write("good.cfg",
                                   "grid.cells = 32\nproblem.aplus = constant(2)\nproblem.boundary = twoplane(1, [1, 0])\n"
                                   "audits = solve-residual\n");
    EXPECT_EQ(run_cli("solve --config " + good + " --out " + (dir / "out").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
    EXPECT_EQ(run_cli("report " + (dir / "out" / "report.json").string()), 0);
    EXPECT_EQ(run_cli("suite --config " + write("bad.cfg", "audits = nope\n")), 2);
    // residual tolerance nobody can meet
    EXPECT_EQ(run_cli("solve --config " + write("strict.cfg",
                                                "grid.cells = 32\nproblem.aplus = constant(2)\n"
                                                "problem.boundary = twoplane(1, [1, 0])\n"
                                                "solver.residual_tol = 1e-300\naudits = solve-residual\n")),
              1);
    fs::remove_all(dir);
}
