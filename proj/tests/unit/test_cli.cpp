#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "warpflow/commands.hpp"
#include "warpflow/svg.hpp"

using namespace warpflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& s) const { return (path / s).string(); }
};

}  // namespace

TEST_CASE("config grammar") {
    RunConfig rc = parse_config("# comment\ninitial = sausage\nn = 4\ntau = -3  # trailing\ntaus = -5, -10,-20\n");
    CHECK(rc.n == 4);
    CHECK(rc.tau == -3.0);
    CHECK(rc.taus == std::vector<double>{-5, -10, -20});
    CHECK(resolved_gauge(rc) == Gauge::arclength);
    CHECK(resolved_gauge(parse_config("initial = round_sphere\n")) == Gauge::coordinate);
    RunConfig te = parse_config("t_end = 0.5\n");
    CHECK_FALSE(te.run_to_extinction);
    CHECK(flow_config(te).t_end == 0.5);

    CHECK_THROWS_AS(parse_config("tau = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("wobble = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = 3\nn = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = 3.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("cfl = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("imex = true\n"), ConfigError);
    CHECK_NOTHROW(parse_config("imex = true\norder = 2\n"));
    CHECK_THROWS_AS(parse_config("initial = hypersausage\nn = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("node_count = 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("t_end = 1\nrun_to_extinction = true\n"), ConfigError);
}

TEST_CASE("member config replaces tau and drops the sweep list") {
    RunConfig rc = parse_config("taus = -5, -10, -20\nnode_count = 101\n");
    RunConfig m = member_config(rc, -10);
    CHECK(m.tau == -10);
    CHECK(m.taus.empty());
    RunConfig back = parse_config(m.text);
    CHECK(back.tau == -10);
    CHECK(back.node_count == 101);
    CHECK(back.taus.empty());
}

TEST_CASE("run writes the documented outputs") {
    TempDir d("warpflow_cli_run");
    write_file(d / "c.cfg", "initial = sausage\ntau = -1\nnode_count = 101\nsnapshot_every = 5\n");
    std::ostringstream log;
    CHECK(cmd_run(d / "c.cfg", d / "out", log) == kExitOk);
    for (const char* f : {"summary.csv", "report.json", "initial.wfp", "final.wfp", "plots/h.svg", "plots/area.svg",
                          "plots/lambda_hat.svg", "plots/margins.svg", "profiles/0000.json"}) {
        CHECK_MESSAGE(fs::exists(d / (std::string("out/") + f)), f);
    }
    const std::string csv = read_file(d / "out/summary.csv");
    CHECK(csv.substr(0, csv.find('\n')) == kSummaryHeader);
    auto report = nlohmann::json::parse(read_file(d / "out/report.json"));
    CHECK(report["schema_version"] == schema_version());
    CHECK(report["reason"] == "ok");
    const double T = report["extinction_time"];
    CHECK(T >= 0.5);
    CHECK(T <= 1.0);
    auto fin = decode_profile(read_file(d / "out/final.wfp"));
    CHECK(fin.provenance.size() == 2);
    CHECK(fin.provenance.back().parent == digest(read_file(d / "out/initial.wfp")));
}

TEST_CASE("identical configs give byte-identical summary.csv") {
    TempDir d("warpflow_cli_determinism");
    write_file(d / "c.cfg", "initial = sausage\ntau = -1\nnode_count = 65\nplots = false\n");
    std::ostringstream log;
    REQUIRE(cmd_run(d / "c.cfg", d / "a", log) == kExitOk);
    REQUIRE(cmd_run(d / "c.cfg", d / "b", log) == kExitOk);
    CHECK(read_file(d / "a/summary.csv") == read_file(d / "b/summary.csv"));
}

TEST_CASE("resume from a rolling checkpoint reproduces summary.csv") {
    TempDir d("warpflow_cli_resume");
    write_file(d / "c.cfg", "initial = sausage\ntau = -1\nnode_count = 65\ncheckpoint_every = 4\nplots = false\n");
    std::ostringstream log;
    REQUIRE(cmd_run(d / "c.cfg", d / "a", log) == kExitOk);
    REQUIRE(fs::exists(d / "a/checkpoint.wfc"));
    REQUIRE(cmd_resume(d / "a/checkpoint.wfc", d / "b", log) == kExitOk);
    CHECK(read_file(d / "a/summary.csv") == read_file(d / "b/summary.csv"));
}

TEST_CASE("command exit codes") {
    TempDir d("warpflow_cli_codes");
    std::ostringstream log;
    write_file(d / "pos.cfg", "tau = 1\n");
    CHECK(cmd_run(d / "pos.cfg", d / "o", log) == kExitConfig);
    CHECK_FALSE(fs::exists(d / "o"));
    CHECK(cmd_run(d / "missing.cfg", std::nullopt, log) == kExitConfig);
    CHECK(cmd_verify("nonsense", d.path.string(), log) == kExitConfig);
    write_file(d / "two.cfg", "taus = -5, -10\n");
    CHECK(cmd_sweep(d / "two.cfg", d / "s", log) == kExitConfig);
    write_file(d / "narrow.cfg", "taus = -5, -6, -7\n");
    CHECK(cmd_sweep(d / "narrow.cfg", d / "s", log) == kExitConfig);
    write_file(d / "bad.wfc", "garbage");
    CHECK(cmd_resume(d / "bad.wfc", d / "r", log) == kExitNumeric);
    CHECK(cmd_resume(d / "none.wfc", d / "r", log) == kExitNumeric);
}

TEST_CASE("svg chart is well formed") {
    std::string s = svg_line_chart("h", "t", {Series{"h", {0, 1, 2}, {1, 0.9, 0.7}}});
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("polyline") != std::string::npos);
}
