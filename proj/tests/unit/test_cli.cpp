#include "fixtures.hpp"

#include "cli.hpp"
#include "dualobs/model_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dualobs;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("dualobs_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate prints the KL anchors")
{
    const auto r1 = run_cli({"validate", fixtures::model_path("table1.json")});
    CHECK(r1.code == 0);
    CHECK(r1.out.find("D_KL(f1||f0) = 0.7986") != std::string::npos);
    CHECK(r1.out.find("D_KL(f0||f1) = 0.7057") != std::string::npos);
    const auto r2 = run_cli({"validate", fixtures::model_path("table2.json")});
    CHECK(r2.code == 0);
    CHECK(r2.out.find("0.0627") != std::string::npos);
    CHECK(r2.out.find("0.0649") != std::string::npos);
}

TEST_CASE("validate --json round-trips the model")
{
    const auto r = run_cli({"validate", fixtures::model_path("table2.json"), "--json"});
    REQUIRE(r.code == 0);
    const auto spec = parse_model_spec(r.out);
    CHECK(spec == fixtures::table2().spec());
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("model_hash"));
    CHECK(j["kl_bits"]["f1||f0"].get<double>() == doctest::Approx(0.0627).epsilon(0.01));
}

TEST_CASE("exit codes")
{
    const auto dir = scratch("codes");
    JointModelSpec bad;
    bad.s1_size = 2;
    bad.s2_size = 2;
    bad.f0 = {0.25, 0.25, 0.25, 0.25};
    bad.f1 = bad.f0;
    const auto bad_path = dir / "bad.json";
    std::ofstream(bad_path) << model_to_json(bad);
    CHECK(run_cli({"exponents", bad_path.string()}).code == 2);
    CHECK(run_cli({"validate", (dir / "absent.json").string()}).code == 2);

    const auto t1 = fixtures::model_path("table1.json");
    CHECK(run_cli({"exponents", t1, "--T1", "1000", "--T2", "1"}).code == 3);
    CHECK(run_cli({"exponents", t1, "--T", "1000"}).code == 3);

    const auto missing = run_cli({"simulate", t1, "--seed", "1", "--kind", "point", "--scheme", "aggregated"});
    CHECK(missing.code == 4);
    CHECK(missing.err.find("artifact not found") != std::string::npos);
    CHECK(run_cli({"simulate", t1, "--seed", "1", "--kind", "point", "--scheme", "aggregated", "--agg1",
                   (dir / "nope.json").string(), "--agg2", (dir / "nope.json").string()})
              .code == 4);

    CHECK(run_cli({"simulate", t1}).code == 1);  // --seed is required
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("exponents CSV")
{
    const auto r = run_cli({"exponents", fixtures::model_path("table1.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# tool: dualobs") != std::string::npos);
    CHECK(r.out.find("# model_hash:") != std::string::npos);
    CHECK(r.out.find("scheme,T1,T2,rate_fa") != std::string::npos);
    CHECK(r.out.find("centralized") != std::string::npos);
    CHECK(r.out.find("decentralized") != std::string::npos);
}

TEST_CASE("identical configs give identical outputs")
{
    const auto t1 = fixtures::model_path("table1.json");
    const std::vector<std::string> args{"simulate", t1, "--seed", "42", "--kind", "error-vs-n", "--n-max", "5",
                                        "--trials", "2000"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("# config_hash:") != std::string::npos);
    auto other = args;
    other[3] = "43";
    CHECK(run_cli(other).out != a.out);
}

TEST_CASE("aggbuild artifacts drive the point simulation")
{
    const auto dir = scratch("agg");
    const auto t1 = fixtures::model_path("table1.json");
    const auto b = run_cli({"aggbuild", t1, "--seed", "3", "--out-dir", dir.string(), "--T1", "2", "--T2", "0.5",
                            "--horizon", "4", "--strings", "5000"});
    REQUIRE(b.code == 0);
    for (const char* f : {"agg1.json", "agg2.json", "law1.json", "law2.json", "artifacts.json"}) {
        CHECK(fs::exists(dir / f));
    }
    const std::vector<std::string> sim{"simulate", t1, "--seed", "5", "--kind", "point", "--scheme", "aggregated",
                                       "--T1", "2", "--T2", "0.5", "--T3", "0.6", "--T4", "0.6",
                                       "--agg1", (dir / "agg1.json").string(), "--agg2",
                                       (dir / "agg2.json").string(), "--trials", "500",
                                       "--out", (dir / "point.csv").string(),
                                       "--trace-out", (dir / "trace.csv").string(), "--trace-trials", "3"};
    const auto s = run_cli(sim);
    CHECK(s.code == 0);
    CHECK(slurp(dir / "point.csv").find("aggregated") != std::string::npos);
    CHECK(slurp(dir / "trace.csv").find("trial,round,y,z") != std::string::npos);

    const auto ae = run_cli({"simulate", t1, "--seed", "5", "--kind", "point", "--scheme", "accuracy_exchange",
                             "--T1", "2", "--T2", "0.5", "--law1", (dir / "law1.json").string(), "--law2",
                             (dir / "law2.json").string(), "--trials", "200"});
    CHECK(ae.code == 0);
    CHECK(ae.out.find("accuracy_exchange") != std::string::npos);
}

TEST_CASE("installed binary runs")
{
    const auto dir = scratch("bin");
    const std::string cmd = std::string("\"") + DUALOBS_TOOL + "\" validate \"" + fixtures::model_path("table1.json") +
                            "\" > \"" + (dir / "out.txt").string() + "\"";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(dir / "out.txt").find("0.7986") != std::string::npos);
}
