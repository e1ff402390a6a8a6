#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sponge/cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "sponge-dim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = sponge::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string spec_path(const std::string& name) { return std::string(SPONGE_SPECS_DIR) + "/" + name + ".json"; }

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST_CASE("validate") {
    const auto ok = run({"validate", spec_path("skewed")});
    CHECK(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["ok"] == true);

    const auto bad = write_temp("sponge_cli_bad.json",
                                R"({"c": [0.6, 0.6], "b": [[0.5], [0.5]], "a": [[[0.5]], [[0.5]]]})");
    const auto r = run({"validate", bad});
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.out)["ok"] == false);
    CHECK(run({"dim", bad}).code == 1);
}

TEST_CASE("exit codes for input and i/o errors") {
    CHECK(run({"dim", "/nonexistent/spec.json"}).code == 3);
    const auto schema = write_temp("sponge_cli_schema.json", R"({"c": [0.5], "b": [[0.5]]})");
    const auto r = run({"dim", schema});
    CHECK(r.code == 1);
    CHECK(r.err.find("schema") != std::string::npos);
    CHECK(run({"dim"}).code == 1);
    CHECK(run({"frobnicate", spec_path("skewed")}).code == 1);
    CHECK(run({"dim", spec_path("skewed"), "--threads", "0"}).code == 1);
    CHECK(run({"dim", spec_path("skewed"), "--out", "/nonexistent/dir/out.json"}).code == 3);
    CHECK(run({"export", spec_path("skewed"), "--format", "stl"}).code == 1);
}

TEST_CASE("dim on the full cube") {
    const auto r = run({"dim", spec_path("full_cube"), "--threads", "2"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["dimension"].get<double>() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(doc["run"]["threads"] == 2);
    CHECK(doc["config"]["seed"] == 42);
}

TEST_CASE("dim output is reproducible across thread counts") {
    const auto one = run({"dim", spec_path("dominant_c"), "--threads", "1"});
    const auto again = run({"dim", spec_path("dominant_c"), "--threads", "1"});
    const auto four = run({"dim", spec_path("dominant_c"), "--threads", "4"});
    REQUIRE(one.code == 0);
    CHECK(one.out == again.out);
    auto a = nlohmann::json::parse(one.out), b = nlohmann::json::parse(four.out);
    a["run"].erase("threads");
    b["run"].erase("threads");
    a["config"].erase("threads");
    b["config"].erase("threads");
    CHECK(a == b);
}

TEST_CASE("dim with the oracle") {
    const auto r = run({"dim", spec_path("moran_r04"), "--oracle", "--depth", "5"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["oracle"]["depth"] == 5);
    CHECK(doc["oracle"]["agrees"] == true);
}

TEST_CASE("family and hypothesis") {
    const auto f = run({"family", spec_path("equal_heights"), "--grid", "4"});
    REQUIRE(f.code == 0);
    const auto doc = nlohmann::json::parse(f.out);
    CHECK(doc["solutions"].size() == 4);
    for (const auto& s : doc["solutions"]) CHECK(std::abs(s["residuals"]["normalization"].get<double>()) < 1e-12);

    const auto h = run({"hypothesis", spec_path("equal_heights")});
    REQUIRE(h.code == 0);
    const auto hd = nlohmann::json::parse(h.out);
    CHECK(hd["unit_interval"].contains("holds"));
    CHECK(hd["fiber_roots"]["t_ij"].size() == 2);

    CHECK(run({"family", spec_path("full_cube")}).code == 1);
}

TEST_CASE("csv subcommands carry their configuration") {
    const auto t = run({"trace", spec_path("dominant_c"), "--length", "2000", "--stride", "50"});
    REQUIRE(t.code == 0);
    CHECK(t.out.rfind("# {", 0) == 0);
    CHECK(t.out.find("\nn,L1,L2,d_pn,beta_n,eta_n\n") != std::string::npos);

    const auto b = run({"boxcount", spec_path("grid_carpet"), "--depth", "4"});
    REQUIRE(b.code == 0);
    CHECK(b.out.find("delta,count") != std::string::npos);

    const auto l = run({"landscape", spec_path("skewed"), "--mode", "family", "--grid", "5"});
    CHECK(l.code == 0);
}

TEST_CASE("export writes to --out") {
    const auto path = (fs::temp_directory_path() / "sponge_cli_cover.obj").string();
    const auto r = run({"export", spec_path("skewed"), "--depth", "1", "--format", "obj", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string line;
    int v = 0;
    while (std::getline(in, line)) v += line.rfind("v ", 0) == 0;
    CHECK(v == 8 * static_cast<int>(sponge::testing::load_spec("skewed").num_symbols()));
    std::remove(path.c_str());
}
