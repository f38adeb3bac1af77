#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "twistk/cli.hpp"

using twistk::run_cli;
using Json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
    Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("kgroup") {
    auto r = run({"kgroup", "--n", "2", "--k", "2"});
    REQUIRE(r.code == 0);
    auto j = r.json();
    CHECK(j["schema_version"] == 1);
    CHECK(j["K0"]["group"]["free_rank"] == 3);
    CHECK(j["K0"]["group"]["invariant_factors"].empty());
    CHECK(j["K1"]["group"]["free_rank"] == 3);
    CHECK(j["K1"]["group"]["invariant_factors"] == Json::array({"2"}));
    CHECK(j["checks"]["closed_form_matches"] == true);
    CHECK(j.contains("tolerance"));

    auto free = run({"kgroup", "--n", "2", "--k", "1"}).json();
    CHECK(free["K0"]["group"]["invariant_factors"].empty());
    CHECK(free["K1"]["group"]["invariant_factors"].empty());

    auto bad = run({"kgroup", "--n", "1", "--k", "2"});
    CHECK(bad.code != 0);
    CHECK_FALSE(bad.err.empty());

    auto csv = run({"kgroup", "--n", "2", "--k", "2", "--format", "csv"});
    CHECK(csv.out.rfind("degree,group", 0) == 0);
}

TEST_CASE("flow") {
    std::vector<std::string> base{"--L", "4", "--C", "2", "--grid", "64"};
    auto with = [&](std::vector<std::string> head) {
        head.insert(head.end(), base.begin(), base.end());
        return run(head);
    };
    auto pos = with({"flow", "--variant", "odd"});
    REQUIRE(pos.code == 0);
    CHECK(pos.json()["flow"]["net_flow"] == 1);
    CHECK(pos.json()["tolerance"]["seam"].is_number());
    auto neg = with({"flow", "--variant", "odd-negative"});
    CHECK(neg.code == 0);
    CHECK(neg.json()["flow"]["net_flow"] == -1);
    auto constant = with({"flow", "--variant", "constant"});
    CHECK(constant.code == 0);
    CHECK(constant.json()["flow"]["net_flow"] == 0);
    auto ranked = with({"flow", "--variant", "odd", "--rank", "3"});
    CHECK(ranked.json()["flow"]["net_flow"] == 3);
    auto csv = with({"flow", "--variant", "odd", "--format", "csv"});
    CHECK(csv.out.rfind("parameter,direction\n", 0) == 0);

    CHECK(run({"flow", "--variant", "sideways"}).code == 2);
    CHECK(run({"flow", "--L", "3", "--mode-max", "5"}).code == 2);
}

TEST_CASE("heat") {
    auto odd = run({"heat", "--variant", "odd", "--t", "1,4,16", "--L", "6", "--C", "4", "--grid", "64"});
    REQUIRE(odd.code == 0);
    auto j = odd.json();
    CHECK(j["samples"].size() == 3);
    for (const auto& s : j["samples"]) CHECK(std::abs(s["stats"]["total"].get<double>() - 1.0) < 1e-6);
    CHECK(j["tolerance"] == 1e-6);

    auto susp = run({"heat", "--variant", "suspended", "--t", "16", "--L", "4", "--C", "2", "--grid", "32"});
    CHECK(susp.code == 0);
    auto even = run({"heat", "--variant", "even", "--t", "16", "--L", "2", "--C", "1", "--grid", "16", "--s-grid", "16"});
    CHECK(even.code == 0);
    auto arg = even.json()["samples"][0]["stats"]["argmax"];
    CHECK(arg[0] == 0.0);
    CHECK(arg[1] == 0.0);

    CHECK(run({"heat", "--t", "-1"}).code == 2);
    CHECK(run({"heat", "--t", "abc"}).code == 2);
}

TEST_CASE("heat writes files deterministically") {
    auto dir = std::filesystem::temp_directory_path() / "twistk_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir / "a");
    std::filesystem::create_directories(dir / "b");
    for (const char* sub : {"a", "b"}) {
        auto r = run({"heat", "--variant", "odd", "--t", "2", "--L", "4", "--C", "4", "--grid", "32", "--out-dir",
                      (dir / sub).string(), "-o", (dir / sub / "report.json").string()});
        CHECK(r.code == 0);
    }
    for (const char* name : {"report.json", "summary.json", "density_odd_t2.csv"}) {
        auto a = slurp(dir / "a" / name), b = slurp(dir / "b" / name);
        CHECK_FALSE(a.empty());
        CHECK(a == b);
    }
    CHECK(run({"heat", "--t", "2", "--L", "2", "--C", "1", "--out-dir", (dir / "missing").string()}).code == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("primitive, character and suspend-check") {
    auto p = run({"primitive", "--n", "4", "--count", "12", "--seed", "3"});
    CHECK(p.code == 0);
    CHECK(p.json()["exact_matches"] == 12);
    CHECK(run({"primitive", "--n", "4", "--count", "12", "--seed", "3"}).out == p.out);

    auto c = run({"character", "--n", "2", "--k", "3", "--trivial-rank", "0", "--line", "1,2:1", "--L", "4", "--C", "2",
                  "--grid", "64"});
    CHECK(c.code == 0);
    auto j = c.json();
    CHECK(j["flow"]["net_flow"] == 1);
    CHECK(j["checks"]["factorization"] == true);
    CHECK(j["coset"]["group"]["invariant_factors"].size() >= 1);

    auto neg = run({"character", "--n", "2", "--k", "2", "--flow-sign", "-1", "--L", "4", "--C", "2", "--grid", "64"});
    CHECK(neg.code == 0);
    CHECK(neg.json()["odd_character"]["sign"] == -1);
    CHECK(run({"character", "--line", "1,1:2"}).code == 2);

    auto s = run({"suspend-check", "--L", "4", "--C", "2", "--s-grid", "16"});
    CHECK(s.code == 0);
    CHECK(s.json()["constant_half_symbolic"] == 0.0);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"nope"}).code == 2);
    CHECK(run({"kgroup", "--format", "xml"}).code == 2);
    CHECK(run({"kgroup", "--help"}).code == 0);
}
