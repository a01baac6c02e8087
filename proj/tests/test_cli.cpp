#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "schroeder/cli.hpp"

using namespace schroeder;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "schroeder-lab");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("schroeder_cli_" + name)).string();
}

} // namespace

TEST_CASE("coeffs of z^2 at 1") {
    const Run r = run({"coeffs", "--z0", "1,0", "--order-n", "10"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["coeffs"].size() == 11);
    double fact = 1.0;
    for (int n = 0; n <= 10; ++n) {
        fact *= n > 0 ? n : 1;
        CHECK(std::abs(j["coeffs"][n][0].get<double>() - 1.0 / fact) < 1e-15);
    }
}

TEST_CASE("eval at 0 returns z0") {
    const Run r = run({"eval", "--c", "-2,0", "--z0", "2,0"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["values"][0]["h"][0] == 2.0);
    CHECK(j["values"][0]["h"][1] == 0.0);
}

TEST_CASE("ply report for z^2") {
    const Run r = run({"ply", "--grid", "256"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["q_inf"] == 1);
    CHECK(j["lhs"] == 1.0);
    CHECK(j["rhs"] == 2.0);
    CHECK(j["slack"] == 1.0);
}

TEST_CASE("map file input and errors") {
    const std::string path = temp_path("map.json");
    {
        std::ofstream os(path);
        os << R"({"num": [[-2,0],[0,0],[1,0]]})";
    }
    const Run ok = run({"coeffs", "--map", path, "--z0", "2,0", "--order-n", "6"});
    REQUIRE(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["lambda"][0] == 4.0);
    {
        std::ofstream os(path);
        os << "{not json";
    }
    CHECK(run({"coeffs", "--map", path}).code == 1);
    CHECK(run({"coeffs", "--map", temp_path("missing.json")}).code == 1);
    CHECK(run({"coeffs", "--z0", "0,0"}).code == 1); // superattracting
    CHECK(run({"coeffs", "--z0", "abc"}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"tracts", "--grid", "9000"}).code == 1);
    CHECK(run({"tracts", "--box", "-1"}).code == 1);
    const Run help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("sweep") != std::string::npos);
}

TEST_CASE("config file values lose to flags") {
    const std::string cfg = temp_path("config.toml");
    {
        std::ofstream os(cfg);
        os << "[coeffs]\norder-n = 5\nz0 = \"1,0\"\n";
    }
    const Run from_file = run({"--config", cfg, "coeffs"});
    REQUIRE(from_file.code == 0);
    CHECK(nlohmann::json::parse(from_file.out)["coeffs"].size() == 6);
    const Run flag = run({"--config", cfg, "coeffs", "--order-n", "7"});
    REQUIRE(flag.code == 0);
    CHECK(nlohmann::json::parse(flag.out)["coeffs"].size() == 8);
}

TEST_CASE("inconclusive verdicts exit with 2") {
    // c = 0.26: a coarse grid reads the dust as connected and the inequality fails; that must not exit 0
    CHECK(run({"ply", "--c", "0.26,0", "--z0", "0.5,0.1", "--grid", "128"}).code == 2);
}

TEST_CASE("outputs go to --out and ignore the thread count") {
    const std::string a = temp_path("a.json");
    const std::string b = temp_path("b.json");
    REQUIRE(run({"tracts", "--grid", "96", "--threads", "1", "--out", a}).code == 0);
    REQUIRE(run({"tracts", "--grid", "96", "--threads", "4", "--out", b}).code == 0);
    auto slurp = [](const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    CHECK(!slurp(a).empty());
    CHECK(slurp(a) == slurp(b));
    const auto j = nlohmann::json::parse(slurp(a));
    CHECK(j["census"]["direct"] == 2);
    CHECK(j["crosscheck"]["discrepancies"].empty());
}

TEST_CASE("render and sweep write binary images") {
    const std::string img = temp_path("d.ppm");
    REQUIRE(run({"render", "--grid", "32", "--out", img}).code == 0);
    std::ifstream is(img, std::ios::binary);
    std::string head(2, '\0');
    is.read(head.data(), 2);
    CHECK(head == "P6");
    const std::string heat = temp_path("h.ppm");
    const Run sw = run({"sweep", "--grid", "16", "--heatmap", heat});
    REQUIRE(sw.code == 0);
    CHECK(std::count(sw.out.begin(), sw.out.end(), '\n') == 16 * 16 + 1);
    CHECK(std::filesystem::file_size(heat) == 13 + 16 * 16 * 3);
    CHECK(run({"render", "--kind", "nope"}).code == 1);
}

TEST_CASE("probe and cover") {
    const Run p = run({"probe", "--a", "0,0", "--grid", "128", "--k-max", "4"});
    REQUIRE(p.code == 0);
    const auto j = nlohmann::json::parse(p.out);
    CHECK(j["probe"]["degrees"] == nlohmann::json::array({2, 4, 8, 16}));
    const Run c = run({"cover", "--a", "0,0", "--a", "1,0", "--grid", "128"});
    REQUIRE(c.code == 0);
    const auto k = nlohmann::json::parse(c.out);
    CHECK(k["values"][0]["verdict"] == "unbounded-tract-found");
    CHECK(k["values"][1]["verdict"] == "covers-completely");
    CHECK(run({"cover"}).code == 1);
}

TEST_CASE("sphere point parsing") {
    CHECK(parse_sphere_point("inf").is_infinity());
    CHECK(parse_sphere_point("1.5,-2").value() == Cplx(1.5, -2.0));
    CHECK_THROWS_AS(parse_sphere_point("1"), PreconditionError);
    CHECK_THROWS_AS(parse_sphere_point("1,2x"), PreconditionError);
}
