#include "kms_cayley/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "kms-cayley");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = kms::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("critical-beta prints 17 significant digits") {
  const auto r = run({"critical-beta", "--group", "heisenberg"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"beta0\": 1.7917594692280550") != std::string::npos);
  CHECK(run({"critical-beta", "--group", "heisenberg", "--check"}).code == 0);
  const auto d = json_of(run({"critical-beta", "--group", "dihedral_infinite"}));
  CHECK(d["beta0"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("kms-eval") {
  auto r = run({"kms-eval", "--group", "heisenberg", "--beta-critical", "--t", "a,b", "--u", "a,b"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"value\": 0.02777777777777") != std::string::npos);
  r = run({"kms-eval", "--group", "heisenberg", "--beta-critical", "--t", "a,b", "--u", "b,a,c"});
  CHECK(r.code == 0);
  CHECK(json_of(r)["value"].get<double>() == 0.0);
  CHECK(run({"kms-eval", "--group", "heisenberg", "--beta-critical", "--t", "a,b", "--u", "b,a"}).code == 2);
  CHECK(run({"kms-eval", "--group", "heisenberg", "--beta", "1.5", "--t", "a", "--u", "a"}).code == 2);
  CHECK(run({"kms-eval", "--group", "heisenberg", "--beta-critical", "--t", "a,q", "--u", "a"}).code == 1);
  r = run({"kms-eval", "--group", "dihedral_infinite", "--beta", "0.9162907318741551", "--dihedral-t", "1", "--t", "a,a",
           "--u", "a,a", "--check"});
  CHECK(r.code == 0);
  CHECK(json_of(r)["value"].get<double>() == doctest::Approx(16.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("kms-eval with a state file") {
  const std::string path = "test_cli_state.json";
  {
    std::ofstream f(path);
    f << R"({"beta": 0.9162907318741551, "mixture": [{"w": 0.5, "dihedral_t": 0}, {"w": 0.5, "dihedral_t": 1}]})";
  }
  const auto r = run({"kms-eval", "--group", "dihedral_infinite", "--state", path, "--t", "a", "--u", "a"});
  std::remove(path.c_str());
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(run({"kms-eval", "--group", "dihedral_infinite", "--state", "missing.json", "--t", "a", "--u", "a"}).code == 1);
}

TEST_CASE("q-beta") {
  auto r = run({"q-beta", "--group", "heisenberg", "--beta", "2.5", "--K", "8", "--check"});
  REQUIRE(r.code == 0);
  const auto j = json_of(r);
  CHECK(j["case"] == "sphere");
  CHECK(j["points"].size() == 8);
  CHECK(j["max_residual"].get<double>() <= 1e-12);
  r = run({"q-beta", "--group", "heisenberg", "--beta-critical"});
  CHECK(json_of(r)["case"] == "critical");
  CHECK(run({"q-beta", "--group", "heisenberg", "--beta", "1.7"}).code == 2);
  r = run({"q-beta", "--group", "zn:1", "--beta", "0.9162907318741551", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "u1,p_+1,p_-1,residual");
  CHECK(std::stod(rows[1].substr(0, rows[1].find(','))) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("ninf") {
  auto r = run({"ninf", "--group", "zn:1", "--grid", "2"});
  REQUIRE(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "v1,p_+1,p_-1");
  CHECK(rows[1] == "1.0000000000000000,1.0000000000000000,0.0000000000000000");
  CHECK(rows[2] == "-1.0000000000000000,0.0000000000000000,1.0000000000000000");

  r = run({"ninf", "--group", "heisenberg", "--v", "2,1", "--check"});
  REQUIRE(r.code == 0);
  const auto j = json_of(r);
  CHECK(j["p"][0].get<double>() == doctest::Approx(1.0 / (3.0 - std::sqrt(2.0))).epsilon(1e-12));
  CHECK(j["support"] == nlohmann::json::array({"a", "b"}));
  CHECK(j["oracle_gap"].get<double>() <= 1e-6);

  r = run({"ninf", "--group", "heisenberg", "--grid", "12", "--check"});
  REQUIRE(r.code == 0);
  rows = lines(r.out);
  CHECK(rows.size() == 13);
  CHECK(rows[0] == "v1,v2,p_a,p_a_inv,p_b,p_b_inv,p_c,p_c_inv,oracle_gap");
  CHECK(run({"ninf", "--group", "heisenberg"}).code == 1);
  CHECK(run({"ninf", "--group", "dihedral_infinite", "--v", "1"}).code == 2);
}

TEST_CASE("checks on the remaining subcommands") {
  CHECK(run({"fan", "--group", "heisenberg", "--check"}).code == 0);
  CHECK(json_of(run({"fan", "--group", "zn:1"}))["cones"].size() == 3);
  CHECK(run({"harmonic-check", "--group", "heisenberg", "--beta", "2", "--v", "1,0", "--check"}).code == 0);
  CHECK(run({"harmonic-check", "--group", "heisenberg", "--beta", "2.79", "--u-vec", "0,0", "--check"}).code == 3);
  CHECK(run({"kms-check", "--group", "heisenberg", "--beta-critical", "--L", "3", "--check"}).code == 0);
  CHECK(run({"dihedral", "--group", "dihedral_infinite", "--beta", "0.9162907318741551", "--t-param", "0.25", "--check"})
            .code == 0);
  CHECK(run({"beta-of-u", "--group", "zn:1", "--u", "1", "--check"}).code == 0);
}

TEST_CASE("validate") {
  CHECK(run({"validate", "--group", "heisenberg"}).code == 0);
  const std::string path = "test_cli_group.json";
  {
    std::ofstream f(path);
    f << R"({"generators": ["x", "y"], "rank": 2, "oracle": "free_abelian", "F": {"x": 1, "y": 1},
             "c": {"x": [1, 0], "y": [0, 1]}})";
  }
  const auto r = run({"validate", "--group", path});
  CHECK(r.code == 2);
  CHECK(json_of(r)["valid"] == false);
  CHECK(run({"critical-beta", "--group", path}).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"critical-beta", "--group", "nope"}).code == 1);
  CHECK(run({"critical-beta", "--group", "heisenberg", "--bogus"}).code == 1);
  CHECK(run({"critical-beta", "--group", "heisenberg", "--eps-root", "-1"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args = {"ninf", "--group", "heisenberg", "--grid", "30"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> q = {"q-beta", "--group", "zn:3", "--beta", "2.5", "--K", "20"};
  CHECK(run(q).out == run(q).out);
}
