#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nhs/cli.hpp"
#include "nhs/config.hpp"
#include "nhs/errors.hpp"

using namespace nhs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() / ("nhs_cli_test_" + std::to_string(stamp));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = nhs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip is byte identical") {
  RunConfig c;
  c.rho = RhoRule::explicit_list({0.5, 0.25, 0.125, 0.0625}, 1);
  c.N_max = 2;
  c.driver.profile = kProfileFaithful;
  c.basis.relaxation = 1.5;
  c.korner.probe_eps = {0.5, 0.25};
  const std::string text = dump_config(c);
  CHECK(dump_config(run_config_from_json(nlohmann::json::parse(text))) == text);
  CHECK(dump_config(RunConfig{}) == dump_config(run_config_from_json(to_json(RunConfig{}))));
}

TEST_CASE("config validation") {
  RunConfig c;
  c.driver.profile = "fast";
  CHECK_THROWS_AS(validate(c), InputContractError);
  RunConfig d;
  d.basis.cap_budget = 0;
  CHECK_THROWS_AS(validate(d), InputContractError);
  RunConfig e;
  e.driver.m_budget = -4;
  CHECK_THROWS_AS(run_config_from_json(to_json(e)), InputContractError);
}

TEST_CASE("korner gen and certify") {
  TempDir tmp;
  const auto p = tmp.path / "p.json";
  const Result gen = invoke({"korner", "gen", "--eps", "0.5", "--delta", "0.25", "--out", p.string()});
  CHECK(gen.code == 0);
  REQUIRE(fs::exists(p));
  const auto cert = load(tmp.path / "p.cert.json");
  CHECK(cert["passed"].get<bool>());

  const auto c = tmp.path / "c.json";
  const Result again = invoke({"korner", "certify", "--in", p.string(), "--eps", "0.5", "--delta", "0.25",
                            "--out", c.string()});
  CHECK(again.code == 0);
  CHECK(load(c)["degree"] == cert["degree"]);

  const auto one = tmp.path / "const1.json";
  std::ofstream(one) << R"([{"freq": 0.0, "re": 1.0, "im": 0.0}])";
  const Result bad = invoke({"korner", "certify", "--in", one.string(), "--eps", "0.5", "--delta", "0.25",
                          "--out", (tmp.path / "c1.json").string()});
  CHECK(bad.code == 1);
  CHECK_FALSE(load(tmp.path / "c1.json")["passed"].get<bool>());
}

TEST_CASE("malformed input exits with 2") {
  TempDir tmp;
  const auto junk = tmp.path / "junk.json";
  std::ofstream(junk) << "{ not json";
  const Result r = invoke({"korner", "certify", "--in", junk.string(), "--eps", "0.5", "--delta", "0.25"});
  CHECK(r.code == 2);
  CHECK(r.err.find("malformed JSON") != std::string::npos);
  CHECK(invoke({"represent", "run", "--config", junk.string(), "--out-dir", tmp.path.string()}).code == 2);
  CHECK(invoke({"no-such-command"}).code == 2);
  const auto half = tmp.path / "half.json";
  std::ofstream(half) << R"([{"freq": 0.5, "re": 1.0, "im": 0.0}])";
  CHECK(invoke({"korner", "certify", "--in", half.string(), "--eps", "0.5", "--delta", "0.25"}).code == 1);
}

TEST_CASE("zero target end to end") {
  TempDir tmp;
  const std::string dir = tmp.path.string();
  const Result run = invoke({"represent", "run", "--target", "zero", "--n-max", "3", "--out-dir", dir});
  CHECK(run.code == 0);
  const auto state = load(tmp.path / "represent_zero.json");
  CHECK(state["state"]["coefficients"].empty());
  CHECK(invoke({"represent", "verify", "--target", "zero", "--out-dir", dir}).code == 0);
  CHECK(load(tmp.path / "verify_zero.json")["passed"].get<bool>());
  CHECK(invoke({"export", "--plot", "--target", "zero", "--out-dir", dir}).code == 0);
  for (int N = 1; N <= 3; ++N) {
    const std::string csv = slurp(tmp.path / ("plot_zero_N" + std::to_string(N) + ".csv"));
    CHECK(csv.rfind("x,f,S_N,residual,H_N_star\n", 0) == 0);
  }
  CHECK_FALSE(fs::exists(tmp.path / "failure.json"));
}

TEST_CASE("relative output directories live under the output root") {
  TempDir tmp;
  ::setenv(cli::kOutputRootEnv, tmp.path.c_str(), 1);
  const Result r = invoke({"represent", "run", "--target", "zero", "--n-max", "1", "--out-dir", "nested"});
  ::unsetenv(cli::kOutputRootEnv);
  CHECK(r.code == 0);
  CHECK(fs::exists(tmp.path / "nested" / "represent_zero.json"));
}

TEST_CASE("config subcommand prints the canonical form") {
  const Result r = invoke({"config"});
  CHECK(r.code == 0);
  CHECK(r.out == dump_config(RunConfig{}));
}

TEST_CASE("atomic writes replace the whole file") {
  TempDir tmp;
  const auto p = tmp.path / "a.txt";
  cli::write_atomic(p, "first version, longer");
  cli::write_atomic(p, "second");
  CHECK(slurp(p) == "second");
  for (const auto& e : fs::directory_iterator(tmp.path)) CHECK(e.path().filename() == "a.txt");
}

}  // TEST_SUITE
