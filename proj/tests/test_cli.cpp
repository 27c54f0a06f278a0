#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "kslab/cli.hpp"
#include "kslab/io.hpp"

using namespace kslab;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "kslab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kFast = {"--restarts", "4"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "kslab_test_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("certify with --expect") {
  const Run ok = run(with({"certify", "--family", "lambda-minus", "--base", "identity", "--d", "2", "--k", "1", "--a",
                           "0.5", "--expect", "no-violation"},
                          kFast));
  CHECK(ok.code == kExitOk);
  const Json j = ok.json();
  CHECK(j["tool"] == "kslab");
  CHECK(j["version"] == std::string(kToolVersion));
  CHECK(j["seed"] == 42);
  CHECK(j["config"]["a"] == 0.5);
  CHECK(j.contains("wall_clock"));
  CHECK(j["result"]["verdict"] == "no-violation-found");

  const Run bad = run(with({"certify", "--family", "lambda-minus", "--base", "identity", "--d", "2", "--a", "0.9",
                            "--expect", "no-violation"},
                           kFast));
  CHECK(bad.code == kExitContradicted);
  CHECK(bad.json()["result"]["verdict"] == "violated");

  const Run co = run(with({"certify", "--family", "identity", "--d", "2", "--property", "co-ks", "--expect", "violated"},
                          kFast));
  CHECK(co.code == kExitOk);
}

TEST_CASE("usage and domain errors exit 1") {
  const Run unknown = run({"construct", "--family", "nope"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("lambda-minus") != std::string::npos);

  CHECK(run({"construct", "--family", "reduction", "--d", "2", "--a", "2.0"}).code == kExitUsage);
  CHECK(run({"kpos", "--family", "identity", "--d", "2", "--k", "3"}).code == kExitUsage);
  CHECK(run({"certify", "--bogus-flag"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("seed precedence") {
  const std::vector<std::string> base = {"certify", "--family", "delta", "--d", "2", "--restarts", "2"};
  ::setenv("KSLAB_SEED", "77", 1);
  CHECK(run(base).json()["seed"] == 77);
  CHECK(run(with(base, {"--seed", "5"})).json()["seed"] == 5);
  ::unsetenv("KSLAB_SEED");
  CHECK(run(base).json()["seed"] == 42);
}

TEST_CASE("construct, kpos and map files") {
  const auto path = scratch() / "red.json";
  const Run c = run({"construct", "--family", "reduction", "--d", "3", "--a", "0.6", "--repr", "choi", "--out",
                     path.string()});
  REQUIRE(c.code == kExitOk);
  const Json env = read_json_file(path);
  CHECK(env["result"]["repr"] == "choi");
  CHECK(env.contains("properties"));

  const auto mpath = scratch() / "red_map.json";
  write_text_file(mpath, dump_json(env["result"]));
  const Run k = run(with({"kpos", "--map", mpath.string(), "--k", "2", "--expect", "violated"}, kFast));
  CHECK(k.code == kExitOk);

  write_text_file(mpath, R"({"d": 2, "repr": "transfer", "data": [[[1, 0]]]})");
  const Run bad = run({"certify", "--map", mpath.string()});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("data") != std::string::npos);
}

TEST_CASE("scan outputs") {
  const Run s = run(with({"scan", "--family", "lambda-minus", "--base", "identity", "--d", "2", "--k", "1", "--a-min",
                          "0.6", "--a-max", "0.75", "--step", "0.01"},
                         kFast));
  REQUIRE(s.code == kExitOk);
  const Json r = s.json()["result"];
  CHECK(r["paper_bound"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(r["a_first_violation"].get<double>() > 2.0 / 3.0);

  const Run csv = run(with({"scan", "--family", "lambda-minus", "--base", "identity", "--d", "2", "--a-min", "0.6",
                            "--a-max", "0.7", "--step", "0.05", "--format", "csv"},
                           kFast));
  REQUIRE(csv.code == kExitOk);
  std::istringstream lines(csv.out);
  std::string line;
  std::vector<double> as;
  bool header = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      CHECK(line == "a,verdict,worst_value");
      header = true;
      continue;
    }
    as.push_back(std::stod(line.substr(0, line.find(','))));
  }
  CHECK(as.size() == 3);
  for (std::size_t i = 1; i < as.size(); ++i) CHECK(as[i - 1] < as[i]);
}

TEST_CASE("decompose and verify") {
  const auto path = scratch() / "dec.json";
  const Run d = run(with({"decompose", "--family", "reduction", "--d", "2", "--a", "0.9", "--verify", "--expect", "pass",
                          "--out", path.string()},
                         kFast));
  REQUIRE(d.code == kExitOk);
  const Json env = read_json_file(path);
  CHECK(env["result"]["lambda"].get<double>() == doctest::Approx(5.0 / 33));
  CHECK(env["verification"]["passed"] == true);

  CHECK(run(with({"verify", "--input", path.string()}, kFast)).code == kExitOk);

  CHECK(run({"decompose", "--family", "reduction", "--d", "2", "--a", "1.0"}).code == kExitUsage);
  CHECK(run(with({"decompose", "--family", "lambda-plus", "--d", "2", "--a", "0.2", "--verify"}, kFast)).code ==
        kExitOk);
}

TEST_CASE("verify replays a certify run") {
  const auto path = scratch() / "cert.json";
  REQUIRE(run(with({"certify", "--family", "reduction", "--d", "2", "--a", "0.9", "--out", path.string()}, kFast))
              .code == kExitOk);
  CHECK(run({"verify", "--input", path.string()}).code == kExitOk);

  // Tampering with the recorded value is detected.
  Json env = read_json_file(path);
  env["result"]["worst_value"] = env["result"]["worst_value"].get<double>() - 0.1;
  write_text_file(path, dump_json(env));
  const Run v = run({"verify", "--input", path.string()});
  CHECK(v.code == kExitOk);
  CHECK(v.json()["result"]["passed"] == false);
  CHECK(run({"verify", "--input", path.string(), "--expect", "pass"}).code == kExitContradicted);
}

TEST_CASE("suite filter") {
  const Run s = run({"suite", "--filter", "delta"});
  CHECK(s.code == kExitOk);
  CHECK(s.out.find("[PASS]  4") != std::string::npos);
  CHECK(s.out.find("[FAIL]") == std::string::npos);
  CHECK(s.out.find("1/1 criteria passed") != std::string::npos);
}
