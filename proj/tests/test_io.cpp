#include <filesystem>

#include "doctest.h"
#include "kslab/errors.hpp"
#include "kslab/io.hpp"
#include "kslab/map_zoo.hpp"
#include "kslab/random.hpp"

using namespace kslab;

namespace {

std::string format_error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("matrices round-trip exactly") {
  Rng rng(1);
  const ComplexMatrix m = ginibre(3, 4, rng);
  const Json j = Json::parse(dump_json(matrix_to_json(m)));
  CHECK(matrix_from_json(j, "m") == m);
  CHECK(j[1][2][0].get<double>() == m(1, 2).real());
  CHECK(j[1][2][1].get<double>() == m(1, 2).imag());
}

TEST_CASE("maps round-trip in every representation") {
  const QuantumMap phi = sample_utp_cp(3, 7, 2);
  for (MapRepr r : {MapRepr::Transfer, MapRepr::Choi, MapRepr::Kraus}) {
    const Json j = Json::parse(dump_json(map_to_json(phi, r)));
    CHECK(j["repr"] == std::string(repr_name(r)));
    CHECK(j["conv"] == "col-vec");
    CHECK(j["d"] == 3);
    const QuantumMap back = map_from_json(j);
    CHECK(transfer_distance(back, phi) < (r == MapRepr::Transfer ? 1e-300 : 1e-12));
  }
  CHECK(map_from_json(map_to_json(phi)).transfer() == phi.transfer());
}

TEST_CASE("malformed maps name the offending field") {
  Json j = map_to_json(identity_map(2));
  Json bad = j;
  bad.erase("d");
  CHECK(format_error_of([&] { map_from_json(bad); }).find("'d'") != std::string::npos);

  bad = j;
  bad["repr"] = "matrix";
  CHECK(format_error_of([&] { map_from_json(bad); }).find("'repr'") != std::string::npos);

  bad = j;
  bad["data"][1][2] = Json::array({1.0});
  CHECK(format_error_of([&] { map_from_json(bad); }).find("data[1][2]") != std::string::npos);

  bad = j;
  bad["data"].erase(0);
  CHECK(format_error_of([&] { map_from_json(bad); }).find("'data'") != std::string::npos);

  bad = j;
  bad["conv"] = "row-vec";
  CHECK(format_error_of([&] { map_from_json(bad); }).find("'conv'") != std::string::npos);

  CHECK_THROWS_AS(map_from_json(Json::array()), FormatError);
}

TEST_CASE("verdicts round-trip with witnesses") {
  SearchBudget b;
  b.restarts = 4;
  b.seed = 3;
  const QuantumMap phi = reduction(2, 0.9);
  const CertificateVerdict v = falsify_ks(phi, 1, b);
  REQUIRE(v.violated());
  const Json j = Json::parse(dump_json(verdict_to_json(v, b)));
  CHECK(j["verdict"] == "violated");
  CHECK(j["seed"] == 3);
  CHECK(j["budget"]["restarts"] == 4);
  const CertificateVerdict back = verdict_from_json(j);
  CHECK(back.verdict == v.verdict);
  CHECK(back.worst_value == v.worst_value);
  CHECK(back.property == "ks");
  CHECK(std::abs(reevaluate(phi, back) - v.worst_value) < 1e-8);

  const CertificateVerdict kp = falsify_k_positivity(transposition(2), 2, b);
  const CertificateVerdict kb = verdict_from_json(Json::parse(dump_json(verdict_to_json(kp, b))));
  CHECK(std::get<SchmidtWitness>(*kb.witness).u == std::get<SchmidtWitness>(*kp.witness).u);

  const CertificateVerdict ok = falsify_ks(identity_map(2), 1, b);
  const Json jo = verdict_to_json(ok, b);
  CHECK(jo["witness"].is_null());

  Json broken = j;
  broken["witness"]["type"] = "triangle";
  CHECK(format_error_of([&] { verdict_from_json(broken); }).find("witness.type") != std::string::npos);
}

TEST_CASE("budgets round-trip") {
  SearchBudget b;
  b.restarts = 7;
  b.max_iters = 33;
  b.step_init = 0.25;
  b.seed = 123456789012345ULL;
  b.violation_tol = 1e-7;
  const SearchBudget back = budget_from_json(budget_to_json(b), "budget");
  CHECK(back.restarts == 7);
  CHECK(back.max_iters == 33);
  CHECK(back.step_init == 0.25);
  CHECK(back.seed == b.seed);
  CHECK(back.violation_tol == 1e-7);

  Json j = budget_to_json(b);
  j["restarts"] = "many";
  CHECK(format_error_of([&] { budget_from_json(j, "budget"); }).find("budget.restarts") != std::string::npos);
}

TEST_CASE("decompositions round-trip") {
  for (const auto& r : {decompose_reduction(2, 0.9), decompose_lambda_plus_T(2, 0.2), decompose_reduction(3, 0.5)}) {
    const Json j = Json::parse(dump_json(decomposition_to_json(r)));
    CHECK(j.contains("lambda"));
    CHECK(j.contains("params"));
    CHECK(j.contains("residual"));
    const DecompositionResult back = decomposition_from_json(j);
    CHECK(back.target == r.target);
    CHECK(back.lambda == r.lambda);
    CHECK(back.a == r.a);
    CHECK(back.phi1.transfer() == r.phi1.transfer());
    CHECK(back.phi2.transfer() == r.phi2.transfer());
    CHECK(back.params.index() == r.params.index());
  }
  Json j = decomposition_to_json(decompose_reduction(2, 0.9));
  j["phi1"].erase("repr");
  CHECK(format_error_of([&] { decomposition_from_json(j); }).find("phi1") != std::string::npos);
}

TEST_CASE("scan output") {
  ScanResult r;
  r.family = "lambda-minus";
  r.d = 2;
  r.k = 1;
  r.paper_bound = 2.0 / 3.0;
  r.grid_step = 0.1;
  r.points = {{0.5, Verdict::NoViolationFound, 0.0}, {0.7, Verdict::Violated, -0.01}};
  r.a_certified_ks = 0.5;
  r.a_first_violation = 0.7;
  const Json j = scan_to_json(r);
  CHECK(j["paper_bound"].get<double>() == r.paper_bound);
  CHECK(j["a_first_violation"] == 0.7);
  CHECK(j["points"].size() == 2);

  const std::string csv = scan_to_csv(r);
  CHECK(csv.rfind("a,verdict,worst_value\n", 0) == 0);
  CHECK(csv.find("0.7,violated,") != std::string::npos);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "kslab_test_io" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = dir / "map.json";
  write_text_file(path, dump_json(map_to_json(transposition(2))));
  CHECK(transfer_distance(map_from_json(read_json_file(path)), transposition(2)) == 0.0);

  write_text_file(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), FormatError);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), FormatError);
  std::filesystem::remove_all(dir.parent_path());
}
