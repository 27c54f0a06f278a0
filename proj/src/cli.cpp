#include "kslab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kslab/decompose.hpp"
#include "kslab/errors.hpp"
#include "kslab/io.hpp"
#include "kslab/map_zoo.hpp"
#include "kslab/scan.hpp"
#include "kslab/suite.hpp"

namespace kslab {

namespace {

struct Options {
  std::string command;
  // map source
  std::string family;
  std::string base;
  std::string map_file;
  int d = 2;
  int k = 1;
  double a = 0.0;
  std::uint64_t map_seed = 0;
  int n_kraus = 2;
  // scan
  double a_min = 0.0;
  double a_max = 1.0;
  double step = 0.01;
  std::string direction;
  // misc
  std::string property = "ks";
  std::string repr = "transfer";
  std::string format = "json";
  std::string expect;
  std::string filter;
  std::string input;
  bool verify = false;
  std::string out;
  // budget and seed
  SearchBudget budget;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string join_names() {
  std::string s;
  for (const auto& n : family_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

Family require_family(const std::string& name) {
  if (name.empty()) throw UsageError("--family is required; valid names: " + join_names());
  const auto f = parse_family(name);
  if (!f) throw UsageError("unknown family '" + name + "'; valid names: " + join_names());
  return *f;
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed_given) return o.seed_flag;
  if (const char* env = std::getenv("KSLAB_SEED"); env && *env) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(env, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != std::string(env).size()) throw UsageError(std::string("KSLAB_SEED is not an unsigned integer: '") + env + "'");
    return v;
  }
  return kDefaultSeed;
}

std::string wall_clock() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Unwraps a tool envelope to its "result" when present.
const Json& payload(const Json& j) {
  if (j.is_object() && j.contains("tool") && j.contains("result")) return j["result"];
  return j;
}

QuantumMap load_map(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return map_from_json(payload(j));
  } catch (const FormatError& e) {
    throw FormatError("map file '" + path + "': " + e.what());
  }
}

QuantumMap resolve_base(const Options& o, std::uint64_t seed) {
  const std::string& b = o.base;
  if (b.empty() || b == "identity") return identity_map(o.d);
  if (b == "transpose") return transposition(o.d);
  if (b == "delta") return depolarizing(o.d);
  if (b == "random-utp") return sample_utp_cp(o.d, o.map_seed ? o.map_seed : seed, o.n_kraus);
  if (std::filesystem::exists(b)) return load_map(b);
  throw UsageError("unknown base '" + b + "'; use identity, transpose, delta, random-utp or a map JSON file");
}

FamilyParams family_params(const Options& o, std::uint64_t seed) {
  FamilyParams p;
  p.family = require_family(o.family);
  p.d = o.d;
  p.a = o.a;
  p.k_target = o.k;
  p.seed = o.map_seed ? o.map_seed : seed;
  p.n_kraus = o.n_kraus;
  if (p.family == Family::LambdaMinus || p.family == Family::LambdaPlus) p.base = resolve_base(o, seed);
  return p;
}

QuantumMap resolve_map(const Options& o, std::uint64_t seed) {
  if (!o.map_file.empty()) {
    if (!o.family.empty()) throw UsageError("--map and --family are mutually exclusive");
    return load_map(o.map_file);
  }
  return build_family(family_params(o, seed));
}

Json config_json(const Options& o, std::uint64_t seed) {
  Json c{{"command", o.command}, {"seed", seed}};
  if (!o.family.empty()) c["family"] = o.family;
  if (!o.base.empty()) c["base"] = o.base;
  if (!o.map_file.empty()) c["map"] = o.map_file;
  if (!o.input.empty()) c["input"] = o.input;
  c["d"] = o.d;
  c["k"] = o.k;
  c["a"] = o.a;
  c["map_seed"] = o.map_seed;
  c["n_kraus"] = o.n_kraus;
  if (o.command == "scan") {
    c["a_min"] = o.a_min;
    c["a_max"] = o.a_max;
    c["step"] = o.step;
    c["direction"] = o.direction.empty() ? Json(nullptr) : Json(o.direction);
    c["format"] = o.format;
  }
  if (o.command == "certify") c["property"] = o.property;
  if (o.command == "construct") c["repr"] = o.repr;
  if (o.command == "suite") c["filter"] = o.filter;
  if (o.command == "decompose") c["verify"] = o.verify;
  c["budget"] = budget_to_json(o.budget.with_seed(seed));
  c["expect"] = o.expect.empty() ? Json(nullptr) : Json(o.expect);
  c["out"] = o.out.empty() ? Json(nullptr) : Json(o.out);
  return c;
}

Json envelope(const Options& o, std::uint64_t seed, Json result, double elapsed) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", o.command},
          {"seed", seed},
          {"config", config_json(o, seed)},
          {"wall_clock", wall_clock()},
          {"elapsed_seconds", elapsed},
          {"result", std::move(result)}};
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
    out << "wrote " << o.out << "\n";
  }
}

int expect_outcome(const std::string& expect, bool pass_like, const std::string& observed, std::ostream& err) {
  if (expect.empty()) return kExitOk;
  if (pass_like) return kExitOk;
  err << "expectation '" << expect << "' contradicted: observed " << observed << "\n";
  return kExitContradicted;
}

bool verdict_matches(const std::string& expect, const CertificateVerdict& v) {
  if (expect == "violated") return v.violated();
  if (expect == "no-violation" || expect == "no-violation-found") return !v.violated();
  throw UsageError("--expect must be 'violated' or 'no-violation', got '" + expect + "'");
}

bool pass_matches(const std::string& expect, bool passed) {
  if (expect == "pass") return passed;
  if (expect == "fail") return !passed;
  throw UsageError("--expect must be 'pass' or 'fail', got '" + expect + "'");
}

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Json map_properties(const QuantumMap& phi) {
  return {{"unital", phi.is_unital()},
          {"trace_preserving", phi.is_trace_preserving()},
          {"hermiticity_preserving", phi.is_hermiticity_preserving()},
          {"completely_positive", phi.is_hermiticity_preserving() && is_completely_positive(phi)},
          {"hs_norm", hs_norm(phi)}};
}

// ---------------------------------------------------------------------------

int cmd_construct(const Options& o, std::ostream& out) {
  const auto t0 = Clock::now();
  const std::uint64_t seed = resolve_seed(o);
  const QuantumMap phi = resolve_map(o, seed);
  MapRepr repr = MapRepr::Transfer;
  if (o.repr == "choi")
    repr = MapRepr::Choi;
  else if (o.repr == "kraus")
    repr = MapRepr::Kraus;
  else if (o.repr != "transfer")
    throw UsageError("--repr must be transfer, choi or kraus");
  Json env = envelope(o, seed, map_to_json(phi, repr), since(t0));
  env["properties"] = map_properties(phi);
  emit(o, dump_json(env), out);
  return kExitOk;
}

CertificateVerdict run_property(const QuantumMap& phi, const std::string& property, int k, const SearchBudget& b) {
  if (property == "ks") return falsify_ks(phi, k, b);
  if (property == "co-ks") return falsify_co_ks(phi, b);
  if (property == "phi-k") return check_phi_k_condition(phi, k, b);
  if (property == "k-positivity") return falsify_k_positivity(phi, k, b);
  throw UsageError("unknown property '" + property + "'; valid: ks, co-ks, phi-k, k-positivity");
}

int cmd_certify(const Options& o, const std::string& property, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const std::uint64_t seed = resolve_seed(o);
  if (!o.expect.empty()) verdict_matches(o.expect, CertificateVerdict{});  // validates the flag up front
  const QuantumMap phi = resolve_map(o, seed);
  const SearchBudget budget = o.budget.with_seed(seed);
  const CertificateVerdict v = run_property(phi, property, o.k, budget);
  Json env = envelope(o, seed, verdict_to_json(v, budget), since(t0));
  env["map"] = map_to_json(phi);
  emit(o, dump_json(env), out);
  if (o.out.empty()) {
    // JSON already on stdout.
  } else {
    out << property << " k=" << v.k << ": " << verdict_name(v.verdict) << " (worst " << v.worst_value << ")\n";
  }
  for (const auto& w : v.warnings) err << "warning: " << w << "\n";
  return expect_outcome(o.expect, o.expect.empty() || verdict_matches(o.expect, v),
                        std::string(verdict_name(v.verdict)), err);
}

int cmd_scan(const Options& o, std::ostream& out) {
  const auto t0 = Clock::now();
  const std::uint64_t seed = resolve_seed(o);
  if (o.format != "json" && o.format != "csv") throw UsageError("--format must be json or csv");
  std::optional<ScanDirection> dir;
  if (o.direction == "ascending")
    dir = ScanDirection::Ascending;
  else if (o.direction == "descending")
    dir = ScanDirection::Descending;
  else if (!o.direction.empty())
    throw UsageError("--direction must be ascending or descending");
  FamilyParams p = family_params(o, seed);
  const ScanResult r = scan_threshold(p, o.a_min, o.a_max, o.step, o.budget.with_seed(seed), dir);
  if (o.format == "json") {
    emit(o, dump_json(envelope(o, seed, scan_to_json(r), since(t0))), out);
  } else {
    std::ostringstream os;
    os << "# tool=" << kToolName << " version=" << kToolVersion << " seed=" << seed << " wall_clock=" << wall_clock()
       << " elapsed_seconds=" << since(t0) << "\n";
    os << "# config=" << config_json(o, seed).dump() << "\n";
    os << scan_to_csv(r);
    emit(o, os.str(), out);
  }
  return kExitOk;
}

int cmd_decompose(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const std::uint64_t seed = resolve_seed(o);
  if (!o.expect.empty()) {
    pass_matches(o.expect, true);
    if (!o.verify) throw UsageError("--expect requires --verify");
  }
  const Family f = require_family(o.family);
  std::optional<DecompositionResult> r;
  if (f == Family::Reduction) {
    r = decompose_reduction(o.d, o.a);
  } else if (f == Family::LambdaPlus) {
    if (!o.base.empty() && o.base != "transpose")
      throw DomainError("decompose: lambda-plus is only decomposed over the transpose base");
    r = decompose_lambda_plus_T(o.d, o.a);
  } else {
    throw UsageError("decompose supports --family reduction or lambda-plus");
  }
  std::optional<DecompositionReport> rep;
  if (o.verify) rep = verify_decomposition(*r, decomposition_target(*r), o.budget.with_seed(seed));
  Json env = envelope(o, seed, decomposition_to_json(*r), since(t0));
  env["identity_residual"] = parameter_identity_residual(*r);
  env["verification"] = rep ? decomposition_report_to_json(*rep) : Json(nullptr);
  emit(o, dump_json(env), out);
  if (!rep) return kExitOk;
  return expect_outcome(o.expect, o.expect.empty() || pass_matches(o.expect, rep->passed()),
                        rep->passed() ? "all checks pass" : "a check failed", err);
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const std::uint64_t seed = resolve_seed(o);
  if (o.input.empty()) throw UsageError("verify needs --input");
  if (!o.expect.empty()) pass_matches(o.expect, true);
  const Json doc = read_json_file(o.input);
  const Json& body = payload(doc);
  Json result;
  bool passed = false;
  if (body.is_object() && body.contains("phi1")) {
    const DecompositionResult r = decomposition_from_json(body);
    const QuantumMap target = o.map_file.empty() ? decomposition_target(r) : load_map(o.map_file);
    const auto rep = verify_decomposition(r, target, o.budget.with_seed(seed));
    passed = rep.passed();
    result = {{"kind", "decomposition"}, {"report", decomposition_report_to_json(rep)}};
  } else if (body.is_object() && body.contains("verdict")) {
    const CertificateVerdict v = verdict_from_json(body);
    QuantumMap phi = [&] {
      if (!o.map_file.empty()) return load_map(o.map_file);
      if (!doc.contains("map")) throw UsageError("verdict file has no embedded map; pass --map");
      return map_from_json(doc["map"]);
    }();
    const SearchBudget stored = budget_from_json(body.at("budget"), "budget");
    const CertificateVerdict again = run_property(phi, v.property, v.k, stored);
    const bool same_verdict = again.verdict == v.verdict && again.worst_value == v.worst_value;
    Json witness = nullptr;
    bool witness_ok = true;
    if (v.witness) {
      const double value = reevaluate(phi, v);
      witness_ok = std::abs(value - v.worst_value) <= 1e-8 && value < -v.violation_tol;
      witness = {{"stored", v.worst_value}, {"recomputed", value}, {"reproduced", witness_ok}};
    }
    passed = same_verdict && witness_ok;
    result = {{"kind", "verdict"},
              {"rerun", {{"verdict", verdict_name(again.verdict)}, {"worst_value", again.worst_value},
                         {"reproduced", same_verdict}}},
              {"witness", witness}};
  } else {
    throw FormatError("input '" + o.input + "' is neither a verdict nor a decomposition");
  }
  result["passed"] = passed;
  emit(o, dump_json(envelope(o, seed, result, since(t0))), out);
  return expect_outcome(o.expect, o.expect.empty() || pass_matches(o.expect, passed),
                        passed ? "verification passed" : "verification failed", err);
}

int cmd_suite(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  SuiteOptions so;
  so.seed = resolve_seed(o);
  so.filter = o.filter;
  so.budget = o.budget;
  if (!o.expect.empty()) pass_matches(o.expect, true);
  const SuiteReport rep = run_suite(so, [&](const CriterionResult& r) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << "  " << r.name << "  (" << std::fixed
        << std::setprecision(1) << r.seconds << " s)  " << r.summary << "\n";
    out.unsetf(std::ios::floatfield);
    out << std::setprecision(6);
  });
  int n_pass = 0;
  for (const auto& r : rep.results) n_pass += r.passed;
  out << n_pass << "/" << rep.results.size() << " criteria passed (seed " << so.seed << ")\n";
  if (!o.out.empty()) {
    write_text_file(o.out, dump_json(envelope(o, so.seed, rep.to_json(true), since(t0))));
    out << "wrote " << o.out << "\n";
  }
  return expect_outcome(o.expect, o.expect.empty() || pass_matches(o.expect, rep.passed()),
                        rep.passed() ? "all criteria pass" : "a criterion failed", err);
}

void add_map_options(CLI::App* app, Options& o) {
  app->add_option("--family", o.family, "Map family: " + join_names());
  app->add_option("--base", o.base, "Base map for lambda-minus/lambda-plus: identity, transpose, delta, random-utp or a JSON file");
  app->add_option("--map", o.map_file, "Map JSON file (instead of --family)");
  app->add_option("--d", o.d, "Hilbert space dimension")->check(CLI::Range(1, 64));
  app->add_option("--a", o.a, "Family parameter a");
  app->add_option("--map-seed", o.map_seed, "Seed of random-utp maps (default: the run seed)");
  app->add_option("--n-kraus", o.n_kraus, "Kraus rank of random-utp maps")->check(CLI::PositiveNumber);
}

void add_budget_options(CLI::App* app, Options& o) {
  app->add_option("--restarts", o.budget.restarts, "Random restarts")->check(CLI::PositiveNumber);
  app->add_option("--max-iters", o.budget.max_iters, "Iterations per restart")->check(CLI::PositiveNumber);
  app->add_option("--step-init", o.budget.step_init, "Initial line-search step")->check(CLI::PositiveNumber);
  app->add_option("--violation-tol", o.budget.violation_tol, "Violation tolerance")->check(CLI::PositiveNumber);
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed_flag, "Seed (default: $KSLAB_SEED, else 42)")->each([&o](const std::string&) {
    o.seed_given = true;
  });
  app->add_option("--out", o.out, "Output file (default: stdout)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Kadison-Schwarz certification toolkit", "kslab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto* construct = app.add_subcommand("construct", "Build a map and print it as JSON");
  add_map_options(construct, o);
  add_common(construct, o);
  construct->add_option("--repr", o.repr, "transfer, choi or kraus");

  auto* certify = app.add_subcommand("certify", "Search for violations of ks, co-ks or phi-k");
  add_map_options(certify, o);
  add_budget_options(certify, o);
  add_common(certify, o);
  certify->add_option("--k", o.k, "Amplification level")->check(CLI::PositiveNumber);
  certify->add_option("--property", o.property, "ks, co-ks or phi-k");
  certify->add_option("--expect", o.expect, "violated or no-violation; exit 2 when contradicted");

  auto* kpos = app.add_subcommand("kpos", "Search for k-positivity violations over Schmidt rank <= k");
  add_map_options(kpos, o);
  add_budget_options(kpos, o);
  add_common(kpos, o);
  kpos->add_option("--k", o.k, "Schmidt rank, 1 <= k <= d")->check(CLI::PositiveNumber);
  kpos->add_option("--expect", o.expect, "violated or no-violation; exit 2 when contradicted");

  auto* scan = app.add_subcommand("scan", "Scan a family parameter for the k-KS threshold");
  add_map_options(scan, o);
  add_budget_options(scan, o);
  add_common(scan, o);
  scan->add_option("--k", o.k, "Amplification level")->check(CLI::PositiveNumber);
  scan->add_option("--a-min", o.a_min, "Grid start");
  scan->add_option("--a-max", o.a_max, "Grid end");
  scan->add_option("--step", o.step, "Grid step")->check(CLI::PositiveNumber);
  scan->add_option("--direction", o.direction, "ascending or descending (default by family)");
  scan->add_option("--format", o.format, "json or csv");

  auto* decompose = app.add_subcommand("decompose", "KS-decomposition of reduction or lambda-plus over T");
  add_map_options(decompose, o);
  add_budget_options(decompose, o);
  add_common(decompose, o);
  decompose->add_flag("--verify", o.verify, "Run the four verification checks");
  decompose->add_option("--expect", o.expect, "pass or fail (with --verify); exit 2 when contradicted");

  auto* verify = app.add_subcommand("verify", "Re-check a verdict or decomposition JSON file");
  add_budget_options(verify, o);
  add_common(verify, o);
  verify->add_option("--input", o.input, "Verdict or decomposition JSON file")->required();
  verify->add_option("--map", o.map_file, "Map JSON file overriding the embedded or derived map");
  verify->add_option("--expect", o.expect, "pass or fail; exit 2 when contradicted");

  auto* suite = app.add_subcommand("suite", "Run the acceptance battery");
  add_budget_options(suite, o);
  add_common(suite, o);
  suite->add_option("--filter", o.filter, "Criterion id, tag or name fragment");
  suite->add_option("--expect", o.expect, "pass or fail; exit 2 when contradicted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    o.command = app.get_subcommands().front()->get_name();
    o.budget.validate();
    if (o.command == "construct") return cmd_construct(o, out);
    if (o.command == "certify") return cmd_certify(o, o.property, out, err);
    if (o.command == "kpos") return cmd_certify(o, "k-positivity", out, err);
    if (o.command == "scan") return cmd_scan(o, out);
    if (o.command == "decompose") return cmd_decompose(o, out, err);
    if (o.command == "verify") return cmd_verify(o, out, err);
    return cmd_suite(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace kslab
