#include "kslab/suite.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "kslab/decompose.hpp"
#include "kslab/errors.hpp"
#include "kslab/map_zoo.hpp"
#include "kslab/random.hpp"
#include "kslab/scan.hpp"

namespace kslab {

namespace {

constexpr double kGridEps = 1e-12;

std::uint64_t derive(std::uint64_t seed, int criterion, std::uint64_t index) {
  return splitmix64(splitmix64(seed + static_cast<std::uint64_t>(criterion)) + index);
}

double round12(double a) { return std::round(a * 1e12) / 1e12; }

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

Json verdict_brief(const CertificateVerdict& v) {
  return {{"verdict", verdict_name(v.verdict)},
          {"worst_value", v.worst_value},
          {"witness_digest", v.witness ? Json(witness_digest(*v.witness)) : Json(nullptr)}};
}

void append_matrix(std::vector<double>& out, const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out.push_back(m(i, j).real());
      out.push_back(m(i, j).imag());
    }
}

std::string scan_digest(const ScanResult& r) {
  std::vector<double> v;
  for (const auto& p : r.points) {
    v.push_back(p.a);
    v.push_back(p.verdict == Verdict::Violated ? 1.0 : 0.0);
    v.push_back(p.worst_value);
  }
  return digest(v);
}

Json opt_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

// ---------------------------------------------------------------------------

CriterionResult tomiyama_bracketing(const SuiteOptions& o) {
  CriterionResult res;
  Json cases = Json::array();
  bool ok = true;
  std::string summary;
  const std::pair<int, int> dk[] = {{2, 1}, {3, 1}, {3, 2}};
  for (std::size_t c = 0; c < std::size(dk); ++c) {
    const auto [d, k] = dk[c];
    FamilyParams p;
    p.family = Family::LambdaMinus;
    p.d = d;
    p.k_target = k;
    p.base = identity_map(d);
    const ScanResult r = scan_threshold(p, 0.0, 1.0, 0.01, o.budget.with_seed(derive(o.seed, 1, c)));
    const double bound = r.paper_bound;
    int early = 0;
    for (const auto& pt : r.points)
      if (pt.a <= bound + kGridEps && pt.verdict == Verdict::Violated) ++early;
    const bool bracket = r.a_first_violation && *r.a_first_violation > bound + kGridEps &&
                         *r.a_first_violation <= bound + 0.05 + kGridEps;
    const bool case_ok = bracket && early == 0;
    ok = ok && case_ok;
    cases.push_back({{"d", d},
                     {"k", k},
                     {"bound", bound},
                     {"a_certified_ks", opt_json(r.a_certified_ks)},
                     {"a_first_violation", opt_json(r.a_first_violation)},
                     {"violations_at_or_below_bound", early},
                     {"grid_points", r.points.size()},
                     {"points_digest", scan_digest(r)},
                     {"passed", case_ok}});
    summary += (summary.empty() ? "" : "; ") + std::string("(d,k)=(") + std::to_string(d) + "," + std::to_string(k) +
               ") bound " + fmt(bound, 4) + " first violation " +
               (r.a_first_violation ? fmt(*r.a_first_violation, 4) : std::string("none"));
  }
  res.passed = ok;
  res.summary = summary;
  res.details = {{"cases", std::move(cases)}};
  return res;
}

CriterionResult transposition_base(const SuiteOptions& o) {
  CriterionResult res;
  Json cases = Json::array();
  bool ok = true;
  std::string summary;
  for (int d : {2, 3}) {
    FamilyParams p;
    p.family = Family::LambdaPlus;
    p.d = d;
    p.k_target = 1;
    p.base = transposition(d);
    const ScanResult r = scan_threshold(p, 0.0, 1.0, 0.01, o.budget.with_seed(derive(o.seed, 2, d)),
                                        ScanDirection::Descending);
    const double lower = r.paper_bound;
    int above = 0;
    for (const auto& pt : r.points)
      if (pt.a >= lower - kGridEps && pt.verdict == Verdict::Violated) ++above;
    const bool located = r.a_first_violation && *r.a_first_violation < lower - kGridEps &&
                         *r.a_first_violation >= lower - 0.05 - kGridEps;
    const bool case_ok = located && above == 0;
    ok = ok && case_ok;

    // Informational: 2-KS versus 2-positivity verdicts along the family.
    Json cross = Json::array();
    int agree = 0;
    int total = 0;
    for (int i = 0; i <= 20; ++i) {
      const double a = round12(0.05 * i);
      const QuantumMap phi = lambda_plus(transposition(d), a);
      const auto ks2 = falsify_ks(phi, 2, o.budget.with_seed(derive(o.seed, 2, 100 * d + 2 * i)));
      const auto pos2 = falsify_k_positivity(phi, 2, o.budget.with_seed(derive(o.seed, 2, 100 * d + 2 * i + 1)));
      agree += ks2.violated() == pos2.violated();
      ++total;
      cross.push_back({{"a", a}, {"two_ks", verdict_brief(ks2)}, {"two_positive", verdict_brief(pos2)}});
    }

    cases.push_back({{"d", d},
                     {"lower_bound", lower},
                     {"a_certified_ks", opt_json(r.a_certified_ks)},
                     {"a_first_violation", opt_json(r.a_first_violation)},
                     {"violations_at_or_above_bound", above},
                     {"points_digest", scan_digest(r)},
                     {"passed", case_ok},
                     {"two_ks_vs_two_positivity", {{"agreements", agree}, {"points", total}, {"grid", cross}}}});
    summary += (summary.empty() ? "" : "; ") + std::string("d=") + std::to_string(d) + " lower bound " +
               fmt(lower, 4) + " first violation " +
               (r.a_first_violation ? fmt(*r.a_first_violation, 4) : std::string("none")) + " (2-KS/2-pos agree " +
               std::to_string(agree) + "/" + std::to_string(total) + ")";
  }
  res.passed = ok;
  res.summary = summary;
  res.details = {{"cases", std::move(cases)}};
  return res;
}

constexpr int kSampleSize = 20;

// The sample shared by the sufficiency and (k+1)-positivity criteria.
std::uint64_t sample_seed(std::uint64_t seed) { return derive(seed, 3, 0); }

CriterionResult random_base_sufficiency(const SuiteOptions& o) {
  CriterionResult res;
  const char* names[] = {"lambda_minus_bound", "lambda_plus_lower", "lambda_plus_upper"};
  int failures[3] = {0, 0, 0};
  int runs[3] = {0, 0, 0};
  double max_hs = 0.0;
  Json failed = Json::array();
  Json groups = Json::array();
  for (int d : {2, 3}) {
    for (int k : {1, 2}) {
      const auto [lo, hi] = bounds_lambda_plus(d, k);
      const double params[] = {bound_lambda_minus(d, k), lo, hi};
      int group_fail[3] = {0, 0, 0};
      double group_worst[3] = {INFINITY, INFINITY, INFINITY};
      for (int i = 0; i < kSampleSize; ++i) {
        const std::uint64_t s = splitmix64(sample_seed(o.seed) + static_cast<std::uint64_t>(i));
        const int n_kraus = 1 + i % (d * d);
        const QuantumMap base = sample_utp_cp(d, s, n_kraus);
        // Doubly-stochastic samples are HS contractions already; no rescaling is applied.
        max_hs = std::max(max_hs, hs_norm(base));
        for (int c = 0; c < 3; ++c) {
          const QuantumMap phi = c == 0 ? lambda_minus(base, params[c]) : lambda_plus(base, params[c]);
          const auto v = falsify_ks(phi, k, o.budget.with_seed(derive(o.seed, 3, 1000 * k + 100 * c + i + 10000 * d)));
          ++runs[c];
          group_worst[c] = std::min(group_worst[c], v.worst_value);
          if (v.violated()) {
            ++failures[c];
            ++group_fail[c];
            failed.push_back({{"check", names[c]}, {"d", d}, {"k", k}, {"sample", i}, {"a", params[c]},
                              {"verdict", verdict_brief(v)}});
          }
        }
      }
      Json g{{"d", d}, {"k", k}};
      for (int c = 0; c < 3; ++c)
        g[names[c]] = {{"a", params[c]}, {"violations", group_fail[c]}, {"worst_value", group_worst[c]}};
      groups.push_back(std::move(g));
    }
  }
  Json totals;
  std::string summary;
  for (int c = 0; c < 3; ++c) {
    totals[names[c]] = {{"violations", failures[c]}, {"runs", runs[c]}, {"passed", failures[c] == 0}};
    summary += (c ? ", " : "") + std::string(names[c]) + " " + std::to_string(failures[c]) + "/" +
               std::to_string(runs[c]) + " violated";
  }
  res.passed = failures[0] == 0 && failures[1] == 0 && failures[2] == 0;
  res.summary = summary;
  res.details = {{"max_base_hs_norm", max_hs}, {"totals", totals}, {"groups", groups}, {"violations", failed}};
  return res;
}

CriterionResult delta_lemma(const SuiteOptions& o) {
  CriterionResult res;
  Json cases = Json::array();
  double worst = 0.0;
  for (int k : {1, 2, 3})
    for (int d : {2, 3}) {
      const auto rep = check_delta_lemma(k, d, 200, derive(o.seed, 4, 10 * k + d));
      const double m = std::max({rep.projector_residual, rep.multiplicative_residual, rep.annihilation_residual,
                                 rep.kernel_residual});
      worst = std::max(worst, m);
      cases.push_back({{"k", k},
                       {"d", d},
                       {"samples", rep.samples},
                       {"projector", rep.projector_residual},
                       {"multiplicative", rep.multiplicative_residual},
                       {"annihilation", rep.annihilation_residual},
                       {"kernel", rep.kernel_residual}});
    }
  res.passed = worst <= 1e-10;
  res.summary = "max residual " + fmt(worst, 3) + " over 6 (k,d) pairs x 200 samples";
  res.details = {{"max_residual", worst}, {"cases", std::move(cases)}};
  return res;
}

QuantumMap random_hermiticity_preserving(int d, std::uint64_t seed, double target_hs_norm) {
  Rng rng(seed);
  const ComplexMatrix c = random_hermitian(static_cast<Eigen::Index>(d) * d, rng);
  return rescale_hs_norm(QuantumMap::from_choi(d, c, "random-hp"), target_hs_norm);
}

CriterionResult hs_contraction(const SuiteOptions& o) {
  CriterionResult res;
  int contraction_violations = 0;
  int contraction_runs = 0;
  double contraction_worst = INFINITY;
  Json contraction_failed = Json::array();
  std::vector<double> values;
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 2;
    const QuantumMap phi = random_hermiticity_preserving(d, derive(o.seed, 5, i), 0.99);
    for (int k : {1, 2, 3}) {
      const auto v = check_phi_k_condition(phi, k, o.budget.with_seed(derive(o.seed, 5, 1000 + 3 * i + k)));
      ++contraction_runs;
      values.push_back(v.worst_value);
      contraction_worst = std::min(contraction_worst, v.worst_value);
      if (v.violated()) {
        ++contraction_violations;
        contraction_failed.push_back({{"sample", i}, {"d", d}, {"k", k}, {"verdict", verdict_brief(v)}});
      }
    }
  }
  int inflated_violations = 0;
  Json inflated = Json::array();
  for (int i = 0; i < 20; ++i) {
    const int d = 2 + i % 2;
    const int k = 1 + i % 3;
    const QuantumMap phi = random_hermiticity_preserving(d, derive(o.seed, 5, 5000 + i), 1.05);
    const auto v = check_phi_k_condition(phi, k, o.budget.with_seed(derive(o.seed, 5, 6000 + i)));
    inflated_violations += v.violated();
    inflated.push_back({{"sample", i}, {"d", d}, {"k", k}, {"verdict", verdict_brief(v)}});
  }
  res.passed = contraction_violations == 0 && inflated_violations >= 15;
  res.summary = "hs_norm 0.99: " + std::to_string(contraction_violations) + "/" + std::to_string(contraction_runs) +
                " violated; hs_norm 1.05: " + std::to_string(inflated_violations) + "/20 violated (need >= 15)";
  res.details = {{"contraction", {{"runs", contraction_runs},
                                  {"violations", contraction_violations},
                                  {"worst_value", contraction_worst},
                                  {"values_digest", digest(values)},
                                  {"violated", contraction_failed}}},
                 {"inflated", {{"runs", 20}, {"violations", inflated_violations}, {"rate", inflated_violations / 20.0},
                               {"samples", inflated}}}};
  return res;
}

CriterionResult positive_implies_ks(const SuiteOptions& o) {
  CriterionResult res;
  Json groups = Json::array();
  int violations = 0;
  int runs = 0;
  for (int d : {2, 3})
    for (int k : {1, 2}) {
      const auto rep = check_kp_implies_kks(d, k, sample_seed(o.seed), o.budget.with_seed(derive(o.seed, 6, 10 * d + k)),
                                            kSampleSize);
      violations += rep.violations;
      runs += static_cast<int>(rep.samples.size());
      Json samples = Json::array();
      for (const auto& s : rep.samples)
        samples.push_back({{"seed", s.seed}, {"n_kraus", s.n_kraus}, {"verdict", verdict_brief(s.verdict)}});
      groups.push_back({{"d", d}, {"k", k}, {"violations", rep.violations}, {"samples", std::move(samples)}});
    }
  res.passed = violations == 0;
  res.summary = std::to_string(violations) + "/" + std::to_string(runs) + " sampled UTP CP maps violated";
  res.details = {{"violations", violations}, {"runs", runs}, {"groups", std::move(groups)}};
  return res;
}

CriterionResult reduction_k_positivity(const SuiteOptions& o) {
  CriterionResult res;
  Json cases = Json::array();
  int correct = 0;
  for (int k : {1, 2, 3})
    for (int sign : {+1, -1}) {
      const double a = round12(1.0 / k + sign * 0.05);
      const auto v = falsify_k_positivity(reduction(3, a), k, o.budget.with_seed(derive(o.seed, 7, 10 * k + (sign > 0))));
      const bool expect_violation = sign > 0;
      const bool case_ok = v.violated() == expect_violation;
      correct += case_ok;
      cases.push_back({{"k", k},
                       {"a", a},
                       {"expected", expect_violation ? "violated" : "no-violation-found"},
                       {"result", verdict_brief(v)},
                       {"passed", case_ok}});
    }
  res.passed = correct == 6;
  res.summary = std::to_string(correct) + "/6 cases match k-positive iff a <= 1/k (d=3)";
  res.details = {{"cases", std::move(cases)}};
  return res;
}

std::vector<DecompositionResult> criterion_decompositions() {
  std::vector<DecompositionResult> out;
  for (int d : {2, 3})
    for (int i = 1; i < 50; ++i) {
      const double a = round12(0.02 * i);
      if (a > d / (d + 1.0) && a < 1.0) out.push_back(decompose_reduction(d, a));
    }
  for (int d : {2, 3})
    for (int i = 0; i <= 20; ++i) out.push_back(decompose_lambda_plus_T(d, round12(0.05 * i)));
  return out;
}

CriterionResult decompositions(const SuiteOptions& o) {
  CriterionResult res;
  Json items = Json::array();
  int passed = 0;
  double worst_identity = 0.0;
  const auto list = criterion_decompositions();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& r = list[i];
    const auto rep = verify_decomposition(r, decomposition_target(r), o.budget.with_seed(derive(o.seed, 8, i)));
    const double id_res = parameter_identity_residual(r);
    worst_identity = std::max(worst_identity, id_res);
    const bool ok = rep.passed() && id_res <= 1e-14;
    passed += ok;
    Json checks;
    for (const auto& c : rep.checks) checks[c.name] = {{"passed", c.passed}, {"value", c.value}};
    items.push_back({{"target", r.target},
                     {"d", r.d},
                     {"a", r.a},
                     {"lambda", r.lambda},
                     {"identity_residual", id_res},
                     {"checks", std::move(checks)},
                     {"passed", ok}});
  }
  res.passed = passed == static_cast<int>(list.size());
  res.summary = std::to_string(passed) + "/" + std::to_string(list.size()) +
                " decompositions pass all four checks; max parameter identity residual " + fmt(worst_identity, 3);
  res.details = {{"max_identity_residual", worst_identity}, {"decompositions", std::move(items)}};
  return res;
}

CriterionResult jordan_stormer(const SuiteOptions& o) {
  CriterionResult res;
  const auto list = criterion_decompositions();
  double worst_jordan = INFINITY;
  double worst_stormer = INFINITY;
  Json items = Json::array();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& r = list[i];
    const QuantumMap target = decomposition_target(r);
    Rng rng(derive(o.seed, 9, i));
    double wj = INFINITY;
    double ws = INFINITY;
    for (int s = 0; s < 100; ++s) {
      const ComplexMatrix x = ginibre_unit(r.d, r.d, rng);
      wj = std::min(wj, min_eigenvalue(jordan_defect(r.phi1, r.phi2, r.lambda, x)));
      for (const QuantumMap* m : {&target, &r.phi1, &r.phi2}) ws = std::min(ws, min_eigenvalue(stormer_defect(*m, x)));
    }
    worst_jordan = std::min(worst_jordan, wj);
    worst_stormer = std::min(worst_stormer, ws);
    items.push_back({{"target", r.target}, {"d", r.d}, {"a", r.a}, {"jordan_min", wj}, {"stormer_min", ws}});
  }
  res.passed = worst_jordan >= -1e-9 && worst_stormer >= -1e-9;
  res.summary = "min eigenvalue: jordan " + fmt(worst_jordan, 3) + ", stormer " + fmt(worst_stormer, 3) + " over " +
                std::to_string(list.size()) + " decompositions x 100 X";
  res.details = {{"jordan_min", worst_jordan}, {"stormer_min", worst_stormer}, {"decompositions", std::move(items)}};
  return res;
}

CriterionResult run_numbered(int id, const SuiteOptions& o);

std::string comparable(const CriterionResult& r) {
  return Json{{"passed", r.passed}, {"summary", r.summary}, {"details", r.details}}.dump();
}

CriterionResult determinism(const SuiteOptions& o, const std::map<int, std::string>& first_pass) {
  CriterionResult res;
  Json cases = Json::array();
  int identical = 0;
  for (int id = 1; id <= 9; ++id) {
    const auto it = first_pass.find(id);
    const std::string a = it != first_pass.end() ? it->second : comparable(run_numbered(id, o));
    const std::string b = comparable(run_numbered(id, o));
    const bool same = a == b;
    identical += same;
    cases.push_back({{"criterion", id}, {"identical", same}, {"bytes", b.size()}});
  }
  res.passed = identical == 9;
  res.summary = std::to_string(identical) + "/9 criteria reproduce byte-identical records with seed " +
                std::to_string(o.seed);
  res.details = {{"criteria", std::move(cases)}};
  return res;
}

CriterionResult run_numbered(int id, const SuiteOptions& o) {
  switch (id) {
    case 1: return tomiyama_bracketing(o);
    case 2: return transposition_base(o);
    case 3: return random_base_sufficiency(o);
    case 4: return delta_lemma(o);
    case 5: return hs_contraction(o);
    case 6: return positive_implies_ks(o);
    case 7: return reduction_k_positivity(o);
    case 8: return decompositions(o);
    case 9: return jordan_stormer(o);
    case 10: return determinism(o, {});
    default: throw DomainError("suite: no criterion " + std::to_string(id));
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

CriterionResult timed(int id, const std::function<CriterionResult()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.summary = std::string("error: ") + e.what();
    r.details = {{"error", e.what()}};
  }
  r.id = id;
  r.name = suite_criteria()[id - 1].name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

const std::vector<CriterionInfo>& suite_criteria() {
  static const std::vector<CriterionInfo> list = {
      {1, "Tomiyama threshold bracketing (identity base)", {"scan", "certify"}},
      {2, "Transposition base lower threshold", {"scan", "certify"}},
      {3, "Sufficiency for random UTP bases", {"certify", "sufficiency"}},
      {4, "Delta_k projector identities", {"certify", "delta"}},
      {5, "HS contraction implies (Phi-k)", {"certify", "hs"}},
      {6, "(k+1)-positive implies k-KS", {"certify"}},
      {7, "k-positivity of the reduction map", {"kpos", "map-zoo"}},
      {8, "KS-decompositions verify", {"decompose"}},
      {9, "Jordan and Stormer inequalities", {"decompose"}},
      {10, "Determinism", {"determinism"}},
  };
  return list;
}

bool criterion_selected(const CriterionInfo& c, const std::string& filter) {
  if (filter.empty()) return true;
  if (filter == std::to_string(c.id)) return true;
  if (std::find(c.tags.begin(), c.tags.end(), filter) != c.tags.end()) return true;
  return lower(c.name).find(lower(filter)) != std::string::npos;
}

bool SuiteReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

Json SuiteReport::to_json(bool include_timing) const {
  Json list = Json::array();
  for (const auto& r : results) {
    Json j{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"details", r.details}};
    if (include_timing) j["seconds"] = r.seconds;
    list.push_back(std::move(j));
  }
  return {{"seed", seed}, {"filter", filter}, {"passed", passed()}, {"criteria", std::move(list)}};
}

CriterionResult run_criterion(int id, const SuiteOptions& options) {
  if (id < 1 || id > static_cast<int>(suite_criteria().size()))
    throw DomainError("suite: no criterion " + std::to_string(id));
  return timed(id, [&] { return run_numbered(id, options); });
}

SuiteReport run_suite(const SuiteOptions& options, const std::function<void(const CriterionResult&)>& on_result) {
  options.budget.validate();
  SuiteReport rep;
  rep.seed = options.seed;
  rep.filter = options.filter;
  std::map<int, std::string> first_pass;
  for (const auto& c : suite_criteria()) {
    if (!criterion_selected(c, options.filter)) continue;
    CriterionResult r = c.id == 10 ? timed(10, [&] { return determinism(options, first_pass); })
                                   : run_criterion(c.id, options);
    if (c.id != 10) first_pass[c.id] = comparable(r);
    if (on_result) on_result(r);
    rep.results.push_back(std::move(r));
  }
  return rep;
}

std::string digest(const std::vector<double>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string witness_digest(const Witness& w) {
  std::vector<double> v;
  if (const auto* b = std::get_if<BlockOperator>(&w)) {
    append_matrix(v, b->data());
  } else {
    const auto& s = std::get<SchmidtWitness>(w);
    append_matrix(v, s.u);
    append_matrix(v, s.v);
  }
  return digest(v);
}

}  // namespace kslab
