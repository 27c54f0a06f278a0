#include "kslab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

const Json& field(const Json& j, const std::string& parent, const std::string& key) {
  if (!j.is_object()) throw FormatError("'" + (parent.empty() ? std::string("<root>") : parent) + "' must be an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError("missing field '" + join(parent, key) + "'");
  return *it;
}

double as_double(const Json& j, const std::string& path) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw FormatError("field '" + path + "' must be a number");
  return j.get<double>();
}

std::int64_t as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError("field '" + path + "' must be an integer");
  return j.get<std::int64_t>();
}

std::uint64_t as_uint(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw FormatError("field '" + path + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError("field '" + path + "' must be a string");
  return j.get<std::string>();
}

int positive_int(const Json& j, const std::string& path) {
  const auto v = as_int(j, path);
  if (v < 1 || v > 1 << 16) throw FormatError("field '" + path + "' must be a positive integer");
  return static_cast<int>(v);
}

Json usage_to_json(const BudgetUsage& u) {
  return {{"restarts", u.restarts}, {"iterations", u.iterations}, {"evaluations", u.evaluations}};
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw FormatError("field '" + path + "' must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw FormatError("field '" + index(path, 0) + "' must be a non-empty row");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = index(path, r);
    if (!j[r].is_array() || j[r].size() != cols)
      throw FormatError("field '" + rp + "' must be a row of " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string ep = index(rp, c);
      const Json& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw FormatError("field '" + ep + "' must be a [re, im] pair of numbers");
      const Complex z(e[0].get<double>(), e[1].get<double>());
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw FormatError("field '" + ep + "' is not finite");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z;
    }
  }
  return m;
}

std::string_view repr_name(MapRepr r) {
  switch (r) {
    case MapRepr::Transfer: return "transfer";
    case MapRepr::Choi: return "choi";
    case MapRepr::Kraus: return "kraus";
  }
  return "transfer";
}

Json map_to_json(const QuantumMap& phi, MapRepr repr) {
  Json j{{"d", phi.d()}, {"repr", repr_name(repr)}, {"label", phi.label()}, {"conv", "col-vec"}};
  switch (repr) {
    case MapRepr::Transfer: j["data"] = matrix_to_json(phi.transfer()); break;
    case MapRepr::Choi: j["data"] = matrix_to_json(choi(phi)); break;
    case MapRepr::Kraus: {
      Json ks = Json::array();
      for (const auto& k : kraus_operators(phi)) ks.push_back(matrix_to_json(k));
      j["data"] = std::move(ks);
      break;
    }
  }
  return j;
}

QuantumMap map_from_json(const Json& j) {
  const int d = positive_int(field(j, "", "d"), "d");
  const std::string repr = as_string(field(j, "", "repr"), "repr");
  std::string label;
  if (j.contains("label")) label = as_string(j["label"], "label");
  if (j.contains("conv")) {
    const std::string conv = as_string(j["conv"], "conv");
    if (conv != "col-vec") throw FormatError("field 'conv' must be \"col-vec\", got \"" + conv + "\"");
  }
  const Json& data = field(j, "", "data");
  const auto expect_shape = [](const ComplexMatrix& m, Eigen::Index n, const std::string& path) {
    if (m.rows() != n || m.cols() != n)
      throw FormatError("field '" + path + "' must be " + std::to_string(n) + "x" + std::to_string(n) + ", got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  };
  if (repr == "transfer" || repr == "choi") {
    const ComplexMatrix m = matrix_from_json(data, "data");
    expect_shape(m, static_cast<Eigen::Index>(d) * d, "data");
    return repr == "transfer" ? QuantumMap::from_transfer(d, m, label) : QuantumMap::from_choi(d, m, label);
  }
  if (repr == "kraus") {
    if (!data.is_array() || data.empty()) throw FormatError("field 'data' must be a non-empty array of Kraus operators");
    std::vector<ComplexMatrix> ks;
    for (std::size_t i = 0; i < data.size(); ++i) {
      ks.push_back(matrix_from_json(data[i], index("data", i)));
      expect_shape(ks.back(), d, index("data", i));
    }
    return QuantumMap::from_kraus(ks, label);
  }
  throw FormatError("field 'repr' must be one of transfer, choi, kraus; got \"" + repr + "\"");
}

Json witness_to_json(const Witness& w) {
  if (const auto* b = std::get_if<BlockOperator>(&w))
    return {{"type", "block"}, {"k", b->k()}, {"d", b->d()}, {"data", matrix_to_json(b->data())}};
  const auto& s = std::get<SchmidtWitness>(w);
  return {{"type", "schmidt"}, {"u", matrix_to_json(s.u)}, {"v", matrix_to_json(s.v)}};
}

Witness witness_from_json(const Json& j, const std::string& path) {
  const std::string type = as_string(field(j, path, "type"), join(path, "type"));
  if (type == "block") {
    const int k = positive_int(field(j, path, "k"), join(path, "k"));
    const int d = positive_int(field(j, path, "d"), join(path, "d"));
    ComplexMatrix m = matrix_from_json(field(j, path, "data"), join(path, "data"));
    if (m.rows() != static_cast<Eigen::Index>(k) * d || m.cols() != m.rows())
      throw FormatError("field '" + join(path, "data") + "' must be kd x kd");
    return BlockOperator(k, d, std::move(m));
  }
  if (type == "schmidt") {
    ComplexMatrix u = matrix_from_json(field(j, path, "u"), join(path, "u"));
    ComplexMatrix v = matrix_from_json(field(j, path, "v"), join(path, "v"));
    if (u.rows() != v.rows() || u.cols() != v.cols())
      throw FormatError("fields '" + join(path, "u") + "' and '" + join(path, "v") + "' must have equal shapes");
    return SchmidtWitness{std::move(u), std::move(v)};
  }
  throw FormatError("field '" + join(path, "type") + "' must be \"block\" or \"schmidt\"");
}

Json budget_to_json(const SearchBudget& b) {
  return {{"restarts", b.restarts},
          {"max_iters", b.max_iters},
          {"step_init", b.step_init},
          {"seed", b.seed},
          {"violation_tol", b.violation_tol}};
}

SearchBudget budget_from_json(const Json& j, const std::string& path) {
  SearchBudget b;
  b.restarts = positive_int(field(j, path, "restarts"), join(path, "restarts"));
  b.max_iters = positive_int(field(j, path, "max_iters"), join(path, "max_iters"));
  b.step_init = as_double(field(j, path, "step_init"), join(path, "step_init"));
  b.seed = as_uint(field(j, path, "seed"), join(path, "seed"));
  b.violation_tol = as_double(field(j, path, "violation_tol"), join(path, "violation_tol"));
  try {
    b.validate();
  } catch (const DomainError& e) {
    throw FormatError("field '" + path + "': " + e.what());
  }
  return b;
}

Json verdict_to_json(const CertificateVerdict& v, const SearchBudget& budget) {
  Json b = budget_to_json(budget);
  b["used"] = usage_to_json(v.budget_used);
  return {{"property", v.property},
          {"k", v.k},
          {"verdict", verdict_name(v.verdict)},
          {"worst_value", v.worst_value},
          {"witness", v.witness ? witness_to_json(*v.witness) : Json(nullptr)},
          {"seed", v.seed},
          {"budget", std::move(b)},
          {"warnings", v.warnings}};
}

CertificateVerdict verdict_from_json(const Json& j) {
  CertificateVerdict v;
  v.property = as_string(field(j, "", "property"), "property");
  v.k = positive_int(field(j, "", "k"), "k");
  const std::string name = as_string(field(j, "", "verdict"), "verdict");
  if (name == "violated")
    v.verdict = Verdict::Violated;
  else if (name == "no-violation-found")
    v.verdict = Verdict::NoViolationFound;
  else
    throw FormatError("field 'verdict' must be \"violated\" or \"no-violation-found\"");
  v.worst_value = as_double(field(j, "", "worst_value"), "worst_value");
  const Json& w = field(j, "", "witness");
  if (!w.is_null()) v.witness = witness_from_json(w, "witness");
  v.seed = as_uint(field(j, "", "seed"), "seed");
  const Json& b = field(j, "", "budget");
  v.violation_tol = as_double(field(b, "budget", "violation_tol"), "budget.violation_tol");
  if (b.contains("used")) {
    const Json& u = b["used"];
    v.budget_used.restarts = static_cast<int>(as_int(field(u, "budget.used", "restarts"), "budget.used.restarts"));
    v.budget_used.iterations = as_int(field(u, "budget.used", "iterations"), "budget.used.iterations");
    v.budget_used.evaluations = as_int(field(u, "budget.used", "evaluations"), "budget.used.evaluations");
  }
  if (j.contains("warnings")) {
    const Json& ws = j["warnings"];
    if (!ws.is_array()) throw FormatError("field 'warnings' must be an array");
    for (std::size_t i = 0; i < ws.size(); ++i) v.warnings.push_back(as_string(ws[i], index("warnings", i)));
  }
  return v;
}

Json decomposition_to_json(const DecompositionResult& r) {
  Json params;
  if (const auto* p = std::get_if<ReductionParams>(&r.params))
    params = {{"alpha", p->alpha}, {"beta", p->beta}, {"gamma", p->gamma}, {"delta", p->delta}};
  else {
    const auto& q = std::get<LambdaPlusParams>(r.params);
    params = {{"lambda", q.lambda}, {"beta", q.beta}};
  }
  return {{"target", r.target},   {"d", r.d},
          {"a", r.a},             {"lambda", r.lambda},
          {"params", params},     {"phi1", map_to_json(r.phi1)},
          {"phi2", map_to_json(r.phi2)}, {"residual", r.residual}};
}

DecompositionResult decomposition_from_json(const Json& j) {
  const std::string target = as_string(field(j, "", "target"), "target");
  const int d = positive_int(field(j, "", "d"), "d");
  const double a = as_double(field(j, "", "a"), "a");
  const double lambda = as_double(field(j, "", "lambda"), "lambda");
  const Json& p = field(j, "", "params");
  DecompositionParams params;
  if (target == "reduction") {
    params = ReductionParams{as_double(field(p, "params", "alpha"), "params.alpha"),
                             as_double(field(p, "params", "beta"), "params.beta"),
                             as_double(field(p, "params", "gamma"), "params.gamma"),
                             as_double(field(p, "params", "delta"), "params.delta")};
  } else if (target == "lambda-plus-T") {
    params = LambdaPlusParams{as_double(field(p, "params", "lambda"), "params.lambda"),
                              as_double(field(p, "params", "beta"), "params.beta")};
  } else {
    throw FormatError("field 'target' must be \"reduction\" or \"lambda-plus-T\"");
  }
  const auto load_map = [&](const char* key) {
    try {
      return map_from_json(field(j, "", key));
    } catch (const FormatError& e) {
      throw FormatError(std::string(key) + ": " + e.what());
    }
  };
  QuantumMap phi1 = load_map("phi1");
  QuantumMap phi2 = load_map("phi2");
  const double residual = as_double(field(j, "", "residual"), "residual");
  return DecompositionResult{target, d, a, lambda, std::move(phi1), std::move(phi2), params, residual};
}

Json decomposition_report_to_json(const DecompositionReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
  return {{"passed", r.passed()}, {"checks", std::move(checks)}};
}

Json scan_to_json(const ScanResult& r) {
  Json points = Json::array();
  for (const auto& p : r.points)
    points.push_back({{"a", p.a}, {"verdict", verdict_name(p.verdict)}, {"worst_value", p.worst_value}});
  const auto opt = [](const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); };
  return {{"family", r.family},
          {"base", r.base},
          {"d", r.d},
          {"k", r.k},
          {"direction", direction_name(r.direction)},
          {"a_certified_ks", opt(r.a_certified_ks)},
          {"a_first_violation", opt(r.a_first_violation)},
          {"paper_bound", r.paper_bound},
          {"grid_step", r.grid_step},
          {"points", std::move(points)}};
}

namespace {

// Shortest representation that parses back to the same double, as in the JSON output.
std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string scan_to_csv(const ScanResult& r) {
  std::ostringstream os;
  os << "a,verdict,worst_value\n";
  for (const auto& p : r.points)
    os << shortest(p.a) << ',' << verdict_name(p.verdict) << ',' << shortest(p.worst_value) << '\n';
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace kslab
