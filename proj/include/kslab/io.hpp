#pragma once

// JSON and CSV serialization. Matrices are nested row arrays of [re, im]
// pairs; operators are vectorized column-first ("conv": "col-vec").
// Parsing errors throw FormatError naming the offending field path.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kslab/certify.hpp"
#include "kslab/decompose.hpp"
#include "kslab/scan.hpp"

namespace kslab {

using Json = nlohmann::json;

inline constexpr std::string_view kToolName = "kslab";
inline constexpr std::string_view kToolVersion = "0.1.0";

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& field);

enum class MapRepr { Transfer, Choi, Kraus };

std::string_view repr_name(MapRepr r);

// Kraus output requires a CP map (HypothesisError otherwise).
Json map_to_json(const QuantumMap& phi, MapRepr repr = MapRepr::Transfer);
QuantumMap map_from_json(const Json& j);

Json witness_to_json(const Witness& w);
Witness witness_from_json(const Json& j, const std::string& field);

Json budget_to_json(const SearchBudget& b);
SearchBudget budget_from_json(const Json& j, const std::string& field);

// {"property", "k", "verdict", "worst_value", "witness" (or null), "seed",
//  "budget": {..., "used": {...}}, "warnings"}
Json verdict_to_json(const CertificateVerdict& v, const SearchBudget& budget);
CertificateVerdict verdict_from_json(const Json& j);

// {"target", "d", "a", "lambda", "params", "phi1", "phi2", "residual"}
Json decomposition_to_json(const DecompositionResult& r);
DecompositionResult decomposition_from_json(const Json& j);
Json decomposition_report_to_json(const DecompositionReport& r);

Json scan_to_json(const ScanResult& r);
// Header "a,verdict,worst_value"; rows in ascending a.
std::string scan_to_csv(const ScanResult& r);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Byte-stable rendering: two-space indentation, shortest round-trip doubles,
// non-finite values as null.
std::string dump_json(const Json& j);

}  // namespace kslab
