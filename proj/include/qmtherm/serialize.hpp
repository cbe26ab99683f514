#pragma once

// JSON file formats. Complex scalars are [re, im]; matrices are row-major
// nested arrays. Doubles are written with 17 significant digits so that
// save → load → save reproduces the same bytes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmtherm/measproc.hpp"

namespace qmtherm {

using Json = nlohmann::ordered_json;

/// Pretty-printed JSON, two-space indent, %.17g for non-integral numbers,
/// trailing newline.
std::string dump_json(const Json& j);

/// Throws ParseError carrying the byte offset of the syntax error.
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Json matrix_to_json(const ComplexMatrix& m);
/// `where` is a JSON pointer used in error messages.
ComplexMatrix matrix_from_json(const Json& j, const std::string& where = "");

Json observable_to_json(const Observable& obs);
Observable observable_from_json(const Json& j, const Tolerances& tol = {});

Json operation_to_json(const QuantumOperation& op);
QuantumOperation operation_from_json(const Json& j, const Tolerances& tol = {},
                                     const std::string& where = "");

/// [{"label", "kraus"}, ...]; dimensions are inferred from the Kraus shapes.
Json instrument_to_json(const Instrument& inst);
Instrument instrument_from_json(const Json& j, const Tolerances& tol = {},
                                const std::string& where = "");

Json process_to_json(const MeasurementProcess& proc);
MeasurementProcess process_from_json(const Json& j, const Tolerances& tol = {});

/// {"state": M}
Json state_to_json(const State& s);
State state_from_json(const Json& j, const Tolerances& tol = {});

/// {"unitaries": [M, ...]}
Json unitaries_to_json(const std::vector<ComplexMatrix>& us);
std::vector<ComplexMatrix> unitaries_from_json(const Json& j);

}  // namespace qmtherm
