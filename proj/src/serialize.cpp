#include "qmtherm/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmtherm/error.hpp"

namespace qmtherm {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  fail(ErrorKind::ParseError, (where.empty() ? std::string("/") : where) + ": " + what);
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing key \"") + key + "\"");
  return *it;
}

std::size_t require_count(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    schema_error(where + "/" + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

bool is_flat(const Json& j) {
  if (is_scalar(j)) return true;
  if (j.is_object()) return false;
  for (const auto& e : j) {
    if (!is_flat(e)) return false;
  }
  return true;
}

void write_scalar(std::string& out, const Json& j) {
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (v == 0.0) v = 0.0;  // "-0" would reload as integer 0
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "cannot serialize a non-finite number");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  } else {
    out += j.dump();
  }
}

void write_inline(std::string& out, const Json& j) {
  if (!j.is_array()) {
    write_scalar(out, j);
    return;
  }
  out += '[';
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (k) out += ", ";
    write_inline(out, j[k]);
  }
  out += ']';
}

void write_value(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (is_flat(j)) {
    write_inline(out, j);
  } else if (j.is_array()) {
    out += "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      out += pad;
      write_value(out, j[k], depth + 1);
      out += k + 1 < j.size() ? ",\n" : "\n";
    }
    out += close_pad + "]";
  } else if (j.empty()) {
    out += "{}";
  } else {
    out += "{\n";
    std::size_t k = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++k) {
      out += pad + Json(it.key()).dump() + ": ";
      write_value(out, it.value(), depth + 1);
      out += k + 1 < j.size() ? ",\n" : "\n";
    }
    out += close_pad + "}";
  }
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

Json labelled_kraus(const std::string& label, const QuantumOperation& op) {
  Json k = Json::array();
  for (const auto& m : op.kraus()) k.push_back(matrix_to_json(m));
  return Json{{"label", label}, {"kraus", std::move(k)}};
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  write_value(out, j, 0);
  out += '\n';
  return out;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ParseError, source + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, path.string() + ": cannot open for writing");
  out << text;
  if (!out) fail(ErrorKind::InvalidInput, path.string() + ": write failed");
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) schema_error(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) schema_error(where + "/0", "expected a non-empty row");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_at = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) {
      schema_error(row_at, "expected a row of length " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      const std::string at = row_at + "/" + std::to_string(c);
      if (e.is_number()) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            Complex(number_at(e[0], at + "/0"), number_at(e[1], at + "/1"));
      } else {
        schema_error(at, "expected a complex number [re, im]");
      }
    }
  }
  return m;
}

Json observable_to_json(const Observable& obs) {
  Json effects = Json::array();
  for (std::size_t x = 0; x < obs.size(); ++x) {
    effects.push_back(Json{{"label", obs.labels()[x]}, {"matrix", matrix_to_json(obs.effect(x).matrix())}});
  }
  return Json{{"effects", std::move(effects)}};
}

Observable observable_from_json(const Json& j, const Tolerances& tol) {
  const Json& effects = require(j, "effects", "");
  if (!effects.is_array()) schema_error("/effects", "expected an array");
  std::vector<std::string> labels;
  std::vector<Effect> es;
  for (std::size_t x = 0; x < effects.size(); ++x) {
    const std::string at = "/effects/" + std::to_string(x);
    const Json& label = require(effects[x], "label", at);
    if (!label.is_string()) schema_error(at + "/label", "expected a string");
    labels.push_back(label.get<std::string>());
    es.emplace_back(HermitianMatrix(matrix_from_json(require(effects[x], "matrix", at), at + "/matrix")), tol);
  }
  return Observable(std::move(labels), std::move(es), tol);
}

Json operation_to_json(const QuantumOperation& op) {
  Json kraus = Json::array();
  for (const auto& k : op.kraus()) kraus.push_back(matrix_to_json(k));
  return Json{{"in_dim", op.in_dim()}, {"out_dim", op.out_dim()}, {"kraus", std::move(kraus)}};
}

QuantumOperation operation_from_json(const Json& j, const Tolerances& tol, const std::string& where) {
  const std::size_t in = require_count(j, "in_dim", where);
  const std::size_t out = require_count(j, "out_dim", where);
  const Json& kraus = require(j, "kraus", where);
  if (!kraus.is_array()) schema_error(where + "/kraus", "expected an array");
  std::vector<ComplexMatrix> ks;
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    ks.push_back(matrix_from_json(kraus[k], where + "/kraus/" + std::to_string(k)));
  }
  return QuantumOperation(in, out, std::move(ks), tol);
}

Json instrument_to_json(const Instrument& inst) {
  Json out = Json::array();
  for (std::size_t x = 0; x < inst.size(); ++x) out.push_back(labelled_kraus(inst.labels()[x], inst.operation(x)));
  return out;
}

Instrument instrument_from_json(const Json& j, const Tolerances& tol, const std::string& where) {
  if (!j.is_array() || j.empty()) schema_error(where, "expected a non-empty array of outcomes");
  std::vector<std::string> labels;
  std::vector<QuantumOperation> ops;
  for (std::size_t x = 0; x < j.size(); ++x) {
    const std::string at = where + "/" + std::to_string(x);
    const Json& label = require(j[x], "label", at);
    if (!label.is_string()) schema_error(at + "/label", "expected a string");
    labels.push_back(label.get<std::string>());
    const Json& kraus = require(j[x], "kraus", at);
    if (!kraus.is_array() || kraus.empty()) schema_error(at + "/kraus", "expected a non-empty array");
    std::vector<ComplexMatrix> ks;
    for (std::size_t k = 0; k < kraus.size(); ++k) {
      ks.push_back(matrix_from_json(kraus[k], at + "/kraus/" + std::to_string(k)));
    }
    const auto out_dim = static_cast<std::size_t>(ks.front().rows());
    const auto in_dim = static_cast<std::size_t>(ks.front().cols());
    ops.emplace_back(in_dim, out_dim, std::move(ks), tol);
  }
  return Instrument(std::move(labels), std::move(ops), tol);
}

Json process_to_json(const MeasurementProcess& proc) {
  Json j{{"sys_dim", proc.sys_dim()},
         {"app_dim", proc.app_dim()},
         {"xi", matrix_to_json(proc.xi().matrix())},
         {"premeasurement", operation_to_json(proc.premeasurement())},
         {"objectification", instrument_to_json(proc.objectification())},
         {"decomposable", proc.decomposable}};
  Json meta = Json::object();
  for (const auto& [k, v] : proc.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j;
}

MeasurementProcess process_from_json(const Json& j, const Tolerances& tol) {
  const std::size_t sys = require_count(j, "sys_dim", "");
  const std::size_t app = require_count(j, "app_dim", "");
  State xi(HermitianMatrix(matrix_from_json(require(j, "xi", ""), "/xi")), tol);
  QuantumOperation e = operation_from_json(require(j, "premeasurement", ""), tol, "/premeasurement");
  Instrument obj = instrument_from_json(require(j, "objectification", ""), tol, "/objectification");
  MeasurementProcess proc(sys, app, std::move(xi), std::move(e), std::move(obj), tol);
  if (const auto it = j.find("decomposable"); it != j.end()) {
    if (!it->is_boolean()) schema_error("/decomposable", "expected a boolean");
    proc.decomposable = it->get<bool>();
  }
  if (const auto it = j.find("metadata"); it != j.end()) {
    if (!it->is_object()) schema_error("/metadata", "expected an object");
    for (auto m = it->begin(); m != it->end(); ++m) {
      if (!m.value().is_string()) schema_error("/metadata/" + m.key(), "expected a string");
      proc.metadata[m.key()] = m.value().get<std::string>();
    }
  }
  return proc;
}

Json state_to_json(const State& s) { return Json{{"state", matrix_to_json(s.matrix())}}; }

State state_from_json(const Json& j, const Tolerances& tol) {
  return State(HermitianMatrix(matrix_from_json(require(j, "state", ""), "/state")), tol);
}

Json unitaries_to_json(const std::vector<ComplexMatrix>& us) {
  Json arr = Json::array();
  for (const auto& u : us) arr.push_back(matrix_to_json(u));
  return Json{{"unitaries", std::move(arr)}};
}

std::vector<ComplexMatrix> unitaries_from_json(const Json& j) {
  const Json& arr = require(j, "unitaries", "");
  if (!arr.is_array()) schema_error("/unitaries", "expected an array");
  std::vector<ComplexMatrix> us;
  for (std::size_t k = 0; k < arr.size(); ++k) us.push_back(matrix_from_json(arr[k], "/unitaries/" + std::to_string(k)));
  return us;
}

}  // namespace qmtherm
