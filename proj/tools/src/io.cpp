#include "ddae_cli/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ddae::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t index) { return where + "/" + std::to_string(index); }

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SchemaError((where.empty() ? std::string("/") : where) + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing required key '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(child(where, key), "unknown key");
  }
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw SchemaError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Matrix matrix_from_json(const json& j, const std::string& where, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) fail(where, "expected an array of rows, got " + std::string(j.type_name()));
  const auto r = static_cast<Eigen::Index>(j.size());
  if (rows >= 0 && r != rows) {
    fail(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
  }
  Eigen::Index c = cols;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j[i];
    const std::string at = child(where, i);
    if (!row.is_array()) fail(at, "expected a row array, got " + std::string(row.type_name()));
    const auto len = static_cast<Eigen::Index>(row.size());
    if (c < 0) c = len;
    if (len != c) fail(at, "expected " + std::to_string(c) + " columns, got " + std::to_string(len));
  }
  Matrix M(r, c < 0 ? 0 : c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < M.cols(); ++k) {
      M(i, k) = number(row[static_cast<std::size_t>(k)], child(child(where, static_cast<std::size_t>(i)),
                                                               static_cast<std::size_t>(k)));
    }
  }
  return M;
}

ordered_json matrix_to_json(const Matrix& M) {
  auto rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    auto row = ordered_json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Metadata metadata_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  reject_unknown_keys(j, {"name", "description"}, where);
  Metadata meta;
  for (const char* key : {"name", "description"}) {
    if (const auto f = j.find(key); f != j.end()) {
      if (!f->is_string()) fail(child(where, key), "expected a string");
      (std::string(key) == "name" ? meta.name : meta.description) = f->get<std::string>();
    }
  }
  return meta;
}

SystemDocument system_from_json(const json& doc) {
  if (!doc.is_object()) fail("", "expected a JSON object");
  reject_unknown_keys(doc, {"n", "delays", "E", "A", "B", "C", "metadata"}, "");

  const json& jn = require(doc, "n", "");
  if (!jn.is_number_integer() || jn.get<long long>() < 1) fail("/n", "expected a positive integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long long>());

  const json& jd = require(doc, "delays", "");
  if (!jd.is_array()) fail("/delays", "expected an array");
  Delays tau;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    const double t = number(jd[i], child("/delays", i));
    if (!(t > 0.0) || !std::isfinite(t)) fail(child("/delays", i), "delays must be positive and finite");
    tau.push_back(t);
  }

  const Matrix E = matrix_from_json(require(doc, "E", ""), "/E", n, n);

  const json& ja = require(doc, "A", "");
  if (!ja.is_array()) fail("/A", "expected an array of matrices");
  if (ja.size() != tau.size() + 1) {
    fail("/A", "expected " + std::to_string(tau.size() + 1) + " matrices (one per delay plus A_0), got " +
                   std::to_string(ja.size()));
  }
  std::vector<Matrix> A;
  for (std::size_t i = 0; i < ja.size(); ++i) A.push_back(matrix_from_json(ja[i], child("/A", i), n, n));

  const Matrix B = matrix_from_json(require(doc, "B", ""), "/B", n);
  const Matrix C = matrix_from_json(require(doc, "C", ""), "/C", -1, n);

  SystemDocument out{canonicalize(E, std::move(A), B, C, std::move(tau)), {}};
  if (const auto it = doc.find("metadata"); it != doc.end()) out.metadata = metadata_from_json(*it, "/metadata");
  return out;
}

SystemDocument read_system_file(const std::filesystem::path& path) {
  const std::string source = path.string();
  try {
    return system_from_json(parse_json_text(read_text_file(path), source));
  } catch (const SchemaError& e) {
    if (std::string(e.what()).rfind(source + ":", 0) == 0) throw;
    throw SchemaError(source + ": " + e.what());
  } catch (const DimensionError& e) {
    throw SchemaError(source + ": " + e.what());
  }
}

ordered_json system_to_json(const SystemDocument& doc) {
  const DdaeSystem& sys = doc.system;
  ordered_json j;
  j["n"] = sys.n();
  j["delays"] = sys.delays();
  j["E"] = matrix_to_json(sys.E());
  auto A = ordered_json::array();
  for (const Matrix& Ai : sys.A()) A.push_back(matrix_to_json(Ai));
  j["A"] = std::move(A);
  j["B"] = matrix_to_json(sys.B());
  j["C"] = matrix_to_json(sys.C());
  if (!doc.metadata.empty()) {
    ordered_json meta = ordered_json::object();
    if (!doc.metadata.name.empty()) meta["name"] = doc.metadata.name;
    if (!doc.metadata.description.empty()) meta["description"] = doc.metadata.description;
    j["metadata"] = std::move(meta);
  }
  return j;
}

namespace {

std::string list_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + json(v[k]).dump();
  return s + "]";
}

std::string row_text(const Matrix& M, Eigen::Index i) {
  std::vector<double> row(static_cast<std::size_t>(M.cols()));
  for (Eigen::Index k = 0; k < M.cols(); ++k) row[static_cast<std::size_t>(k)] = M(i, k);
  return list_text(row);
}

// One matrix row per line; `indent` is the indentation of the opening bracket.
std::string matrix_text(const Matrix& M, const std::string& indent) {
  if (M.rows() == 0) return "[]";
  std::string s = "[\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    s += indent + "  " + row_text(M, i) + (i + 1 < M.rows() ? ",\n" : "\n");
  }
  return s + indent + "]";
}

}  // namespace

std::string dump_system(const SystemDocument& doc) {
  const DdaeSystem& sys = doc.system;
  std::string s = "{\n";
  s += "  \"n\": " + std::to_string(sys.n()) + ",\n";
  s += "  \"delays\": " + list_text(sys.delays()) + ",\n";
  s += "  \"E\": " + matrix_text(sys.E(), "  ") + ",\n";
  s += "  \"A\": [\n";
  for (std::size_t i = 0; i < sys.A().size(); ++i) {
    s += "    " + matrix_text(sys.A()[i], "    ") + (i + 1 < sys.A().size() ? ",\n" : "\n");
  }
  s += "  ],\n";
  s += "  \"B\": " + matrix_text(sys.B(), "  ") + ",\n";
  s += "  \"C\": " + matrix_text(sys.C(), "  ");
  if (!doc.metadata.empty()) {
    std::string meta;
    if (!doc.metadata.name.empty()) meta += "\"name\": " + json(doc.metadata.name).dump();
    if (!doc.metadata.description.empty()) {
      meta += (meta.empty() ? "" : ", ") + std::string("\"description\": ") + json(doc.metadata.description).dump();
    }
    s += ",\n  \"metadata\": {" + meta + "}";
  }
  return s + "\n}\n";
}

}  // namespace ddae::cli
