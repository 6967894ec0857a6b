#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ddae/errors.hpp"
#include "ddae/system_model.hpp"

namespace ddae::cli {

/// Malformed or schema-violating input document. The message names the
/// offending location as a JSON pointer ("/A/1/0/2") or as line:column for
/// syntax errors.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Missing file, unwritable output and the like.
class IoError : public Error {
 public:
  using Error::Error;
};

struct Metadata {
  std::string name;
  std::string description;

  bool empty() const { return name.empty() && description.empty(); }
};

struct SystemDocument {
  DdaeSystem system;
  Metadata metadata;
};

/// Parses text as JSON; syntax errors become SchemaError with line:column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
std::string read_text_file(const std::filesystem::path& path);
/// Writes text; "-" means stdout.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Validates a SystemFile document and builds the canonical system (delays
/// sorted, duplicates merged). Non-positive delays are schema errors.
SystemDocument system_from_json(const nlohmann::json& doc);
SystemDocument read_system_file(const std::filesystem::path& path);

/// {"name", "description"}, both optional strings.
Metadata metadata_from_json(const nlohmann::json& j, const std::string& where);

/// Canonical key order n, delays, E, A, B, C[, metadata]; numbers in
/// shortest round-trip form.
nlohmann::ordered_json system_to_json(const SystemDocument& doc);
/// Same content as system_to_json, one matrix row per line, trailing newline.
std::string dump_system(const SystemDocument& doc);

/// Matrix helpers shared with the interconnect reader. `where` is the JSON
/// pointer of `j`; rows/cols < 0 means "any".
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where, Eigen::Index rows = -1,
                        Eigen::Index cols = -1);
nlohmann::ordered_json matrix_to_json(const Matrix& M);

}  // namespace ddae::cli
