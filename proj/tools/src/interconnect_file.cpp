#include "ddae_cli/interconnect_file.hpp"

#include <cmath>
#include <optional>

#include "ddae/interconnect.hpp"

namespace ddae::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw SchemaError(where + ": " + what); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing required key '" + key + "'");
  return *it;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(where + "/" + key, "unknown key");
  }
}

double real(const json& obj, const std::string& key, const std::string& where) {
  const json& j = require(obj, key, where);
  if (!j.is_number() || !std::isfinite(j.get<double>())) fail(where + "/" + key, "expected a finite number");
  return j.get<double>();
}

Matrix mat(const json& obj, const std::string& key, const std::string& where) {
  return matrix_from_json(require(obj, key, where), where + "/" + key);
}

PlantBlock read_plant(const json& j) {
  const std::string w = "/plant";
  if (!j.is_object()) fail(w, "expected an object");
  reject_unknown_keys(j, {"A", "B1", "B2", "C", "D1", "F"}, w);
  PlantBlock p{mat(j, "A", w), mat(j, "B1", w), mat(j, "B2", w), mat(j, "C", w), mat(j, "D1", w), mat(j, "F", w)};
  p.validate();
  return p;
}

StaticDelayController read_controller(const json& j) {
  const std::string w = "/controller";
  if (!j.is_object()) fail(w, "expected an object");
  reject_unknown_keys(j, {"K", "tau"}, w);
  StaticDelayController c{mat(j, "K", w), real(j, "tau", w)};
  if (c.tau < 0.0) fail(w + "/tau", "controller delay must be >= 0");
  return c;
}

std::vector<DelayedTerm> read_terms(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of {M, tau}");
  std::vector<DelayedTerm> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "/" + std::to_string(i);
    reject_unknown_keys(j[i], {"M", "tau"}, w);
    out.push_back({mat(j[i], "M", w), real(j[i], "tau", w)});
  }
  return out;
}

}  // namespace

SystemDocument build_from_json(const json& doc) {
  if (!doc.is_object()) fail("/", "expected a JSON object");
  reject_unknown_keys(doc, {"plant", "controller", "system", "steps", "metadata"}, "");

  std::optional<PlantBlock> plant;
  std::optional<StaticDelayController> controller;
  std::optional<DdaeSystem> current;
  Metadata meta;

  if (const auto it = doc.find("plant"); it != doc.end()) plant = read_plant(*it);
  if (const auto it = doc.find("controller"); it != doc.end()) controller = read_controller(*it);
  if (const auto it = doc.find("system"); it != doc.end()) {
    try {
      SystemDocument start = system_from_json(*it);
      current = start.system;
      meta = start.metadata;
    } catch (const SchemaError& e) {
      throw SchemaError(std::string("/system") + e.what());
    }
  }
  if (current && plant) fail("/", "give either 'plant' or 'system', not both");
  if (const auto it = doc.find("metadata"); it != doc.end()) meta = metadata_from_json(*it, "/metadata");

  const json steps = doc.contains("steps") ? doc.at("steps") : json::array();
  if (!steps.is_array()) fail("/steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const json& step = steps[i];
    const std::string w = "/steps/" + std::to_string(i);
    const json& jop = require(step, "op", w);
    if (!jop.is_string()) fail(w + "/op", "expected a string");
    const std::string op = jop.get<std::string>();

    auto starts_fresh = [&] {
      if (current) fail(w + "/op", "'" + op + "' starts a new system and must be the first step");
    };
    auto need_current = [&] {
      if (current) return;
      if (!plant) fail(w + "/op", "'" + op + "' needs a plant, a system or an earlier step");
      current = open_loop(*plant);
    };

    if (op == "close_feedback") {
      reject_unknown_keys(step, {"op"}, w);
      starts_fresh();
      if (!plant) fail(w, "close_feedback needs 'plant'");
      if (!controller) fail(w, "close_feedback needs 'controller'");
      current = close_feedback(*plant, *controller);
    } else if (op == "eliminate_feedthrough") {
      reject_unknown_keys(step, {"op", "D2"}, w);
      need_current();
      current = eliminate_feedthrough(*current, mat(step, "D2", w));
    } else if (op == "absorb_io_delay") {
      reject_unknown_keys(step, {"op", "path", "matrix", "tau"}, w);
      need_current();
      const json& jp = require(step, "path", w);
      if (jp != "input" && jp != "output") fail(w + "/path", "expected \"input\" or \"output\"");
      const double tau = real(step, "tau", w);
      if (!(tau > 0.0)) fail(w + "/tau", "delay must be > 0");
      current = absorb_io_delay(*current, jp == "input" ? IoPath::Input : IoPath::Output, mat(step, "matrix", w), tau);
    } else if (op == "from_neutral") {
      reject_unknown_keys(step, {"op", "A0", "neutral", "retarded", "B", "C"}, w);
      starts_fresh();
      if (plant) fail(w, "from_neutral cannot be combined with 'plant'");
      NeutralSystem ns;
      ns.A0 = mat(step, "A0", w);
      if (step.contains("neutral")) ns.neutral = read_terms(step.at("neutral"), w + "/neutral");
      if (step.contains("retarded")) ns.retarded = read_terms(step.at("retarded"), w + "/retarded");
      ns.B = mat(step, "B", w);
      ns.C = mat(step, "C", w);
      current = from_neutral(ns);
    } else {
      fail(w + "/op", "unknown operation '" + op + "'");
    }
  }

  if (!current) {
    if (!plant) fail("/", "nothing to build: give 'plant', 'system' or a from_neutral step");
    current = open_loop(*plant);
  }
  return {*current, meta};
}

SystemDocument build_from_file(const std::filesystem::path& path) {
  const std::string source = path.string();
  try {
    return build_from_json(parse_json_text(read_text_file(path), source));
  } catch (const SchemaError& e) {
    if (std::string(e.what()).rfind(source + ":", 0) == 0) throw;
    throw SchemaError(source + ": " + e.what());
  } catch (const DimensionError& e) {
    throw SchemaError(source + ": " + e.what());
  }
}

}  // namespace ddae::cli
