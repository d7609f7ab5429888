#include "ggk/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ggk/version.hpp"

namespace ggk {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) raise(ErrorCode::ParseError, "input is not valid JSON");
  return j;
}

// ids may be strings or integers; normalize to the string form used for names
std::string id_string(const json& v, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  raise(ErrorCode::ParseError, std::string(what) + " must be a string or integer");
}

Rat rat_value(const json& v, const char* what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(BigInt(v.get<long long>()));
  if (v.is_number_float()) return rat_from_double(v.get<double>());
  raise(ErrorCode::ParseError, std::string(what) + " must be a number or \"p/q\" string");
}

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) raise(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
  return *it;
}

GroupoidPtr parse_explicit(const json& j) {
  std::vector<std::string> unit_names;
  std::vector<Rat> weights;
  for (const auto& u : need(j, "units")) {
    unit_names.push_back(id_string(need(u, "id"), "unit id"));
    weights.push_back(rat_value(need(u, "weight"), "unit weight"));
  }
  std::vector<ExplicitArrow> arrows;
  for (const auto& a : need(j, "arrows")) {
    arrows.push_back({id_string(need(a, "id"), "arrow id"),
                      id_string(need(a, "src"), "arrow src"),
                      id_string(need(a, "tgt"), "arrow tgt"),
                      id_string(need(a, "inv"), "arrow inv")});
  }
  std::vector<std::array<std::string, 3>> compose;
  for (const auto& t : need(j, "compose")) {
    if (!t.is_array() || t.size() != 3) {
      raise(ErrorCode::ParseError, "compose entries must be [g, h, gh] triples");
    }
    compose.push_back({id_string(t[0], "compose id"), id_string(t[1], "compose id"),
                       id_string(t[2], "compose id")});
  }
  return build_from_parts(unit_names, weights, arrows, compose);
}

GroupoidPtr parse_concrete(const json& j);

GroupoidPtr parse_pair(const json& j) {
  if (j.contains("n")) return pair_full(need(j, "n").get<int>());
  std::vector<PairClass> classes;
  for (const auto& c : need(j, "classes")) {
    PairClass pc;
    for (const auto& u : need(c, "units")) pc.units.push_back(id_string(u, "unit id"));
    pc.member_weight = rat_value(need(c, "weight"), "class weight");
    classes.push_back(std::move(pc));
  }
  return build_pair_groupoid(classes);
}

GroupoidPtr parse_group(const json& j) {
  Rat weight(1);
  if (j.contains("weight")) weight = rat_value(j["weight"], "unit weight");
  std::string unit_name = "e";
  if (j.contains("unit")) unit_name = id_string(j["unit"], "unit name");
  if (j.contains("preset")) {
    const std::string preset = need(j, "preset").get<std::string>();
    if (preset.rfind("Z_", 0) == 0) {
      int n = 0;
      try {
        n = std::stoi(preset.substr(2));
      } catch (...) {
        raise(ErrorCode::ParseError, "bad cyclic preset \"" + preset + "\"");
      }
      return build_group_groupoid(GroupTable::cyclic(n), unit_name, weight);
    }
    if (preset.rfind("D_", 0) == 0) {
      int n = 0;
      try {
        n = std::stoi(preset.substr(2));
      } catch (...) {
        raise(ErrorCode::ParseError, "bad dihedral preset \"" + preset + "\"");
      }
      return build_group_groupoid(GroupTable::dihedral(n), unit_name, weight);
    }
    raise(ErrorCode::ParseError, "unknown group preset \"" + preset + "\"");
  }
  std::vector<std::vector<int>> mul;
  for (const auto& row : need(j, "table")) {
    mul.emplace_back();
    for (const auto& v : row) mul.back().push_back(v.get<int>());
  }
  return build_group_groupoid(GroupTable::from_mul(mul), unit_name, weight);
}

GroupoidPtr parse_product(const json& j) {
  const auto& parts = need(j, "parts");
  if (!parts.is_array() || parts.size() != 2) {
    raise(ErrorCode::ParseError, "product takes exactly two parts");
  }
  return product_groupoid(parse_concrete(parts[0]), parse_concrete(parts[1]));
}

GroupoidPtr parse_union(const json& j) {
  std::vector<GroupoidPtr> parts;
  for (const auto& p : need(j, "parts")) parts.push_back(parse_concrete(p));
  if (parts.empty()) raise(ErrorCode::EmptyUnion, "union needs at least one part");
  std::vector<Rat> scales;
  if (j.contains("scales")) {
    for (const auto& s : j["scales"]) scales.push_back(rat_value(s, "scale"));
    if (scales.size() != parts.size()) {
      raise(ErrorCode::ParseError, "need one scale per union part");
    }
  } else {
    scales.assign(parts.size(), Rat(1, static_cast<long>(parts.size())));
  }
  return disjoint_union(parts, scales);
}

GroupoidPtr parse_restrict(const json& j) {
  GroupoidPtr parent = parse_concrete(need(j, "parent"));
  std::vector<UnitId> ids;
  for (const auto& u : need(j, "set")) {
    const std::string name = id_string(u, "unit id");
    auto idx = parent->unit_index(name);
    if (!idx) raise(ErrorCode::ParseError, "restriction set names unknown unit \"" + name + "\"");
    ids.push_back(*idx);
  }
  return restrict_groupoid(parent, make_unit_set(std::move(ids)));
}

GroupoidPtr parse_concrete(const json& j) {
  if (!j.is_object()) raise(ErrorCode::ParseError, "groupoid spec must be a JSON object");
  if (!j.contains("type")) return parse_explicit(j);
  const std::string type = j["type"].get<std::string>();
  if (type == "pair") return parse_pair(j);
  if (type == "group") {
    if (j.contains("preset") && j["preset"].is_string() &&
        j["preset"].get<std::string>() == "free_ball") {
      raise(ErrorCode::ParseError, "free_ball is only allowed at top level");
    }
    return parse_group(j);
  }
  if (type == "product") return parse_product(j);
  if (type == "union") return parse_union(j);
  if (type == "restrict") return parse_restrict(j);
  raise(ErrorCode::ParseError, "unknown groupoid type \"" + type + "\"");
}

} // namespace

GroupoidSpec parse_groupoid_spec(const std::string& text, bool check) {
  json j = parse_json(text);
  if (j.is_object() && j.contains("type") && j["type"] == "group" && j.contains("preset") &&
      j["preset"].is_string() && j["preset"].get<std::string>() == "free_ball") {
    FreeBallParams p;
    p.rank = j.contains("gens") ? j["gens"].get<int>() : 2;
    p.radius = j.contains("radius") ? j["radius"].get<int>() : 3;
    return p;
  }
  GroupoidPtr g = parse_concrete(j);
  if (check) {
    // Mass other than 1 is a property, not a defect: norms are defined for any
    // invariant measure, and the subcommands that do need a probability space
    // check for one themselves. Everything else validate() flags is fatal.
    for (const auto& d : validate(*g)) {
      if (d.code == "measure.not_probability") continue;
      raise(ErrorCode::BadParameters, "groupoid fails validation: " + d.code + ": " + d.message);
    }
  }
  return g;
}

GroupoidSpec load_groupoid_spec(const std::string& path, bool check) {
  return parse_groupoid_spec(read_text_file(path), check);
}

Kernel<Rat> parse_kernel_spec(const GroupoidPtr& g, const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) raise(ErrorCode::ParseError, "kernel spec must be a JSON object");
  const std::string type = need(j, "type").get<std::string>();
  if (type == "uniform") return uniform_field<Rat>(g);
  if (type == "matrix") {
    std::vector<std::vector<Rat>> data;
    for (const auto& row : need(j, "data")) {
      data.emplace_back();
      for (const auto& v : row) data.back().push_back(rat_value(v, "matrix entry"));
    }
    MatrixOrientation o = MatrixOrientation::Auto;
    if (j.contains("orientation")) {
      const std::string s = j["orientation"].get<std::string>();
      if (s == "as-is") {
        o = MatrixOrientation::AsIs;
      } else if (s == "transpose") {
        o = MatrixOrientation::Transpose;
      } else if (s != "auto") {
        raise(ErrorCode::ParseError, "orientation must be auto, as-is, or transpose");
      }
    }
    return field_from_matrix(g, data, o).kernel;
  }
  if (type == "bisections") {
    BisectionMeasure m;
    for (const auto& item : need(j, "items")) {
      Bisection b;
      for (const auto& a : need(item, "arrows")) b.push_back(a.get<ArrowId>());
      m.atoms.emplace_back(std::move(b), rat_value(need(item, "weight"), "bisection weight"));
    }
    return field_from_bisections<Rat>(g, m);
  }
  if (type == "explicit") {
    std::vector<std::pair<ArrowId, Rat>> entries;
    for (const auto& [key, v] : need(j, "values").items()) {
      ArrowId id = 0;
      try {
        id = static_cast<ArrowId>(std::stoul(key));
      } catch (...) {
        raise(ErrorCode::ParseError, "kernel value keys must be arrow ids");
      }
      entries.emplace_back(id, rat_value(v, "kernel value"));
    }
    return Kernel<Rat>(g, SparseArrowMap<Rat>::from_unsorted(std::move(entries)));
  }
  raise(ErrorCode::ParseError, "unknown kernel type \"" + type + "\"");
}

Kernel<Rat> load_kernel_spec(const GroupoidPtr& g, const std::string& path) {
  return parse_kernel_spec(g, read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::ParseError, "cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string manifest_line(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  j["params"] = params;
  j["inputs"] = m.inputs;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["rng"] = kRngAlgorithm;
  j["precision"] = m.precision;
  return "#" + j.dump();
}

std::string error_json(const Error& e) {
  ordered_json j;
  j["error"] = error_code_name(e.code());
  j["message"] = e.what();
  return j.dump();
}

} // namespace ggk
