#include "layoutlab/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "layoutlab/errors.hpp"

namespace layoutlab {

namespace {

using nlohmann::json;

constexpr const char* kFieldNodeType = "node_type";
constexpr const char* kFieldCenter = "center_location";
constexpr const char* kFieldDimension = "dimension";
constexpr const char* kFieldRotation = "rotation";
constexpr const char* kFieldCaption = "caption";

[[noreturn]] void fail_node(const std::string& id, const char* field,
                            const std::string& why) {
  throw ValidationError("node " + id + ": field '" + field + "' " + why);
}

bool is_canonical_id(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (c < '0' || c > '9') return false;
  }
  // No leading zeros except the id "0" itself.
  return key.size() == 1 || key[0] != '0';
}

Vec3 parse_vec3(const json& j, const std::string& id, const char* field,
                bool require_positive) {
  if (!j.is_array() || j.size() != 3) {
    fail_node(id, field, "must be an array of 3 numbers");
  }
  double c[3];
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      fail_node(id, field, "must be an array of 3 numbers");
    }
    c[i] = j[i].get<double>();
    if (!std::isfinite(c[i])) {
      fail_node(id, field, "components must be finite");
    }
    if (require_positive && c[i] <= 0.0) {
      fail_node(id, field, "components must be positive");
    }
  }
  return {c[0], c[1], c[2]};
}

Node parse_node(const std::string& key, const json& record) {
  if (!record.is_object()) {
    throw ValidationError("node " + key + ": value must be a JSON object");
  }
  Node n;
  n.id = std::strtoll(key.c_str(), nullptr, 10);
  bool has_type = false;
  bool has_center = false;
  bool has_dim = false;
  bool has_rot = false;
  for (const auto& [field, value] : record.items()) {
    if (field == kFieldNodeType) {
      if (!value.is_string()) fail_node(key, kFieldNodeType, "must be a string");
      const std::string t = value.get<std::string>();
      if (t == "object") {
        n.node_type = NodeType::kObject;
      } else if (t == "container") {
        n.node_type = NodeType::kContainer;
      } else {
        fail_node(key, kFieldNodeType, "must be 'object' or 'container'");
      }
      has_type = true;
    } else if (field == kFieldCenter) {
      n.center_location = parse_vec3(value, key, kFieldCenter, false);
      has_center = true;
    } else if (field == kFieldDimension) {
      n.dimension = parse_vec3(value, key, kFieldDimension, true);
      has_dim = true;
    } else if (field == kFieldRotation) {
      n.rotation = parse_vec3(value, key, kFieldRotation, false);
      for (double r : {n.rotation.x, n.rotation.y, n.rotation.z}) {
        if (r < -180.0 || r > 180.0) {
          fail_node(key, kFieldRotation, "components must be in [-180, 180]");
        }
      }
      has_rot = true;
    } else if (field == kFieldCaption) {
      if (!value.is_string()) fail_node(key, kFieldCaption, "must be a string");
      n.caption = value.get<std::string>();
    } else {
      n.extras.emplace(field, value);
    }
  }
  if (!has_type) fail_node(key, kFieldNodeType, "is required");
  if (!has_center) fail_node(key, kFieldCenter, "is required");
  if (!has_dim) fail_node(key, kFieldDimension, "is required");
  if (!has_rot) fail_node(key, kFieldRotation, "is required");
  return n;
}

void append_escaped_string(std::string& out, const std::string& s) {
  out += json(s).dump();
}

void append_vec3(std::string& out, const Vec3& v) {
  out += '[';
  out += format_number(v.x);
  out += ',';
  out += format_number(v.y);
  out += ',';
  out += format_number(v.z);
  out += ']';
}

}  // namespace

std::string_view node_type_name(NodeType t) {
  return t == NodeType::kContainer ? "container" : "object";
}

std::string_view relation_name(Relation r) {
  return r == Relation::kContainment ? "containment" : "contact";
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also catches -0.0
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  const auto dot = s.find('.');
  auto last = s.find_last_not_of('0');
  if (last == dot) --last;  // value is integral; drop the dot too
  s.erase(last + 1);
  if (s == "-0") s = "0";
  return s;
}

double canonical_round(double v) {
  return std::strtod(format_number(v).c_str(), nullptr);
}

namespace {

struct DuplicateKey {
  std::string key;
  int depth = 0;
};

/// Syntax + duplicate-key detection in one pass. json::parse collapses
/// repeated keys silently, so a SAX callback tracks the key set of every
/// open object and records the first repeat.
json parse_checked(std::string_view text, DuplicateKey& dup) {
  std::vector<std::set<std::string>> open_objects;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event,
                                   json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        open_objects.emplace_back();
        break;
      case json::parse_event_t::object_end:
        open_objects.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string key = parsed.get<std::string>();
        if (!open_objects.empty() && !open_objects.back().insert(key).second &&
            dup.key.empty()) {
          dup.key = key;
          dup.depth = depth;
        }
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::parse_error& e) {
    // nlohmann reports 1-based byte positions; keep that convention.
    throw ParseError(e.what(), e.byte);
  }
}

}  // namespace

nlohmann::json parse_json_strict(std::string_view text) {
  DuplicateKey dup;
  json root = parse_checked(text, dup);
  if (!dup.key.empty()) {
    throw ValidationError("duplicate key '" + dup.key + "'");
  }
  return root;
}

SceneGraph parse_scene_graph(std::string_view text) {
  DuplicateKey dup;
  json root = parse_checked(text, dup);
  if (!dup.key.empty()) {
    if (dup.depth == 1) {
      throw ValidationError("node " + dup.key + ": duplicate key");
    }
    throw ValidationError("duplicate key '" + dup.key + "'");
  }
  return scene_graph_from_json(root);
}

SceneGraph scene_graph_from_json(const nlohmann::json& root) {
  if (!root.is_object()) {
    throw ValidationError("top-level value must be a JSON object");
  }
  SceneGraph g;
  for (const auto& [key, record] : root.items()) {
    if (!is_canonical_id(key)) {
      throw ValidationError("node " + key +
                            ": key must be a non-negative decimal integer");
    }
    Node n = parse_node(key, record);
    if (!g.nodes.emplace(n.id, std::move(n)).second) {
      throw ValidationError("node " + key + ": duplicate key");
    }
  }
  return g;
}

Node node_from_json(std::int64_t id, const nlohmann::json& record) {
  return parse_node(std::to_string(id), record);
}

std::string serialize_node_fields(const Node& n) {
  std::string out;
  out += "\"node_type\":\"";
  out += node_type_name(n.node_type);
  out += "\",\"center_location\":";
  append_vec3(out, n.center_location);
  out += ",\"dimension\":";
  append_vec3(out, n.dimension);
  out += ",\"rotation\":";
  append_vec3(out, n.rotation);
  if (n.caption) {
    out += ",\"caption\":";
    append_escaped_string(out, *n.caption);
  }
  for (const auto& [field, value] : n.extras) {
    out += ',';
    append_escaped_string(out, field);
    out += ':';
    out += value.dump();
  }
  return out;
}

std::string serialize_scene_graph(const SceneGraph& g) {
  std::string out;
  out += '{';
  bool first_node = true;
  for (const auto& [id, n] : g.nodes) {
    if (!first_node) out += ',';
    first_node = false;
    out += '"';
    out += std::to_string(id);
    out += "\":{";
    out += serialize_node_fields(n);
    out += '}';
  }
  out += '}';
  return out;
}

Aabb world_aabb(const Node& n) {
  const Vec3 half = n.dimension * 0.5;
  return {n.center_location - half, n.center_location + half};
}

double aabb_volume(const Aabb& box) {
  return (box.max.x - box.min.x) * (box.max.y - box.min.y) *
         (box.max.z - box.min.z);
}

double intersection_volume(const Aabb& a, const Aabb& b) {
  const double dx =
      std::min(a.max.x, b.max.x) - std::max(a.min.x, b.min.x);
  const double dy =
      std::min(a.max.y, b.max.y) - std::max(a.min.y, b.min.y);
  const double dz =
      std::min(a.max.z, b.max.z) - std::max(a.min.z, b.min.z);
  if (dx <= 0.0 || dy <= 0.0 || dz <= 0.0) return 0.0;
  return dx * dy * dz;
}

SceneGraph derive_edges(const SceneGraph& g, const EdgeParams& params) {
  SceneGraph out = g;
  out.edges.clear();
  for (const auto& [pid, parent] : g.nodes) {
    const Aabb pbox = world_aabb(parent);
    for (const auto& [cid, child] : g.nodes) {
      if (pid == cid) continue;
      const Aabb cbox = world_aabb(child);
      const bool xy_overlap = pbox.min.x < cbox.max.x &&
                              cbox.min.x < pbox.max.x &&
                              pbox.min.y < cbox.max.y &&
                              cbox.min.y < pbox.max.y;
      if (xy_overlap &&
          std::fabs(pbox.max.z - cbox.min.z) <= params.contact_gap) {
        out.edges.push_back({pid, cid, Relation::kContact});
      }
      if (parent.node_type == NodeType::kContainer) {
        const double inside = intersection_volume(pbox, cbox);
        if (inside >= params.containment_fraction * aabb_volume(cbox)) {
          out.edges.push_back({pid, cid, Relation::kContainment});
        }
      }
    }
  }
  return out;
}

}  // namespace layoutlab
