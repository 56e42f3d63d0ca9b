#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace layoutlab {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator*(const Vec3& a, double s) {
    return {a.x * s, a.y * s, a.z * s};
  }
};

enum class NodeType { kObject, kContainer };

std::string_view node_type_name(NodeType t);

struct Node {
  std::int64_t id = 0;
  NodeType node_type = NodeType::kObject;
  Vec3 center_location;   // meters
  Vec3 dimension;         // meters, each component > 0
  Vec3 rotation;          // degrees (roll, pitch, yaw), each in [-180, 180]
  std::optional<std::string> caption;
  // Unknown input fields, preserved verbatim so round-trips keep them.
  std::map<std::string, nlohmann::json> extras;

  friend bool operator==(const Node& a, const Node& b) {
    return a.id == b.id && a.node_type == b.node_type &&
           a.center_location == b.center_location &&
           a.dimension == b.dimension && a.rotation == b.rotation &&
           a.caption == b.caption && a.extras == b.extras;
  }
};

enum class Relation { kContact, kContainment };

std::string_view relation_name(Relation r);

struct Edge {
  std::int64_t parent_id = 0;
  std::int64_t child_id = 0;
  Relation relation = Relation::kContact;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.parent_id == b.parent_id && a.child_id == b.child_id &&
           a.relation == b.relation;
  }
};

struct SceneGraph {
  // Keyed by node id; map keeps the canonical ascending order for us.
  std::map<std::int64_t, Node> nodes;
  // Derived by derive_edges(); never serialized, never compared.
  std::vector<Edge> edges;

  friend bool operator==(const SceneGraph& a, const SceneGraph& b) {
    return a.nodes == b.nodes;
  }
};

struct Aabb {
  Vec3 min;
  Vec3 max;
};

/// Canonical decimal rendering: at most 6 decimal places, trailing zeros
/// trimmed, no negative zero. All emitted files (and all generated
/// coordinates) go through this, which is what makes outputs byte-stable.
std::string format_number(double v);

/// Round to the value that format_number round-trips exactly, i.e. the
/// nearest 1e-6 grid point. Generators quantize with this so that
/// parse(serialize(g)) == g holds bit-for-bit.
double canonical_round(double v);

/// Parse scene-graph JSON: a top-level object keyed by decimal integer
/// strings. Unknown per-node fields are kept in Node::extras.
/// Throws ParseError (with byte offset) on malformed JSON and
/// ValidationError on structural problems (duplicate key, missing field,
/// non-positive dimension, out-of-range rotation, ...).
SceneGraph parse_scene_graph(std::string_view text);

/// Parse arbitrary JSON, rejecting duplicate object keys at any nesting
/// level (json::parse would silently keep the last one). Throws ParseError
/// with a byte offset on syntax errors, ValidationError on duplicates.
nlohmann::json parse_json_strict(std::string_view text);

/// Graph/node construction from already-parsed JSON, for graphs embedded
/// in larger documents. Same validation as parse_scene_graph.
SceneGraph scene_graph_from_json(const nlohmann::json& root);
Node node_from_json(std::int64_t id, const nlohmann::json& record);

/// One node's canonical field block, `"node_type":...` through the sorted
/// extras, without braces or id. Shared by every writer that embeds nodes.
std::string serialize_node_fields(const Node& n);

/// Canonical serialization: keys ascending numerically; per node the field
/// order is node_type, center_location, dimension, rotation, caption,
/// then extras in lexicographic order; compact separators; numbers via
/// format_number. parse(serialize(g)) == g for every valid graph.
std::string serialize_scene_graph(const SceneGraph& g);

/// Axis-aligned box spanned by `dimension` around `center_location`.
/// Rotation deliberately does not change the extent; it is metadata.
Aabb world_aabb(const Node& n);

double aabb_volume(const Aabb& box);

/// Volume of the intersection of two boxes; 0 when they are disjoint.
double intersection_volume(const Aabb& a, const Aabb& b);

struct EdgeParams {
  // Fraction of the child's volume that must lie inside a container.
  double containment_fraction = 0.95;
  // Max |top(parent) - bottom(child)| for a resting contact, meters.
  double contact_gap = 0.01;
};

/// Recompute relation edges from geometry. Contact parent→child when the
/// child sits on the parent's top face (xy overlap, vertical gap within
/// tolerance); containment parent→child when the parent is a container
/// holding at least `containment_fraction` of the child's volume.
SceneGraph derive_edges(const SceneGraph& g, const EdgeParams& params = {});

}  // namespace layoutlab
