#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "layoutlab/benchgen.hpp"
#include "layoutlab/errors.hpp"
#include "layoutlab/rng.hpp"
#include "layoutlab/scene_graph.hpp"

using namespace layoutlab;

namespace {

Node object_at(std::int64_t id, Vec3 center, Vec3 dim, double yaw,
               const char* caption) {
  Node n;
  n.id = id;
  n.node_type = NodeType::kObject;
  n.center_location = center;
  n.dimension = dim;
  n.rotation = {0.0, 0.0, yaw};
  if (caption) n.caption = caption;
  return n;
}

SceneGraph sample_graph() {
  SceneGraph g;
  Node table = object_at(0, {0.0, 0.0, 0.36}, {1.2, 0.8, 0.72}, 0.0, "table");
  table.node_type = NodeType::kContainer;
  g.nodes.emplace(0, table);
  g.nodes.emplace(
      2, object_at(2, {0.25, -0.1, 0.77}, {0.08, 0.08, 0.1}, 45.0, "red mug"));
  Node crate =
      object_at(10, {-0.3, 0.2, 0.795}, {0.15, 0.1, 0.15}, -30.0, nullptr);
  crate.extras["material"] = "wood";
  crate.extras["weight"] = 2.5;
  g.nodes.emplace(10, crate);
  return g;
}

}  // namespace

TEST_CASE("format_number renders the canonical decimal form") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-7) == "0");    // rounds to the grid, then un-signs
  CHECK(format_number(-1e-7) == "0");   // no "-0"
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(-12.3) == "-12.3");
  CHECK(format_number(0.000001) == "0.000001");
  CHECK(format_number(123.456789) == "123.456789");
  CHECK(format_number(0.08) == "0.08");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(-0.25) == "-0.25");
}

TEST_CASE("canonical_round is the fixpoint of the number format") {
  CHECK(canonical_round(0.1234567) == 0.123457);
  CHECK(canonical_round(1.0000004) == 1.0);
  CHECK(canonical_round(-0.0) == 0.0);

  Pcg32 rng(20240814, 1);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.uniform(-100.0, 100.0);
    const double once = canonical_round(x);
    CHECK(canonical_round(once) == once);          // idempotent
    CHECK(format_number(once) == format_number(x));  // same rendering
  }
}

TEST_CASE("serialization is canonical, frozen, and round-trips") {
  const SceneGraph g = sample_graph();
  const std::string expected =
      "{\"0\":{\"node_type\":\"container\",\"center_location\":[0,0,0.36],"
      "\"dimension\":[1.2,0.8,0.72],\"rotation\":[0,0,0],\"caption\":"
      "\"table\"},\"2\":{\"node_type\":\"object\",\"center_location\":"
      "[0.25,-0.1,0.77],\"dimension\":[0.08,0.08,0.1],\"rotation\":[0,0,45],"
      "\"caption\":\"red mug\"},\"10\":{\"node_type\":\"object\","
      "\"center_location\":[-0.3,0.2,0.795],\"dimension\":[0.15,0.1,0.15],"
      "\"rotation\":[0,0,-30],\"material\":\"wood\",\"weight\":2.5}}";
  const std::string text = serialize_scene_graph(g);
  CHECK(text == expected);

  const SceneGraph back = parse_scene_graph(text);
  CHECK(back == g);
  CHECK(serialize_scene_graph(back) == text);
  CHECK(back.nodes.at(10).extras.at("weight") == 2.5);
  CHECK_FALSE(back.nodes.at(10).caption.has_value());
}

TEST_CASE("node keys serialize in ascending numeric order") {
  SceneGraph g;
  for (std::int64_t id : {3, 11, 0}) {
    g.nodes.emplace(id, object_at(id, {0, 0, 0.5}, {0.1, 0.1, 0.1}, 0, "x"));
  }
  const std::string text = serialize_scene_graph(g);
  const auto p0 = text.find("\"0\":");
  const auto p3 = text.find("\"3\":");
  const auto p11 = text.find("\"11\":");
  REQUIRE(p0 != std::string::npos);
  REQUIRE(p3 != std::string::npos);
  REQUIRE(p11 != std::string::npos);
  CHECK(p0 < p3);
  CHECK(p3 < p11);  // numeric, not lexicographic ("11" < "3" as strings)
}

TEST_CASE("duplicate node keys are rejected") {
  const std::string record =
      "{\"node_type\":\"object\",\"center_location\":[0,0,0],"
      "\"dimension\":[1,1,1],\"rotation\":[0,0,0]}";
  const std::string text = "{\"1\":" + record + ",\"1\":" + record + "}";
  CHECK_THROWS_WITH_AS(parse_scene_graph(text), "node 1: duplicate key",
                       ValidationError);
}

TEST_CASE("duplicate keys are rejected at any nesting depth") {
  const std::string text =
      "{\"0\":{\"node_type\":\"object\",\"center_location\":[0,0,0],"
      "\"dimension\":[1,1,1],\"rotation\":[0,0,0],"
      "\"meta\":{\"a\":1,\"a\":2}}}";
  CHECK_THROWS_WITH_AS(parse_scene_graph(text), "duplicate key 'a'",
                       ValidationError);
}

TEST_CASE("non-canonical node keys are rejected") {
  const std::string record =
      "{\"node_type\":\"object\",\"center_location\":[0,0,0],"
      "\"dimension\":[1,1,1],\"rotation\":[0,0,0]}";
  for (const char* key : {"01", "-1", "1x", "1.5", ""}) {
    const std::string text =
        std::string("{\"") + key + "\":" + record + "}";
    CHECK_THROWS_AS(parse_scene_graph(text), ValidationError);
  }
}

TEST_CASE("structural validation catches bad nodes") {
  auto graph_with = [](const std::string& record) {
    return "{\"0\":" + record + "}";
  };
  // Non-positive dimension.
  CHECK_THROWS_AS(
      parse_scene_graph(graph_with(
          "{\"node_type\":\"object\",\"center_location\":[0,0,0],"
          "\"dimension\":[0,1,1],\"rotation\":[0,0,0]}")),
      ValidationError);
  // Rotation out of [-180, 180].
  CHECK_THROWS_AS(
      parse_scene_graph(graph_with(
          "{\"node_type\":\"object\",\"center_location\":[0,0,0],"
          "\"dimension\":[1,1,1],\"rotation\":[0,0,190]}")),
      ValidationError);
  // Missing required field.
  CHECK_THROWS_AS(
      parse_scene_graph(graph_with(
          "{\"node_type\":\"object\",\"center_location\":[0,0,0],"
          "\"rotation\":[0,0,0]}")),
      ValidationError);
  // Unknown node type.
  CHECK_THROWS_AS(
      parse_scene_graph(graph_with(
          "{\"node_type\":\"blob\",\"center_location\":[0,0,0],"
          "\"dimension\":[1,1,1],\"rotation\":[0,0,0]}")),
      ValidationError);
  // Root must be an object.
  CHECK_THROWS_AS(parse_scene_graph("[1,2,3]"), ValidationError);
  CHECK_THROWS_AS(parse_scene_graph("42"), ValidationError);
}

TEST_CASE("syntax errors carry a byte offset") {
  try {
    parse_scene_graph("{\"0\": }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() > 0);
  }
  CHECK_THROWS_AS(parse_json_strict("{} trailing"), ParseError);
  CHECK_THROWS_AS(parse_json_strict(""), ParseError);
}

TEST_CASE("aabb helpers match closed forms") {
  const Node n = object_at(1, {1, 2, 3}, {2, 4, 6}, 90.0, "box");
  const Aabb box = world_aabb(n);
  CHECK(box.min == Vec3{0, 0, 0});  // rotation does not grow the box
  CHECK(box.max == Vec3{2, 4, 6});
  CHECK(aabb_volume(box) == 48.0);

  const Aabb unit{{0, 0, 0}, {1, 1, 1}};
  const Aabb shifted{{0.5, 0, 0}, {1.5, 1, 1}};
  const Aabb far_away{{5, 5, 5}, {6, 6, 6}};
  CHECK(intersection_volume(unit, shifted) == doctest::Approx(0.5));
  CHECK(intersection_volume(unit, far_away) == 0.0);
  const Aabb inner{{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}};
  CHECK(intersection_volume(unit, inner) == doctest::Approx(0.125));
}

TEST_CASE("derive_edges finds support contacts and containment") {
  SceneGraph g = sample_graph();  // mug bottom rests exactly on the table top
  const SceneGraph with_edges = derive_edges(g);
  bool contact = false;
  bool contains_mug = false;
  for (const Edge& e : with_edges.edges) {
    if (e.parent_id == 0 && e.child_id == 2 &&
        e.relation == Relation::kContact) {
      contact = true;
    }
    if (e.parent_id == 0 && e.child_id == 2 &&
        e.relation == Relation::kContainment) {
      contains_mug = true;
    }
  }
  CHECK(contact);
  CHECK_FALSE(contains_mug);  // the mug sits above the table's box

  // A room-style container that fully encloses a box.
  SceneGraph room;
  Node shell = object_at(0, {0, 0, 1}, {4, 4, 2}, 0, "room");
  shell.node_type = NodeType::kContainer;
  room.nodes.emplace(0, shell);
  room.nodes.emplace(1, object_at(1, {0, 0, 0.25}, {1, 1, 0.5}, 0, "box"));
  bool contained = false;
  for (const Edge& e : derive_edges(room).edges) {
    if (e.parent_id == 0 && e.child_id == 1 &&
        e.relation == Relation::kContainment) {
      contained = true;
    }
  }
  CHECK(contained);
}

TEST_CASE("generated graphs round-trip bit-exactly") {
  std::vector<SceneGraph> graphs;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const TaskInstance s = gen_sorting(31, i);
    const TaskInstance a = gen_alignment(31, i);
    const TaskInstance r = gen_roomedit(31, i);
    graphs.push_back(s.initial_graph);
    graphs.push_back(s.target_graph);
    graphs.push_back(a.initial_graph);
    graphs.push_back(a.target_graph);
    graphs.push_back(r.initial_graph);
    graphs.push_back(r.target_graph);
  }
  for (const SceneGraph& g : graphs) {
    const std::string text = serialize_scene_graph(g);
    const SceneGraph back = parse_scene_graph(text);
    CHECK(back == g);
    CHECK(serialize_scene_graph(back) == text);
  }
}
