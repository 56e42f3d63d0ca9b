#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "layoutlab/rewards.hpp"
#include "layoutlab/rng.hpp"
#include "layoutlab/scene_graph.hpp"

using namespace layoutlab;

namespace {

SceneGraph two_object_graph() {
  SceneGraph g;
  Node table;
  table.id = 0;
  table.node_type = NodeType::kContainer;
  table.center_location = {0, 0, 0.36};
  table.dimension = {1.2, 0.8, 0.72};
  table.caption = "table";
  g.nodes.emplace(0, table);
  Node mug;
  mug.id = 1;
  mug.center_location = {0.2, 0.1, 0.77};
  mug.dimension = {0.08, 0.08, 0.1};
  mug.caption = "mug";
  g.nodes.emplace(1, mug);
  Node plate;
  plate.id = 2;
  plate.center_location = {-0.2, -0.1, 0.73};
  plate.dimension = {0.2, 0.2, 0.02};
  plate.caption = "plate";
  g.nodes.emplace(2, plate);
  return g;
}

std::string fenced(const SceneGraph& g) {
  return "```json\n" + serialize_scene_graph(g) + "\n```\n";
}

}  // namespace

TEST_CASE("canonical trace earns full format credit") {
  const SceneGraph gt = two_object_graph();
  const std::string text = make_canonical_trace(gt);
  const TraceDocument doc = parse_trace(text);

  CHECK(doc.open_tag_present);
  CHECK(doc.close_tag_present);
  CHECK(doc.tags_well_nested);
  CHECK(doc.defects.empty());
  REQUIRE(doc.think_json_blocks.size() == 1);
  CHECK(doc.think_json_blocks[0].value.has_value());
  REQUIRE(doc.answer_graph.has_value());
  CHECK(serialize_scene_graph(*doc.answer_graph) == serialize_scene_graph(gt));
  CHECK(format_score(doc) == 1.0);

  const RewardReport r = composite_reward(doc, gt);
  CHECK(r.iou == 1.0);
  CHECK(r.coll == 1.0);
  CHECK(r.fmt == 1.0);
  CHECK(r.composite == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("bare fenced answer without think tags scores 0.3 format") {
  const SceneGraph gt = two_object_graph();
  const std::string text = "Here you go.\n" + fenced(gt);
  const TraceDocument doc = parse_trace(text);

  CHECK_FALSE(doc.open_tag_present);
  CHECK(doc.has_defect(Defect::kMissingOpenTag));
  CHECK(doc.has_defect(Defect::kNoThinkJson));
  REQUIRE(doc.answer_graph.has_value());
  CHECK(format_score(doc) == doctest::Approx(0.3).epsilon(1e-12));

  const RewardReport r = composite_reward(doc, gt);
  CHECK(r.iou == 1.0);
  CHECK(r.composite == doctest::Approx(1.0 + 0.2 + 0.2 * 0.3).epsilon(1e-12));
}

TEST_CASE("empty and garbage inputs score zero without throwing") {
  const SceneGraph gt = two_object_graph();
  for (const std::string text :
       {std::string{}, std::string{"hello world"},
        std::string{"{\"0\": 1}"}, std::string{"``json\nnot a fence\n``"}}) {
    const TraceDocument doc = parse_trace(text);
    CHECK(format_score(doc) == 0.0);
    const RewardReport r = composite_reward(doc, gt);
    CHECK(r.iou == 0.0);
    CHECK(r.coll == 0.0);
    CHECK(r.composite == 0.0);
  }
}

TEST_CASE("partial credit ladders") {
  const SceneGraph gt = two_object_graph();

  SUBCASE("tags ok, think json broken, answer ok -> 0.8") {
    const std::string text = "<think>\n```json\n{not json]\n```\n</think>\n" +
                             fenced(gt);
    const TraceDocument doc = parse_trace(text);
    CHECK(doc.has_defect(Defect::kInvalidThinkJson));
    CHECK(format_score(doc) == doctest::Approx(0.8).epsilon(1e-12));
  }

  SUBCASE("tags ok, no think block, broken answer block -> 0.5") {
    const std::string text =
        "<think>\nreasoning prose only\n</think>\n```json\n{\"0\":}\n```\n";
    const TraceDocument doc = parse_trace(text);
    CHECK(doc.has_defect(Defect::kNoThinkJson));
    CHECK(doc.has_defect(Defect::kInvalidAnswerJson));
    CHECK(doc.answer_block_present);
    CHECK_FALSE(doc.answer_graph.has_value());
    CHECK(format_score(doc) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("unclosed think swallows the rest -> 0.2") {
    const std::string text = "<think>\nstill thinking\n" + fenced(gt);
    const TraceDocument doc = parse_trace(text);
    CHECK(doc.open_tag_present);
    CHECK_FALSE(doc.tags_well_nested);
    CHECK(doc.has_defect(Defect::kMissingCloseTag));
    CHECK(doc.has_defect(Defect::kNoAnswerJson));
    CHECK_FALSE(doc.answer_graph.has_value());
    CHECK(format_score(doc) == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("structurally invalid answer graph gets partial answer credit") {
    SceneGraph bad = gt;
    bad.nodes.at(1).dimension = {0, 0.08, 0.1};
    const std::string text =
        "<think>\n```json\n{\"steps\": 2}\n```\n</think>\n" + fenced(bad);
    const TraceDocument doc = parse_trace(text);
    CHECK(doc.has_defect(Defect::kInvalidAnswerJson));
    CHECK(doc.answer_block_present);
    CHECK(format_score(doc) == doctest::Approx(0.8).epsilon(1e-12));

    // Geometry terms collapse but the format term survives.
    const RewardReport r = composite_reward(doc, gt);
    CHECK(r.iou == 0.0);
    CHECK(r.coll == 0.0);
    CHECK(r.composite == doctest::Approx(0.2 * 0.8).epsilon(1e-12));
  }
}

TEST_CASE("trailing prose after the answer is flagged but not double-charged") {
  const SceneGraph gt = two_object_graph();
  const std::string text = make_canonical_trace(gt) + "Hope that helps!\n";
  const TraceDocument doc = parse_trace(text);
  CHECK(doc.has_defect(Defect::kExtraTextAfterAnswer));
  REQUIRE(doc.answer_graph.has_value());
  CHECK(format_score(doc) == 1.0);  // additive rubric, no deduction
}

TEST_CASE("the last fenced block after </think> is the answer") {
  const SceneGraph gt = two_object_graph();
  SceneGraph other = gt;
  other.nodes.at(1).center_location = {0.4, 0.2, 0.77};
  const std::string text = "<think>\n```json\n{}\n```\n</think>\n" +
                           fenced(other) + "Correction:\n" + fenced(gt);
  const TraceDocument doc = parse_trace(text);
  REQUIRE(doc.answer_graph.has_value());
  CHECK(serialize_scene_graph(*doc.answer_graph) == serialize_scene_graph(gt));
  const RewardReport r = composite_reward(doc, gt);
  CHECK(r.iou == 1.0);
}

TEST_CASE("collision term reflects the predicted graph, not the target") {
  const SceneGraph gt = two_object_graph();
  SceneGraph colliding = gt;
  colliding.nodes.at(2).center_location = colliding.nodes.at(1).center_location;
  const RewardReport r = composite_reward(make_canonical_trace(colliding), gt);
  // One colliding pair out of two objects: 1 - 1/2.
  CHECK(r.coll == 0.5);
  CHECK(r.fmt == 1.0);
  CHECK(r.composite == doctest::Approx(r.iou + 0.2 * 0.5 + 0.2).epsilon(1e-12));
  CHECK(r.iou < 1.0);
}

TEST_CASE("parse_trace never throws on arbitrary byte soup") {
  Pcg32 rng(20240814, 99);
  const std::vector<std::string> fragments = {
      "<think>", "</think>", "```json", "```", "{", "}", "\"0\":", "\n",
      "null", "[1,2", "<think", "think>", "\r\n", "\xff\xfe", "\0\0",
  };
  for (int trial = 0; trial < 20000; ++trial) {
    std::string text;
    const int parts = static_cast<int>(rng.next_below(9));
    for (int p = 0; p < parts; ++p) {
      if (rng.next_below(2) == 0) {
        text += fragments[rng.next_below(fragments.size())];
      } else {
        const int len = static_cast<int>(rng.next_below(12));
        for (int k = 0; k < len; ++k) {
          text += static_cast<char>(rng.next_below(256));
        }
      }
    }
    CHECK_NOTHROW((void)parse_trace(text));
  }
}
