#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutlab/metrics.hpp"
#include "layoutlab/scene_graph.hpp"

namespace layoutlab {

enum class Defect {
  kMissingOpenTag,
  kMissingCloseTag,
  kNoThinkJson,
  kInvalidThinkJson,
  kNoAnswerJson,
  kInvalidAnswerJson,
  kExtraTextAfterAnswer,
};

std::string_view defect_name(Defect d);

/// One fenced ```json block: byte span of its content in the original
/// text, plus the parsed value when parsing succeeded.
struct JsonBlock {
  std::size_t begin = 0;  // first content byte
  std::size_t end = 0;    // one past last content byte
  std::optional<nlohmann::json> value;
  bool terminated = true;  // closing fence found
};

struct TraceDocument {
  bool open_tag_present = false;
  bool close_tag_present = false;
  bool tags_well_nested = false;  // <think> with a </think> after it
  std::optional<std::string> think_section;
  std::vector<JsonBlock> think_json_blocks;
  std::optional<std::string> answer_section;
  bool answer_block_present = false;
  std::optional<SceneGraph> answer_graph;
  std::vector<Defect> defects;

  bool has_defect(Defect d) const;
};

/// Dissect raw model output against the expected shape:
///   <think> ...fenced ```json blocks... </think>
///   optional prose, then a final fenced ```json block holding the graph.
/// Fences count only as whole lines. Never throws; every problem is
/// recorded as a defect. With no <think> tag at all the entire text is
/// treated as the answer segment; an unclosed <think> swallows the rest.
/// When several fenced blocks follow </think>, the last one is the answer.
TraceDocument parse_trace(std::string_view text);

struct FormatRubric {
  double tag_full = 0.4;      // both tags, correct order
  double tag_partial = 0.2;   // some tag present, pattern broken
  double think_full = 0.3;    // >= 1 valid JSON block inside think
  double think_partial = 0.1; // block present but unparsable
  double answer_full = 0.3;   // answer block parses into a valid graph
  double answer_partial = 0.1;
};

/// Additive format rubric, clamped to [0,1]. 1.0 exactly on the canonical
/// pattern, 0.0 when nothing recognizable is present.
double format_score(const TraceDocument& doc, const FormatRubric& rubric = {});

struct RewardParams {
  double lambda1 = 0.2;       // collision weight
  double lambda2 = 0.2;       // format weight
  double collision_eps = 1e-6;  // m^3
  FormatRubric rubric;
};

struct RewardReport {
  double iou = 0.0;
  double coll = 0.0;
  double fmt = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double composite = 0.0;
  Matching matching;
};

/// r = IoU + lambda1 * Coll + lambda2 * Fmt. A missing/unparsable answer
/// graph zeroes the geometric terms instead of raising, so batch scoring
/// is a total function.
RewardReport composite_reward(const TraceDocument& doc, const SceneGraph& gt,
                              const RewardParams& params = {});
RewardReport composite_reward(std::string_view pred_text, const SceneGraph& gt,
                              const RewardParams& params = {});

/// Render a graph in the full-credit trace shape (used by demos and tests).
/// `working` is the intermediate graph shown inside the think section;
/// it defaults to the answer itself.
std::string make_canonical_trace(const SceneGraph& answer,
                                 const SceneGraph* working = nullptr);

}  // namespace layoutlab
