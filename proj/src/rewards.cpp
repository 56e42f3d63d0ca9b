#include "layoutlab/rewards.hpp"

#include <algorithm>

#include "layoutlab/errors.hpp"
#include "layoutlab/text.hpp"

namespace layoutlab {

namespace {

constexpr std::string_view kOpenTag = "<think>";
constexpr std::string_view kCloseTag = "</think>";
constexpr std::string_view kOpenFence = "```json";
constexpr std::string_view kCloseFence = "```";

std::string_view rstrip(std::string_view s) {
  while (!s.empty()) {
    const char c = s.back();
    if (c == ' ' || c == '\t' || c == '\r') {
      s.remove_suffix(1);
    } else {
      break;
    }
  }
  return s;
}

/// Scan `text[begin, end)` for fenced json blocks. Fences are whole lines:
/// a line reading exactly "```json" opens, one reading exactly "```"
/// closes. Offsets in the result are absolute within `text`.
std::vector<JsonBlock> scan_fenced_blocks(std::string_view text,
                                          std::size_t begin,
                                          std::size_t end) {
  std::vector<JsonBlock> blocks;
  std::size_t line_start = begin;
  bool in_block = false;
  std::size_t content_start = 0;
  while (line_start < end) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos || line_end > end) line_end = end;
    const std::string_view line =
        rstrip(text.substr(line_start, line_end - line_start));
    if (!in_block && line == kOpenFence) {
      in_block = true;
      content_start = std::min(line_end + 1, end);
    } else if (in_block && line == kCloseFence) {
      blocks.push_back({content_start, line_start, std::nullopt, true});
      in_block = false;
    }
    line_start = line_end + 1;
  }
  if (in_block) {
    // Opening fence with no close: report the tail as a broken block.
    blocks.push_back({content_start, end, std::nullopt, false});
  }
  return blocks;
}

void parse_think_blocks(std::string_view text, TraceDocument& doc,
                        std::size_t begin, std::size_t end) {
  doc.think_json_blocks = scan_fenced_blocks(text, begin, end);
  for (JsonBlock& block : doc.think_json_blocks) {
    if (!block.terminated) {
      doc.defects.push_back(Defect::kInvalidThinkJson);
      continue;
    }
    const std::string_view raw = text.substr(block.begin, block.end - block.begin);
    nlohmann::json value =
        nlohmann::json::parse(raw, /*cb=*/nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) {
      doc.defects.push_back(Defect::kInvalidThinkJson);
    } else {
      block.value = std::move(value);
    }
  }
  if (doc.think_json_blocks.empty()) {
    doc.defects.push_back(Defect::kNoThinkJson);
  }
}

void parse_answer_blocks(std::string_view text, TraceDocument& doc,
                         std::size_t begin, std::size_t end) {
  const std::vector<JsonBlock> blocks = scan_fenced_blocks(text, begin, end);
  if (blocks.empty()) {
    doc.defects.push_back(Defect::kNoAnswerJson);
    return;
  }
  doc.answer_block_present = true;
  const JsonBlock& answer = blocks.back();
  if (!answer.terminated) {
    doc.defects.push_back(Defect::kInvalidAnswerJson);
    return;
  }
  const std::string_view raw =
      text.substr(answer.begin, answer.end - answer.begin);
  try {
    doc.answer_graph = parse_scene_graph(raw);
  } catch (const ParseError&) {
    doc.defects.push_back(Defect::kInvalidAnswerJson);
  } catch (const ValidationError&) {
    doc.defects.push_back(Defect::kInvalidAnswerJson);
  }
  // Anything after the answer's closing fence line should be blank.
  std::size_t after = text.find('\n', answer.end);
  after = (after == std::string_view::npos || after >= end) ? end : after + 1;
  if (!is_blank(text.substr(after, end - after))) {
    doc.defects.push_back(Defect::kExtraTextAfterAnswer);
  }
}

}  // namespace

std::string_view defect_name(Defect d) {
  switch (d) {
    case Defect::kMissingOpenTag: return "missing_open_tag";
    case Defect::kMissingCloseTag: return "missing_close_tag";
    case Defect::kNoThinkJson: return "no_think_json";
    case Defect::kInvalidThinkJson: return "invalid_think_json";
    case Defect::kNoAnswerJson: return "no_answer_json";
    case Defect::kInvalidAnswerJson: return "invalid_answer_json";
    case Defect::kExtraTextAfterAnswer: return "extra_text_after_answer";
  }
  return "unknown";
}

bool TraceDocument::has_defect(Defect d) const {
  return std::find(defects.begin(), defects.end(), d) != defects.end();
}

TraceDocument parse_trace(std::string_view text) {
  TraceDocument doc;
  const std::size_t open_pos = text.find(kOpenTag);
  doc.open_tag_present = open_pos != std::string_view::npos;
  std::size_t close_pos = std::string_view::npos;
  if (doc.open_tag_present) {
    close_pos = text.find(kCloseTag, open_pos + kOpenTag.size());
    doc.close_tag_present = close_pos != std::string_view::npos ||
                            text.find(kCloseTag) != std::string_view::npos;
  } else {
    doc.close_tag_present = text.find(kCloseTag) != std::string_view::npos;
  }
  doc.tags_well_nested =
      doc.open_tag_present && close_pos != std::string_view::npos;

  if (!doc.open_tag_present) doc.defects.push_back(Defect::kMissingOpenTag);
  if (!doc.tags_well_nested) doc.defects.push_back(Defect::kMissingCloseTag);

  std::size_t answer_begin = 0;
  std::size_t answer_end = text.size();
  if (doc.tags_well_nested) {
    const std::size_t think_begin = open_pos + kOpenTag.size();
    doc.think_section = std::string(text.substr(think_begin, close_pos - think_begin));
    parse_think_blocks(text, doc, think_begin, close_pos);
    answer_begin = close_pos + kCloseTag.size();
  } else if (doc.open_tag_present) {
    // Unterminated think swallows everything; there is no answer segment.
    doc.defects.push_back(Defect::kNoThinkJson);
    doc.defects.push_back(Defect::kNoAnswerJson);
    return doc;
  } else {
    // No <think> at all: grade the whole text as an answer segment.
    doc.defects.push_back(Defect::kNoThinkJson);
  }
  doc.answer_section = std::string(text.substr(answer_begin, answer_end - answer_begin));
  parse_answer_blocks(text, doc, answer_begin, answer_end);
  return doc;
}

double format_score(const TraceDocument& doc, const FormatRubric& rubric) {
  double score = 0.0;
  if (doc.tags_well_nested) {
    score += rubric.tag_full;
  } else if (doc.open_tag_present || doc.close_tag_present) {
    score += rubric.tag_partial;
  }
  bool think_valid = false;
  for (const JsonBlock& b : doc.think_json_blocks) {
    if (b.value) think_valid = true;
  }
  if (think_valid) {
    score += rubric.think_full;
  } else if (!doc.think_json_blocks.empty()) {
    score += rubric.think_partial;
  }
  if (doc.answer_graph) {
    score += rubric.answer_full;
  } else if (doc.answer_block_present) {
    score += rubric.answer_partial;
  }
  return std::clamp(score, 0.0, 1.0);
}

RewardReport composite_reward(const TraceDocument& doc, const SceneGraph& gt,
                              const RewardParams& params) {
  RewardReport report;
  report.lambda1 = params.lambda1;
  report.lambda2 = params.lambda2;
  if (doc.answer_graph) {
    report.matching = match_nodes(*doc.answer_graph, gt);
    report.iou = iou_reward(report.matching, doc.answer_graph->nodes.size());
    report.coll = collision_score(*doc.answer_graph, params.collision_eps);
  } else {
    report.matching = match_nodes(SceneGraph{}, gt);
  }
  report.fmt = format_score(doc, params.rubric);
  report.composite = report.iou + params.lambda1 * report.coll +
                     params.lambda2 * report.fmt;
  return report;
}

RewardReport composite_reward(std::string_view pred_text, const SceneGraph& gt,
                              const RewardParams& params) {
  return composite_reward(parse_trace(pred_text), gt, params);
}

std::string make_canonical_trace(const SceneGraph& answer,
                                 const SceneGraph* working) {
  const SceneGraph& think_graph = working ? *working : answer;
  std::string out;
  out += "<think>\n";
  out += "Step 1: read the current layout and the requested change.\n";
  out += "```json\n";
  out += serialize_scene_graph(think_graph);
  out += "\n```\n";
  out += "Step 2: place every object at its final pose.\n";
  out += "</think>\n";
  out += "Final Scene Graph\n";
  out += "```json\n";
  out += serialize_scene_graph(answer);
  out += "\n```\n";
  return out;
}

}  // namespace layoutlab
