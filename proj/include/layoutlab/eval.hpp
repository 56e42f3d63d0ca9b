#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "layoutlab/benchgen.hpp"
#include "layoutlab/metrics.hpp"
#include "layoutlab/rewards.hpp"

namespace layoutlab {

/// One model output for one instance. Either the finished graph or the
/// raw trace text it should be extracted from (at least one must be set).
struct PredictionRecord {
  std::string id;
  std::optional<std::string> raw_text;
  std::optional<SceneGraph> final_graph;
};

std::string prediction_to_json(const PredictionRecord& rec);
PredictionRecord parse_prediction(std::string_view line);
void write_predictions(const std::vector<PredictionRecord>& records,
                       const std::string& path);
std::vector<PredictionRecord> read_predictions(const std::string& path);

/// Raw model trace paired with its instance, for the trace scorer.
struct TraceRecord {
  std::string id;
  std::string text;
};

std::string trace_to_json(const TraceRecord& rec);
TraceRecord parse_trace_record(std::string_view line);
std::vector<TraceRecord> read_traces(const std::string& path);

enum class ReportFormat { kText, kJson, kCsv };

struct EvalConfig {
  std::vector<double> iou_thresholds = {0.5};
  double collision_eps = 1e-6;  // m^3 of shared volume that counts
  int parallelism = 1;          // worker threads for per-scene scoring
};

/// Per-scene numbers. A prediction that is absent or yields no graph
/// scores zero everywhere except center distance, which is undefined
/// (excluded from the mean) while the scene still counts.
struct SceneScore {
  std::string id;
  TaskKind task = TaskKind::kSorting;
  std::string status;  // "ok", "missing", or "unparsable"
  double iou = 0.0;
  std::map<double, double> iou_at;
  std::optional<double> center_dist;
  double collision = 0.0;
  std::optional<double> edit_dist;  // sorting scenes only
};

struct TaskAggregate {
  TaskKind task = TaskKind::kSorting;
  int scenes = 0;
  int missing = 0;
  double mean_iou = 0.0;
  std::map<double, double> iou_at;
  std::optional<double> mean_center_dist;
  double mean_collision = 0.0;
  std::optional<double> mean_edit = 0.0;
};

struct EvalReport {
  EvalConfig config;
  std::vector<SceneScore> scenes;   // manifest order
  std::vector<TaskAggregate> tasks; // first-appearance order
};

/// Score predictions against a manifest. Unknown prediction ids or
/// duplicates raise ValidationError. Scoring is independent per scene and
/// deterministic for any parallelism level.
EvalReport evaluate(const std::vector<TaskInstance>& instances,
                    const std::vector<PredictionRecord>& predictions,
                    const EvalConfig& config = {});

/// Render a report; all three formats embed the effective configuration
/// and are byte-stable for equal inputs.
std::string format_report(const EvalReport& report, ReportFormat format);

}  // namespace layoutlab
