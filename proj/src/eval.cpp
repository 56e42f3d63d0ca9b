#include "layoutlab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "layoutlab/errors.hpp"
#include "layoutlab/text.hpp"

namespace layoutlab {

namespace {

using nlohmann::json;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string threshold_label(double t) {
  return "IoU@" + format_number(t);
}

}  // namespace

std::string prediction_to_json(const PredictionRecord& rec) {
  std::string out = "{\"id\":" + json(rec.id).dump();
  if (rec.raw_text) {
    out += ",\"raw_text\":" + json(*rec.raw_text).dump();
  }
  if (rec.final_graph) {
    out += ",\"final_graph\":" + serialize_scene_graph(*rec.final_graph);
  }
  out += '}';
  return out;
}

PredictionRecord parse_prediction(std::string_view line) {
  const json j = parse_json_strict(line);
  if (!j.is_object()) {
    throw ValidationError("prediction record must be a JSON object");
  }
  PredictionRecord rec;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) {
    throw ValidationError("prediction: missing string field 'id'");
  }
  rec.id = id->get<std::string>();
  if (auto raw = j.find("raw_text"); raw != j.end()) {
    if (!raw->is_string()) {
      throw ValidationError("prediction: raw_text must be a string");
    }
    rec.raw_text = raw->get<std::string>();
  }
  if (auto graph = j.find("final_graph"); graph != j.end()) {
    rec.final_graph = scene_graph_from_json(*graph);
  }
  if (!rec.raw_text && !rec.final_graph) {
    throw ValidationError(
        "prediction: needs 'final_graph' or 'raw_text' (got neither)");
  }
  return rec;
}

void write_predictions(const std::vector<PredictionRecord>& records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const PredictionRecord& rec : records) {
    out << prediction_to_json(rec) << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      records.push_back(parse_prediction(line));
    } catch (const std::exception& e) {
      throw ValidationError("predictions line " + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return records;
}

std::string trace_to_json(const TraceRecord& rec) {
  return "{\"id\":" + json(rec.id).dump() +
         ",\"text\":" + json(rec.text).dump() + "}";
}

TraceRecord parse_trace_record(std::string_view line) {
  const json j = parse_json_strict(line);
  if (!j.is_object()) {
    throw ValidationError("trace record must be a JSON object");
  }
  auto id = j.find("id");
  auto text = j.find("text");
  if (id == j.end() || !id->is_string()) {
    throw ValidationError("trace: missing string field 'id'");
  }
  if (text == j.end() || !text->is_string()) {
    throw ValidationError("trace: missing string field 'text'");
  }
  return {id->get<std::string>(), text->get<std::string>()};
}

std::vector<TraceRecord> read_traces(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      records.push_back(parse_trace_record(line));
    } catch (const std::exception& e) {
      throw ValidationError("traces line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return records;
}

namespace {

SceneScore score_scene(const TaskInstance& inst,
                       const PredictionRecord* pred,
                       const EvalConfig& config) {
  SceneScore score;
  score.id = inst.id;
  score.task = inst.task;
  for (double t : config.iou_thresholds) score.iou_at[t] = 0.0;

  std::optional<SceneGraph> graph;
  if (!pred) {
    score.status = "missing";
  } else if (pred->final_graph) {
    graph = pred->final_graph;
    score.status = "ok";
  } else {
    // Raw text: pull the answer graph out of the trace.
    const TraceDocument doc = parse_trace(*pred->raw_text);
    if (doc.answer_graph) {
      graph = doc.answer_graph;
      score.status = "ok";
    } else {
      score.status = "unparsable";
    }
  }

  const SceneGraph& gt = inst.target_graph;
  if (inst.task == TaskKind::kSorting) {
    const Axis axis = std::get<SortSpec>(inst.spec).axis;
    score.edit_dist = graph
        ? static_cast<double>(edit_distance(*graph, gt, axis))
        : static_cast<double>(order_along_axis(gt, axis).size());
  }
  if (!graph) return score;

  const Matching m = match_nodes(*graph, gt);
  score.iou = iou_reward(m, graph->nodes.size());
  for (double t : config.iou_thresholds) {
    score.iou_at[t] = iou_at(m, graph->nodes.size(), t);
  }
  score.center_dist = center_distance(*graph, gt, m);
  score.collision = collision_score(*graph, config.collision_eps);
  return score;
}

}  // namespace

EvalReport evaluate(const std::vector<TaskInstance>& instances,
                    const std::vector<PredictionRecord>& predictions,
                    const EvalConfig& config) {
  std::map<std::string, const PredictionRecord*> by_id;
  std::set<std::string> instance_ids;
  for (const TaskInstance& inst : instances) instance_ids.insert(inst.id);
  for (const PredictionRecord& rec : predictions) {
    if (!instance_ids.count(rec.id)) {
      throw ValidationError("prediction id '" + rec.id +
                            "' does not appear in the manifest");
    }
    if (!by_id.emplace(rec.id, &rec).second) {
      throw ValidationError("duplicate prediction for id '" + rec.id + "'");
    }
  }

  EvalReport report;
  report.config = config;
  report.scenes.resize(instances.size());

  const auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto it = by_id.find(instances[i].id);
      report.scenes[i] = score_scene(
          instances[i], it == by_id.end() ? nullptr : it->second, config);
    }
  };
  const int workers = std::max(1, config.parallelism);
  if (workers == 1 || instances.size() < 2) {
    score_range(0, instances.size());
  } else {
    // Fixed contiguous chunks: the output slot of a scene never depends on
    // the thread count, so reports are identical at any parallelism.
    std::vector<std::thread> pool;
    const std::size_t chunk =
        (instances.size() + static_cast<std::size_t>(workers) - 1) /
        static_cast<std::size_t>(workers);
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = static_cast<std::size_t>(w) * chunk;
      if (begin >= instances.size()) break;
      const std::size_t end = std::min(begin + chunk, instances.size());
      pool.emplace_back(score_range, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  // Aggregate per task, in first-appearance order.
  std::vector<TaskKind> task_order;
  for (const SceneScore& s : report.scenes) {
    if (std::find(task_order.begin(), task_order.end(), s.task) ==
        task_order.end()) {
      task_order.push_back(s.task);
    }
  }
  for (TaskKind task : task_order) {
    TaskAggregate agg;
    agg.task = task;
    for (double t : config.iou_thresholds) agg.iou_at[t] = 0.0;
    double center_sum = 0.0;
    int center_n = 0;
    double edit_sum = 0.0;
    int edit_n = 0;
    for (const SceneScore& s : report.scenes) {
      if (s.task != task) continue;
      ++agg.scenes;
      if (s.status != "ok") ++agg.missing;
      agg.mean_iou += s.iou;
      agg.mean_collision += s.collision;
      for (const auto& [t, v] : s.iou_at) agg.iou_at[t] += v;
      if (s.center_dist) {
        center_sum += *s.center_dist;
        ++center_n;
      }
      if (s.edit_dist) {
        edit_sum += *s.edit_dist;
        ++edit_n;
      }
    }
    if (agg.scenes > 0) {
      agg.mean_iou /= agg.scenes;
      agg.mean_collision /= agg.scenes;
      for (auto& [t, v] : agg.iou_at) v /= agg.scenes;
    }
    agg.mean_center_dist =
        center_n > 0 ? std::optional<double>(center_sum / center_n)
                     : std::nullopt;
    agg.mean_edit = edit_n > 0 ? std::optional<double>(edit_sum / edit_n)
                               : std::nullopt;
    report.tasks.push_back(std::move(agg));
  }
  return report;
}

namespace {

std::string config_line(const EvalConfig& c) {
  std::string out = "collision_eps=" + format_number(c.collision_eps) +
                    " iou_thresholds=[";
  for (std::size_t i = 0; i < c.iou_thresholds.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(c.iou_thresholds[i]);
  }
  out += "] parallelism=" + std::to_string(c.parallelism);
  return out;
}

std::string format_text(const EvalReport& report) {
  std::ostringstream os;
  os << "== layout eval ==\n";
  os << "config: " << config_line(report.config) << "\n";
  for (const TaskAggregate& agg : report.tasks) {
    os << "\n[" << task_name(agg.task) << "] scenes=" << agg.scenes
       << " missing=" << agg.missing << "\n";
    std::vector<std::pair<std::string, std::string>> cols;
    cols.emplace_back("Mean IoU", fixed(agg.mean_iou, 4));
    if (agg.task == TaskKind::kSorting) {
      cols.emplace_back("Ctr. Dist.",
                        agg.mean_center_dist
                            ? fixed(*agg.mean_center_dist, 6)
                            : std::string("-"));
      cols.emplace_back("Col. Free", fixed(agg.mean_collision, 4));
      cols.emplace_back("Edit Dist.",
                        agg.mean_edit ? fixed(*agg.mean_edit, 4)
                                      : std::string("-"));
    } else {
      for (const auto& [t, v] : agg.iou_at) {
        cols.emplace_back(threshold_label(t), fixed(v, 4));
      }
      cols.emplace_back("Ctr. Dist.",
                        agg.mean_center_dist
                            ? fixed(*agg.mean_center_dist, 6)
                            : std::string("-"));
    }
    std::string header = " ";
    std::string values = " ";
    for (const auto& [name, value] : cols) {
      const std::size_t w = std::max(name.size(), value.size()) + 2;
      header += name + std::string(w - name.size(), ' ');
      values += value + std::string(w - value.size(), ' ');
    }
    os << header << "\n" << values << "\n";
  }
  return os.str();
}

json scene_to_json(const SceneScore& s) {
  json j;
  j["id"] = s.id;
  j["task"] = std::string(task_name(s.task));
  j["status"] = s.status;
  j["iou"] = s.iou;
  json at = json::object();
  for (const auto& [t, v] : s.iou_at) at[format_number(t)] = v;
  j["iou_at"] = at;
  if (s.center_dist) j["center_dist"] = *s.center_dist;
  j["collision_free"] = s.collision;
  if (s.edit_dist) j["edit_dist"] = *s.edit_dist;
  return j;
}

std::string format_json(const EvalReport& report) {
  json j;
  j["config"]["collision_eps"] = report.config.collision_eps;
  j["config"]["iou_thresholds"] = report.config.iou_thresholds;
  j["config"]["parallelism"] = report.config.parallelism;
  j["tasks"] = json::array();
  for (const TaskAggregate& agg : report.tasks) {
    json t;
    t["task"] = std::string(task_name(agg.task));
    t["scenes"] = agg.scenes;
    t["missing"] = agg.missing;
    t["mean_iou"] = agg.mean_iou;
    json at = json::object();
    for (const auto& [thr, v] : agg.iou_at) at[format_number(thr)] = v;
    t["iou_at"] = at;
    if (agg.mean_center_dist) t["mean_center_dist"] = *agg.mean_center_dist;
    t["mean_collision_free"] = agg.mean_collision;
    if (agg.mean_edit) t["mean_edit_dist"] = *agg.mean_edit;
    j["tasks"].push_back(t);
  }
  j["scenes"] = json::array();
  for (const SceneScore& s : report.scenes) {
    j["scenes"].push_back(scene_to_json(s));
  }
  return j.dump(2) + "\n";
}

std::string format_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "# config: " << config_line(report.config) << "\n";
  os << "id,task,status,iou";
  for (double t : report.config.iou_thresholds) {
    os << ",iou_at_" << format_number(t);
  }
  os << ",center_dist,collision_free,edit_dist\n";
  for (const SceneScore& s : report.scenes) {
    os << s.id << ',' << task_name(s.task) << ',' << s.status << ','
       << fixed(s.iou, 6);
    for (double t : report.config.iou_thresholds) {
      os << ',' << fixed(s.iou_at.at(t), 6);
    }
    os << ',' << (s.center_dist ? fixed(*s.center_dist, 6) : "") << ','
       << fixed(s.collision, 6) << ','
       << (s.edit_dist ? fixed(*s.edit_dist, 6) : "") << "\n";
  }
  return os.str();
}

}  // namespace

std::string format_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText: return format_text(report);
    case ReportFormat::kJson: return format_json(report);
    default: return format_csv(report);
  }
}

}  // namespace layoutlab
