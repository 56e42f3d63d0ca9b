// Python bindings: a thin string-in/string-out veneer over the C++ core.
// Graphs, instances, and predictions travel as the same JSON/JSONL text the
// CLI reads and writes, so results are byte-identical across both surfaces.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "layoutlab/benchgen.hpp"
#include "layoutlab/errors.hpp"
#include "layoutlab/eval.hpp"
#include "layoutlab/grpo.hpp"
#include "layoutlab/metrics.hpp"
#include "layoutlab/rewards.hpp"
#include "layoutlab/scene_graph.hpp"
#include "layoutlab/solvers.hpp"
#include "layoutlab/svg_render.hpp"

namespace py = pybind11;
using namespace layoutlab;

namespace {

TaskKind parse_task(const std::string& name) {
  const auto kind = task_from_name(name);
  if (!kind) {
    throw ValidationError("unknown task '" + name +
                          "' (expected sorting, alignment, or roomedit)");
  }
  return *kind;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw ValidationError("unknown report format '" + name +
                        "' (expected text, json, or csv)");
}

// Parse one JSONL payload, reporting errors with 1-based line numbers the
// same way the file readers do.
template <typename Record, typename Parse>
std::vector<Record> parse_lines(std::string_view text, Parse parse) {
  std::vector<Record> out;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = text.find('\n', begin);
    const std::string_view line =
        text.substr(begin, end == std::string_view::npos ? std::string_view::npos
                                                         : end - begin);
    ++line_no;
    if (!line.empty()) {
      try {
        out.push_back(parse(line));
      } catch (const std::exception& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": " +
                              e.what());
      }
    }
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

std::string generate_line(const std::string& task, std::uint64_t seed,
                          std::uint64_t index) {
  switch (parse_task(task)) {
    case TaskKind::kSorting:
      return instance_to_json(gen_sorting(seed, index));
    case TaskKind::kAlignment:
      return instance_to_json(gen_alignment(seed, index));
    default:
      return instance_to_json(gen_roomedit(seed, index));
  }
}

std::string solve_line(const std::string& instance_json) {
  const TaskInstance inst = parse_task_instance(instance_json);
  const SolveResult solved = solve_instance(inst);
  PredictionRecord rec;
  rec.id = inst.id;
  rec.final_graph = solved.graph;
  return prediction_to_json(rec);
}

std::string evaluate_text(const std::string& manifest_jsonl,
                          const std::string& predictions_jsonl,
                          const std::string& fmt,
                          const std::vector<double>& iou_thresholds,
                          double collision_eps, int parallelism) {
  const auto instances = parse_lines<TaskInstance>(
      manifest_jsonl, [](std::string_view l) { return parse_task_instance(l); });
  const auto predictions = parse_lines<PredictionRecord>(
      predictions_jsonl, [](std::string_view l) { return parse_prediction(l); });
  EvalConfig config;
  config.iou_thresholds = iou_thresholds;
  config.collision_eps = collision_eps;
  config.parallelism = parallelism;
  return format_report(evaluate(instances, predictions, config),
                       parse_format(fmt));
}

py::dict score_trace(const std::string& trace_text,
                     const std::string& target_graph_json, double lambda1,
                     double lambda2) {
  RewardParams params;
  params.lambda1 = lambda1;
  params.lambda2 = lambda2;
  const TraceDocument doc = parse_trace(trace_text);
  const RewardReport r =
      composite_reward(doc, parse_scene_graph(target_graph_json), params);
  py::list defects;
  for (const Defect d : doc.defects) {
    defects.append(std::string(defect_name(d)));
  }
  py::dict out;
  out["iou"] = r.iou;
  out["coll"] = r.coll;
  out["fmt"] = r.fmt;
  out["composite"] = r.composite;
  out["defects"] = defects;
  return out;
}

std::string render_graph(const std::string& graph_json, double scale,
                         bool labels) {
  SvgOptions opts;
  opts.scale = scale;
  opts.labels = labels;
  return render_svg(parse_scene_graph(graph_json), opts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic 3D layout toolkit: generators, solvers, metrics";

  py::register_exception<ParseError>(m, "GraphParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError",
                                          PyExc_RuntimeError);

  m.def("canonical_json",
        [](const std::string& graph_json) {
          return serialize_scene_graph(parse_scene_graph(graph_json));
        },
        py::arg("graph_json"),
        "Parse a scene-graph JSON string and re-emit it in canonical form.");

  m.def("generate", &generate_line, py::arg("task"), py::arg("seed"),
        py::arg("index"),
        "Generate one benchmark instance as a manifest JSONL line.");

  m.def("solve", &solve_line, py::arg("instance_json"),
        "Solve one manifest line; returns a prediction JSONL line.");

  m.def("evaluate", &evaluate_text, py::arg("manifest_jsonl"),
        py::arg("predictions_jsonl"), py::arg("fmt") = "json",
        py::arg("iou_thresholds") = std::vector<double>{0.5},
        py::arg("collision_eps") = 1e-6, py::arg("parallelism") = 1,
        "Score predictions against a manifest; returns the report text.");

  m.def("score_trace", &score_trace, py::arg("trace_text"),
        py::arg("target_graph_json"), py::arg("lambda1") = 0.2,
        py::arg("lambda2") = 0.2,
        "Composite reward (iou, coll, fmt, composite, defects) for a "
        "reasoning trace against a target graph.");

  m.def("canonical_trace",
        [](const std::string& graph_json) {
          return make_canonical_trace(parse_scene_graph(graph_json));
        },
        py::arg("graph_json"),
        "Reference trace that earns full format credit for a graph.");

  m.def("render", &render_graph, py::arg("graph_json"),
        py::arg("scale") = 200.0, py::arg("labels") = true,
        "Top-down SVG rendering of a scene graph.");

  m.def("group_advantages", &group_advantages, py::arg("rewards"),
        py::arg("std_floor") = 1e-8,
        "Per-sample advantages: rewards standardized within the group.");
}
