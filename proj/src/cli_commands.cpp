#include "layoutlab/cli_commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "layoutlab/benchgen.hpp"
#include "layoutlab/errors.hpp"
#include "layoutlab/eval.hpp"
#include "layoutlab/grpo.hpp"
#include "layoutlab/metrics.hpp"
#include "layoutlab/rewards.hpp"
#include "layoutlab/rng.hpp"
#include "layoutlab/solvers.hpp"
#include "layoutlab/svg_render.hpp"

namespace layoutlab {

namespace {

using nlohmann::json;

/// Optional JSON config file; explicit command-line flags always win.
struct ToolConfig {
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> collision_eps;
  std::optional<std::vector<double>> iou_thresholds;
  std::optional<std::string> format;
  std::optional<int> parallelism;
};

ToolConfig load_tool_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const json j = parse_json_strict(buffer.str());
  if (!j.is_object()) {
    throw ValidationError("config: top-level value must be an object");
  }
  ToolConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "lambda1") cfg.lambda1 = value.get<double>();
    else if (key == "lambda2") cfg.lambda2 = value.get<double>();
    else if (key == "collision_eps") cfg.collision_eps = value.get<double>();
    else if (key == "iou_thresholds")
      cfg.iou_thresholds = value.get<std::vector<double>>();
    else if (key == "format") cfg.format = value.get<std::string>();
    else if (key == "parallelism") cfg.parallelism = value.get<int>();
    else throw ValidationError("config: unknown key '" + key + "'");
  }
  return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ------------------------------------------------------------------- gen

struct GenArgs {
  std::string task;
  int count = 100;
  std::uint64_t seed = 0;
  std::string out;
  SortingOptions sorting;
  AlignmentOptions alignment;
  RoomeditOptions roomedit;
};

int cmd_gen(const GenArgs& args) {
  const auto task = task_from_name(args.task);
  if (!task) throw ValidationError("unknown task '" + args.task + "'");
  if (args.count < 1) throw ValidationError("count must be at least 1");
  std::vector<TaskInstance> instances;
  instances.reserve(static_cast<std::size_t>(args.count));
  for (int i = 0; i < args.count; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    switch (*task) {
      case TaskKind::kSorting:
        instances.push_back(gen_sorting(args.seed, index, args.sorting));
        break;
      case TaskKind::kAlignment:
        instances.push_back(gen_alignment(args.seed, index, args.alignment));
        break;
      default:
        instances.push_back(gen_roomedit(args.seed, index, args.roomedit));
        break;
    }
  }
  write_dataset(instances, args.out);
  std::cout << "wrote " << instances.size() << " " << task_name(*task)
            << " instances (seed " << args.seed << ") to " << args.out
            << "\n";
  return 0;
}

// ----------------------------------------------------------------- solve

int cmd_solve(const std::string& manifest, const std::string& out) {
  const std::vector<TaskInstance> instances = read_dataset(manifest);
  std::vector<PredictionRecord> records;
  std::vector<std::string> failures;
  for (const TaskInstance& inst : instances) {
    try {
      PredictionRecord rec;
      rec.id = inst.id;
      rec.final_graph = solve_instance(inst).graph;
      records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      failures.push_back(inst.id + ": " + e.what());
    }
  }
  write_predictions(records, out);
  std::cout << "solved " << records.size() << "/" << instances.size()
            << " instances to " << out << "\n";
  if (!failures.empty()) {
    for (const std::string& f : failures) {
      std::cerr << "unsolved " << f << "\n";
    }
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------------ eval

int cmd_eval(const std::string& manifest, const std::string& predictions,
             const EvalConfig& config, ReportFormat format,
             const std::string& out) {
  const EvalReport report =
      evaluate(read_dataset(manifest), read_predictions(predictions), config);
  const std::string text = format_report(report, format);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    std::cout << "wrote report to " << out << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- score

int cmd_score(const std::string& manifest, const std::string& traces,
              const RewardParams& params, const std::string& out) {
  const std::vector<TaskInstance> instances = read_dataset(manifest);
  std::map<std::string, const TaskInstance*> by_id;
  for (const TaskInstance& inst : instances) by_id[inst.id] = &inst;

  std::string lines;
  for (const TraceRecord& rec : read_traces(traces)) {
    const auto it = by_id.find(rec.id);
    if (it == by_id.end()) {
      throw ValidationError("trace id '" + rec.id +
                            "' does not appear in the manifest");
    }
    const TraceDocument doc = parse_trace(rec.text);
    const RewardReport r =
        composite_reward(doc, it->second->target_graph, params);
    std::string line = "{\"id\":" + json(rec.id).dump();
    line += ",\"iou\":" + format_number(r.iou);
    line += ",\"coll\":" + format_number(r.coll);
    line += ",\"fmt\":" + format_number(r.fmt);
    line += ",\"lambda1\":" + format_number(r.lambda1);
    line += ",\"lambda2\":" + format_number(r.lambda2);
    line += ",\"composite\":" + format_number(r.composite);
    line += ",\"defects\":[";
    for (std::size_t i = 0; i < doc.defects.size(); ++i) {
      if (i > 0) line += ',';
      line += json(std::string(defect_name(doc.defects[i]))).dump();
    }
    line += "]}";
    lines += line;
    lines += '\n';
  }
  if (out.empty()) {
    std::cout << lines;
  } else {
    write_text_file(out, lines);
    std::cout << "wrote scores to " << out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- render

int cmd_render(const std::string& graph_path, const std::string& manifest,
               const std::string& id, const std::string& which,
               double scale, const std::string& out) {
  SceneGraph g;
  if (!graph_path.empty()) {
    g = parse_scene_graph(read_text_file(graph_path));
  } else {
    if (manifest.empty() || id.empty()) {
      throw ValidationError(
          "render needs either --graph or --manifest plus --id");
    }
    bool found = false;
    for (const TaskInstance& inst : read_dataset(manifest)) {
      if (inst.id != id) continue;
      if (which == "initial") {
        g = inst.initial_graph;
      } else if (which == "target") {
        g = inst.target_graph;
      } else {
        throw ValidationError("--which must be 'initial' or 'target'");
      }
      found = true;
      break;
    }
    if (!found) {
      throw ValidationError("instance '" + id + "' not found in " + manifest);
    }
  }
  SvgOptions opts;
  opts.scale = scale;
  write_text_file(out, render_svg(g, opts));
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

// ---------------------------------------------------------------- selftest

namespace {

struct SuiteRunner {
  std::ostream& os;
  bool all_ok = true;

  void run(const std::string& name, bool ok, const std::string& detail = "") {
    all_ok = all_ok && ok;
    os << (ok ? "[ ok ] " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) os << ": " << detail;
    os << "\n";
  }
};

double voxel_iou(const Aabb& a, const Aabb& b, int samples, Pcg32& rng) {
  const Aabb hull = {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y),
                      std::min(a.min.z, b.min.z)},
                     {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y),
                      std::max(a.max.z, b.max.z)}};
  int in_a = 0, in_b = 0, in_both = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = rng.uniform(hull.min.x, hull.max.x);
    const double y = rng.uniform(hull.min.y, hull.max.y);
    const double z = rng.uniform(hull.min.z, hull.max.z);
    const bool ina = x >= a.min.x && x <= a.max.x && y >= a.min.y &&
                     y <= a.max.y && z >= a.min.z && z <= a.max.z;
    const bool inb = x >= b.min.x && x <= b.max.x && y >= b.min.y &&
                     y <= b.max.y && z >= b.min.z && z <= b.max.z;
    in_a += ina;
    in_b += inb;
    in_both += ina && inb;
  }
  const int uni = in_a + in_b - in_both;
  return uni == 0 ? 0.0 : static_cast<double>(in_both) / uni;
}

Aabb random_box(Pcg32& rng) {
  const Vec3 c = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                  rng.uniform(-1.0, 1.0)};
  const Vec3 h = {rng.uniform(0.05, 0.8), rng.uniform(0.05, 0.8),
                  rng.uniform(0.05, 0.8)};
  return {c - h, c + h};
}

bool check_round_trips(std::string& detail) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    for (const TaskInstance& inst :
         {gen_sorting(99, i), gen_alignment(99, i), gen_roomedit(99, i)}) {
      for (const SceneGraph* g : {&inst.initial_graph, &inst.target_graph}) {
        const std::string text = serialize_scene_graph(*g);
        if (serialize_scene_graph(parse_scene_graph(text)) != text) {
          detail = inst.id;
          return false;
        }
      }
      const std::string line = instance_to_json(inst);
      if (instance_to_json(parse_task_instance(line)) != line) {
        detail = inst.id + " (manifest record)";
        return false;
      }
    }
  }
  return true;
}

bool check_iou(std::string& detail) {
  const Aabb unit = {{0, 0, 0}, {1, 1, 1}};
  if (std::fabs(iou3d(unit, unit) - 1.0) > 1e-12) {
    detail = "identical boxes";
    return false;
  }
  const Aabb apart = {{5, 5, 5}, {6, 6, 6}};
  if (iou3d(unit, apart) != 0.0) {
    detail = "disjoint boxes";
    return false;
  }
  const Aabb half = {{0, 0, 0}, {1, 1, 0.5}};
  if (std::fabs(iou3d(unit, half) - 0.5) > 1e-12) {
    detail = "nested half box";
    return false;
  }
  Pcg32 rng(2024, 7);
  for (int i = 0; i < 30; ++i) {
    const Aabb a = random_box(rng);
    const Aabb b = random_box(rng);
    const double exact = iou3d(a, b);
    const double approx = voxel_iou(a, b, 100000, rng);
    if (std::fabs(exact - approx) > 0.02) {
      detail = "random pair " + std::to_string(i) + ": exact " +
               format_number(exact) + " vs sampled " + format_number(approx);
      return false;
    }
  }
  return true;
}

bool check_rewards(std::string& detail) {
  const TaskInstance inst = gen_sorting(3, 0);
  const std::string good = make_canonical_trace(inst.target_graph);
  const RewardReport r = composite_reward(good, inst.target_graph);
  if (std::fabs(r.fmt - 1.0) > 1e-12 || std::fabs(r.iou - 1.0) > 1e-12 ||
      std::fabs(r.coll - 1.0) > 1e-12 ||
      std::fabs(r.composite - 1.4) > 1e-12) {
    detail = "canonical trace scored " + format_number(r.composite);
    return false;
  }
  if (format_score(parse_trace("no structure at all")) != 0.0) {
    detail = "structureless text must score 0";
    return false;
  }
  // Fuzz: arbitrary bytes must never throw.
  Pcg32 rng(77, 1);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng.next_below(200));
    for (int k = 0; k < len; ++k) {
      s.push_back(static_cast<char>(rng.next_below(256)));
    }
    try {
      (void)composite_reward(s, inst.target_graph);
    } catch (const std::exception& e) {
      detail = std::string("fuzz input threw: ") + e.what();
      return false;
    }
  }
  return true;
}

bool check_grpo(std::string& detail) {
  const std::vector<double> adv = group_advantages({1.0, 2.0, 3.0});
  const double s = std::sqrt(2.0 / 3.0);
  if (std::fabs(adv[0] + 1.0 / s) > 1e-9 || std::fabs(adv[1]) > 1e-12 ||
      std::fabs(adv[2] - 1.0 / s) > 1e-9) {
    detail = "advantages of {1,2,3}";
    return false;
  }
  for (double v : group_advantages({0.5, 0.5, 0.5})) {
    if (v != 0.0) {
      detail = "constant rewards must give zero advantages";
      return false;
    }
  }
  RolloutGroup group;
  group.rewards = {0.2, 0.9};
  group.logp_new = {{-1.0, -2.0}, {-0.5}};
  group.logp_old = group.logp_new;
  group.logp_ref = group.logp_new;
  GrpoConfig cfg;
  cfg.kl_beta = 0.0;
  const GrpoResult res = grpo_objective(group, cfg);
  // ratio == 1 everywhere: J reduces to the mean advantage, which is 0.
  if (std::fabs(res.objective) > 1e-12 || res.mean_kl != 0.0) {
    detail = "identity policies";
    return false;
  }
  return true;
}

bool check_solvers(std::string& detail) {
  for (std::uint64_t i = 0; i < 25; ++i) {
    for (const TaskInstance& inst :
         {gen_sorting(20240801, i), gen_alignment(20240801, i),
          gen_roomedit(20240801, i)}) {
      const SolveResult solved = solve_instance(inst);
      if (serialize_scene_graph(solved.graph) !=
          serialize_scene_graph(inst.target_graph)) {
        detail = inst.id + ": solver does not reproduce the target";
        return false;
      }
      const VerifyReport vr = verify(inst, solved.graph);
      if (!vr.all_pass) {
        for (const ConstraintCheck& c : vr.checks) {
          if (!c.pass) {
            detail = inst.id + ": constraint '" + c.name + "'";
            break;
          }
        }
        return false;
      }
    }
  }
  return true;
}

bool check_determinism(std::string& detail) {
  for (std::uint64_t i = 0; i < 5; ++i) {
    if (instance_to_json(gen_sorting(11, i)) !=
            instance_to_json(gen_sorting(11, i)) ||
        instance_to_json(gen_alignment(11, i)) !=
            instance_to_json(gen_alignment(11, i)) ||
        instance_to_json(gen_roomedit(11, i)) !=
            instance_to_json(gen_roomedit(11, i))) {
      detail = "index " + std::to_string(i);
      return false;
    }
  }
  const TaskInstance inst = gen_roomedit(11, 0);
  if (render_svg(inst.target_graph) != render_svg(inst.target_graph)) {
    detail = "svg rendering";
    return false;
  }
  return true;
}

}  // namespace

bool run_selftest(std::ostream& os) {
  SuiteRunner runner{os};
  std::string detail;

  detail.clear();
  runner.run("serialization round-trips", check_round_trips(detail), detail);
  detail.clear();
  runner.run("box IoU vs sampling", check_iou(detail), detail);
  detail.clear();
  runner.run("trace rewards", check_rewards(detail), detail);
  detail.clear();
  runner.run("policy objective identities", check_grpo(detail), detail);
  detail.clear();
  runner.run("generator/solver closure", check_solvers(detail), detail);
  detail.clear();
  runner.run("byte determinism", check_determinism(detail), detail);

  os << (runner.all_ok ? "selftest passed\n" : "selftest FAILED\n");
  return runner.all_ok;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Deterministic benchmark toolkit for 3D layout editing"};
  app.require_subcommand(1);

  // gen ------------------------------------------------------------------
  GenArgs gen_args;
  int gen_objects = 0, gen_rows = 0, gen_cols = 0, gen_existing = 0,
      gen_refs = 0;
  double gen_object_gap = 0.0, gen_group_gap = 0.0, gen_perturb = 0.0;
  std::string gen_axis;
  auto* gen = app.add_subcommand("gen", "Generate a benchmark manifest");
  gen->add_option("--task", gen_args.task, "sorting | alignment | roomedit")
      ->required();
  gen->add_option("--count", gen_args.count, "Number of instances");
  gen->add_option("--seed", gen_args.seed, "Dataset seed");
  gen->add_option("--out", gen_args.out, "Output manifest (JSONL)")
      ->required();
  auto* opt_objects =
      gen->add_option("--objects", gen_objects, "Sorting: object count");
  auto* opt_object_gap = gen->add_option("--object-gap", gen_object_gap,
                                         "Sorting: gap inside groups, m");
  auto* opt_group_gap = gen->add_option("--group-gap", gen_group_gap,
                                        "Sorting: gap between groups, m");
  auto* opt_axis =
      gen->add_option("--axis", gen_axis, "Sorting: layout axis (x | y)");
  auto* opt_rows = gen->add_option("--rows", gen_rows, "Alignment: grid rows");
  auto* opt_cols = gen->add_option("--cols", gen_cols, "Alignment: grid cols");
  auto* opt_perturb = gen->add_option("--perturb", gen_perturb,
                                      "Alignment: perturbed fraction");
  auto* opt_existing = gen->add_option("--existing", gen_existing,
                                       "Roomedit: existing object count");
  auto* opt_refs =
      gen->add_option("--refs", gen_refs, "Roomedit: reference count (2|3)");

  // solve ----------------------------------------------------------------
  std::string solve_manifest, solve_out;
  auto* solve =
      app.add_subcommand("solve", "Solve every instance of a manifest");
  solve->add_option("--manifest", solve_manifest, "Input manifest")
      ->required();
  solve->add_option("--out", solve_out, "Output predictions (JSONL)")
      ->required();

  // eval -----------------------------------------------------------------
  std::string eval_manifest, eval_predictions, eval_format, eval_out,
      eval_config;
  std::vector<double> eval_thresholds;
  double eval_collision_eps = 1e-6;
  int eval_jobs = 1;
  auto* eval_cmd =
      app.add_subcommand("eval", "Score predictions against a manifest");
  eval_cmd->add_option("--manifest", eval_manifest, "Input manifest")
      ->required();
  eval_cmd->add_option("--predictions", eval_predictions,
                       "Predictions (JSONL)")
      ->required();
  auto* opt_format = eval_cmd->add_option("--format", eval_format,
                                          "text | json | csv");
  eval_cmd->add_option("--out", eval_out, "Write the report here");
  auto* opt_thresholds =
      eval_cmd->add_option("--thresholds", eval_thresholds,
                           "IoU thresholds (comma separated)")
          ->delimiter(',');
  auto* opt_eps = eval_cmd->add_option("--collision-eps", eval_collision_eps,
                                       "Shared volume that counts, m^3");
  auto* opt_jobs = eval_cmd->add_option("--jobs", eval_jobs,
                                        "Worker threads for scoring");
  eval_cmd->add_option("--config", eval_config,
                       "JSON config file (flags win)");

  // score ----------------------------------------------------------------
  std::string score_manifest, score_traces, score_out, score_config;
  double score_lambda1 = 0.2, score_lambda2 = 0.2,
         score_collision_eps = 1e-6;
  auto* score =
      app.add_subcommand("score", "Composite rewards for raw model traces");
  score->add_option("--manifest", score_manifest, "Input manifest")
      ->required();
  score->add_option("--traces", score_traces, "Trace records (JSONL)")
      ->required();
  score->add_option("--out", score_out, "Write scores here (default stdout)");
  auto* opt_l1 =
      score->add_option("--lambda1", score_lambda1, "Collision weight");
  auto* opt_l2 = score->add_option("--lambda2", score_lambda2,
                                   "Format weight");
  auto* opt_score_eps = score->add_option(
      "--collision-eps", score_collision_eps, "Shared volume that counts");
  score->add_option("--config", score_config, "JSON config file (flags win)");

  // render ---------------------------------------------------------------
  std::string render_graph, render_manifest, render_id, render_out;
  std::string render_which = "target";
  double render_scale = 200.0;
  auto* render = app.add_subcommand("render", "Render a graph as SVG");
  render->add_option("--graph", render_graph, "Scene-graph JSON file");
  render->add_option("--manifest", render_manifest,
                     "Manifest to pull a graph from");
  render->add_option("--id", render_id, "Instance id inside the manifest");
  render->add_option("--which", render_which, "initial | target");
  render->add_option("--scale", render_scale, "Pixels per meter");
  render->add_option("--out", render_out, "Output SVG path")->required();

  // selftest --------------------------------------------------------------
  auto* selftest = app.add_subcommand("selftest", "Run built-in checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      if (opt_objects->count()) gen_args.sorting.n_objects = gen_objects;
      if (opt_object_gap->count()) {
        gen_args.sorting.object_gap = gen_object_gap;
      }
      if (opt_group_gap->count()) gen_args.sorting.group_gap = gen_group_gap;
      if (opt_axis->count()) {
        if (gen_axis == "x") gen_args.sorting.axis = Axis::kX;
        else if (gen_axis == "y") gen_args.sorting.axis = Axis::kY;
        else throw ValidationError("--axis must be 'x' or 'y'");
      }
      if (opt_rows->count()) gen_args.alignment.rows = gen_rows;
      if (opt_cols->count()) gen_args.alignment.cols = gen_cols;
      if (opt_perturb->count()) {
        gen_args.alignment.perturb_fraction = gen_perturb;
      }
      if (opt_existing->count()) gen_args.roomedit.n_existing = gen_existing;
      if (opt_refs->count()) gen_args.roomedit.n_refs = gen_refs;
      return cmd_gen(gen_args);
    }
    if (solve->parsed()) return cmd_solve(solve_manifest, solve_out);
    if (eval_cmd->parsed()) {
      ToolConfig file_cfg;
      if (!eval_config.empty()) file_cfg = load_tool_config(eval_config);
      EvalConfig config;
      if (opt_thresholds->count()) config.iou_thresholds = eval_thresholds;
      else if (file_cfg.iou_thresholds)
        config.iou_thresholds = *file_cfg.iou_thresholds;
      if (opt_eps->count()) config.collision_eps = eval_collision_eps;
      else if (file_cfg.collision_eps)
        config.collision_eps = *file_cfg.collision_eps;
      if (opt_jobs->count()) config.parallelism = eval_jobs;
      else if (file_cfg.parallelism) config.parallelism = *file_cfg.parallelism;
      std::string fmt = "text";
      if (opt_format->count()) fmt = eval_format;
      else if (file_cfg.format) fmt = *file_cfg.format;
      ReportFormat format;
      if (fmt == "text") format = ReportFormat::kText;
      else if (fmt == "json") format = ReportFormat::kJson;
      else if (fmt == "csv") format = ReportFormat::kCsv;
      else throw ValidationError("--format must be text, json, or csv");
      if (config.parallelism < 1) {
        throw ValidationError("--jobs must be at least 1");
      }
      for (double t : config.iou_thresholds) {
        if (!(t > 0.0) || t > 1.0) {
          throw ValidationError("IoU thresholds must be in (0, 1]");
        }
      }
      return cmd_eval(eval_manifest, eval_predictions, config, format,
                      eval_out);
    }
    if (score->parsed()) {
      ToolConfig file_cfg;
      if (!score_config.empty()) file_cfg = load_tool_config(score_config);
      RewardParams params;
      if (opt_l1->count()) params.lambda1 = score_lambda1;
      else if (file_cfg.lambda1) params.lambda1 = *file_cfg.lambda1;
      if (opt_l2->count()) params.lambda2 = score_lambda2;
      else if (file_cfg.lambda2) params.lambda2 = *file_cfg.lambda2;
      if (opt_score_eps->count()) params.collision_eps = score_collision_eps;
      else if (file_cfg.collision_eps)
        params.collision_eps = *file_cfg.collision_eps;
      return cmd_score(score_manifest, score_traces, params, score_out);
    }
    if (render->parsed()) {
      return cmd_render(render_graph, render_manifest, render_id,
                        render_which, render_scale, render_out);
    }
    if (selftest->parsed()) {
      return run_selftest(std::cout) ? 0 : 3;
    }
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace layoutlab
