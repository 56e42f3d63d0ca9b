#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "layoutlab/benchgen.hpp"
#include "layoutlab/cli_commands.hpp"
#include "layoutlab/eval.hpp"
#include "layoutlab/rewards.hpp"
#include "layoutlab/solvers.hpp"

using namespace layoutlab;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("layoutlab");
  for (const std::string& a : args) argv.push_back(a.c_str());

  std::ostringstream captured_out;
  std::ostringstream captured_err;
  std::streambuf* old_out = std::cout.rdbuf(captured_out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(captured_err.rdbuf());
  CliResult result;
  result.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  result.out = captured_out.str();
  return result;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("layoutlab_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("gen, solve, and eval chain into a perfect report") {
  TempDir dir;
  const std::string manifest = dir.file("sorting.jsonl");
  const std::string preds = dir.file("preds.jsonl");

  const CliResult gen = run({"gen", "--task", "sorting", "--seed", "42",
                             "--count", "4", "--out", manifest});
  CHECK(gen.code == 0);
  CHECK(gen.out.find("wrote 4 sorting instances") != std::string::npos);
  CHECK(read_dataset(manifest).size() == 4);

  const CliResult solve =
      run({"solve", "--manifest", manifest, "--out", preds});
  CHECK(solve.code == 0);
  CHECK(solve.out.find("solved 4/4") != std::string::npos);

  const CliResult eval = run({"eval", "--manifest", manifest,
                              "--predictions", preds, "--format", "json"});
  CHECK(eval.code == 0);
  const nlohmann::json report = nlohmann::json::parse(eval.out);
  REQUIRE(report.at("tasks").size() == 1);
  CHECK(report.at("tasks")[0].at("mean_iou").get<double>() == 1.0);
  CHECK(report.at("tasks")[0].at("mean_edit_dist").get<double>() == 0.0);
  CHECK(report.at("tasks")[0].at("missing").get<int>() == 0);

  // Report written to a file instead of stdout.
  const std::string report_path = dir.file("report.txt");
  const CliResult to_file =
      run({"eval", "--manifest", manifest, "--predictions", preds, "--out",
           report_path});
  CHECK(to_file.code == 0);
  CHECK(slurp(report_path).find("== layout eval ==") == 0);
}

TEST_CASE("every artifact is byte-identical across reruns") {
  TempDir dir;
  for (const char* task : {"sorting", "alignment", "roomedit"}) {
    CAPTURE(task);
    const std::string m1 = dir.file(std::string(task) + "_1.jsonl");
    const std::string m2 = dir.file(std::string(task) + "_2.jsonl");
    CHECK(run({"gen", "--task", task, "--seed", "7", "--count", "3", "--out",
               m1}).code == 0);
    CHECK(run({"gen", "--task", task, "--seed", "7", "--count", "3", "--out",
               m2}).code == 0);
    CHECK(slurp(m1) == slurp(m2));
  }

  const std::string manifest = dir.file("sorting_1.jsonl");
  const std::string p1 = dir.file("p1.jsonl");
  const std::string p2 = dir.file("p2.jsonl");
  CHECK(run({"solve", "--manifest", manifest, "--out", p1}).code == 0);
  CHECK(run({"solve", "--manifest", manifest, "--out", p2}).code == 0);
  CHECK(slurp(p1) == slurp(p2));

  const std::string r1 = dir.file("r1.csv");
  const std::string r2 = dir.file("r2.csv");
  for (const std::string& r : {r1, r2}) {
    CHECK(run({"eval", "--manifest", manifest, "--predictions", p1,
               "--format", "csv", "--jobs", "4", "--out", r}).code == 0);
  }
  CHECK(slurp(r1) == slurp(r2));

  const std::string id = read_dataset(manifest).front().id;
  const std::string s1 = dir.file("s1.svg");
  const std::string s2 = dir.file("s2.svg");
  for (const std::string& s : {s1, s2}) {
    CHECK(run({"render", "--manifest", manifest, "--id", id, "--which",
               "target", "--out", s}).code == 0);
  }
  CHECK(slurp(s1) == slurp(s2));
}

TEST_CASE("usage problems exit 1, data problems exit 2") {
  TempDir dir;
  CHECK(run({}).code == 1);
  CHECK(run({"gen", "--task", "sorting"}).code == 1);        // missing --out
  CHECK(run({"gen", "--frobnicate", "yes"}).code == 1);      // unknown flag
  CHECK(run({"definitely-not-a-command"}).code == 1);

  CHECK(run({"gen", "--task", "banana", "--out", dir.file("x.jsonl")}).code ==
        2);
  CHECK(run({"eval", "--manifest", dir.file("absent.jsonl"), "--predictions",
             dir.file("also-absent.jsonl")}).code == 2);

  // Feasible flags, infeasible request: too many objects must move.
  CHECK(run({"gen", "--task", "alignment", "--rows", "3", "--cols", "3",
             "--perturb", "0.9", "--out", dir.file("grid.jsonl")}).code == 2);

  // Render needs a resolvable graph.
  const std::string manifest = dir.file("m.jsonl");
  CHECK(run({"gen", "--task", "sorting", "--seed", "1", "--count", "1",
             "--out", manifest}).code == 0);
  const std::string id = read_dataset(manifest).front().id;
  CHECK(run({"render", "--manifest", manifest, "--id", "no-such-id", "--out",
             dir.file("a.svg")}).code == 2);
  CHECK(run({"render", "--manifest", manifest, "--id", id, "--which",
             "sideways", "--out", dir.file("b.svg")}).code == 2);
  CHECK(run({"render", "--out", dir.file("c.svg")}).code == 2);
}

TEST_CASE("config files fill in defaults but flags win") {
  TempDir dir;
  const std::string manifest = dir.file("m.jsonl");
  const std::string preds = dir.file("p.jsonl");
  REQUIRE(run({"gen", "--task", "sorting", "--seed", "3", "--count", "2",
               "--out", manifest}).code == 0);
  REQUIRE(run({"solve", "--manifest", manifest, "--out", preds}).code == 0);

  const std::string cfg = dir.file("cfg.json");
  spit(cfg, "{\"format\": \"csv\", \"parallelism\": 2}\n");

  const CliResult from_cfg = run({"eval", "--manifest", manifest,
                                  "--predictions", preds, "--config", cfg});
  CHECK(from_cfg.code == 0);
  CHECK(from_cfg.out.rfind("# config:", 0) == 0);  // csv came from the file
  CHECK(from_cfg.out.find("parallelism=2") != std::string::npos);

  const CliResult overridden =
      run({"eval", "--manifest", manifest, "--predictions", preds,
           "--config", cfg, "--format", "json"});
  CHECK(overridden.code == 0);
  CHECK(overridden.out.rfind("{", 0) == 0);  // the flag beat the file

  spit(cfg, "{\"formmat\": \"csv\"}\n");
  CHECK(run({"eval", "--manifest", manifest, "--predictions", preds,
             "--config", cfg}).code == 2);

  CHECK(run({"eval", "--manifest", manifest, "--predictions", preds,
             "--jobs", "0"}).code == 2);
}

TEST_CASE("score reports composite rewards per trace") {
  TempDir dir;
  const std::string manifest = dir.file("m.jsonl");
  REQUIRE(run({"gen", "--task", "alignment", "--seed", "5", "--count", "2",
               "--out", manifest}).code == 0);
  const auto instances = read_dataset(manifest);

  const std::string traces = dir.file("traces.jsonl");
  {
    std::ofstream out(traces, std::ios::binary);
    for (const TaskInstance& inst : instances) {
      TraceRecord rec{inst.id,
                      make_canonical_trace(solve_instance(inst).graph)};
      out << trace_to_json(rec) << "\n";
    }
  }

  const CliResult scored =
      run({"score", "--manifest", manifest, "--traces", traces});
  CHECK(scored.code == 0);
  std::istringstream lines(scored.out);
  std::string line;
  int n_lines = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++n_lines;
    const nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j.at("iou").get<double>() == 1.0);
    CHECK(j.at("fmt").get<double>() == 1.0);
    CHECK(j.at("composite").get<double>() == doctest::Approx(1.4));
    CHECK(j.at("defects").empty());
  }
  CHECK(n_lines == 2);

  // Custom weights show up in the composite.
  const CliResult reweighted =
      run({"score", "--manifest", manifest, "--traces", traces, "--lambda1",
           "0.5", "--lambda2", "0.25"});
  CHECK(reweighted.code == 0);
  const nlohmann::json first = nlohmann::json::parse(
      reweighted.out.substr(0, reweighted.out.find('\n')));
  CHECK(first.at("composite").get<double>() == doctest::Approx(1.75));

  // A trace for an unknown instance is a data error.
  {
    std::ofstream out(traces, std::ios::binary);
    out << trace_to_json({"missing-instance", "text"}) << "\n";
  }
  CHECK(run({"score", "--manifest", manifest, "--traces", traces}).code == 2);
}

TEST_CASE("render emits structurally sound svg") {
  TempDir dir;
  const std::string manifest = dir.file("m.jsonl");
  REQUIRE(run({"gen", "--task", "roomedit", "--seed", "9", "--count", "1",
               "--out", manifest}).code == 0);
  const TaskInstance inst = read_dataset(manifest).front();

  const std::string svg_path = dir.file("scene.svg");
  CHECK(run({"render", "--manifest", manifest, "--id", inst.id, "--which",
             "target", "--out", svg_path}).code == 0);
  const std::string svg = slurp(svg_path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<rect") != std::string::npos);

  // The --graph route renders a bare scene-graph file.
  const std::string graph_path = dir.file("graph.json");
  spit(graph_path, serialize_scene_graph(inst.target_graph));
  const std::string svg2_path = dir.file("scene2.svg");
  CHECK(
      run({"render", "--graph", graph_path, "--out", svg2_path}).code == 0);
  CHECK(slurp(svg2_path).rfind("<svg", 0) == 0);
}

TEST_CASE("selftest passes in-process") {
  const CliResult st = run({"selftest"});
  CHECK(st.code == 0);
  CHECK(st.out.find("selftest passed") != std::string::npos);
}
