// Copyright 2026 The TensorSynth Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset. Exits non-zero when a required criterion
// fails; criterion 6 is a stretch goal and only reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "tensorsynth/expression.hpp"
#include "tensorsynth/guidance.hpp"
#include "tensorsynth/learning.hpp"
#include "tensorsynth/literal.hpp"
#include "tensorsynth/task_file.hpp"

namespace fs = std::filesystem;
using namespace tsynth;

namespace {

constexpr double kSuiteTimeout = 300;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string bench_path(const std::string& name) { return std::string(TS_SOURCE_DIR) + "/benchmarks/" + name + ".json"; }

struct Guided {
  std::shared_ptr<const OperationRegistry> registry = OperationRegistry::builtin();
  GuidanceModels models = GuidanceModels::load(default_models_dir(), true, true, NlChoice::TfIdf);

  SearchResult run(const TaskSpec& task, const SearchConfig& cfg) const {
    const auto preds = predict_ops(task, models, cfg);
    return search(task, *registry, reweight(registry->weights(), preds), cfg);
  }
};

const Guided& guided() {
  static const Guided g;
  return g;
}

SearchConfig with_timeout(double s) {
  SearchConfig cfg;
  cfg.timeout_s = s;
  return cfg;
}

struct SuiteResult {
  int solved = 0;
  int tasks = 0;
  double total_s = 0;
  std::string per_task;
};

// Suite ablations run the command-line tool in a fresh process per
// configuration; back-to-back runs in one process favour the first run.
SuiteResult run_suite_cli(const std::string& flags) {
  const std::string cmd = std::string(TS_CLI_PATH) + " bench --suite " + TS_SOURCE_DIR + "/benchmarks --timeout " +
                          fmt("%g", kSuiteTimeout) + " --csv - " + flags;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  SuiteResult r;
  char buf[4096];
  bool in_csv = false;
  while (std::fgets(buf, sizeof buf, pipe)) {
    std::string line(buf);
    if (line.rfind("task,solved,", 0) == 0) {
      in_csv = true;
      continue;
    }
    if (!in_csv) continue;
    std::istringstream ss(line);
    std::string task, solved, elapsed;
    std::getline(ss, task, ',');
    std::getline(ss, solved, ',');
    std::getline(ss, elapsed, ',');
    ++r.tasks;
    r.solved += solved == "1";
    r.total_s += std::stod(elapsed);
    r.per_task += " " + task + "=" + (solved == "1" ? elapsed : std::string("unsolved"));
  }
  if (pclose(pipe) != 0 || r.tasks == 0) throw std::runtime_error("bench failed: " + cmd);
  return r;
}

const SuiteResult& suite_default() {
  static const SuiteResult r = run_suite_cli("");
  return r;
}

// Solves a benchmark with the default configuration and checks the first
// solution against the time limit and an extra predicate.
Outcome solve_within(const std::string& name, double limit_s,
                     const std::function<bool(const Solution&, std::string&)>& extra = {}) {
  const TaskFile tf = parse_task_file(bench_path(name));
  const SearchResult res = guided().run(tf.spec, with_timeout(limit_s));
  if (res.solutions.empty())
    return {false, name + " unsolved after " + fmt("%.1f", res.elapsed_s) + " s"};
  const Solution& s = res.solutions.front();
  std::string why;
  const bool ok = s.elapsed_s <= limit_s && (!extra || extra(s, why));
  return {ok, name + " solved in " + fmt("%.2f", s.elapsed_s) + " s with " + s.functional + " (" +
                  std::to_string(operation_count(*s.expression)) + " ops)" + (why.empty() ? "" : "; " + why)};
}

Outcome criterion1() {
  return solve_within("dedup_index", 10, [](const Solution& s, std::string& why) {
    if (operation_count(*s.expression) != 1) {
      why = "not a single op";
      return false;
    }
    // Semantic equality: same results as the reference on fresh inputs.
    std::mt19937_64 rng(1);
    const auto& reg = *OperationRegistry::builtin();
    for (int i = 0; i < 50; ++i) {
      nlohmann::json v = nlohmann::json::array();
      for (std::size_t k = 1 + rng() % 12; k > 0; --k) v.push_back(static_cast<int>(rng() % 6));
      Bindings b{{"in1", Value::input(parse_literal(v), "in1", 8)}};
      const auto got = evaluate_expression(*s.expression, b);
      const auto want = evaluate_text("unique_with_counts_index(in1)", reg, b);
      if (!got || !want || !equal_exact(*got.value(), *want.value())) {
        why = "differs from unique_with_counts_index on a fresh input";
        return false;
      }
    }
    why = "matches unique_with_counts_index on 50 fresh inputs";
    return true;
  });
}

Outcome criterion2() {
  return solve_within("reorder_segments", 30, [](const Solution& s, std::string& why) {
    const bool ok = s.functional == "gather_2(in1, argsort_stable(in2, 0))";
    if (!ok) why = "unexpected first solution";
    return ok;
  });
}

auto at_most_ops(int n) {
  return [n](const Solution& s, std::string& why) {
    const bool ok = operation_count(*s.expression) <= n;
    if (!ok) why = "more than " + std::to_string(n) + " ops";
    return ok;
  };
}

Outcome criterion7() {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto c = oracle::compare_with_search(oracle::random_mini_input(seed));
    ok = ok && c.ok();
    detail += "seed " + std::to_string(seed) + ": " + std::to_string(c.oracle_values) + " values, " +
              std::to_string(c.targets) + " targets" + (c.ok() ? "" : " MISMATCH " + c.first_problem) + "; ";
  }
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ok && t < 60, detail + "runtime " + fmt("%.1f", t) + " s"};
}

Outcome criterion8() {
  const TaskFile tf = parse_task_file(bench_path("reorder_segments"));
  SearchConfig cfg = with_timeout(kSuiteTimeout);
  const auto with = guided().run(tf.spec, cfg);
  cfg.disable_filters = true;
  const auto without = guided().run(tf.spec, cfg);
  const double a = static_cast<double>(with.stats.executions), b = static_cast<double>(without.stats.executions);
  return {a > 0 && b >= 2 * a, "executions " + std::to_string(with.stats.executions) + " with filters, " +
                                   std::to_string(without.stats.executions) + " without (" + fmt("%.1fx", b / a) + ")"};
}

Outcome criterion9() {
  const auto& def = suite_default();
  const auto eq = run_suite_cli("--equal-weights");
  return {eq.solved <= def.solved && eq.total_s >= def.total_s,
          "default " + std::to_string(def.solved) + "/" + std::to_string(def.tasks) + " in " + fmt("%.1f", def.total_s) +
              " s; equal weights " + std::to_string(eq.solved) + "/" + std::to_string(eq.tasks) + " in " +
              fmt("%.1f", eq.total_s) + " s; default:" + def.per_task + "; equal weights:" + eq.per_task};
}

Outcome criterion10() {
  WeightTable base;
  base.set("a", 36);
  base.set("b", 1);
  const PrioritizedOps m1{ModelSource::TensorModel, {"a", "b"}, 0.75};
  const PrioritizedOps m2{ModelSource::TfIdf, {"a"}, 0.75};
  const auto one = reweight(base, {m1});
  const auto two = reweight(base, {m1, m2});
  bool ok = one.at("a") == 27 && two.at("a") == 20 && two.at("b") == 1;
  std::mt19937_64 rng(10);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    WeightTable w;
    for (int i = 0; i < 20; ++i) w.set("op" + std::to_string(i), 1 + static_cast<int>(rng() % 80));
    std::vector<PrioritizedOps> preds;
    for (int m = 0; m < 3; ++m) {
      PrioritizedOps p{static_cast<ModelSource>(m), {}, 0.75};
      for (int i = 0; i < 20; ++i)
        if (rng() % 2) p.ops.insert("op" + std::to_string(i));
      preds.push_back(p);
    }
    const auto r = reweight(w, preds);
    for (int i = 0; i < 20; ++i) {
      const std::string n = "op" + std::to_string(i);
      if (r.at(n) < 1 || r.at(n) > w.at(n)) ++violations;
    }
  }
  ok = ok && violations == 0;
  return {ok, "36->" + std::to_string(one.at("a")) + ", 36->" + std::to_string(two.at("a")) + ", 1->" +
                  std::to_string(two.at("b")) + "; bound violations over 1000 random tables: " + std::to_string(violations)};
}

Outcome criterion11() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 1e-6;
  double worst = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t n = 2 + rng() % 12;
    std::vector<double> p(n), y(n), z(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = 0.02 + 0.96 * u(rng);
      y[j] = static_cast<double>(rng() % 2);
      z[j] = (u(rng) - 0.5) * 8;
      w[j] = y[j] ? 1 + 9 * u(rng) : 1;
    }
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3}); };
    for (double beta : {1.0, 2.0}) {
      const auto r = fbeta_loss(p, y, beta, w);
      for (std::size_t j = 0; j < n; ++j) {
        auto hi = p, lo = p;
        hi[j] += h;
        lo[j] -= h;
        const double num = (fbeta_loss(hi, y, beta, w).loss - fbeta_loss(lo, y, beta, w).loss) / (2 * h);
        worst = std::max(worst, rel(r.grad[j], num));
      }
    }
    const auto r = cross_entropy_loss(z, y, w);
    for (std::size_t j = 0; j < n; ++j) {
      auto hi = z, lo = z;
      hi[j] += h;
      lo[j] -= h;
      const double num = (cross_entropy_loss(hi, y, w).loss - cross_entropy_loss(lo, y, w).loss) / (2 * h);
      worst = std::max(worst, rel(r.grad[j], num));
    }
  }
  std::ostringstream s;
  s << "worst relative gradient error over 100 instances (F1, F2, CE): " << worst;
  return {worst <= 1e-4, s.str()};
}

Outcome criterion12() {
  const std::map<std::string, std::size_t> counts = {{"a", 100}, {"b", 10}, {"c", 1}};
  const double wmax = example_weight("c", Weighting::WMax, counts);
  const double wmean = example_weight("c", Weighting::WMean, counts);
  const double clip = example_weight("b", Weighting::WMax, {{"a", 100000000}, {"b", 1}});
  return {wmax == 100 && wmean == 37 && clip == 10000,
          "w_max " + fmt("%g", wmax) + ", w_mean " + fmt("%g", wmean) + ", clipped " + fmt("%g", clip)};
}

Outcome criterion13() {
  const auto reg = OperationRegistry::builtin();
  DatagenConfig dg;
  dg.seed = 1;
  dg.runs = 70;
  dg.max_explored = 50000;
  dg.per_run_timeout_s = 120;
  DatagenStats st;
  const auto data = generate_dataset(*reg, reg->weights(), dg, &st);
  std::size_t sound = 0;
  for (const auto& ex : data) {
    Bindings b;
    for (std::size_t i = 0; i < ex.inputs.size(); ++i) {
      const std::string name = "in" + std::to_string(i + 1);
      b[name] = Value::input(ex.inputs[i], name, 8);
    }
    const auto back = evaluate_text(ex.program, *reg, b);
    if (back && equal_exact(back.value()->payload(), ex.output) && ex.ops_used.size() >= 2) ++sound;
  }
  std::vector<std::string> names;
  for (const auto& op : reg->ops()) names.push_back(op.name);
  TrainConfig tc;
  tc.loss = LossKind::CrossEntropy;
  tc.epochs = 3;
  TrainReport rep;
  train_tensor_model(data, names, tc, &rep);
  const double eval = rep.epochs.back().eval_loss;
  const bool ok = data.size() >= 20000 && sound == data.size() && rep.epochs.size() == 4 && eval < rep.zero_eval_loss;
  return {ok, std::to_string(data.size()) + " examples (" + std::to_string(st.runs_time_capped) +
                  " runs time-capped), sound " + std::to_string(sound) + "/" + std::to_string(data.size()) +
                  "; eval loss " + fmt("%.5f", eval) + " vs zero model " + fmt("%.5f", rep.zero_eval_loss)};
}

Outcome criterion14() {
  const auto& with = suite_default();
  const auto base = run_suite_cli("--no-models");
  const double ratio = with.total_s / base.total_s;
  return {with.solved >= base.solved && ratio >= 0.4 && ratio <= 1.2,
          "models " + std::to_string(with.solved) + "/" + std::to_string(with.tasks) + " in " + fmt("%.1f", with.total_s) +
              " s; baseline " + std::to_string(base.solved) + "/" + std::to_string(base.tasks) + " in " +
              fmt("%.1f", base.total_s) + " s; ratio " + fmt("%.2f", ratio) + "; baseline:" + base.per_task};
}

Outcome criterion15() {
  const auto r = tfidf_rank("sort a tensor and return indices", *guided().models.tfidf);
  std::string ops;
  for (const auto& o : r.ops) ops += (ops.empty() ? "" : " ") + o;
  return {r.ops.count("argsort_stable") == 1 && r.ops.size() <= 5, "top-5: " + ops};
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion16() {
  const TaskFile tf = parse_task_file(bench_path("lengths_to_ids"));
  auto solve_report = [&] {
    SearchConfig cfg = with_timeout(kSuiteTimeout);
    cfg.max_solutions = 3;
    cfg.rng_seed = 5;
    const auto res = guided().run(tf.spec, cfg);
    std::string out;
    for (const auto& s : res.solutions) out += std::to_string(s.weight) + " " + s.functional + " " + s.pythonic + "\n";
    const auto& st = res.stats;
    out += std::to_string(st.values_explored) + " " + std::to_string(st.executions) + " " +
           std::to_string(st.dedup_hits) + " " + std::to_string(st.max_weight_reached);
    return out;
  };
  const bool solve_same = solve_report() == solve_report();

  const auto reg = OperationRegistry::builtin();
  DatagenConfig dg;
  dg.seed = 7;
  dg.runs = 3;
  dg.max_explored = 5000;
  const auto dir = fs::temp_directory_path();
  const auto p1 = (dir / "tsynth_accept_a.jsonl").string(), p2 = (dir / "tsynth_accept_b.jsonl").string();
  save_dataset(generate_dataset(*reg, reg->weights(), dg), p1);
  save_dataset(generate_dataset(*reg, reg->weights(), dg), p2);
  const std::string a = file_bytes(p1), b = file_bytes(p2);
  fs::remove(p1);
  fs::remove(p2);
  const bool data_same = !a.empty() && a == b;
  return {solve_same && data_same, std::string("solve ") + (solve_same ? "identical" : "DIFFERS") + ", datagen " +
                                       (data_same ? "identical (" + std::to_string(a.size()) + " bytes)" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  struct Criterion {
    int id;
    const char* name;
    bool stretch;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "unique index task within 10 s", false, criterion1},
      {2, "segment reorder task, gather/argsort first, within 30 s", false, criterion2},
      {3, "lengths to ids within 60 s, at most 4 ops", false,
       [] { return solve_within("lengths_to_ids", 60, at_most_ops(4)); }},
      {4, "pairs from counts within 120 s", false, [] { return solve_within("pairs_from_counts", 120); }},
      {5, "linear interpolation within 600 s, at most 4 ops", false,
       [] { return solve_within("linear_interpolation", 600, at_most_ops(4)); }},
      {6, "find indices within 900 s (stretch)", true, [] { return solve_within("find_indices", 900); }},
      {7, "brute-force oracle equivalence", false, criterion7},
      {8, "filter ablation doubles executions", false, criterion8},
      {9, "equal-weights ablation", false, criterion9},
      {10, "reweighting arithmetic", false, criterion10},
      {11, "loss gradients vs finite differences", false, criterion11},
      {12, "example weighting", false, criterion12},
      {13, "learning end to end", false, criterion13},
      {14, "model-guided suite time", false, criterion14},
      {15, "description sanity", false, criterion15},
      {16, "determinism", false, criterion16},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const char* verdict = o.pass ? "PASS" : c.stretch ? "FAIL (stretch, known gap)" : "FAIL";
    std::printf("criterion %2d: %s  %s: %s\n", c.id, verdict, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !c.stretch) ++failed;
  }
  std::printf("acceptance: %d required criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
