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


// tensorsynth: solve, bench, datagen, train and fitnl subcommands.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tensorsynth/guidance.hpp"
#include "tensorsynth/learning.hpp"
#include "tensorsynth/task_file.hpp"

namespace fs = std::filesystem;
using namespace tsynth;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitExhausted = 3;

// Timings print at 0.1 s resolution.
std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", s);
  return buf;
}

struct SearchFlags {
  double timeout = 300;
  int max_solutions = 1;
  int max_weight = 200;
  bool no_filters = false;
  bool equal_weights = false;
  bool no_tensor_model = false;
  bool no_nl_model = false;
  bool no_models = false;
  std::string nl_model = "tfidf";
  std::string weights_file;
  std::string models_dir;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--timeout", timeout, "Time budget in seconds")->check(CLI::PositiveNumber);
    app.add_option("--max-weight", max_weight, "Largest expression weight to enumerate")->check(CLI::PositiveNumber);
    app.add_flag("--no-filters", no_filters, "Disable argument and combination filters");
    app.add_flag("--equal-weights", equal_weights, "Give every operation and initial value weight 1");
    app.add_flag("--no-tensor-model", no_tensor_model, "Do not use the tensor-features model");
    app.add_flag("--no-nl-model", no_nl_model, "Do not use the description model");
    app.add_flag("--no-models", no_models, "Disable all guidance models");
    app.add_option("--nl-model", nl_model, "Description model: tfidf, nb or both")
        ->check(CLI::IsMember({"tfidf", "nb", "both"}));
    app.add_option("--weights", weights_file, "Operation weight table")->check(CLI::ExistingFile);
    app.add_option("--models", models_dir, "Model directory (default $TENSORSYNTH_MODELS or shipped models)");
    app.add_option("--seed", seed, "Random seed");
  }

  SearchConfig config() const {
    SearchConfig c;
    c.timeout_s = timeout;
    c.max_solutions = max_solutions;
    c.max_weight = max_weight;
    c.disable_filters = no_filters;
    c.equal_weights = equal_weights;
    c.disable_tensor_model = no_tensor_model || no_models;
    c.disable_nl_model = no_nl_model || no_models;
    c.rng_seed = seed;
    return c;
  }
};

struct Context {
  std::shared_ptr<const OperationRegistry> registry;
  WeightTable base;
  GuidanceModels models;
};

Context make_context(const SearchFlags& f, const SearchConfig& cfg) {
  Context ctx;
  if (f.weights_file.empty()) {
    ctx.registry = OperationRegistry::builtin();
  } else {
    ctx.registry = OperationRegistry::build(WeightTable::load(f.weights_file));
  }
  ctx.base = ctx.registry->weights();
  NlChoice choice = NlChoice::TfIdf;
  parse_nl_choice(f.nl_model, choice);
  ctx.models = GuidanceModels::load(f.models_dir.empty() ? default_models_dir() : f.models_dir,
                                    !cfg.disable_tensor_model, !cfg.disable_nl_model, choice);
  return ctx;
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : " ") + x;
  return out;
}

SearchResult guided_search(const TaskSpec& task, const Context& ctx, const SearchConfig& cfg,
                           std::vector<PrioritizedOps>* preds, const SolutionCallback& cb = {}) {
  std::vector<PrioritizedOps> p = predict_ops(task, ctx.models, cfg);
  const WeightTable w = reweight(ctx.base, p);
  if (preds) *preds = std::move(p);
  return search(task, *ctx.registry, w, cfg, cb);
}

void print_stats(const SearchStats& s) {
  std::cout << "stats:\n"
            << "  values_explored: " << s.values_explored << "\n"
            << "  candidates_before_arg_filters: " << s.candidates_before_arg_filters << "\n"
            << "  after_arg_filters: " << s.after_arg_filters << "\n"
            << "  after_combination_filters: " << s.after_combination_filters << "\n"
            << "  executions: " << s.executions << "\n"
            << "  exec_errors: " << s.exec_errors << "\n"
            << "  dedup_hits: " << s.dedup_hits << "\n"
            << "  max_weight_reached: " << s.max_weight_reached << "\n";
}

// solve -----------------------------------------------------------------------------

int cmd_solve(const std::string& task_path, const SearchFlags& flags, const std::string& render_mode, bool stats) {
  const TaskFile tf = parse_task_file(task_path);
  const SearchConfig cfg = flags.config();
  const Context ctx = make_context(flags, cfg);
  std::cout << "task: " << tf.meta.name << "\n";
  int count = 0;
  auto on_solution = [&](const Solution& s) {
    std::cout << "solution " << ++count << ":\n"
              << "  weight: " << s.weight << "\n"
              << "  elapsed_s: " << seconds(s.elapsed_s) << "\n";
    if (render_mode != "pythonic") std::cout << "  functional: " << s.functional << "\n";
    if (render_mode != "functional") std::cout << "  pythonic: " << s.pythonic << "\n";
    std::cout.flush();
  };
  std::vector<PrioritizedOps> p = predict_ops(tf.spec, ctx.models, cfg);
  for (const auto& x : p) std::cout << "prioritized " << model_source_name(x.source) << ": " << join(x.ops) << "\n";
  const WeightTable w = reweight(ctx.base, p);
  const SearchResult res = search(tf.spec, *ctx.registry, w, cfg, on_solution);
  const char* status = res.status == SearchStatus::Solved    ? "solved"
                       : res.status == SearchStatus::Timeout ? "timeout"
                                                             : "exhausted";
  std::cout << "status: " << status << "\n"
            << "total_elapsed_s: " << seconds(res.elapsed_s) << "\n";
  if (stats) print_stats(res.stats);
  switch (res.status) {
    case SearchStatus::Solved: return kExitSolved;
    case SearchStatus::Timeout: return kExitTimeout;
    case SearchStatus::Exhausted: return kExitExhausted;
  }
  return kExitError;
}

// bench -----------------------------------------------------------------------------

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

int cmd_bench(const std::string& suite, const SearchFlags& flags, bool timeout_given, const std::string& csv_path) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(suite))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  if (files.empty()) throw std::runtime_error("no task files in " + suite);

  struct Row {
    std::string task;
    bool solved = false;
    double elapsed = 0;
    int weight = 0;
    std::string solution;
  };
  std::vector<Row> rows;
  const SearchConfig base_cfg = flags.config();
  const Context ctx = make_context(flags, base_cfg);
  for (const auto& path : files) {
    Row row;
    row.task = path.stem().string();
    try {
      const TaskFile tf = parse_task_file(path.string());
      row.task = tf.meta.name;
      SearchConfig cfg = base_cfg;
      if (!timeout_given && tf.meta.time_budget_s > 0) cfg.timeout_s = tf.meta.time_budget_s;
      const SearchResult res = guided_search(tf.spec, ctx, cfg, nullptr);
      row.elapsed = res.elapsed_s;
      if (!res.solutions.empty()) {
        row.solved = true;
        row.elapsed = res.solutions.front().elapsed_s;
        row.weight = res.solutions.front().weight;
        row.solution = res.solutions.front().functional;
      }
    } catch (const std::exception& e) {
      std::cerr << path.string() << ": " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.task < b.task; });

  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.task.size());
  std::vector<double> solved_times;
  double total = 0;
  std::printf("%-*s  %-6s  %9s  %6s  %s\n", static_cast<int>(width), "task", "solved", "elapsed_s", "weight", "solution");
  for (const auto& r : rows) {
    std::printf("%-*s  %-6s  %9s  %6s  %s\n", static_cast<int>(width), r.task.c_str(), r.solved ? "yes" : "no",
                seconds(r.elapsed).c_str(), r.solved ? std::to_string(r.weight).c_str() : "-", r.solution.c_str());
    total += r.elapsed;
    if (r.solved) solved_times.push_back(r.elapsed);
  }
  std::sort(solved_times.begin(), solved_times.end());
  double median = 0;
  if (!solved_times.empty()) {
    const std::size_t n = solved_times.size();
    median = n % 2 ? solved_times[n / 2] : (solved_times[n / 2 - 1] + solved_times[n / 2]) / 2;
  }
  std::printf("summary: solved %zu/%zu, median_solved_s %s, total_s %s\n", solved_times.size(), rows.size(),
              seconds(median).c_str(), seconds(total).c_str());

  if (!csv_path.empty()) {
    std::string csv = "task,solved,elapsed_s,weight,solution\n";
    for (const auto& r : rows)
      csv += csv_field(r.task) + "," + (r.solved ? "1" : "0") + "," + seconds(r.elapsed) + "," +
             (r.solved ? std::to_string(r.weight) : "") + "," + csv_field(r.solution) + "\n";
    if (csv_path == "-") {
      std::cout << csv;
    } else {
      std::ofstream out(csv_path);
      if (!out) throw std::runtime_error("cannot write " + csv_path);
      out << csv;
    }
  }
  return 0;
}

// datagen / train / fitnl -------------------------------------------------------------

int cmd_datagen(const DatagenConfig& cfg, const std::string& out) {
  const auto reg = OperationRegistry::builtin();
  DatagenStats st;
  const auto data = generate_dataset(*reg, reg->weights(), cfg, &st);
  save_dataset(data, out);
  std::cout << "runs: " << st.runs << "\n"
            << "runs_time_capped: " << st.runs_time_capped << "\n"
            << "harvested: " << st.harvested << "\n"
            << "sampled: " << st.sampled << "\n"
            << "rejected_filter: " << st.rejected_filter << "\n"
            << "rejected_unsound: " << st.rejected_unsound << "\n"
            << "examples: " << st.emitted << "\n"
            << "wrote: " << out << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const TrainConfig& cfg, const std::string& out, const std::string& log) {
  const auto reg = OperationRegistry::builtin();
  std::vector<std::string> names;
  for (const auto& op : reg->ops()) names.push_back(op.name);
  const auto data = load_dataset(data_path);
  TrainReport rep;
  const TensorModelParams params = train_tensor_model(data, names, cfg, &rep);
  params.save(out);
  if (!log.empty()) {
    std::ofstream l(log);
    if (!l) throw std::runtime_error("cannot write " + log);
    l << rep.csv();
  }
  std::cout << "train_examples: " << rep.train_examples << "\n"
            << "eval_examples: " << rep.eval_examples << "\n"
            << "zero_model_eval_loss: " << rep.zero_eval_loss << "\n"
            << rep.csv() << "wrote: " << out << "\n";
  return 0;
}

int cmd_fitnl(const std::string& docs_path, const std::string& corpus_path, const std::string& out_dir) {
  const auto reg = OperationRegistry::builtin();
  std::vector<std::string> names;
  for (const auto& op : reg->ops()) names.push_back(op.name);
  const DocstringTable docs = docs_path.empty() ? DocstringTable::builtin() : DocstringTable::load(docs_path);
  std::vector<CorpusRecord> corpus;
  if (!corpus_path.empty()) corpus = load_corpus(corpus_path, std::set<std::string>(names.begin(), names.end()));
  const auto [tfidf, nb] = fit_nl_models(docs, names, corpus);
  fs::create_directories(out_dir);
  const std::string tp = (fs::path(out_dir) / GuidanceModels::kTfIdfFile).string();
  const std::string np = (fs::path(out_dir) / GuidanceModels::kNbFile).string();
  tfidf.save(tp);
  nb.save(np);
  std::cout << "vocabulary: " << tfidf.terms.vocab.size() << "\n"
            << "corpus_records: " << corpus.size() << "\n"
            << "wrote: " << tp << "\n"
            << "wrote: " << np << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor program synthesis from input/output examples"};
  app.require_subcommand(1);

  SearchFlags solve_flags;
  std::string task_path, render_mode = "both";
  bool stats = false;
  auto* solve = app.add_subcommand("solve", "Synthesize a program for one task file");
  solve->add_option("--task", task_path, "Task file")->required()->check(CLI::ExistingFile);
  solve_flags.add_to(*solve);
  solve->add_option("--max-solutions", solve_flags.max_solutions, "Number of solutions to report")
      ->check(CLI::PositiveNumber);
  solve->add_option("--render", render_mode, "pythonic, functional or both")
      ->check(CLI::IsMember({"pythonic", "functional", "both"}));
  solve->add_flag("--stats", stats, "Print search statistics");

  SearchFlags bench_flags;
  std::string suite = std::string(TS_SOURCE_DIR) + "/benchmarks", csv_path;
  auto* bench = app.add_subcommand("bench", "Run every task file in a directory");
  bench->add_option("--suite", suite, "Directory of task files")->check(CLI::ExistingDirectory);
  bench_flags.add_to(*bench);
  bench->add_option("--csv", csv_path, "Write the CSV report here ('-' for stdout)");

  DatagenConfig dg;
  std::string dg_out = "dataset.jsonl";
  auto* datagen = app.add_subcommand("datagen", "Generate a synthetic training dataset");
  datagen->add_option("--seed", dg.seed, "Random seed");
  datagen->add_option("--runs", dg.runs, "Number of harvest searches")->check(CLI::PositiveNumber);
  datagen->add_option("--max-explored", dg.max_explored, "Values explored per run")->check(CLI::PositiveNumber);
  datagen->add_option("--run-timeout", dg.per_run_timeout_s, "Safety time cap per run, seconds")
      ->check(CLI::PositiveNumber);
  datagen->add_option("--cap", dg.per_run_cap, "Values sampled per run")->check(CLI::PositiveNumber);
  datagen->add_option("--out", dg_out, "Output JSON Lines file");

  TrainConfig tc;
  std::string train_data, train_out = "tensor_model.json", train_log, loss = "ce", weighting = "none";
  auto* train = app.add_subcommand("train", "Train the tensor-features model");
  train->add_option("--data", train_data, "Dataset JSON Lines file")->required()->check(CLI::ExistingFile);
  train->add_option("--loss", loss, "ce, f1 or f2")->check(CLI::IsMember({"ce", "f1", "f2"}));
  train->add_option("--weighting", weighting, "none, wmax or wmean")->check(CLI::IsMember({"none", "wmax", "wmean"}));
  train->add_option("--epochs", tc.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--lr", tc.learning_rate, "Step size")->check(CLI::PositiveNumber);
  train->add_option("--batch", tc.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--hidden", tc.hidden_dim, "Hidden units (0 = linear)");
  train->add_option("--seed", tc.rng_seed, "Random seed");
  train->add_option("--out", train_out, "Output model file");
  train->add_option("--log", train_log, "CSV log of per-epoch losses");

  std::string docs_path, corpus_path, nl_out = "models";
  auto* fitnl = app.add_subcommand("fitnl", "Fit the description models");
  fitnl->add_option("--docs", docs_path, "Docstring file (default: shipped)")->check(CLI::ExistingFile);
  fitnl->add_option("--corpus", corpus_path, "Optional JSON Lines corpus")->check(CLI::ExistingFile);
  fitnl->add_option("--out", nl_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*solve) return cmd_solve(task_path, solve_flags, render_mode, stats);
    if (*bench) return cmd_bench(suite, bench_flags, bench->count("--timeout") > 0, csv_path);
    if (*datagen) return cmd_datagen(dg, dg_out);
    if (*train) {
      parse_loss_kind(loss, tc.loss);
      parse_weighting(weighting, tc.weighting);
      return cmd_train(train_data, tc, train_out, train_log);
    }
    if (*fitnl) return cmd_fitnl(docs_path, corpus_path, nl_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
