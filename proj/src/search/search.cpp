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


#include "tensorsynth/search.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>

namespace tsynth {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::size_t payload_bytes(const Payload& p) {
  if (const auto* t = std::get_if<Tensor>(&p)) {
    std::size_t elem = t->dtype() == DType::I64 ? 8 : t->dtype() == DType::Bool ? 1 : 4;
    return static_cast<std::size_t>(t->size()) * elem;
  }
  if (const auto* tup = std::get_if<Tuple>(&p)) return tup->items.size() * 24;
  return 0;
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return s != "True" && s != "False" && s != "tensor";
}

}  // namespace

// Tasks ------------------------------------------------------------------------------

void validate_task(const TaskSpec& task) {
  if (task.examples.empty()) throw TaskError("task has no examples");
  if (task.input_names.empty() || task.input_names.size() > 3) throw TaskError("a task needs 1 to 3 inputs");
  std::set<std::string> names;
  for (const auto& n : task.input_names) {
    if (!valid_identifier(n)) throw TaskError("invalid input name '" + n + "'");
    if (!names.insert(n).second) throw TaskError("duplicate input name '" + n + "'");
  }
  for (std::size_t i = 0; i < task.examples.size(); ++i) {
    const auto& ex = task.examples[i];
    const std::string where = "example " + std::to_string(i + 1);
    if (ex.inputs.size() != task.input_names.size()) throw TaskError(where + ": wrong number of inputs");
    for (std::size_t j = 0; j < ex.inputs.size(); ++j)
      if (!within_limits(ex.inputs[j])) throw TaskError(where + ": input " + task.input_names[j] + " exceeds size limits");
    if (!within_limits(ex.output)) throw TaskError(where + ": output exceeds size limits");
  }
  for (const auto& c : task.constants)
    if (!within_limits(c)) throw TaskError("constant exceeds size limits");
}

// Explored set -------------------------------------------------------------------------

Fingerprint super_fingerprint(const std::vector<ValuePtr>& values) {
  Fingerprint fp = values[0]->fingerprint();
  for (std::size_t i = 1; i < values.size(); ++i) fp = combine_fingerprints(fp, values[i]->fingerprint());
  return fp;
}

const ExploredEntry* ExploredSet::find(const std::vector<ValuePtr>& values, Fingerprint fp) const {
  auto [lo, hi] = seen_.equal_range(fp);
  for (auto it = lo; it != hi; ++it) {
    const ExploredEntry* e = it->second;
    bool same = e->values.size() == values.size();
    for (std::size_t i = 0; same && i < values.size(); ++i) same = equal_exact(*e->values[i], *values[i]);
    if (same) return e;
  }
  return nullptr;
}

const ExploredEntry* ExploredSet::insert(ExploredEntry e) {
  if (find(e.values, e.fingerprint)) return nullptr;
  return store(std::move(e));
}

const ExploredEntry* ExploredSet::insert_unchecked(ExploredEntry e) { return store(std::move(e)); }

const ExploredEntry* ExploredSet::store(ExploredEntry e) {
  const int w = e.weight;
  for (const auto& v : e.values) bytes_ += 192 + payload_bytes(v->payload());
  entries_.push_back(std::move(e));
  const ExploredEntry* p = &entries_.back();
  seen_.emplace(p->fingerprint, p);
  if (static_cast<std::size_t>(w) >= by_weight_.size()) by_weight_.resize(static_cast<std::size_t>(w) + 1);
  auto& bucket = by_weight_[static_cast<std::size_t>(w)];
  if (bucket.empty()) {
    weights_.insert(std::lower_bound(weights_.begin(), weights_.end(), w), w);
  }
  bucket.push_back(p);
  // Keep any cache of this weight exact. The search never asks for the
  // weight it is filling, so this only matters for direct users.
  for (auto& [key, list] : filter_cache_) {
    if (static_cast<int>(key & 0xffffffffu) != w) continue;
    const auto fid = static_cast<FilterId>(key >> 32);
    const ArgFilterFn fn = arg_filter_table()[static_cast<std::size_t>(fid)].fn;
    bool pass = true;
    for (const auto& v : p->values) {
      ++predicate_evaluations_;
      pass = pass && fn(*v);
    }
    if (pass) list.push_back(p);
  }
  return p;
}

const std::vector<const ExploredEntry*>& ExploredSet::at_weight(int weight) const {
  static const std::vector<const ExploredEntry*> kEmpty;
  if (weight < 0 || static_cast<std::size_t>(weight) >= by_weight_.size()) return kEmpty;
  return by_weight_[static_cast<std::size_t>(weight)];
}

const std::vector<const ExploredEntry*>& ExploredSet::filtered(FilterId filter, int weight) {
  if (disable_filters_ || filter == kAnyFilter) return at_weight(weight);
  const std::uint64_t key = (static_cast<std::uint64_t>(filter) << 32) | static_cast<std::uint32_t>(weight);
  auto it = filter_cache_.find(key);
  if (it != filter_cache_.end()) return it->second;
  std::vector<const ExploredEntry*> out;
  const ArgFilterFn fn = arg_filter_table()[static_cast<std::size_t>(filter)].fn;
  for (const ExploredEntry* e : at_weight(weight)) {
    bool pass = true;
    for (const auto& v : e->values) {
      ++predicate_evaluations_;
      if (!fn(*v)) {
        pass = false;
        break;
      }
    }
    if (pass) out.push_back(e);
  }
  return filter_cache_.emplace(key, std::move(out)).first->second;
}

std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  if (parts < 1 || total < parts) return out;
  std::vector<int> cur(static_cast<std::size_t>(parts));
  auto rec = [&](auto& self, int pos, int rem) -> void {
    if (pos == parts - 1) {
      cur[static_cast<std::size_t>(pos)] = rem;
      out.push_back(cur);
      return;
    }
    for (int w = 1; w <= rem - (parts - pos - 1); ++w) {
      cur[static_cast<std::size_t>(pos)] = w;
      self(self, pos + 1, rem - w);
    }
  };
  rec(rec, 0, total);
  return out;
}

std::vector<int> effective_op_weights(const OperationRegistry& registry, const WeightTable& weights,
                                      const SearchConfig& config) {
  std::vector<int> out;
  out.reserve(registry.size());
  for (const auto& op : registry.ops()) {
    if (config.equal_weights) {
      out.push_back(1);
    } else {
      out.push_back(weights.contains(op.name) ? weights.at(op.name) : op.base_weight);
    }
  }
  return out;
}

// Initial values -------------------------------------------------------------------------

void collect_initial_values(const TaskSpec& task, const SearchConfig& config, ExploredSet& out) {
  const OriginWeights& ow = config.origin_weights;
  auto weight_of = [&](int w) { return config.equal_weights ? 1 : w; };
  const std::size_t n_examples = task.examples.size();

  for (std::size_t i = 0; i < task.input_names.size(); ++i) {
    ExploredEntry e;
    for (const auto& ex : task.examples)
      e.values.push_back(Value::input(ex.inputs[i], task.input_names[i], weight_of(ow.user_input)));
    e.fingerprint = super_fingerprint(e.values);
    e.input_mask = 1u << i;
    e.weight = weight_of(ow.user_input);
    out.insert_unchecked(std::move(e));
  }

  struct Candidate {
    Payload payload;
    Origin origin;
    int weight;
  };
  std::vector<Candidate> cands;
  for (const auto& c : task.constants) cands.push_back({c, {OriginKind::UserConstant, ""}, ow.user_constant});
  auto heuristic = [&](Payload p, const char* kind, int w) {
    cands.push_back({std::move(p), {OriginKind::HeuristicConstant, kind}, w});
  };
  heuristic(PrimitiveInt{0}, "always", ow.always);
  heuristic(PrimitiveInt{1}, "always", ow.always);
  heuristic(PrimitiveInt{-1}, "always", ow.always);
  heuristic(PrimitiveBool{true}, "always", ow.always);
  heuristic(PrimitiveBool{false}, "always", ow.always);
  for (DType dt : {DType::I32, DType::I64, DType::F32, DType::Bool}) heuristic(DTypeLiteral{dt}, "always", ow.always);

  int max_rank = 0;
  for (const auto& ex : task.examples)
    for (const auto& in : ex.inputs)
      if (const auto* t = std::get_if<Tensor>(&in)) max_rank = std::max(max_rank, t->rank());
  for (int a = 0; a < max_rank; ++a) heuristic(PrimitiveInt{a}, "axis", ow.axis);

  auto add_dims = [&](const Payload& p) {
    if (const auto* t = std::get_if<Tensor>(&p))
      for (int d = 0; d < t->rank(); ++d) heuristic(PrimitiveInt{t->shape()[d]}, "dim", ow.dimension);
  };
  for (const auto& ex : task.examples) {
    for (const auto& in : ex.inputs) add_dims(in);
    add_dims(ex.output);
  }
  for (const auto& ex : task.examples) {
    const auto* t = std::get_if<Tensor>(&ex.output);
    if (!t || t->rank() == 0) continue;
    Tuple tup;
    for (int d = 0; d < t->rank(); ++d)
      tup.items.push_back(Value::leaf(PrimitiveInt{t->shape()[d]}, {OriginKind::HeuristicConstant, "output_shape"}, 1));
    heuristic(std::move(tup), "output_shape", ow.output_shape);
  }

  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.weight < b.weight; });
  for (auto& c : cands) {
    const int w = weight_of(c.weight);
    ValuePtr v = Value::leaf(std::move(c.payload), std::move(c.origin), w);
    ExploredEntry e;
    e.values.assign(n_examples, v);
    e.fingerprint = super_fingerprint(e.values);
    e.weight = w;
    out.insert(std::move(e));
  }
}

// Opportunistic cast -----------------------------------------------------------------------

std::optional<ValuePtr> try_cast_match(const ValuePtr& v, const ValuePtr& dtype_leaf, const Payload& target,
                                       const OperationSpec& cast_op, int cast_weight, const ToleranceConfig& tol) {
  const Tensor* t = v->tensor();
  const auto* goal = std::get_if<Tensor>(&target);
  if (!t || !goal || t->dtype() == goal->dtype() || !(t->shape() == goal->shape())) return std::nullopt;
  const ValuePtr args[2] = {v, dtype_leaf};
  Expected<ValuePtr> r = apply_operation(cast_op, args, cast_weight);
  if (!r || !equal_output(r.value()->payload(), target, tol)) return std::nullopt;
  return r.take();
}

// Search ------------------------------------------------------------------------------------

namespace {

class Searcher {
 public:
  Searcher(const TaskSpec& task, const OperationRegistry& registry, const WeightTable& weights,
           const SearchConfig& config, const SolutionCallback& cb)
      : task_(task),
        registry_(registry),
        config_(config),
        cb_(cb),
        explored_(config.disable_filters),
        op_weights_(effective_op_weights(registry, weights, config)),
        n_examples_(task.examples.size()),
        all_inputs_((1u << task.input_names.size()) - 1) {}

  SearchResult run() {
    start_ = Clock::now();
    deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config_.timeout_s));
    collect_initial_values(task_, config_, explored_);
    stats_.values_explored = explored_.size();
    if (!config_.harvest) prepare_cast();

    int max_arity = 1;
    int max_op_weight = 1;
    for (std::size_t i = 0; i < registry_.size(); ++i) {
      max_arity = std::max(max_arity, registry_[i].arity);
      max_op_weight = std::max(max_op_weight, op_weights_[i]);
    }

    SearchStatus status = SearchStatus::Exhausted;
    for (int W = 1; W <= config_.max_weight && !stop_; ++W) {
      stats_.max_weight_reached = W;
      flush_pending(W);
      if (stop_) break;
      if (!config_.harvest) check_leaves(W);
      if (stop_) break;
      // Nothing of weight W can be built when even max_arity copies of the
      // heaviest stored value fall short.
      if (W > max_op_weight + max_arity * explored_.max_weight()) break;
      level_weights_.clear();
      for (int w : explored_.nonempty_weights())
        if (w < W) level_weights_.push_back(w);
      count_unfiltered(W);
      for (std::size_t i = 0; i < registry_.size() && !stop_; ++i) {
        const OperationSpec& op = registry_[i];
        const int rem = W - op_weights_[i];
        if (rem < op.arity) continue;
        cur_op_ = &op;
        cur_op_weight_ = op_weights_[i];
        cur_level_ = W;
        enumerate(0, rem);
      }
    }
    if (timed_out_ || budget_hit_) status = SearchStatus::Timeout;
    if (solutions_.size() < static_cast<std::size_t>(config_.max_solutions)) {
      stop_ = false;
      flush_pending(std::numeric_limits<int>::max());
    }

    SearchResult res;
    res.solutions = std::move(solutions_);
    res.status = !res.solutions.empty() ? SearchStatus::Solved : status;
    res.stats = stats_;
    res.elapsed_s = elapsed();
    if (config_.harvest) {
      res.explored.reserve(explored_.size());
      for (const auto& e : explored_.entries()) res.explored.push_back(e.values[0]);
    }
    return res;
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  bool check_time() {
    if (Clock::now() >= deadline_) {
      timed_out_ = true;
      stop_ = true;
    }
    return stop_;
  }

  void prepare_cast() {
    if (!config_.opportunistic_cast) return;
    cast_op_ = registry_.find("cast");
    if (!cast_op_) return;
    cast_weight_ = op_weights_[static_cast<std::size_t>(cast_op_->index)];
    const auto* goal = std::get_if<Tensor>(&task_.examples[0].output);
    if (!goal) {
      cast_op_ = nullptr;
      return;
    }
    for (const auto& ex : task_.examples) {
      const auto* t = std::get_if<Tensor>(&ex.output);
      if (!t || t->dtype() != goal->dtype()) {
        cast_op_ = nullptr;
        return;
      }
    }
    for (const auto& e : explored_.entries()) {
      if (e.values[0]->history()) continue;
      if (const auto* d = std::get_if<DTypeLiteral>(&e.values[0]->payload()); d && d->dtype == goal->dtype()) {
        cast_leaf_ = &e;
        break;
      }
    }
    if (!cast_leaf_) cast_op_ = nullptr;
  }

  bool matches(const std::vector<ValuePtr>& values) const {
    for (std::size_t i = 0; i < n_examples_; ++i)
      if (!equal_output(values[i]->payload(), task_.examples[i].output, config_.tolerance)) return false;
    return true;
  }

  void check_leaves(int W) {
    for (const ExploredEntry* e : explored_.at_weight(W)) {
      if (e->values[0]->history()) continue;
      if (!matches(e->values)) continue;
      const_cast<ExploredEntry*>(e)->matches_output = true;
      if (e->input_mask == all_inputs_ || !config_.require_all_inputs) emit(e->values);
      if (stop_) return;
    }
  }

  // Counts candidate argument lists before argument filtering: for each op
  // the sum over compositions of the product of per-weight value counts.
  void count_unfiltered(int W) {
    const std::size_t n = static_cast<std::size_t>(W);
    std::vector<std::uint64_t> sizes(n, 0);
    for (int w : level_weights_) sizes[static_cast<std::size_t>(w)] = explored_.at_weight(w).size();
    std::vector<std::vector<std::uint64_t>> conv{sizes};
    int max_arity = 1;
    for (const auto& op : registry_.ops()) max_arity = std::max(max_arity, op.arity);
    for (int k = 1; k < max_arity; ++k) {
      std::vector<std::uint64_t> next(n, 0);
      for (std::size_t a = 0; a < n; ++a) {
        if (!conv.back()[a]) continue;
        for (std::size_t b = 0; a + b < n; ++b)
          if (sizes[b]) next[a + b] = sat_add(next[a + b], sat_mul(conv.back()[a], sizes[b]));
      }
      conv.push_back(std::move(next));
    }
    for (std::size_t i = 0; i < registry_.size(); ++i) {
      const int rem = W - op_weights_[i];
      if (rem < 1) continue;
      stats_.candidates_before_arg_filters =
          sat_add(stats_.candidates_before_arg_filters, conv[static_cast<std::size_t>(registry_[i].arity - 1)][static_cast<std::size_t>(rem)]);
    }
  }

  void enumerate(int pos, int rem) {
    const OperationSpec& op = *cur_op_;
    const FilterId f = op.arg_filters[static_cast<std::size_t>(pos)];
    if (pos == op.arity - 1) {
      const auto& list = explored_.filtered(f, rem);
      if (list.empty()) return;
      lists_[static_cast<std::size_t>(pos)] = &list;
      product();
      return;
    }
    const int min_w = level_weights_.empty() ? 1 : level_weights_.front();
    const int room = rem - (op.arity - pos - 1) * min_w;
    for (int w : level_weights_) {
      if (w > room || stop_) break;
      const auto& list = explored_.filtered(f, w);
      if (list.empty()) continue;
      lists_[static_cast<std::size_t>(pos)] = &list;
      enumerate(pos + 1, rem - w);
    }
  }

  void product() {
    const OperationSpec& op = *cur_op_;
    const std::size_t arity = static_cast<std::size_t>(op.arity);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < arity; ++i) count = sat_mul(count, lists_[i]->size());
    stats_.after_arg_filters = sat_add(stats_.after_arg_filters, count);
    if (check_time()) return;

    std::array<std::size_t, kMaxArity> idx{};
    std::array<const ExploredEntry*, kMaxArity> chosen{};
    std::array<ValuePtr, kMaxArity> args;
    std::vector<ValuePtr> results(n_examples_);
    const bool use_combination = !config_.disable_filters && op.combination.fn;
    while (true) {
      for (std::size_t i = 0; i < arity; ++i) chosen[i] = (*lists_[i])[idx[i]];
      bool ok = true;
      for (std::size_t ex = 0; ex < n_examples_ && ok; ++ex) {
        for (std::size_t i = 0; i < arity; ++i) args[i] = chosen[i]->values[ex];
        const std::span<const ValuePtr> span(args.data(), arity);
        if (use_combination && !op.combination.fn(span)) {
          ok = false;
          break;
        }
        if (ex == 0) {
          ++stats_.after_combination_filters;
          ++stats_.executions;
        }
        Expected<ValuePtr> r = apply_operation(op, span, cur_op_weight_);
        if (!r) {
          ++stats_.exec_errors;
          ok = false;
          break;
        }
        results[ex] = r.take();
      }
      if (ok) consider(results, chosen, arity);
      if (stop_) return;
      if ((stats_.executions & 255) == 0 && check_time()) return;

      // Advance the odometer, last position fastest.
      std::size_t i = arity;
      while (i > 0) {
        --i;
        if (++idx[i] < lists_[i]->size()) break;
        idx[i] = 0;
        if (i == 0) return;
      }
    }
  }

  void consider(std::vector<ValuePtr>& results, const std::array<const ExploredEntry*, kMaxArity>& chosen,
                std::size_t arity) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < arity; ++i) mask |= chosen[i]->input_mask;
    const Fingerprint fp = super_fingerprint(results);
    if (const ExploredEntry* dup = explored_.find(results, fp)) {
      ++stats_.dedup_hits;
      if (dup->matches_output && (mask == all_inputs_ || !config_.require_all_inputs)) emit(results);
      return;
    }
    ExploredEntry e;
    e.values = results;
    e.fingerprint = fp;
    e.input_mask = mask;
    e.weight = cur_level_;
    e.matches_output = !config_.harvest && matches(results);
    const ExploredEntry* stored = explored_.insert(std::move(e));
    ++stats_.values_explored;
    if (config_.harvest) {
      if (config_.max_explored && explored_.size() >= config_.max_explored) stop_ = true;
    } else if (stored->matches_output) {
      if (mask == all_inputs_ || !config_.require_all_inputs) emit(stored->values);
    } else if (cast_op_ && (mask == all_inputs_ || !config_.require_all_inputs)) {
      try_cast(stored);
    }
    if (explored_.approx_bytes() > config_.memory_budget_bytes) {
      budget_hit_ = true;
      stop_ = true;
    }
  }

  void try_cast(const ExploredEntry* e) {
    std::vector<ValuePtr> cast(n_examples_);
    for (std::size_t ex = 0; ex < n_examples_; ++ex) {
      auto r = try_cast_match(e->values[ex], cast_leaf_->values[ex], task_.examples[ex].output, *cast_op_,
                              cast_weight_, config_.tolerance);
      if (!r) return;
      cast[ex] = std::move(*r);
    }
    // Emit right away when this fills the quota; otherwise hold the solution
    // until the enumeration reaches its weight so emission stays ordered.
    pending_.push_back(std::move(cast));
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const auto& a, const auto& b) { return a[0]->weight() < b[0]->weight(); });
    if (solutions_.size() + pending_.size() >= static_cast<std::size_t>(config_.max_solutions))
      flush_pending(std::numeric_limits<int>::max());
  }

  void flush_pending(int upto) {
    while (!pending_.empty() && pending_.front()[0]->weight() <= upto && !stop_) {
      std::vector<ValuePtr> v = std::move(pending_.front());
      pending_.erase(pending_.begin());
      emit(v);
    }
  }

  void emit(const std::vector<ValuePtr>& values) {
    std::string functional = render(*values[0], RenderStyle::Functional);
    if (!emitted_.insert(functional).second) return;
    Solution s;
    s.expression = values[0];
    s.per_example = values;
    s.weight = values[0]->weight();
    s.elapsed_s = elapsed();
    s.functional = std::move(functional);
    s.pythonic = render(*values[0], RenderStyle::Pythonic);
    s.stats = stats_;
    solutions_.push_back(std::move(s));
    if (cb_) cb_(solutions_.back());
    if (solutions_.size() >= static_cast<std::size_t>(config_.max_solutions)) stop_ = true;
  }

  const TaskSpec& task_;
  const OperationRegistry& registry_;
  const SearchConfig& config_;
  const SolutionCallback& cb_;
  ExploredSet explored_;
  std::vector<int> op_weights_;
  std::size_t n_examples_;
  std::uint32_t all_inputs_;

  Clock::time_point start_;
  Clock::time_point deadline_;
  bool stop_ = false;
  bool timed_out_ = false;
  bool budget_hit_ = false;
  SearchStats stats_;

  std::vector<int> level_weights_;
  const OperationSpec* cur_op_ = nullptr;
  int cur_op_weight_ = 0;
  int cur_level_ = 0;
  std::array<const std::vector<const ExploredEntry*>*, kMaxArity> lists_{};

  const OperationSpec* cast_op_ = nullptr;
  const ExploredEntry* cast_leaf_ = nullptr;
  int cast_weight_ = 0;
  std::vector<std::vector<ValuePtr>> pending_;

  std::vector<Solution> solutions_;
  std::set<std::string> emitted_;
};

}  // namespace

SearchResult search(const TaskSpec& task, const OperationRegistry& registry, const WeightTable& weights,
                    const SearchConfig& config, const SolutionCallback& on_solution) {
  validate_task(task);
  if (config.timeout_s <= 0) throw std::invalid_argument("timeout must be positive");
  if (config.max_solutions < 1) throw std::invalid_argument("max_solutions must be positive");
  Searcher s(task, registry, weights, config, on_solution);
  return s.run();
}

}  // namespace tsynth
