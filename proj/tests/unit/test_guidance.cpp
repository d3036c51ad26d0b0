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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <catch_amalgamated.hpp>

#include "tensorsynth/guidance.hpp"
#include "test_support.hpp"

using namespace tsynth;
using namespace tsynth::testing;
using Catch::Approx;

namespace {

std::size_t feature_at(const std::string& name) {
  const auto names = feature_names();
  const auto it = std::find(names.begin(), names.end(), name);
  REQUIRE(it != names.end());
  return static_cast<std::size_t>(it - names.begin());
}

WeightTable table_of(const std::vector<std::pair<std::string, int>>& entries) {
  WeightTable t;
  for (const auto& [n, w] : entries) t.set(n, w);
  return t;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& op : OperationRegistry::builtin()->ops()) out.push_back(op.name);
  return out;
}

const TfIdfModel& shipped_tfidf() {
  static const TfIdfModel m = TfIdfModel::load(default_models_dir() + "/" + GuidanceModels::kTfIdfFile);
  return m;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// Reweighting ---------------------------------------------------------------------

TEST_CASE("reweight examples", "[reweight]") {
  const auto base = table_of({{"a", 36}, {"b", 1}, {"c", 14}});
  PrioritizedOps tensor{ModelSource::TensorModel, {"a", "b"}, 0.75};
  PrioritizedOps text{ModelSource::TfIdf, {"a"}, 0.75};

  const auto one = reweight(base, {tensor});
  CHECK(one.at("a") == 27);
  CHECK(one.at("b") == 1);
  CHECK(one.at("c") == 14);

  const auto both = reweight(base, {tensor, text});
  CHECK(both.at("a") == 20);  // 36 * 0.5625 = 20.25
  CHECK(both.at("b") == 1);

  CHECK(reweight(base, {}).serialize() == base.serialize());
  CHECK_THROWS_AS(reweight(base, {PrioritizedOps{ModelSource::TfIdf, {"nope"}, 0.75}}), UnknownOp);
  CHECK_THROWS(reweight(base, {PrioritizedOps{ModelSource::TfIdf, {"a"}, 0.0}}));
}

TEST_CASE("reweight bounds and order independence", "[reweight][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    WeightTable base;
    std::vector<std::string> names;
    for (int i = 0; i < 12; ++i) {
      names.push_back("op" + std::to_string(i));
      base.set(names.back(), std::uniform_int_distribution<int>(1, 60)(rng));
    }
    std::vector<PrioritizedOps> preds;
    const int models = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int m = 0; m < models; ++m) {
      PrioritizedOps p{static_cast<ModelSource>(m % 3), {}, std::uniform_real_distribution<double>(0.3, 1.0)(rng)};
      for (const auto& n : names)
        if (rng() % 3 == 0) p.ops.insert(n);
      preds.push_back(p);
    }
    const auto out = reweight(base, preds);
    for (const auto& n : names) {
      const int w = base.at(n), w2 = out.at(n);
      CHECK(w2 >= 1);
      CHECK(w2 <= w);
      bool prioritized = false;
      double product = 1;
      for (const auto& p : preds)
        if (p.ops.count(n)) prioritized = true, product *= p.multiplier;
      if (!prioritized) CHECK(w2 == w);
      // Nearest rounding can round a reduced weight back up only when the
      // reduction is under half a unit, and never below the floor of 1.
      if (prioritized && w > 1 && w * (1 - product) > 0.5) CHECK(w2 < w);
    }
    auto shuffled = preds;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(reweight(base, shuffled).serialize() == out.serialize());
  }
}

// Features --------------------------------------------------------------------------

TEST_CASE("featurize examples", "[features]") {
  const auto fv = featurize({payload("[1, 2]")}, payload("[2, 4]"));
  REQUIRE(fv.size() == feature_count());
  CHECK(fv[feature_at("in1_vs_out.frac_in_in_out")] == Approx(0.5));
  CHECK(fv[feature_at("in1.is_dummy")] == 0);
  CHECK(fv[feature_at("in2.is_dummy")] == 1);
  CHECK(fv[feature_at("num_inputs")] == 1);

  const auto two = featurize({payload("[3, 1]"), payload("[[1]]")}, payload("[1, 2, 3]"));
  CHECK(two[feature_at("in1.is_dummy")] == 0);
  CHECK(two[feature_at("in2.is_dummy")] == 0);
  CHECK(two[feature_at("in3.is_dummy")] == 1);
  CHECK(two[feature_at("num_inputs")] == 2);
  CHECK(two[feature_at("out.sorted_asc")] == 1);
  CHECK(two[feature_at("in1.sorted_asc")] == 0);
  CHECK(two[feature_at("out.dtype=int32")] == 1);
  CHECK(two[feature_at("out.is_dummy")] == 0);

  CHECK_THROWS_AS(featurize({payload("1"), payload("2"), payload("3"), payload("4")}, payload("1")), TooManyInputs);
  CHECK(feature_names().size() == feature_count());
}

TEST_CASE("featurize length is fixed and values are finite", "[features][property]") {
  std::mt19937_64 rng(11);
  const std::size_t n = feature_count();
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Payload> inputs;
    const int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < k; ++i) inputs.push_back(random_value(rng)->payload());
    const Payload out = random_value(rng)->payload();
    const auto fv = featurize(inputs, out);
    REQUIRE(fv.size() == n);
    for (float x : fv) REQUIRE(std::isfinite(x));
    // Serialization round-trip does not change the features.
    std::vector<Payload> again;
    for (const auto& p : inputs) again.push_back(parse_literal(to_literal(p), BareScalars::AsPrimitives));
    CHECK(featurize(again, parse_literal(to_literal(out), BareScalars::AsPrimitives)) == fv);
  }
}

TEST_CASE("feature config json round trip", "[features]") {
  const auto cfg = FeatureConfig::defaults();
  CHECK(FeatureConfig::from_json(cfg.to_json()) == cfg);
  CHECK(bucket_index(-1e9, cfg.count_edges) == 0);
  CHECK(bucket_index(1e9, cfg.count_edges) == static_cast<int>(cfg.count_edges.size()));
}

// Tensor model ------------------------------------------------------------------------

TEST_CASE("tensor model prediction", "[tensor_model]") {
  const std::vector<std::string> ops = {"add", "argsort_stable", "cast"};
  auto params = TensorModelParams::zeros(ops, feature_count());
  const auto fv = featurize({payload("[3, 1, 2]")}, payload("[1, 2, 0]"));
  CHECK(tensor_model_predict(fv, params).ops.empty());  // sigmoid(0) is not above 0.5

  params.out_b[1] = 3.0f;
  auto pred = tensor_model_predict(fv, params, 0.6);
  CHECK(pred.ops == std::set<std::string>{"argsort_stable"});
  CHECK(pred.multiplier == 0.6);
  CHECK(pred.source == ModelSource::TensorModel);

  CHECK_THROWS_AS(tensor_model_predict(std::vector<float>(fv.size() + 1), params), DimensionMismatch);

  auto hidden = TensorModelParams::zeros(ops, feature_count(), 4);
  std::mt19937_64 rng(3);
  std::normal_distribution<float> nd(0, 0.1f);
  for (auto& w : hidden.hidden_w) w = nd(rng);
  for (auto& w : hidden.out_w) w = nd(rng);
  const auto back = TensorModelParams::from_json(nlohmann::json::parse(hidden.to_json().dump()));
  CHECK(back.logits(fv) == hidden.logits(fv));
  CHECK_THROWS_AS(TensorModelParams::from_json(nlohmann::json{{"kind", "tfidf"}}), ModelFormatError);
}

// TF-IDF ---------------------------------------------------------------------------------

TEST_CASE("tokenizer", "[text]") {
  CHECK(tokenize("Sort the Tensor, and return 2 indices!") == std::vector<std::string>{"sort", "tensor", "return", "indices"});
  CHECK(tokenize("").empty());
}

TEST_CASE("tf-idf examples", "[tfidf]") {
  const auto& m = shipped_tfidf();
  CHECK(tfidf_rank("", m).ops.empty());
  CHECK(tfidf_rank("zzyzx qwerty blorf", m).ops.empty());

  const auto ranked = tfidf_rank("sort a tensor and return indices", m);
  CHECK(ranked.ops.count("argsort_stable") == 1);
  CHECK(ranked.ops.size() <= 5);
}

TEST_CASE("tf-idf finds each op from its own docstring", "[tfidf]") {
  const auto& m = shipped_tfidf();
  const auto& docs = DocstringTable::builtin();
  for (const auto& name : m.op_names) {
    INFO(name);
    CHECK(tfidf_rank(docs.at(name), m).ops.count(name) == 1);
  }
}

TEST_CASE("tf-idf properties", "[tfidf][property]") {
  const auto& m = shipped_tfidf();
  std::mt19937_64 rng(5);
  std::vector<std::string> words = m.terms.vocab;
  words.push_back("unseenword");
  words.push_back("the");
  for (int trial = 0; trial < 300; ++trial) {
    std::string d;
    const int len = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < len; ++i) d += words[rng() % words.size()] + " ";
    const auto s = m.scores(d);
    const auto doubled = m.scores(d + " " + d);
    for (std::size_t i = 0; i < s.size(); ++i) {
      REQUIRE(s[i] >= -1e-12);
      REQUIRE(s[i] <= 1 + 1e-9);
      REQUIRE(std::abs(s[i] - doubled[i]) < 1e-9);
    }
    const auto r = tfidf_rank(d, m);
    CHECK(r.ops.size() <= m.k);
    for (const auto& op : r.ops) {
      const auto idx = static_cast<std::size_t>(std::find(m.op_names.begin(), m.op_names.end(), op) - m.op_names.begin());
      CHECK(s[idx] >= m.min_score);
    }
  }
  const auto back = TfIdfModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(back.scores("sort a tensor and return indices") == m.scores("sort a tensor and return indices"));
}

// Naive Bayes ---------------------------------------------------------------------------

TEST_CASE("naive bayes matches a hand computation", "[nb]") {
  const auto docs = DocstringTable::parse("[opa]\nsort tensor\n[opb]\nadd tensor\n");
  const auto [tfidf, nb] = fit_nl_models(docs, {"opa", "opb"});
  REQUIRE(nb.terms.vocab == std::vector<std::string>{"add", "sort", "tensor"});

  // Term counts over the docstrings: add 1, sort 1, tensor 2.
  const double l2 = std::log(2.0), l3 = std::log(3.0);
  const double a = 0.25, n = 3;
  const double mass_a = 1 / l2 + 1 / l3, mass_b = 1 / l2 + 1 / l3;
  const double x_sort = 1 / l2;  // V_D of "sort"
  const double llr_a = x_sort * (std::log((1 / l2 + a) / (mass_a + a * n)) - std::log((0 + a) / (mass_b + a * n)));
  const double llr_b = x_sort * (std::log((0 + a) / (mass_b + a * n)) - std::log((1 / l2 + a) / (mass_a + a * n)));

  const auto post = nb.posteriors("sort");
  REQUIRE(post.size() == 2);
  CHECK(post[0] == Approx(sigmoid(llr_a)).epsilon(1e-12));
  CHECK(post[1] == Approx(sigmoid(llr_b)).epsilon(1e-12));
  CHECK(post[0] > post[1]);
  CHECK(nb_rank("sort", nb).ops == std::set<std::string>{"opa"});
  CHECK(nb_rank("", nb).ops.empty());
  CHECK(nb_rank("unknownword", nb).ops.empty());  // posterior stays at the prior, not above p
}

TEST_CASE("naive bayes caps predictions at k", "[nb]") {
  std::string text;
  std::vector<std::string> ops;
  for (int i = 0; i < 6; ++i) {
    ops.push_back("op" + std::to_string(i));
    text += "[" + ops.back() + "]\n" + (i < 5 ? "sort " : "") + "tensor word" + std::to_string(i) + "\n";
  }
  const auto docs = DocstringTable::parse(text);
  const auto nb = fit_nl_models(docs, ops).second;
  const auto post = nb.posteriors("sort");
  REQUIRE(std::count_if(post.begin(), post.end(), [&](double p) { return p > nb.p; }) == 5);
  const auto r = nb_rank("sort", nb);
  CHECK(r.ops.size() == 3);
  CHECK(r.source == ModelSource::NaiveBayes);
}

TEST_CASE("naive bayes properties", "[nb][property]") {
  const auto names = builtin_names();
  const auto nb = fit_nl_models(DocstringTable::builtin(), names).second;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::string d;
    const int len = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int i = 0; i < len; ++i) d += nb.terms.vocab[rng() % nb.terms.vocab.size()] + " ";
    const auto post = nb.posteriors(d);
    for (double p : post) REQUIRE((p >= 0 && p <= 1));
    CHECK(nb_rank(d, nb).ops.size() <= nb.k);

    // Adding a term whose likelihood ratio favours an op never lowers that
    // op's posterior.
    const std::string& term = nb.terms.vocab[rng() % nb.terms.vocab.size()];
    const std::size_t t = nb.terms.index.at(term);
    const double n = static_cast<double>(nb.terms.vocab.size());
    const auto more = nb.posteriors(d + " " + term);
    for (std::size_t o = 0; o < names.size(); ++o) {
      const auto it = nb.term_mass[o].find(t);
      const double in_op = it == nb.term_mass[o].end() ? 0 : it->second;
      const double not_op = nb.total_term_mass[t] - in_op;
      const double lr = std::log((in_op + nb.alpha) / (nb.op_mass[o] + nb.alpha * n)) -
                        std::log((not_op + nb.alpha) / (nb.total_mass - nb.op_mass[o] + nb.alpha * n));
      if (lr > 0) CHECK(more[o] >= post[o] - 1e-12);
      if (lr < 0) CHECK(more[o] <= post[o] + 1e-12);
    }
  }
  const auto back = NbModel::from_json(nlohmann::json::parse(nb.to_json().dump()));
  CHECK(back.posteriors("reverse the order") == nb.posteriors("reverse the order"));
}

TEST_CASE("nl vocabulary is frozen to docstrings", "[nb]") {
  const auto docs = DocstringTable::parse("[opa]\nsort tensor\n[opb]\nadd tensor\n");
  const std::vector<CorpusRecord> corpus = {{"sort sort newterm", {"opa"}}, {"add elements", {"opb"}}};
  const auto [tfidf, nb] = fit_nl_models(docs, {"opa", "opb"}, corpus);
  CHECK(tfidf.terms.vocab == std::vector<std::string>{"add", "sort", "tensor"});
  CHECK(nb.terms.vocab == tfidf.terms.vocab);
  // The corpus adds mass for "sort" to opa only.
  const auto plain = fit_nl_models(docs, {"opa", "opb"}).second;
  CHECK(nb.posteriors("sort")[0] > plain.posteriors("sort")[0]);
  CHECK_THROWS_AS(fit_nl_models(docs, {"opa", "opc"}), MissingDocstring);
}

// Wiring ------------------------------------------------------------------------------------

TEST_CASE("shipped models load and predictions honour disable flags", "[wiring]") {
  const auto models = GuidanceModels::load(default_models_dir(), true, true, NlChoice::Both);
  REQUIRE(models.tensor);
  REQUIRE(models.tfidf);
  REQUIRE(models.nb);
  CHECK(models.tensor->input_dim == feature_count());
  CHECK(models.tensor->op_names == builtin_names());

  const auto t = task({{"in1", "[3, 1, 2]"}}, "[1, 2, 0]", {}, "sort a tensor and return indices");
  SearchConfig cfg;
  auto preds = predict_ops(t, models, cfg);
  CHECK(preds.size() == 3);
  for (const auto& p : preds) {
    for (const auto& op : p.ops) CHECK(OperationRegistry::builtin()->find(op) != nullptr);
  }

  cfg.disable_tensor_model = true;
  preds = predict_ops(t, models, cfg);
  CHECK(std::none_of(preds.begin(), preds.end(), [](const auto& p) { return p.source == ModelSource::TensorModel; }));
  cfg.disable_nl_model = true;
  CHECK(predict_ops(t, models, cfg).empty());

  const auto silent = task({{"in1", "[3, 1, 2]"}}, "[1, 2, 0]");
  preds = predict_ops(silent, models, SearchConfig{});
  CHECK(preds.size() == 1);

  CHECK_THROWS(GuidanceModels::load("/nonexistent/dir", true, false));
  NlChoice c;
  CHECK(parse_nl_choice("nb", c));
  CHECK(c == NlChoice::NaiveBayes);
  CHECK_FALSE(parse_nl_choice("bert", c));
}
