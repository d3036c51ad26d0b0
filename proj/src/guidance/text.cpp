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
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tensorsynth/guidance.hpp"

namespace tsynth {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump() << "\n";
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(path + ": " + e.what());
  }
}

void check_header(const json& j, const char* kind) {
  if (j.at("format_version").get<int>() != kFormatVersion) throw ModelFormatError("unsupported format_version");
  if (j.at("kind").get<std::string>() != kind) throw ModelFormatError(std::string("not a ") + kind + " model file");
}

json sparse_json(const std::map<std::size_t, double>& v) {
  json a = json::array();
  for (const auto& [i, x] : v) a.push_back(json::array({i, x}));
  return a;
}

std::map<std::size_t, double> sparse_from(const json& a, std::size_t n) {
  std::map<std::size_t, double> v;
  for (const auto& e : a) {
    const auto i = e.at(0).get<std::size_t>();
    if (i >= n) throw ModelFormatError("term index out of range");
    v[i] = e.at(1).get<double>();
  }
  return v;
}

json terms_json(const TermStats& t) { return {{"vocab", t.vocab}, {"denominators", t.denominators}}; }

TermStats terms_from(const json& j) {
  TermStats t;
  t.vocab = j.at("vocab").get<std::vector<std::string>>();
  t.denominators = j.at("denominators").get<std::vector<double>>();
  if (t.denominators.size() != t.vocab.size()) throw ModelFormatError("vocab and denominators differ in length");
  for (std::size_t i = 0; i < t.vocab.size(); ++i) t.index[t.vocab[i]] = i;
  return t;
}

TermStats build_terms(const std::vector<std::string>& texts, const std::set<std::string>& stopwords) {
  std::map<std::string, std::size_t> totals;
  for (const auto& text : texts)
    for (auto& tok : tokenize(text, stopwords)) ++totals[tok];
  TermStats t;
  for (const auto& [term, n] : totals) {
    t.index[term] = t.vocab.size();
    t.vocab.push_back(term);
    // As if one extra docstring held every term exactly once.
    t.denominators.push_back(std::log(static_cast<double>(n) + 1.0));
  }
  return t;
}

double norm(const std::map<std::size_t, double>& v) {
  double s = 0;
  for (const auto& [i, x] : v) s += x * x;
  return std::sqrt(s);
}

// Indices of the best `k` scores passing `keep`, highest first, ties by index.
template <typename Keep>
std::vector<std::size_t> top_k(const std::vector<double>& scores, std::size_t k, Keep keep) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (keep(scores[i])) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

}  // namespace

std::set<std::string> parse_stopwords(std::string_view text) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string word;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!word.empty()) out.insert(word);
  }
  return out;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = parse_stopwords(embedded::stopwords_txt());
  return words;
}

std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() > 1 && !stopwords.count(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur += static_cast<char>(std::tolower(u));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::map<std::size_t, double> TermStats::vectorize(std::string_view text, const std::set<std::string>& stopwords) const {
  std::map<std::size_t, double> v;
  for (const auto& tok : tokenize(text, stopwords)) {
    auto it = index.find(tok);
    if (it != index.end()) v[it->second] += 1.0;
  }
  for (auto& [i, x] : v) x /= denominators[i];
  return v;
}

// TF-IDF ---------------------------------------------------------------------------

TfIdfModel TfIdfModel::fit(const DocstringTable& docs, const std::vector<std::string>& op_names,
                           const std::set<std::string>& stopwords) {
  std::vector<std::string> texts;
  for (const auto& op : op_names) texts.push_back(docs.at(op));
  TfIdfModel m;
  m.terms = build_terms(texts, stopwords);
  m.op_names = op_names;
  m.stopwords = stopwords;
  for (const auto& text : texts) m.op_vectors.push_back(m.terms.vectorize(text, stopwords));
  return m;
}

std::vector<double> TfIdfModel::scores(std::string_view description) const {
  std::vector<double> out(op_names.size(), 0.0);
  const auto d = terms.vectorize(description, stopwords);
  const double nd = norm(d);
  if (nd == 0) return out;
  for (std::size_t o = 0; o < op_vectors.size(); ++o) {
    const auto& v = op_vectors[o];
    const double nv = norm(v);
    if (nv == 0) continue;
    double dot = 0;
    for (const auto& [i, x] : d)
      if (auto it = v.find(i); it != v.end()) dot += x * it->second;
    out[o] = dot / (nd * nv);
  }
  return out;
}

json TfIdfModel::to_json() const {
  json vecs = json::array();
  for (const auto& v : op_vectors) vecs.push_back(sparse_json(v));
  return {{"format_version", kFormatVersion},
          {"kind", "tfidf"},
          {"terms", terms_json(terms)},
          {"op_names", op_names},
          {"op_vectors", vecs},
          {"stopwords", stopwords},
          {"k", k},
          {"min_score", min_score}};
}

TfIdfModel TfIdfModel::from_json(const json& j) {
  try {
    check_header(j, "tfidf");
    TfIdfModel m;
    m.terms = terms_from(j.at("terms"));
    m.op_names = j.at("op_names").get<std::vector<std::string>>();
    const auto& vecs = j.at("op_vectors");
    if (vecs.size() != m.op_names.size()) throw ModelFormatError("op_vectors and op_names differ in length");
    for (const auto& v : vecs) m.op_vectors.push_back(sparse_from(v, m.terms.vocab.size()));
    m.stopwords = j.at("stopwords").get<std::set<std::string>>();
    m.k = j.at("k").get<std::size_t>();
    m.min_score = j.at("min_score").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("tfidf model: ") + e.what());
  }
}

void TfIdfModel::save(const std::string& path) const { write_json(to_json(), path); }
TfIdfModel TfIdfModel::load(const std::string& path) { return from_json(read_json(path)); }

PrioritizedOps tfidf_rank(std::string_view description, const TfIdfModel& model, double multiplier) {
  PrioritizedOps out;
  out.source = ModelSource::TfIdf;
  out.multiplier = multiplier;
  const auto s = model.scores(description);
  for (std::size_t o : top_k(s, model.k, [&](double x) { return x > 0 && x >= model.min_score; }))
    out.ops.insert(model.op_names[o]);
  return out;
}

// Naive Bayes ----------------------------------------------------------------------

std::vector<CorpusRecord> load_corpus(const std::string& path, const std::set<std::string>& known) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<CorpusRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CorpusRecord r;
    try {
      const json j = json::parse(line);
      r.text = j.at("text").get<std::string>();
      r.ops = j.at("ops").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    for (const auto& op : r.ops)
      if (!known.count(op)) throw UnknownOp(op);
    out.push_back(std::move(r));
  }
  return out;
}

NbModel NbModel::fit(const TermStats& terms, const std::vector<std::string>& op_names,
                     const std::vector<CorpusRecord>& records, const std::set<std::string>& stopwords) {
  NbModel m;
  m.terms = terms;
  m.op_names = op_names;
  m.stopwords = stopwords;
  m.term_mass.resize(op_names.size());
  m.op_mass.assign(op_names.size(), 0.0);
  m.total_term_mass.assign(terms.vocab.size(), 0.0);
  std::map<std::string, std::size_t> op_index;
  for (std::size_t o = 0; o < op_names.size(); ++o) op_index[op_names[o]] = o;
  for (const auto& r : records) {
    const auto v = terms.vectorize(r.text, stopwords);
    std::set<std::size_t> ops;
    for (const auto& name : r.ops) {
      auto it = op_index.find(name);
      if (it == op_index.end()) throw UnknownOp(name);
      ops.insert(it->second);
    }
    for (const auto& [i, x] : v) {
      m.total_term_mass[i] += x;
      m.total_mass += x;
      for (std::size_t o : ops) {
        m.term_mass[o][i] += x;
        m.op_mass[o] += x;
      }
    }
  }
  return m;
}

std::vector<double> NbModel::posteriors(std::string_view description) const {
  const auto d = terms.vectorize(description, stopwords);
  const double n = static_cast<double>(terms.vocab.size());
  const double log_prior_odds = std::log(prior) - std::log1p(-prior);
  std::vector<double> out(op_names.size());
  for (std::size_t o = 0; o < op_names.size(); ++o) {
    const double pos_total = op_mass[o] + alpha * n;
    const double neg_total = (total_mass - op_mass[o]) + alpha * n;
    double llr = log_prior_odds;
    for (const auto& [i, x] : d) {
      double in_op = 0;
      if (auto it = term_mass[o].find(i); it != term_mass[o].end()) in_op = it->second;
      const double not_op = std::max(0.0, total_term_mass[i] - in_op);
      llr += x * (std::log((in_op + alpha) / pos_total) - std::log((not_op + alpha) / neg_total));
    }
    out[o] = 1.0 / (1.0 + std::exp(-llr));
  }
  return out;
}

json NbModel::to_json() const {
  json mass = json::array();
  for (const auto& v : term_mass) mass.push_back(sparse_json(v));
  return {{"format_version", kFormatVersion},
          {"kind", "naive_bayes"},
          {"terms", terms_json(terms)},
          {"op_names", op_names},
          {"term_mass", mass},
          {"op_mass", op_mass},
          {"total_term_mass", total_term_mass},
          {"total_mass", total_mass},
          {"stopwords", stopwords},
          {"alpha", alpha},
          {"prior", prior},
          {"p", p},
          {"k", k}};
}

NbModel NbModel::from_json(const json& j) {
  try {
    check_header(j, "naive_bayes");
    NbModel m;
    m.terms = terms_from(j.at("terms"));
    m.op_names = j.at("op_names").get<std::vector<std::string>>();
    const auto& mass = j.at("term_mass");
    if (mass.size() != m.op_names.size()) throw ModelFormatError("term_mass and op_names differ in length");
    for (const auto& v : mass) m.term_mass.push_back(sparse_from(v, m.terms.vocab.size()));
    m.op_mass = j.at("op_mass").get<std::vector<double>>();
    m.total_term_mass = j.at("total_term_mass").get<std::vector<double>>();
    if (m.op_mass.size() != m.op_names.size() || m.total_term_mass.size() != m.terms.vocab.size())
      throw ModelFormatError("naive bayes table sizes are inconsistent");
    m.total_mass = j.at("total_mass").get<double>();
    m.stopwords = j.at("stopwords").get<std::set<std::string>>();
    m.alpha = j.at("alpha").get<double>();
    m.prior = j.at("prior").get<double>();
    m.p = j.at("p").get<double>();
    m.k = j.at("k").get<std::size_t>();
    return m;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("naive bayes model: ") + e.what());
  }
}

void NbModel::save(const std::string& path) const { write_json(to_json(), path); }
NbModel NbModel::load(const std::string& path) { return from_json(read_json(path)); }

PrioritizedOps nb_rank(std::string_view description, const NbModel& model, double multiplier) {
  PrioritizedOps out;
  out.source = ModelSource::NaiveBayes;
  out.multiplier = multiplier;
  const auto post = model.posteriors(description);
  for (std::size_t o : top_k(post, model.k, [&](double x) { return x > model.p; })) out.ops.insert(model.op_names[o]);
  return out;
}

std::pair<TfIdfModel, NbModel> fit_nl_models(const DocstringTable& docs, const std::vector<std::string>& op_names,
                                             const std::vector<CorpusRecord>& corpus) {
  TfIdfModel tfidf = TfIdfModel::fit(docs, op_names);
  std::vector<CorpusRecord> records;
  for (const auto& op : op_names) records.push_back({docs.at(op), {op}});
  records.insert(records.end(), corpus.begin(), corpus.end());
  NbModel nb = NbModel::fit(tfidf.terms, op_names, records, tfidf.stopwords);
  return {std::move(tfidf), std::move(nb)};
}

}  // namespace tsynth
