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


#include "tensorsynth/task_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tensorsynth/literal.hpp"

namespace tsynth {

namespace {

using ojson = nlohmann::ordered_json;

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Line of the first occurrence of "key" after the line of `after`; good
// enough to point users at a malformed literal.
int line_of_key(const std::string& text, const std::string& key, int after = 1) {
  std::size_t start = 0;
  for (int l = 1; l < after && start != std::string::npos; ++l) {
    start = text.find('\n', start);
    if (start != std::string::npos) ++start;
  }
  if (start == std::string::npos) return 0;
  const std::size_t pos = text.find("\"" + key + "\"", start);
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

Payload literal(const std::string& text, const ojson& j, const std::string& key, int after, BareScalars mode) {
  try {
    return parse_literal(nlohmann::json::parse(j.dump()), mode);
  } catch (const LiteralError& e) {
    throw TaskParseError(line_of_key(text, key, after), "bad literal for '" + key + "': " + e.what());
  }
}

void parse_example(const std::string& text, const ojson& ex, int after, TaskSpec& spec, bool first) {
  if (!ex.contains("inputs") || !ex.at("inputs").is_object())
    throw TaskParseError(after, "example needs an \"inputs\" object");
  if (!ex.contains("output")) throw TaskParseError(after, "example needs an \"output\"");
  TaskExample out;
  std::vector<std::string> names;
  for (const auto& [name, lit] : ex.at("inputs").items()) {
    names.push_back(name);
    out.inputs.push_back(literal(text, lit, name, after, BareScalars::AsTensors));
  }
  if (first) {
    spec.input_names = names;
  } else if (names != spec.input_names) {
    throw TaskParseError(after, "all examples must use the same input names in the same order");
  }
  out.output = literal(text, ex.at("output"), "output", after, BareScalars::AsTensors);
  spec.examples.push_back(std::move(out));
}

}  // namespace

TaskFile parse_task_text(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw TaskParseError(line_of_offset(text, e.byte), e.what());
  }
  if (!doc.is_object()) throw TaskParseError(1, "task must be a JSON object");
  static const std::set<std::string> kKeys = {"inputs", "output", "examples", "constants", "description",
                                              "name", "expected_solution", "time_budget_s"};
  for (const auto& [k, v] : doc.items())
    if (!kKeys.count(k)) throw TaskParseError(line_of_key(text, k), "unknown key '" + k + "'");

  TaskFile tf;
  const bool has_top = doc.contains("inputs") || doc.contains("output");
  if (has_top && doc.contains("examples"))
    throw TaskParseError(line_of_key(text, "examples"), "\"examples\" cannot be combined with top-level inputs/output");
  if (doc.contains("examples")) {
    const auto& exs = doc.at("examples");
    if (!exs.is_array() || exs.empty()) throw TaskParseError(line_of_key(text, "examples"), "\"examples\" must be a non-empty list");
    int after = line_of_key(text, "examples");
    bool first = true;
    for (const auto& ex : exs) {
      parse_example(text, ex, after, tf.spec, first);
      first = false;
      // Move the search anchor past this example's inputs for error lines.
      const int next = line_of_key(text, "inputs", after + 1);
      if (next > 0) after = next;
    }
  } else if (has_top) {
    parse_example(text, doc, 1, tf.spec, true);
  } else {
    throw TaskParseError(1, "task needs \"inputs\" and \"output\" or \"examples\"");
  }

  if (doc.contains("constants")) {
    const auto& cs = doc.at("constants");
    if (!cs.is_array()) throw TaskParseError(line_of_key(text, "constants"), "\"constants\" must be a list");
    for (const auto& c : cs)
      tf.spec.constants.push_back(literal(text, c, "constants", 1, BareScalars::AsPrimitives));
  }
  if (doc.contains("description")) {
    if (!doc.at("description").is_string()) throw TaskParseError(line_of_key(text, "description"), "\"description\" must be a string");
    tf.spec.description = doc.at("description").get<std::string>();
  }
  if (doc.contains("name")) tf.meta.name = doc.at("name").get<std::string>();
  if (doc.contains("expected_solution")) tf.meta.expected_solution = doc.at("expected_solution").get<std::string>();
  if (doc.contains("time_budget_s")) tf.meta.time_budget_s = doc.at("time_budget_s").get<double>();
  validate_task(tf.spec);
  return tf;
}

TaskFile parse_task_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open task file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  TaskFile tf = parse_task_text(ss.str());
  if (tf.meta.name.empty()) {
    std::string base = path.substr(path.find_last_of('/') + 1);
    if (auto dot = base.rfind('.'); dot != std::string::npos) base.resize(dot);
    tf.meta.name = base;
  }
  return tf;
}

}  // namespace tsynth
