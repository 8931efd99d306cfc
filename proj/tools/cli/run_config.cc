// Copyright 2026 The vlafreeze Authors
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

#include "cli/run_config.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cli/artifacts.h"
#include "json.hpp"
#include "vlafreeze/error.h"

namespace vlafreeze::cli {
namespace fs = std::filesystem;
namespace {

using ordered_json = nlohmann::ordered_json;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Node& node, const std::string& key,
                         const std::string& problem) const {
    std::string where = source_;
    const YAML::Mark mark = node.Mark();
    if (!mark.is_null()) {
      where += ":" + std::to_string(mark.line + 1) + ":" +
               std::to_string(mark.column + 1);
    }
    vlafreeze::Fail(ErrorCode::kValidation, where + ": " + key + ": " + problem);
  }

  void CheckKeys(const YAML::Node& map, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    if (!map.IsMap()) Fail(map, path, "expected a mapping");
    for (const auto& item : map) {
      const std::string key = item.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        Fail(item.first, Join(path, key), "unknown key (expected one of " + list + ")");
      }
    }
  }

  static std::string Join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  std::string String(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) Fail(node, key, "expected a string");
    return node.as<std::string>();
  }

  double Real(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) Fail(node, key, "expected a number");
    const std::string text = node.as<std::string>();
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const double num = ParseDouble(node, key, text.substr(0, slash));
      const double den = ParseDouble(node, key, text.substr(slash + 1));
      if (den == 0.0) Fail(node, key, "zero denominator in '" + text + "'");
      return num / den;
    }
    return ParseDouble(node, key, text);
  }

  long long Integer(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) Fail(node, key, "expected an integer");
    const std::string text = node.as<std::string>();
    try {
      std::size_t used = 0;
      const long long value = std::stoll(text, &used);
      if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
    Fail(node, key, "expected an integer, got '" + text + "'");
  }

  int Int(const YAML::Node& node, const std::string& key) const {
    const long long v = Integer(node, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      Fail(node, key, "out of range");
    }
    return static_cast<int>(v);
  }

  std::uint64_t Seed(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) Fail(node, key, "expected a non-negative integer");
    const std::string text = node.as<std::string>();
    try {
      std::size_t used = 0;
      if (!text.empty() && text[0] != '-') {
        const unsigned long long v = std::stoull(text, &used);
        if (used == text.size()) return v;
      }
    } catch (const std::exception&) {
    }
    Fail(node, key, "expected a non-negative integer, got '" + text + "'");
  }

  bool Bool(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) Fail(node, key, "expected true or false");
    const std::string text = node.as<std::string>();
    if (text == "true") return true;
    if (text == "false") return false;
    Fail(node, key, "expected true or false, got '" + text + "'");
  }

  fs::path Path(const YAML::Node& node, const std::string& key,
                const fs::path& base) const {
    const std::string text = String(node, key);
    if (text.empty()) Fail(node, key, "empty path");
    fs::path p(text);
    return p.is_absolute() ? p : (base / p).lexically_normal();
  }

 private:
  double ParseDouble(const YAML::Node& node, const std::string& key,
                     const std::string& text) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    Fail(node, key, "expected a number, got '" + text + "'");
  }

  std::string source_;
};

std::string ContentDigest(const fs::path& path) {
  return HexDigest(Fnv1a64(ReadFileBytes(path)));
}

}  // namespace

std::optional<PromptTemplate> TemplateByName(std::string_view name) {
  if (name == "default") return DefaultTemplate();
  if (name == "openvla") return OpenVlaTemplate();
  if (name == "bare") return BareTemplate();
  return std::nullopt;
}

const PromptTemplate& RunConfig::prompt_template() const {
  if (template_name == "openvla") return OpenVlaTemplate();
  if (template_name == "bare") return BareTemplate();
  return DefaultTemplate();
}

void RunConfig::Validate() const {
  auto fail = [](const std::string& what) {
    vlafreeze::Fail(ErrorCode::kValidation, what);
  };
  if (schema_version != kRunConfigSchemaVersion) {
    fail("schema_version: unsupported version " + std::to_string(schema_version));
  }
  attack.Validate();
  if (!TemplateByName(template_name)) {
    fail("prompts.template: unknown template '" + template_name + "'");
  }
  if (reference_corpus.empty()) fail("prompts.reference_corpus: required");
  if (attack_kind == AttackKind::kFreezeVla && attack.use_min_max &&
      attack.inner_steps > 0 && lexicon.empty()) {
    fail("lexicon: required by freezevla with inner_steps > 0");
  }
  if (freeze_token_ids.empty()) fail("freeze.token_ids: must not be empty");
  if (detection_repeats && *detection_repeats < 1) {
    fail("freeze.detection_repeats: must be >= 1");
  }
  if (images < 1) fail("evaluation.images: must be >= 1");
  if (workers < 1) fail("workers: must be >= 1");
  if (cell_limit < 1) fail("sweep.cell_limit: must be >= 1");
  std::set<std::string> names;
  for (const auto& task : tasks) {
    if (task.name.empty()) fail("evaluation.tasks: task name must not be empty");
    if (!names.insert(task.name).second) {
      fail("evaluation.tasks: duplicate task '" + task.name + "'");
    }
  }
}

std::vector<fs::path> RunConfig::InputFiles() const {
  std::vector<fs::path> files;
  if (!reference_corpus.empty()) files.push_back(reference_corpus);
  if (!lexicon.empty()) files.push_back(lexicon);
  for (const auto& task : tasks) files.push_back(task.corpus);
  return files;
}

RunConfig ParseRunConfig(std::string_view yaml, const fs::path& source) {
  const std::string source_name = source.empty() ? "<config>" : source.string();
  const fs::path base = source.has_parent_path() ? source.parent_path() : fs::path(".");
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& ex) {
    vlafreeze::Fail(ErrorCode::kParse,
                    source_name + ":" + std::to_string(ex.mark.line + 1) + ":" +
                        std::to_string(ex.mark.column + 1) + ": " + ex.msg);
  }
  Reader r(source_name);
  if (!root.IsMap()) r.Fail(root, "<root>", "expected a mapping");
  r.CheckKeys(root, "", {"schema_version", "seed", "adapter", "attack", "prompts",
                         "lexicon", "freeze", "evaluation", "sweep", "output_dir",
                         "workers"});

  RunConfig c;
  c.source = source;
  if (!root["schema_version"]) r.Fail(root, "schema_version", "required");
  c.schema_version = r.Int(root["schema_version"], "schema_version");
  if (c.schema_version != kRunConfigSchemaVersion) {
    r.Fail(root["schema_version"], "schema_version",
           "unsupported version (this build reads " +
               std::to_string(kRunConfigSchemaVersion) + ")");
  }
  if (auto n = root["seed"]) c.attack.seed = r.Seed(n, "seed");
  if (auto n = root["workers"]) c.workers = r.Int(n, "workers");
  if (auto n = root["output_dir"]) c.output_dir = r.Path(n, "output_dir", base);
  if (auto n = root["lexicon"]) c.lexicon = r.Path(n, "lexicon", base);

  if (auto a = root["adapter"]) {
    r.CheckKeys(a, "adapter",
                {"name", "seed", "patch_size", "embedding_dim", "input_shape"});
    if (auto n = a["name"]) {
      c.adapter.name = r.String(n, "adapter.name");
      const auto known = KnownAdapters();
      if (std::find(known.begin(), known.end(), c.adapter.name) == known.end()) {
        r.Fail(n, "adapter.name", "unknown adapter '" + c.adapter.name + "'");
      }
    }
    if (auto n = a["seed"]) c.adapter.seed = r.Seed(n, "adapter.seed");
    if (auto n = a["patch_size"]) c.adapter.patch_size = r.Int(n, "adapter.patch_size");
    if (auto n = a["embedding_dim"]) {
      c.adapter.embedding_dim = r.Int(n, "adapter.embedding_dim");
    }
    if (auto n = a["input_shape"]) {
      if (!n.IsSequence() || n.size() != 3) {
        r.Fail(n, "adapter.input_shape", "expected [height, width, channels]");
      }
      c.adapter.input_shape = {r.Int(n[0], "adapter.input_shape"),
                               r.Int(n[1], "adapter.input_shape"),
                               r.Int(n[2], "adapter.input_shape")};
      if (c.adapter.input_shape.height < 1 || c.adapter.input_shape.width < 1 ||
          c.adapter.input_shape.channels < 1) {
        r.Fail(n, "adapter.input_shape", "dimensions must be positive");
      }
    }
  }

  YAML::Node attack = root["attack"];
  if (attack) {
    r.CheckKeys(attack, "attack",
                {"kind", "outer_steps", "inner_steps", "step_size", "epsilon",
                 "prompt_count", "use_min_max", "harden_every"});
    if (auto n = attack["kind"]) {
      const std::string kind = r.String(n, "attack.kind");
      auto parsed = ParseAttackKind(kind);
      if (!parsed) {
        r.Fail(n, "attack.kind",
               "unknown kind '" + kind +
                   "' (random-noise, pgd-single, multi-prompt, freezevla)");
      }
      c.attack_kind = *parsed;
    }
    if (auto n = attack["outer_steps"]) c.attack.outer_steps = r.Int(n, "attack.outer_steps");
    if (auto n = attack["inner_steps"]) c.attack.inner_steps = r.Int(n, "attack.inner_steps");
    if (auto n = attack["step_size"]) c.attack.step_size = r.Real(n, "attack.step_size");
    if (auto n = attack["epsilon"]) c.attack.epsilon = r.Real(n, "attack.epsilon");
    if (auto n = attack["prompt_count"]) {
      c.attack.prompt_count = r.Int(n, "attack.prompt_count");
    }
    if (auto n = attack["use_min_max"]) c.attack.use_min_max = r.Bool(n, "attack.use_min_max");
    if (auto n = attack["harden_every"]) {
      c.attack.harden_every = r.Int(n, "attack.harden_every");
    }
  }

  YAML::Node prompts = root["prompts"];
  if (!prompts) r.Fail(root, "prompts", "required");
  r.CheckKeys(prompts, "prompts", {"source", "reference_corpus", "template"});
  if (auto n = prompts["source"]) {
    const std::string s = r.String(n, "prompts.source");
    auto parsed = ParsePromptSourceKind(s);
    if (!parsed) {
      r.Fail(n, "prompts.source",
             "unknown source '" + s + "' (corpus-random, llm-generated)");
    }
    c.attack.prompt_source = *parsed;
  }
  if (!prompts["reference_corpus"]) {
    r.Fail(prompts, "prompts.reference_corpus", "required");
  }
  c.reference_corpus =
      r.Path(prompts["reference_corpus"], "prompts.reference_corpus", base);
  if (auto n = prompts["template"]) {
    c.template_name = r.String(n, "prompts.template");
    if (!TemplateByName(c.template_name)) {
      r.Fail(n, "prompts.template",
             "unknown template '" + c.template_name + "' (default, openvla, bare)");
    }
  }

  if (auto f = root["freeze"]) {
    r.CheckKeys(f, "freeze", {"token_ids", "detection_repeats"});
    if (auto n = f["token_ids"]) {
      if (!n.IsSequence() || n.size() == 0) {
        r.Fail(n, "freeze.token_ids", "expected a non-empty list");
      }
      c.freeze_token_ids.clear();
      for (const auto& id : n) {
        const int v = r.Int(id, "freeze.token_ids");
        if (v < 0) r.Fail(id, "freeze.token_ids", "ids must be >= 0");
        c.freeze_token_ids.push_back(v);
      }
    }
    if (auto n = f["detection_repeats"]) {
      c.detection_repeats = r.Int(n, "freeze.detection_repeats");
      if (*c.detection_repeats < 1) {
        r.Fail(n, "freeze.detection_repeats", "must be >= 1");
      }
    }
  }

  if (auto e = root["evaluation"]) {
    r.CheckKeys(e, "evaluation", {"images", "image_seed", "tasks"});
    if (auto n = e["images"]) {
      c.images = r.Int(n, "evaluation.images");
      if (c.images < 1) r.Fail(n, "evaluation.images", "must be >= 1");
    }
    if (auto n = e["image_seed"]) c.image_seed = r.Seed(n, "evaluation.image_seed");
    if (auto tasks = e["tasks"]) {
      if (!tasks.IsSequence()) r.Fail(tasks, "evaluation.tasks", "expected a list");
      std::set<std::string> names;
      for (const auto& t : tasks) {
        r.CheckKeys(t, "evaluation.tasks[]", {"name", "corpus"});
        if (!t["name"]) r.Fail(t, "evaluation.tasks[].name", "required");
        if (!t["corpus"]) r.Fail(t, "evaluation.tasks[].corpus", "required");
        TaskSpec task{r.String(t["name"], "evaluation.tasks[].name"),
                      r.Path(t["corpus"], "evaluation.tasks[].corpus", base)};
        if (task.name.empty()) r.Fail(t["name"], "evaluation.tasks[].name", "empty");
        if (!names.insert(task.name).second) {
          r.Fail(t["name"], "evaluation.tasks[].name",
                 "duplicate task '" + task.name + "'");
        }
        c.tasks.push_back(std::move(task));
      }
    }
  }

  if (auto s = root["sweep"]) {
    r.CheckKeys(s, "sweep", {"axes", "cell_limit"});
    if (auto n = s["cell_limit"]) {
      const long long v = r.Integer(n, "sweep.cell_limit");
      if (v < 1) r.Fail(n, "sweep.cell_limit", "must be >= 1");
      c.cell_limit = static_cast<std::size_t>(v);
    }
    if (auto axes = s["axes"]) {
      if (!axes.IsSequence()) r.Fail(axes, "sweep.axes", "expected a list");
      const auto& known = ConfigAxisNames();
      for (const auto& a : axes) {
        r.CheckKeys(a, "sweep.axes[]", {"name", "values"});
        if (!a["name"]) r.Fail(a, "sweep.axes[].name", "required");
        SweepAxis axis{r.String(a["name"], "sweep.axes[].name"), {}};
        if (std::find(known.begin(), known.end(), axis.name) == known.end()) {
          r.Fail(a["name"], "sweep.axes[].name", "unknown axis '" + axis.name + "'");
        }
        auto values = a["values"];
        if (!values || !values.IsSequence() || values.size() == 0) {
          r.Fail(values ? values : YAML::Node(a), "sweep.axes[].values",
                 "expected a non-empty list");
        }
        for (const auto& v : values) {
          axis.values.push_back(r.Real(v, "sweep.axes[].values"));
          try {
            (void)WithAxisValue(c.attack, axis.name, axis.values.back());
          } catch (const Error& ex) {
            r.Fail(v, "sweep.axes[].values", ex.what());
          }
        }
        c.sweep_axes.push_back(std::move(axis));
      }
    }
  }

  // Cross-field checks, anchored at the offending key when it is present.
  try {
    c.attack.Validate();
  } catch (const Error& ex) {
    const std::string msg = ex.what();
    YAML::Node anchor = attack ? attack : root;
    std::string key = "attack";
    for (const char* field : {"step_size", "epsilon", "outer_steps", "inner_steps",
                              "prompt_count", "harden_every"}) {
      if (msg.find(field) != std::string::npos && attack && attack[field]) {
        anchor = attack[field];
        key = std::string("attack.") + field;
        break;
      }
    }
    r.Fail(anchor, key, msg);
  }
  try {
    c.Validate();
  } catch (const Error& ex) {
    r.Fail(root, "<config>", ex.what());
  }
  return c;
}

RunConfig LoadRunConfig(const fs::path& path) {
  return ParseRunConfig(ReadFileBytes(path), path);
}

std::string CanonicalConfigJson(const RunConfig& c) {
  ordered_json doc;
  doc["schema_version"] = c.schema_version;
  doc["seed"] = c.attack.seed;
  doc["adapter"] = {
      {"name", c.adapter.name},
      {"seed", c.adapter.seed},
      {"patch_size", c.adapter.patch_size},
      {"embedding_dim", c.adapter.embedding_dim},
      {"input_shape", {c.adapter.input_shape.height, c.adapter.input_shape.width,
                       c.adapter.input_shape.channels}},
  };
  doc["attack"] = {
      {"kind", AttackKindName(c.attack_kind)},
      {"outer_steps", c.attack.outer_steps},
      {"inner_steps", c.attack.inner_steps},
      {"step_size", c.attack.step_size},
      {"epsilon", c.attack.epsilon},
      {"prompt_count", c.attack.prompt_count},
      {"use_min_max", c.attack.use_min_max},
      {"harden_every", c.attack.harden_every},
  };
  doc["prompts"] = {
      {"source", PromptSourceKindName(c.attack.prompt_source)},
      {"template", c.template_name},
      {"reference_corpus_fnv1a64", ContentDigest(c.reference_corpus)},
  };
  doc["lexicon_fnv1a64"] =
      c.lexicon.empty() ? ordered_json() : ordered_json(ContentDigest(c.lexicon));
  doc["freeze"] = {
      {"token_ids", c.freeze_token_ids},
      {"detection_repeats", c.detection_repeats ? ordered_json(*c.detection_repeats)
                                                : ordered_json()},
  };
  ordered_json tasks = ordered_json::array();
  for (const auto& t : c.tasks) {
    tasks.push_back({{"name", t.name}, {"corpus_fnv1a64", ContentDigest(t.corpus)}});
  }
  doc["evaluation"] = {
      {"images", c.images},
      {"image_seed", c.scene_seed()},
      {"tasks", tasks},
  };
  return doc.dump();
}

std::string ConfigHash(const RunConfig& config) {
  return HexDigest(Fnv1a64(CanonicalConfigJson(config)));
}

}  // namespace vlafreeze::cli
