// Copyright (c) 2026 The accentbn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "accentbn/accentbn.h"
#include "json.hpp"

namespace {

using nlohmann::json;
using WorkflowFn = abn_status (*)(const char*, char**);

int ExitCode(abn_status s) {
  switch (s) {
    case ABN_OK: return 0;
    case ABN_ERR_NUMERIC: return 3;
    case ABN_ERR_INTERNAL: return 1;
    default: return 2;
  }
}

struct Command {
  CLI::App* app = nullptr;
  WorkflowFn fn = nullptr;
  std::string config_path;
  std::map<std::string, std::string> strings;  // config key -> flag value
  std::optional<uint64_t> seed;
  std::vector<std::string> sets;
  // Train only.
  std::optional<long long> max_steps;
  std::optional<int> batch_size;
  std::optional<long long> checkpoint_interval;
  std::optional<double> learning_rate;
  bool single_batch = false;
};

void AddString(Command& c, const std::string& flag, const std::string& key,
               const std::string& help) {
  c.app->add_option_function<std::string>(
      flag, [&c, key](const std::string& v) { c.strings[key] = v; }, help);
}

Command& AddCommand(CLI::App& app, std::vector<std::unique_ptr<Command>>& cmds,
                    const std::string& name, const std::string& help,
                    WorkflowFn fn) {
  auto& c = *cmds.emplace_back(std::make_unique<Command>());
  c.app = app.add_subcommand(name, help);
  c.fn = fn;
  c.app->add_option("--config", c.config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  c.app->add_option("--seed", c.seed, "Random seed (default: $ACCENTBN_SEED or 1)");
  c.app->add_option("--set", c.sets, "Override a config value: key=json")
      ->take_all();
  return c;
}

json ParseValue(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

// Applies "a.b.c=value" to the config tree.
void ApplySet(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw CLI::ValidationError("--set", "expected key=value, got '" + assignment + "'");
  }
  json* node = &config;
  std::stringstream path(assignment.substr(0, eq));
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (!next.is_object()) next = json::object();
    node = &next;
  }
  (*node)[parts.back()] = ParseValue(assignment.substr(eq + 1));
}

int Run(const Command& c) {
  json config = json::object();
  if (!c.config_path.empty()) {
    std::ifstream is(c.config_path);
    try {
      config = json::parse(is);
    } catch (const json::parse_error& e) {
      std::cerr << "error: " << c.config_path << ": " << e.what() << '\n';
      return 2;
    }
    if (!config.is_object()) {
      std::cerr << "error: " << c.config_path << ": expected a JSON object\n";
      return 2;
    }
  }
  for (const auto& [key, value] : c.strings) config[key] = value;
  if (c.seed) config["seed"] = *c.seed;
  if (c.max_steps) config["train"]["max_steps"] = *c.max_steps;
  if (c.batch_size) config["train"]["batch_size"] = *c.batch_size;
  if (c.checkpoint_interval) config["train"]["checkpoint_interval"] = *c.checkpoint_interval;
  if (c.learning_rate) config["train"]["lr"] = *c.learning_rate;
  if (c.single_batch) config["train"]["single_batch"] = true;
  for (const auto& s : c.sets) ApplySet(config, s);

  char* summary = nullptr;
  const abn_status status = c.fn(config.dump().c_str(), &summary);
  if (status != ABN_OK) {
    std::cerr << "error: " << abn_last_error()
              << '\n';
    return ExitCode(status);
  }
  std::cout << json::parse(summary).dump(2) << '\n';
  abn_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accent TTS toolkit: bottleneck-feature cascade"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(abn_version()));
  std::vector<std::unique_ptr<Command>> cmds;

  auto& prep = AddCommand(app, cmds, "prepare-data",
                          "Validate a manifest and compute features", abn_prepare_data);
  AddString(prep, "--manifest", "manifest", "Input manifest (JSONL)");
  AddString(prep, "--out", "out", "Output artifact directory");

  auto& train = AddCommand(app, cmds, "train", "Train a model", abn_train);
  AddString(train, "--model", "model", "t2bn | bn2bn | bn2mel");
  train.app->get_option("--model")->check(CLI::IsMember({"t2bn", "bn2bn", "bn2mel"}));
  AddString(train, "--data", "data",
            "Prepared manifest (t2bn, bn2mel) or pair manifest (bn2bn)");
  AddString(train, "--out", "out", "Output run directory");
  AddString(train, "--resume", "resume", "Checkpoint to resume from");
  train.app->add_option("--max-steps", train.max_steps);
  train.app->add_option("--batch-size", train.batch_size);
  train.app->add_option("--checkpoint-interval", train.checkpoint_interval);
  train.app->add_option("--lr", train.learning_rate);
  train.app->add_flag("--single-batch", train.single_batch,
                      "Train on one fixed batch");

  auto& aug = AddCommand(app, cmds, "augment",
                         "Build the parallel accent corpus", abn_augment);
  AddString(aug, "--accent-manifest", "accent_manifest", "Prepared accent manifest");
  AddString(aug, "--t2bn-ckpt", "t2bn_ckpt", "Trained T2BN checkpoint");
  AddString(aug, "--out", "out", "Output directory");
  AddString(aug, "--accent", "accent", "Accent to select");

  auto& syn = AddCommand(app, cmds, "synthesize", "Synthesize accented speech",
                         abn_synthesize);
  AddString(syn, "--text-manifest", "text_manifest", "Manifest with phonemes");
  AddString(syn, "--t2bn-ckpt", "t2bn_ckpt", "T2BN checkpoint");
  AddString(syn, "--bn2bn-ckpt", "bn2bn_ckpt", "BN2BN checkpoint (optional)");
  AddString(syn, "--bn2mel-ckpt", "bn2mel_ckpt", "BN2Mel checkpoint");
  AddString(syn, "--spk-ac", "spk_ac", "Accent speaker name");
  AddString(syn, "--durations", "durations", "predicted | reference");
  AddString(syn, "--out", "out", "Output directory");

  auto& ev = AddCommand(app, cmds, "evaluate", "Score a synthesized system",
                        abn_evaluate);
  AddString(ev, "--system-dir", "system_dir", "Output of synthesize");
  AddString(ev, "--reference-manifest", "reference_manifest", "Reference manifest");
  AddString(ev, "--system", "system", "System label in the report");
  AddString(ev, "--out", "out", "Report directory");

  auto& gen = AddCommand(app, cmds, "generate-synthetic",
                         "Write a synthetic corpus with a known accent transform",
                         abn_generate_synthetic);
  AddString(gen, "--out", "out", "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const auto& c : cmds) {
    if (c->app->parsed()) {
      try {
        return Run(*c);
      } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
      }
    }
  }
  return 2;
}
