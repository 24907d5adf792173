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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/feature_io.h"
#include "core/manifest.h"
#include "core/wav.h"
#include "doctest.h"
#include "json.hpp"
#include "support/fixtures.h"
#include "support/schema.h"

namespace accentbn {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct Result {
  int rc = -1;
  std::string out;
  std::string err;
  json summary;
};

std::string Quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI with the given arguments; env is prepended verbatim.
Result Run(const std::vector<std::string>& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path base = fs::temp_directory_path() /
                        ("abn_cli_" + std::to_string(::getpid()) + "_" +
                         std::to_string(counter++));
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += Quote(ACCENTBN_CLI);
  for (const auto& a : args) cmd += " " + Quote(a);
  cmd += " >" + Quote(base.string() + ".out") + " 2>" + Quote(base.string() + ".err");
  const int status = std::system(cmd.c_str());
  Result r;
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(base.string() + ".out");
  r.err = ReadFile(base.string() + ".err");
  fs::remove(base.string() + ".out");
  fs::remove(base.string() + ".err");
  if (r.rc == 0 && !r.out.empty()) r.summary = json::parse(r.out, nullptr, false);
  return r;
}

Result RunOk(const std::vector<std::string>& args, const std::string& env = "") {
  Result r = Run(args, env);
  INFO(r.err);
  REQUIRE(r.rc == 0);
  return r;
}

std::vector<std::string> Tiny(const std::string& model) {
  if (model == "t2bn") {
    return {"--set", "model_config.encoder_layers=1", "model_config.decoder_layers=1",
            "model_config.hidden=16", "model_config.filter=32"};
  }
  if (model == "bn2bn") {
    return {"--set", "model_config.fft_layers=1", "model_config.hidden=16",
            "model_config.filter=32", "model_config.speaker_dim=8"};
  }
  return {"--set", "model_config.cbhg_dim=8", "model_config.bank_size=2",
          "model_config.projection_dim=8", "model_config.gru_dim=8",
          "model_config.decoder_dim=8", "model_config.prenet_dims=[16,8]",
          "model_config.postnet_channels=8", "model_config.highway_layers=1",
          "model_config.speaker_dim=8"};
}

std::vector<std::string> Cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

size_t CountLines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

// Every record of a manifest: mel width 80, BN width bn_dim, and the BN
// frame count equal to the mel frame count.
void CheckFeatureContracts(const fs::path& manifest_path, int bn_dim) {
  const Manifest m = LoadManifest(manifest_path);
  REQUIRE_FALSE(m.records.empty());
  for (const auto& r : m.records) {
    INFO(r.utt_id);
    const Matrix mel = LoadFeatures(m.Resolve(r.mel_path));
    CHECK(mel.cols() == 80);
    if (!r.bn_path.empty()) {
      const Matrix bn = LoadFeatures(m.Resolve(r.bn_path));
      CHECK(bn.cols() == bn_dim);
      CHECK(bn.rows() == mel.rows());
    }
    if (!r.wav_path.empty()) {
      const Waveform w = ReadWav(m.Resolve(r.wav_path));
      CHECK(w.sample_rate == 16000);
      CHECK(w.samples.size() == size_t(mel.rows()) * 200);
    }
  }
}

// Generated corpus, prepared features and trained tiny models shared by the
// cases below.
struct Pipeline {
  TempDir dir;
  std::string Path(const std::string& p) const { return (dir / p).string(); }

  Pipeline() {
    RunOk({"generate-synthetic", "--out", Path("syn"), "--seed", "5", "--set",
           "spec.bn_dim=16", "spec.target_utterances=8", "spec.accent_utterances=10"});
    RunOk({"prepare-data", "--manifest", Path("syn/target/manifest.jsonl"), "--out", Path("prep_t")});
    RunOk({"prepare-data", "--manifest", Path("syn/accent/manifest.jsonl"), "--out", Path("prep_a")});
    RunOk(Cat({"train", "--model", "t2bn", "--data", Path("prep_t/manifest.jsonl"), "--out",
               Path("t2bn"), "--max-steps", "20", "--batch-size", "4"},
              Tiny("t2bn")));
    RunOk({"augment", "--accent-manifest", Path("prep_a/manifest.jsonl"), "--t2bn-ckpt",
           Path("t2bn/final.ckpt"), "--out", Path("aug")});
    RunOk(Cat({"train", "--model", "bn2bn", "--data", Path("aug/pairs.jsonl"), "--out",
               Path("bn2bn"), "--max-steps", "5", "--batch-size", "4"},
              Tiny("bn2bn")));
    RunOk(Cat({"train", "--model", "bn2mel", "--data", Path("prep_a/manifest.jsonl"), "--out",
               Path("bn2mel"), "--max-steps", "5", "--batch-size", "4"},
              Tiny("bn2mel")));
  }
};

Pipeline& Shared() {
  static Pipeline p;
  return p;
}

std::vector<std::string> Synth(const Pipeline& p, const std::string& out, bool with_bn2bn) {
  std::vector<std::string> a{"synthesize", "--text-manifest", p.Path("prep_a/manifest.jsonl"),
                             "--t2bn-ckpt", p.Path("t2bn/final.ckpt"), "--bn2mel-ckpt",
                             p.Path("bn2mel/final.ckpt"), "--out", p.Path(out), "--set",
                             "griffin_lim_iterations=4"};
  if (with_bn2bn) {
    a = Cat(a, {"--bn2bn-ckpt", p.Path("bn2bn/final.ckpt"), "--spk-ac", "acc_spk_0000"});
  }
  return a;
}

TEST_CASE("usage and argument errors") {
  CHECK(Run({"--help"}).rc == 0);
  CHECK(Run({}).rc == 2);
  CHECK(Run({"no-such-command"}).rc == 2);
  CHECK(Run({"train", "--model", "rnn", "--data", "x", "--out", "y"}).rc == 2);
  CHECK(Run({"prepare-data", "--config", "/nonexistent.json"}).rc == 2);
  const auto r = Run({"prepare-data", "--manifest", "/nonexistent/manifest.jsonl", "--out", "/tmp/abn_never"});
  CHECK(r.rc == 2);
  CHECK(r.err.rfind("error: ", 0) == 0);
  CHECK_FALSE(fs::exists("/tmp/abn_never"));
}

TEST_CASE("config files and overrides combine") {
  TempDir dir;
  WriteFile(dir / "gen.json", json{{"out", (dir / "from_file").string()},
                                   {"spec", {{"bn_dim", 8}, {"target_utterances", 3}}}}
                                  .dump());
  auto r = RunOk({"generate-synthetic", "--config", (dir / "gen.json").string(), "--set",
                  "spec.accent_utterances=2"});
  CHECK(r.summary["target_utterances"] == 3);
  CHECK(r.summary["accent_utterances"] == 2);
  const json stored = json::parse(ReadFile(dir / "from_file" / "config.json"));
  CHECK(stored["spec"]["bn_dim"] == 8);
  CHECK(Run({"generate-synthetic", "--config", (dir / "gen.json").string(), "--set", "novalue"}).rc == 2);
}

TEST_CASE("seed comes from the flag, then the environment") {
  TempDir dir;
  const std::vector<std::string> base{"generate-synthetic", "--set", "spec.bn_dim=8",
                                      "spec.target_utterances=3", "spec.accent_utterances=2",
                                      "--out"};
  RunOk(Cat(base, {(dir / "flag").string(), "--seed", "9"}));
  RunOk(Cat(base, {(dir / "env").string()}), "ACCENTBN_SEED=9");
  RunOk(Cat(base, {(dir / "other").string()}), "ACCENTBN_SEED=10");
  RunOk(Cat(base, {(dir / "override").string(), "--seed", "9"}), "ACCENTBN_SEED=10");
  const auto bytes = [&](const char* d) { return ReadFile(dir / d / "transform.abnf"); };
  CHECK(bytes("flag") == bytes("env"));
  CHECK(bytes("flag") == bytes("override"));
  CHECK(bytes("flag") != bytes("other"));
  CHECK(json::parse(ReadFile(dir / "env" / "config.json"))["seed"] == 9);
  CHECK(Run(Cat(base, {(dir / "bad").string()}), "ACCENTBN_SEED=abc").rc == 2);
  CHECK_FALSE(fs::exists(dir / "bad"));
}

TEST_CASE("prepare-data writes 80-band mels and BN of the corpus width") {
  auto& p = Shared();
  CheckFeatureContracts(p.Path("prep_t/manifest.jsonl"), 16);
  CheckFeatureContracts(p.Path("prep_a/manifest.jsonl"), 16);
  CHECK(fs::exists(p.Path("prep_t/stats/mel.abnf")));
  CHECK(fs::exists(p.Path("prep_t/stats/bn.abnf")));
}

TEST_CASE("prepare-data is idempotent") {
  auto& p = Shared();
  RunOk({"prepare-data", "--manifest", p.Path("syn/target/manifest.jsonl"), "--out", p.Path("prep_t2")});
  RunOk({"prepare-data", "--manifest", p.Path("syn/target/manifest.jsonl"), "--out", p.Path("prep_t2")});
  CHECK(ReadFile(p.Path("prep_t/manifest.jsonl")) == ReadFile(p.Path("prep_t2/manifest.jsonl")));
  for (const auto& e : fs::directory_iterator(p.Path("prep_t/feats"))) {
    CHECK(ReadFile(e.path()) == ReadFile(p.Path("prep_t2/feats") / e.path().filename()));
  }
  fs::remove_all(p.Path("prep_t2"));
}

TEST_CASE("prepare-data rejects duplicate ids and leaves no output") {
  auto& p = Shared();
  std::string text = ReadFile(p.Path("syn/target/manifest.jsonl"));
  std::istringstream lines(text);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  WriteFile(p.Path("syn/target/dup.jsonl"), header + "\n" + first + "\n" + first + "\n");
  const json rec = json::parse(first);
  const auto r = Run({"prepare-data", "--manifest", p.Path("syn/target/dup.jsonl"), "--out", p.Path("prep_dup")});
  CHECK(r.rc == 2);
  CHECK(r.err.find(rec["utt_id"].get<std::string>()) != std::string::npos);
  CHECK_FALSE(fs::exists(p.Path("prep_dup")));
  for (const auto& e : fs::directory_iterator(p.dir.path())) {
    CHECK(e.path().filename().string().find("staging") == std::string::npos);
  }
}

TEST_CASE("train logs one row per step and is reproducible") {
  auto& p = Shared();
  const auto args = Cat({"train", "--model", "t2bn", "--data", p.Path("prep_t/manifest.jsonl"),
                         "--max-steps", "200", "--batch-size", "4", "--seed", "2",
                         "--checkpoint-interval", "100"},
                        Tiny("t2bn"));
  const auto r = RunOk(Cat(args, {"--out", p.Path("t2bn_a")}));
  RunOk(Cat(args, {"--out", p.Path("t2bn_b")}));
  const std::string csv = ReadFile(p.Path("t2bn_a/loss.csv"));
  CHECK(CountLines(csv) == 201);
  CHECK(csv == ReadFile(p.Path("t2bn_b/loss.csv")));
  CHECK(r.summary["steps"] == 200);
  CHECK(fs::exists(p.Path("t2bn_a/checkpoints/step_0000100.ckpt")));
  CHECK(fs::exists(p.Path("t2bn_a/final.ckpt")));
  const json cfg = json::parse(ReadFile(p.Path("t2bn_a/config.json")));
  CHECK(cfg["model_config"]["hidden"] == 16);
  CHECK(cfg["train"]["lr"] == doctest::Approx(2e-4));
  CHECK(cfg["train"]["beta2"] == doctest::Approx(0.98));

  // Resuming from the step-100 checkpoint reproduces the remaining curve.
  RunOk(Cat(args, {"--out", p.Path("t2bn_c"), "--resume",
                   p.Path("t2bn_a/checkpoints/step_0000100.ckpt")}));
  CHECK(ReadFile(p.Path("t2bn_c/loss.csv")) == csv);
  for (const char* d : {"t2bn_a", "t2bn_b", "t2bn_c"}) fs::remove_all(p.Path(d));
}

TEST_CASE("train input errors") {
  auto& p = Shared();
  CHECK(Run({"train", "--model", "bn2bn", "--data", p.Path("missing.jsonl"), "--out", p.Path("x")}).rc == 2);
  CHECK(Run({"train", "--model", "bn2bn", "--data", p.Path("prep_a/manifest.jsonl"), "--out", p.Path("x")}).rc == 2);
  CHECK(Run({"train", "--model", "t2bn", "--data", p.Path("prep_t/manifest.jsonl"), "--out", p.Path("x"),
             "--batch-size", "0"}).rc == 2);
  CHECK(Run({"train", "--model", "t2bn", "--data", p.Path("prep_t/manifest.jsonl"), "--out", p.Path("x"),
             "--resume", p.Path("bn2bn/final.ckpt")}).rc == 2);
  CHECK_FALSE(fs::exists(p.Path("x")));
}

TEST_CASE("numeric failure exits 3 and keeps the run aside") {
  auto& p = Shared();
  const auto r = Run(Cat({"train", "--model", "t2bn", "--data", p.Path("prep_t/manifest.jsonl"),
                          "--out", p.Path("boom"), "--max-steps", "200", "--lr", "1e300"},
                         Tiny("t2bn")));
  CHECK(r.rc == 3);
  CHECK_FALSE(fs::exists(p.Path("boom")));
  CHECK(fs::exists(p.Path("boom.failed/diagnostic.ckpt")));
  fs::remove_all(p.Path("boom.failed"));
}

TEST_CASE("augment pairs every accented record") {
  auto& p = Shared();
  const std::string first = ReadFile(p.Path("aug/pairs.jsonl"));
  CHECK(CountLines(first) == 11);
  std::istringstream lines(first);
  std::string line;
  std::getline(lines, line);
  CHECK(json::parse(line)["format"] == "accentbn-pairs");
  while (std::getline(lines, line)) {
    const json rec = json::parse(line);
    const Matrix ua = LoadFeatures(p.Path("aug") + "/" + rec["bn_ua_path"].get<std::string>());
    const Matrix ac = LoadFeatures(p.Path("aug") + "/" + rec["bn_ac_path"].get<std::string>());
    CHECK(ua.rows() == rec["frames"].get<long>());
    CHECK(ac.rows() == ua.rows());
    CHECK(ua.cols() == 16);
    CHECK(ac.cols() == 16);
  }
}

// Rewrites a prepared manifest in place with the first record's durations
// off by `extra` frames, or every record's when all is set.
std::string Shifted(const Pipeline& p, const std::string& name, int extra, bool all) {
  std::istringstream lines(ReadFile(p.Path("prep_a/manifest.jsonl")));
  std::string line, out;
  std::getline(lines, line);
  out = line + "\n";
  bool done = false;
  while (std::getline(lines, line)) {
    json rec = json::parse(line);
    if (all || !done) rec["durations"][0] = rec["durations"][0].get<int>() + extra;
    done = true;
    out += rec.dump() + "\n";
  }
  const std::string path = p.Path("prep_a/" + name);
  WriteFile(path, out);
  return path;
}

TEST_CASE("augment warns on mismatched durations and fails when nothing is left") {
  auto& p = Shared();
  const auto ckpt = p.Path("t2bn/final.ckpt");
  auto r = RunOk({"augment", "--accent-manifest", Shifted(p, "off1.jsonl", 1, false),
                  "--t2bn-ckpt", ckpt, "--out", p.Path("aug_trim")});
  CHECK(r.summary["pairs"] == 10);
  CHECK(r.err.find("warning:") != std::string::npos);

  r = RunOk({"augment", "--accent-manifest", Shifted(p, "off9.jsonl", 9, false),
             "--t2bn-ckpt", ckpt, "--out", p.Path("aug_skip")});
  CHECK(r.summary["pairs"] == 9);
  CHECK(r.summary["skipped"] == 1);
  CHECK(r.err.find("skipped") != std::string::npos);

  r = Run({"augment", "--accent-manifest", Shifted(p, "all9.jsonl", 9, true),
           "--t2bn-ckpt", ckpt, "--out", p.Path("aug_none")});
  CHECK(r.rc == 2);
  CHECK_FALSE(fs::exists(p.Path("aug_none")));
  for (const char* d : {"aug_trim", "aug_skip"}) fs::remove_all(p.Path(d));
}

TEST_CASE("synthesize writes one wav and one mel per line with the same frame counts") {
  auto& p = Shared();
  RunOk(Synth(p, "syn_with", true));
  RunOk(Synth(p, "syn_without", false));
  const Manifest text = LoadManifest(p.Path("prep_a/manifest.jsonl"));
  const Manifest with = LoadManifest(p.Path("syn_with/manifest.jsonl"));
  const Manifest without = LoadManifest(p.Path("syn_without/manifest.jsonl"));
  REQUIRE(with.records.size() == text.records.size());
  REQUIRE(without.records.size() == text.records.size());
  for (size_t i = 0; i < with.records.size(); ++i) {
    INFO(with.records[i].utt_id);
    CHECK(with.records[i].utt_id == text.records[i].utt_id);
    CHECK(with.records[i].durations == without.records[i].durations);
    const Matrix a = LoadFeatures(with.Resolve(with.records[i].mel_path));
    const Matrix b = LoadFeatures(without.Resolve(without.records[i].mel_path));
    CHECK(a.rows() == b.rows());
    CHECK(a.rows() == with.records[i].durations->Total());
  }
  CheckFeatureContracts(p.Path("syn_with/manifest.jsonl"), 16);
  CheckFeatureContracts(p.Path("syn_without/manifest.jsonl"), 16);

  const auto r = Run(Cat(Synth(p, "syn_bad", false),
                         {"--bn2bn-ckpt", p.Path("bn2bn/final.ckpt"), "--spk-ac", "nobody"}));
  CHECK(r.rc == 2);
  CHECK(r.err.find("nobody") != std::string::npos);
  CHECK_FALSE(fs::exists(p.Path("syn_bad")));
}

TEST_CASE("evaluate writes a schema-valid report") {
  auto& p = Shared();
  std::ifstream is(ACCENTBN_SCHEMA_DIR "/eval_report.schema.json");
  const json schema = json::parse(is);

  RunOk({"evaluate", "--system-dir", p.Path("prep_a"), "--reference-manifest",
         p.Path("prep_a/manifest.jsonl"), "--out", p.Path("ev_self"), "--system", "self"});
  json report = json::parse(ReadFile(p.Path("ev_self/report.json")));
  CHECK(testing::SchemaErrors(schema, report).empty());
  CHECK(report["duration_mae"] == 0.0);
  CHECK(report["cosine_similarity"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report["system"] == "self");
  CHECK(report["utterances"].size() == 10);

  if (!fs::exists(p.Path("syn_with"))) RunOk(Synth(p, "syn_with", true));
  if (!fs::exists(p.Path("syn_without"))) RunOk(Synth(p, "syn_without", false));
  json maes;
  for (const char* sys : {"syn_with", "syn_without"}) {
    RunOk({"evaluate", "--system-dir", p.Path(sys), "--reference-manifest",
           p.Path("prep_a/manifest.jsonl"), "--out", p.Path(std::string("ev_") + sys)});
    report = json::parse(ReadFile(p.Path(std::string("ev_") + sys + "/report.json")));
    CHECK(testing::SchemaErrors(schema, report).empty());
    double mass = 0;
    for (double d : report["histogram"]["densities"]) mass += d;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(CountLines(ReadFile(p.Path(std::string("ev_") + sys + "/utterances.csv"))) == 11);
    maes.push_back(report["duration_mae"]);
  }
  CHECK(maes[0] == maes[1]);
  CHECK(Run({"evaluate", "--system-dir", p.Path("nowhere"), "--reference-manifest",
             p.Path("prep_a/manifest.jsonl"), "--out", p.Path("ev_x")}).rc == 2);
}

}  // namespace
}  // namespace accentbn
