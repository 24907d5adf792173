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

#include "augment/synthetic.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <Eigen/QR>

#include "core/error.h"
#include "core/feature_io.h"

namespace accentbn::augment {
namespace {

using nlohmann::json;

constexpr double kMelLevel = -4.0;

Matrix Gaussian(Eigen::Index rows, Eigen::Index cols, double stddev,
                std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

Matrix RandomOrthogonal(int n, std::mt19937_64& rng) {
  const Matrix g = Gaussian(n, n, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Sign fix so the draw is uniform over the orthogonal group.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  return q;
}

std::string Id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d", prefix, i);
  return buf;
}

struct Utterance {
  std::vector<std::string> phonemes;
  std::vector<int> durations;
  Matrix bn;
};

Utterance DrawUtterance(const SyntheticAccentSpec& spec,
                        const Matrix& prototypes, const Matrix& slopes,
                        const Vocabulary& phonemes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(spec.min_phonemes, spec.max_phonemes);
  std::uniform_int_distribution<int> ph(0, spec.num_phonemes - 1);
  std::uniform_int_distribution<int> dur(spec.min_duration, spec.max_duration);
  std::normal_distribution<double> jitter(0.0, spec.jitter);
  Utterance u;
  const int n = len(rng);
  std::vector<int> ids(n);
  int total = 0;
  for (int i = 0; i < n; ++i) {
    ids[i] = ph(rng);
    u.phonemes.push_back(phonemes.Token(ids[i]));
    u.durations.push_back(dur(rng));
    total += u.durations.back();
  }
  u.bn.resize(total, spec.bn_dim);
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i) {
    const int d = u.durations[i];
    for (int k = 0; k < d; ++k) {
      const double r = (k + 0.5) / d;
      u.bn.row(row) = prototypes.row(ids[i]) + (r - 0.5) * slopes.row(ids[i]);
      for (Eigen::Index c = 0; c < u.bn.cols(); ++c) u.bn(row, c) += jitter(rng);
      ++row;
    }
  }
  return u;
}

Matrix MelFromBN(const Matrix& bn, const Matrix& mel_map,
                 const RowVector& offset) {
  Matrix mel = (bn * mel_map).rowwise() + offset;
  return mel.cwiseMax(std::log(kLogFloor));
}

}  // namespace

void SyntheticAccentSpec::Validate() const {
  ACCENTBN_CHECK(bn_dim >= 1 && num_phonemes >= 1 && num_speakers >= 1 &&
                     target_utterances >= 1 && accent_utterances >= 1,
                 ErrorCode::kValidation,
                 "synthetic spec: sizes and counts must be >= 1");
  ACCENTBN_CHECK(min_phonemes >= 1 && min_phonemes <= max_phonemes,
                 ErrorCode::kValidation,
                 "synthetic spec: need 1 <= min_phonemes <= max_phonemes");
  ACCENTBN_CHECK(min_duration >= 1 && min_duration <= max_duration,
                 ErrorCode::kValidation,
                 "synthetic spec: need 1 <= min_duration <= max_duration");
  ACCENTBN_CHECK(noise >= 0 && jitter >= 0 && bias_scale >= 0 &&
                     slope_scale >= 0,
                 ErrorCode::kValidation,
                 "synthetic spec: noise, jitter and scales must be >= 0");
  ACCENTBN_CHECK(!accent.empty(), ErrorCode::kValidation,
                 "synthetic spec: empty accent label");
  if (identity_transform) return;
  ACCENTBN_CHECK(singular_min > 0 && singular_max >= singular_min,
                 ErrorCode::kValidation,
                 "degenerate accent transform: singular values must satisfy "
                 "0 < min <= max");
  ACCENTBN_CHECK(singular_max / singular_min < 100.0, ErrorCode::kValidation,
                 "degenerate accent transform: condition number " +
                     std::to_string(singular_max / singular_min) +
                     " is not below 100");
}

json SyntheticAccentSpec::ToJson() const {
  return json{{"seed", seed},
              {"bn_dim", bn_dim},
              {"num_phonemes", num_phonemes},
              {"num_speakers", num_speakers},
              {"target_utterances", target_utterances},
              {"accent_utterances", accent_utterances},
              {"min_phonemes", min_phonemes},
              {"max_phonemes", max_phonemes},
              {"min_duration", min_duration},
              {"max_duration", max_duration},
              {"singular_min", singular_min},
              {"singular_max", singular_max},
              {"identity_transform", identity_transform},
              {"bias_scale", bias_scale},
              {"noise", noise},
              {"jitter", jitter},
              {"slope_scale", slope_scale},
              {"accent", accent}};
}

SyntheticAccentSpec SyntheticAccentSpec::FromJson(const json& j) {
  SyntheticAccentSpec s;
  s.seed = j.value("seed", s.seed);
  s.bn_dim = j.value("bn_dim", s.bn_dim);
  s.num_phonemes = j.value("num_phonemes", s.num_phonemes);
  s.num_speakers = j.value("num_speakers", s.num_speakers);
  s.target_utterances = j.value("target_utterances", s.target_utterances);
  s.accent_utterances = j.value("accent_utterances", s.accent_utterances);
  s.min_phonemes = j.value("min_phonemes", s.min_phonemes);
  s.max_phonemes = j.value("max_phonemes", s.max_phonemes);
  s.min_duration = j.value("min_duration", s.min_duration);
  s.max_duration = j.value("max_duration", s.max_duration);
  s.singular_min = j.value("singular_min", s.singular_min);
  s.singular_max = j.value("singular_max", s.singular_max);
  s.identity_transform = j.value("identity_transform", s.identity_transform);
  s.bias_scale = j.value("bias_scale", s.bias_scale);
  s.noise = j.value("noise", s.noise);
  s.jitter = j.value("jitter", s.jitter);
  s.slope_scale = j.value("slope_scale", s.slope_scale);
  s.accent = j.value("accent", s.accent);
  return s;
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticAccentSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  const int dim = spec.bn_dim;

  Vocabulary phonemes;
  for (int i = 0; i < spec.num_phonemes; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ph%02d", i);
    phonemes.Add(buf);
  }
  const Matrix prototypes = Gaussian(spec.num_phonemes, dim, 1.0, rng);
  const Matrix slopes = Gaussian(spec.num_phonemes, dim, spec.slope_scale, rng);
  const Matrix mel_map = Gaussian(dim, kNumMels, 1.0 / std::sqrt(dim), rng);

  SyntheticCorpus c;
  if (spec.identity_transform) {
    c.transform = Matrix::Identity(dim, dim);
  } else {
    const Matrix u = RandomOrthogonal(dim, rng);
    const Matrix v = RandomOrthogonal(dim, rng);
    Vector s(dim);
    for (int i = 0; i < dim; ++i) {
      s(i) = dim == 1 ? spec.singular_max
                      : spec.singular_min + (spec.singular_max - spec.singular_min) *
                                                i / (dim - 1.0);
    }
    c.transform = u * s.asDiagonal() * v.transpose();
  }
  c.bias = Gaussian(spec.num_speakers, dim, spec.bias_scale, rng);
  const Matrix timbre = Gaussian(spec.num_speakers, kNumMels, 0.3, rng);

  FeatureConfig fc;
  fc.bn_dim = dim;
  for (Manifest* m : {&c.target, &c.accent}) {
    m->phoneme_table = phonemes;
    m->feature_config = fc;
  }
  c.target.speaker_table.Add("target");
  c.target.accent_table.Add("standard");
  for (int s = 0; s < spec.num_speakers; ++s) {
    c.accent.speaker_table.Add(Id("acc_spk", s));
  }
  c.accent.accent_table.Add(spec.accent);

  const RowVector level = RowVector::Constant(kNumMels, kMelLevel);
  for (int i = 0; i < spec.target_utterances; ++i) {
    Utterance u = DrawUtterance(spec, prototypes, slopes, phonemes, rng);
    UtteranceRecord r;
    r.utt_id = Id("tgt", i);
    r.phonemes = u.phonemes;
    r.durations = DurationSequence{u.durations};
    r.mel_path = "feats/" + r.utt_id + ".mel.abnf";
    r.bn_path = "feats/" + r.utt_id + ".bn.abnf";
    c.mel[r.utt_id] = MelFromBN(u.bn, mel_map, level);
    c.bn[r.utt_id] = std::move(u.bn);
    c.target.records.push_back(std::move(r));
  }

  std::normal_distribution<double> noise(0.0, spec.noise);
  for (int i = 0; i < spec.accent_utterances; ++i) {
    Utterance u = DrawUtterance(spec, prototypes, slopes, phonemes, rng);
    const int spk = i % spec.num_speakers;
    Matrix ac = (u.bn * c.transform.transpose()).rowwise() +
                RowVector(c.bias.row(spk));
    if (spec.noise > 0) {
      for (Eigen::Index k = 0; k < ac.size(); ++k) ac.data()[k] += noise(rng);
    }
    UtteranceRecord r;
    r.utt_id = Id("acc", i);
    r.speaker_id = spk;
    r.phonemes = u.phonemes;
    r.durations = DurationSequence{u.durations};
    r.mel_path = "feats/" + r.utt_id + ".mel.abnf";
    r.bn_path = "feats/" + r.utt_id + ".bn.abnf";
    c.mel[r.utt_id] =
        MelFromBN(ac, mel_map, level + RowVector(timbre.row(spk)));
    c.bn[r.utt_id] = std::move(ac);
    c.bn_ua[r.utt_id] = std::move(u.bn);
    c.accent.records.push_back(std::move(r));
  }
  c.target.Validate();
  c.accent.Validate();
  return c;
}

void WriteSyntheticCorpus(const SyntheticCorpus& c,
                          const SyntheticAccentSpec& spec,
                          const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  for (const char* side : {"target", "accent"}) {
    fs::create_directories(dir / side / "feats");
  }
  auto write_side = [&](const Manifest& m, const fs::path& sub) {
    for (const auto& r : m.records) {
      SaveFeatures(c.mel.at(r.utt_id), sub / r.mel_path);
      SaveFeatures(c.bn.at(r.utt_id), sub / r.bn_path);
      if (auto it = c.bn_ua.find(r.utt_id); it != c.bn_ua.end()) {
        SaveFeatures(it->second, sub / "feats" / (r.utt_id + ".bn_ua.abnf"));
      }
    }
    SaveManifest(m, sub / "manifest.jsonl");
  };
  write_side(c.target, dir / "target");
  write_side(c.accent, dir / "accent");
  SaveFeatures(c.transform, dir / "transform.abnf");
  SaveFeatures(c.bias, dir / "bias.abnf");
  std::ofstream os(dir / "spec.json");
  os << spec.ToJson().dump(2) << '\n';
  if (!os) Throw(ErrorCode::kIo, "cannot write " + (dir / "spec.json").string());
}

}  // namespace accentbn::augment
