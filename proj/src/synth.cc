// src/synth.cc

// Copyright 2026  The lrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lrc/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "lrc/feature-io.h"
#include "lrc/features.h"

namespace lrc {

using nlohmann::json;

namespace {

// Random streams derived from the corpus seed.
enum Stream : std::uint64_t {
  kLexiconStream = 1,
  kPoolStream = 2,
  kSpeakerStream = 3,
  kMeansStream = 4,
  kVideoMeansStream = 5,
  kParticipantStream = 6,
  kUtteranceStream = 1000,
};

// Spelling of each phoneme in synthetic words.  Consonant spellings contain no
// vowel letters, so spelling CV syllables is injective.
constexpr std::array<std::string_view, PhonemeAlphabet::kSize> kSpelling = {
    "p",  "b",  "t",  "d",  "k",  "g",  "ch", "y",  "f",  "bh", "th",
    "dh", "s",  "zh", "j",  "gh", "m",  "n",  "nk", "ny", "l",  "ll",
    "rr", "r",  "hy", "w",  "a",  "e",  "i",  "o",  "u",  ""};

const DurationLaw &LawFor(const SynthConfig &c, PhonemeId p) {
  if (PhonemeAlphabet::IsSilence(p)) return c.silence;
  if (PhonemeAlphabet::IsVowel(p)) return c.vowel;
  return c.consonant;
}

void AppendRun(std::vector<PhonemeId> &labels, PhonemeId p, const DurationLaw &law,
               Rng &rng) {
  labels.insert(labels.end(), static_cast<std::size_t>(rng.UniformInt(law.min, law.max)),
                p);
}

std::string Pad(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

bool IsPrefix(const std::vector<PhonemeId> &a, const std::vector<PhonemeId> &b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

std::vector<int> CoincidentGroups() {
  // p b t d k g tS jj f B T D s z x G m n N J l L r 4 j w a e i o u sil
  return {0, 0, 1, 1, 2, 2, 3, 3, 4, 5, 6, 6, 7, 7, 8, 8, 0, 9, 9, 9,
          10, 10, 11, 11, 12, 13, 14, 15, 16, 17, 18, 19};
}

std::vector<int> SynthConfig::ResolvedGroups() const {
  std::vector<int> g;
  if (!groups.empty()) {
    g = groups;
  } else if (grouping == "separable") {
    g.resize(PhonemeAlphabet::kSize);
    for (int p = 0; p < PhonemeAlphabet::kSize; ++p) g[p] = p;
  } else if (grouping == "coincident") {
    g = CoincidentGroups();
  } else {
    throw Error("unknown grouping '" + grouping + "' (expected separable or coincident)");
  }
  if (g.size() != PhonemeAlphabet::kSize)
    throw Error("groups must list a cluster for each of the 32 phonemes");
  const int clusters = *std::max_element(g.begin(), g.end()) + 1;
  std::vector<bool> used(clusters, false);
  for (int v : g) {
    if (v < 0) throw Error("negative cluster index in groups");
    used[v] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw Error("cluster indices in groups must be contiguous from 0");
  return g;
}

void SynthConfig::Validate() const {
  auto check = [](bool ok, const std::string &what) {
    if (!ok) throw Error("invalid synth config: " + what);
  };
  check(feature_dim >= 1, "feature_dim must be >= 1");
  check(spread >= 0.0 && std::isfinite(spread), "spread must be >= 0");
  check(separation > 0.0, "separation must be > 0");
  for (const auto *law : {&consonant, &vowel, &silence})
    check(law->min >= 1 && law->max >= law->min, "durations need 1 <= min <= max");
  check(pause_probability >= 0.0 && pause_probability <= 1.0,
        "pause_probability must be in [0,1]");
  check(speakers >= 2, "speakers must be >= 2");
  check(test_speakers >= 1 && test_speakers < speakers,
        "test_speakers must be in [1, speakers)");
  int per_speaker = 0;
  for (int c : level_counts) {
    check(c >= 0, "level_counts must be >= 0");
    check(c <= pool_size / 4, "pool too small for level_counts");
    per_speaker += c;
  }
  check(per_speaker == sentences_per_speaker,
        "level_counts must add up to sentences_per_speaker");
  check(lexicon_size >= 25, "lexicon_size must be >= 25 to cover the inventory");
  check(hearing_impaired >= 0 && normal_hearing >= 0, "cohort sizes must be >= 0");
  check(repetitions >= 1 && repetitions <= 3, "repetitions must be 1-3");
  check(roi_size >= 2 && video_margin >= 0, "bad video geometry");
  check(video_scale > 0.0, "video_scale must be > 0");
  ResolvedGroups();
}

void to_json(json &j, const SynthConfig &c) {
  auto law = [](const DurationLaw &d) { return json::array({d.min, d.max}); };
  j = json{{"seed", c.seed},
           {"grouping", c.grouping},
           {"groups", c.groups},
           {"feature_dim", c.feature_dim},
           {"spread", c.spread},
           {"separation", c.separation},
           {"consonant_frames", law(c.consonant)},
           {"vowel_frames", law(c.vowel)},
           {"silence_frames", law(c.silence)},
           {"pause_probability", c.pause_probability},
           {"pool_size", c.pool_size},
           {"sentences_per_speaker", c.sentences_per_speaker},
           {"level_counts", c.level_counts},
           {"speakers", c.speakers},
           {"test_speakers", c.test_speakers},
           {"lexicon_size", c.lexicon_size},
           {"hearing_impaired", c.hearing_impaired},
           {"normal_hearing", c.normal_hearing},
           {"repetitions", c.repetitions},
           {"render_video", c.render_video},
           {"roi_size", c.roi_size},
           {"video_margin", c.video_margin},
           {"video_scale", c.video_scale}};
}

void from_json(const json &j, SynthConfig &c) {
  if (!j.is_object()) throw Error("synth config must be an object");
  auto get = [&](const char *key, auto &out) {
    if (j.contains(key)) j.at(key).get_to(out);
  };
  auto law = [&](const char *key, DurationLaw &d) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<std::vector<int>>();
    if (v.size() != 2) throw Error(std::string("synth config: ") + key + " needs [min, max]");
    d = {v[0], v[1]};
  };
  try {
    get("seed", c.seed);
    get("grouping", c.grouping);
    get("groups", c.groups);
    get("feature_dim", c.feature_dim);
    get("spread", c.spread);
    get("separation", c.separation);
    law("consonant_frames", c.consonant);
    law("vowel_frames", c.vowel);
    law("silence_frames", c.silence);
    get("pause_probability", c.pause_probability);
    get("pool_size", c.pool_size);
    get("sentences_per_speaker", c.sentences_per_speaker);
    get("level_counts", c.level_counts);
    get("speakers", c.speakers);
    get("test_speakers", c.test_speakers);
    get("lexicon_size", c.lexicon_size);
    get("hearing_impaired", c.hearing_impaired);
    get("normal_hearing", c.normal_hearing);
    get("repetitions", c.repetitions);
    get("render_video", c.render_video);
    get("roi_size", c.roi_size);
    get("video_margin", c.video_margin);
    get("video_scale", c.video_scale);
  } catch (const json::exception &e) {
    throw Error(std::string("synth config: ") + e.what());
  }
}

Lexicon GenLexicon(const SynthConfig &config) {
  Rng rng(DeriveSeed(config.seed, kLexiconStream));
  std::vector<PhonemeId> deck;
  auto next_consonant = [&]() {
    if (deck.empty()) {
      for (PhonemeId p = 0; p < 26; ++p) deck.push_back(p);
      rng.Shuffle(deck);
    }
    PhonemeId p = deck.back();
    deck.pop_back();
    return p;
  };

  std::vector<std::vector<PhonemeId>> words;
  std::set<std::string> spellings;
  const int max_attempts = 1000 * config.lexicon_size;
  for (int attempt = 0;
       static_cast<int>(words.size()) < config.lexicon_size && attempt < max_attempts;
       ++attempt) {
    // Mostly two- and three-syllable words; short words block many prefixes.
    const double u = rng.Uniform01();
    const int syllables = u < 0.1 ? 1 : (u < 0.6 ? 2 : 3);
    std::vector<PhonemeId> w;
    for (int s = 0; s < syllables; ++s) {
      w.push_back(next_consonant());
      w.push_back(static_cast<PhonemeId>(rng.UniformInt(26, 30)));
    }
    bool clash = false;
    for (const auto &o : words)
      if (IsPrefix(o, w) || IsPrefix(w, o)) {
        clash = true;
        break;
      }
    if (!clash) words.push_back(std::move(w));
  }
  if (static_cast<int>(words.size()) < config.lexicon_size)
    throw Error("could not build a prefix-free lexicon of " +
                std::to_string(config.lexicon_size) + " words");

  std::vector<bool> covered(PhonemeAlphabet::kSize, false);
  Lexicon lex;
  for (auto &w : words) {
    std::string spelling;
    for (PhonemeId p : w) {
      spelling += kSpelling[p];
      covered[p] = true;
    }
    lex.Add(spelling, std::move(w));
  }
  for (PhonemeId p = 0; p < PhonemeAlphabet::kSilence; ++p)
    if (!covered[p])
      throw Error("synthetic lexicon does not cover phoneme '" +
                  std::string(PhonemeAlphabet::Symbol(p)) + "'; try another seed");
  return lex;
}

Matrix ClusterMeans(const SynthConfig &config, int clusters, std::uint64_t stream) {
  const auto d = static_cast<std::size_t>(config.feature_dim);
  Matrix means(clusters, d);
  if (clusters < 2) return means;
  Rng rng(DeriveSeed(config.seed, stream));
  for (int k = 0; k < clusters; ++k) {
    double norm = 0.0;
    while (norm < 1e-6) {
      norm = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        means(k, c) = rng.Normal();
        norm += means(k, c) * means(k, c);
      }
      norm = std::sqrt(norm);
    }
    for (std::size_t c = 0; c < d; ++c) means(k, c) /= norm;
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < clusters; ++a)
    for (int b = a + 1; b < clusters; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = means(a, c) - means(b, c);
        s += diff * diff;
      }
      dmin = std::min(dmin, std::sqrt(s));
    }
  if (!(dmin > 1e-9)) throw Error("coincident cluster means; increase feature_dim");
  for (double &x : means.data) x *= config.separation / dmin;
  return means;
}

Matrix SampleFeatures(std::span<const PhonemeId> labels, std::span<const int> groups,
                      const Matrix &means, double spread, Rng &rng) {
  Matrix out(labels.size(), means.cols);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const double *mu = means.Row(static_cast<std::size_t>(groups[labels[t]]));
    for (std::size_t c = 0; c < means.cols; ++c)
      out(t, c) = spread > 0.0 ? mu[c] + spread * rng.Normal() : mu[c];
  }
  return out;
}

std::vector<Participant> GenParticipants(const SynthConfig &config) {
  Rng rng(DeriveSeed(config.seed, kParticipantStream));
  std::vector<int> levels;
  for (int l = 0; l < 4; ++l) levels.insert(levels.end(), config.level_counts[l], l + 1);
  std::vector<Participant> out;
  auto make = [&](Cohort cohort, int index) {
    Participant p;
    p.cohort = cohort;
    p.id = (cohort == Cohort::kHearingImpaired ? "hi" : "nh") + Pad(index + 1);
    p.sentence_levels = levels;
    const double base = cohort == Cohort::kHearingImpaired ? 0.50 : 0.42;
    const double ability = base + 0.12 * rng.Normal();
    for (int r = 0; r < config.repetitions; ++r) {
      std::vector<double> row;
      for (std::size_t s = 0; s < levels.size(); ++s) {
        const auto band = kLevelBands[levels[s] - 1];
        const int words = static_cast<int>(rng.UniformInt(band[0], band[1]));
        const double level_gain = 0.04 * (levels[s] - 1);
        const double practice = 0.004 * static_cast<double>(s);
        const double acc = ability + 0.12 * r + level_gain + practice + 0.15 * rng.Normal();
        const double q = std::round(std::clamp(acc, 0.0, 1.0) * words) / words;
        row.push_back(q);
      }
      p.accuracies.push_back(std::move(row));
    }
    out.push_back(std::move(p));
  };
  for (int i = 0; i < config.hearing_impaired; ++i) make(Cohort::kHearingImpaired, i);
  for (int i = 0; i < config.normal_hearing; ++i) make(Cohort::kNormalHearing, i);
  return out;
}

namespace {

struct SentenceDraft {
  int level = 1;
  std::vector<std::string> text;
};

std::vector<SentenceDraft> GenPool(const SynthConfig &config, const Lexicon &lex) {
  Rng rng(DeriveSeed(config.seed, kPoolStream));
  std::vector<SentenceDraft> pool(static_cast<std::size_t>(config.pool_size));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].level = static_cast<int>(i % 4) + 1;
    const auto band = kLevelBands[pool[i].level - 1];
    const auto words = rng.UniformInt(band[0], band[1]);
    for (std::int64_t w = 0; w < words; ++w)
      pool[i].text.push_back(
          lex.entries()[rng.UniformInt(0, static_cast<std::int64_t>(lex.size()) - 1)].word);
  }
  return pool;
}

// Mouth video frame whose ROI DCT carries `coefficients` in zig-zag order.
void RenderFrame(const SynthConfig &c, std::span<const double> coefficients,
                 const std::vector<std::pair<int, int>> &zigzag, double *out) {
  Image coef(c.roi_size, c.roi_size);
  for (std::size_t k = 0; k < coefficients.size() && k < zigzag.size(); ++k)
    coef.at(zigzag[k].first, zigzag[k].second) = coefficients[k];
  const Image roi = InverseDct2d(coef);
  const int side = c.roi_size + 2 * c.video_margin;
  for (int r = 0; r < side; ++r)
    for (int q = 0; q < side; ++q) {
      double v = 0.5;
      const int rr = r - c.video_margin, qq = q - c.video_margin;
      if (rr >= 0 && rr < c.roi_size && qq >= 0 && qq < c.roi_size)
        v += c.video_scale * roi.at(rr, qq);
      out[static_cast<std::size_t>(r) * side + q] = std::clamp(v, 0.0, 1.0);
    }
}

}  // namespace

Dataset GenCorpus(const SynthConfig &config, const std::filesystem::path &dir,
                  int jobs) {
  config.Validate();
  const std::vector<int> groups = config.ResolvedGroups();
  const int clusters = *std::max_element(groups.begin(), groups.end()) + 1;
  const Lexicon lex = GenLexicon(config);
  const std::vector<SentenceDraft> pool = GenPool(config, lex);
  const Matrix means = ClusterMeans(config, clusters, kMeansStream);
  const Matrix video_means =
      config.render_video ? ClusterMeans(config, clusters, kVideoMeansStream) : Matrix();

  std::vector<std::vector<std::size_t>> by_level(4);
  for (std::size_t i = 0; i < pool.size(); ++i) by_level[pool[i].level - 1].push_back(i);

  Dataset ds;
  ds.root = dir;
  ds.lexicon = lex;
  ds.lexicon_path = "lexicon.txt";
  json cfg;
  to_json(cfg, config);
  ds.config_json = json{{"synth", cfg}}.dump();

  Rng speaker_rng(DeriveSeed(config.seed, kSpeakerStream));
  for (int s = 0; s < config.speakers; ++s) {
    const std::string speaker = "spk" + Pad(s + 1);
    const bool test = s >= config.speakers - config.test_speakers;
    int n = 0;
    for (int l = 0; l < 4; ++l) {
      std::vector<std::size_t> bin = by_level[l];
      speaker_rng.Shuffle(bin);
      for (int k = 0; k < config.level_counts[l]; ++k) {
        Utterance u;
        u.id = speaker + "_s" + Pad(++n);
        u.speaker_id = speaker;
        u.level = l + 1;
        u.text = pool[bin[k]].text;
        u.split = test ? "test" : "train";
        u.label_path = "labels/" + u.id + ".lab";
        u.feature_path = "features/" + u.id + ".lrcf";
        u.feature_kind = "external";
        if (config.render_video) {
          u.video_path = "video/" + u.id + ".lrcf";
          u.landmarks_path = "video/" + u.id + ".lmk.lrcf";
        }
        ds.utterances.push_back(std::move(u));
      }
    }
  }
  ds.participants = GenParticipants(config);

  std::filesystem::create_directories(dir / "labels");
  std::filesystem::create_directories(dir / "features");
  if (config.render_video) std::filesystem::create_directories(dir / "video");

  const auto zigzag = ZigZagOrder(config.roi_size, config.roi_size);
  std::vector<std::uint64_t> hashes(ds.utterances.size());
  ParallelFor(ds.utterances.size(), jobs, [&](std::size_t i) {
    Utterance &u = ds.utterances[i];
    Rng rng(DeriveSeed(config.seed, kUtteranceStream + i));
    const PhonemeString ph = WordsToPhonemes(u.text, lex);
    std::vector<PhonemeId> &labels = u.frame_labels;
    AppendRun(labels, PhonemeAlphabet::kSilence, config.silence, rng);
    for (std::size_t w = 0; w < ph.word_starts.size(); ++w) {
      if (w > 0 && rng.Uniform01() < config.pause_probability)
        AppendRun(labels, PhonemeAlphabet::kSilence, config.silence, rng);
      const std::size_t end =
          w + 1 < ph.word_starts.size() ? ph.word_starts[w + 1] : ph.phonemes.size();
      for (std::size_t k = ph.word_starts[w]; k < end; ++k)
        AppendRun(labels, ph.phonemes[k], LawFor(config, ph.phonemes[k]), rng);
    }
    AppendRun(labels, PhonemeAlphabet::kSilence, config.silence, rng);

    FeatureFile f;
    f.flags = kFeatureExternal;
    f.layout = "external:" + std::to_string(config.feature_dim);
    f.frames = SampleFeatures(labels, groups, means, config.spread, rng);
    std::string bytes = FormatLabels(labels) + EncodeFeatureFile(f);
    WriteFileAtomic(dir / u.feature_path, EncodeFeatureFile(f));

    if (config.render_video) {
      const Matrix coefs =
          SampleFeatures(labels, groups, video_means, config.spread, rng);
      const int side = config.roi_size + 2 * config.video_margin;
      FeatureFile video;
      video.flags = kFeatureImage;
      video.layout = "image:" + std::to_string(side) + "x" + std::to_string(side);
      video.frames = Matrix(labels.size(), static_cast<std::size_t>(side) * side);
      for (std::size_t t = 0; t < labels.size(); ++t)
        RenderFrame(config, {coefs.Row(t), coefs.cols}, zigzag, video.frames.Row(t));
      // Mouth corners and lip midpoints spanning exactly the ROI.
      const double lo = config.video_margin;
      const double hi = config.video_margin + config.roi_size - 1;
      const double mid = 0.5 * (lo + hi);
      const double pts[8] = {lo, mid, hi, mid, mid, lo, mid, hi};
      FeatureFile lmk;
      lmk.flags = kFeatureLandmarks;
      lmk.layout = "landmarks:4";
      lmk.frames = Matrix(labels.size(), 8);
      for (std::size_t t = 0; t < labels.size(); ++t)
        std::copy(pts, pts + 8, lmk.frames.Row(t));
      const std::string vb = EncodeFeatureFile(video), lb = EncodeFeatureFile(lmk);
      WriteFileAtomic(dir / u.video_path, vb);
      WriteFileAtomic(dir / u.landmarks_path, lb);
      bytes += vb;
      bytes += lb;
    }
    hashes[i] = Fnv1a64(bytes);
  });

  // Content fingerprint: manifest without fingerprint plus every data file.
  std::string payload = FormatManifest(ds) + FormatLexicon(lex);
  for (std::uint64_t h : hashes) payload += HexFingerprint(h);
  ds.fingerprint = Fingerprint(payload);
  SaveDataset(ds, dir);
  return LoadManifest(dir / "manifest.json");
}

}  // namespace lrc
