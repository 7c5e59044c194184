// src/pipeline.cc

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

#include "lrc/pipeline.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "lrc/corpus.h"
#include "lrc/feature-io.h"
#include "lrc/lda.h"
#include "lrc/metrics.h"
#include "lrc/recognizer.h"
#include "lrc/stats.h"
#include "lrc/viseme-map.h"

namespace lrc {

using nlohmann::json;
namespace fs = std::filesystem;

int RunConfig::Jobs() const {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

fs::path RunConfig::CorpusManifest() const {
  return manifest.empty() ? output / "corpus" / "manifest.json" : fs::path(manifest);
}

void RunConfig::Validate() const {
  auto check = [](bool ok, const std::string &what) {
    if (!ok) throw Error("invalid config: " + what);
  };
  check(jobs >= 0, "jobs must be >= 0");
  check(viseme_count >= 1 && viseme_count <= PhonemeAlphabet::kSize,
        "viseme_count must be in [1, 32]");
  check(roi.height >= 1 && roi.width >= 1, "roi size must be >= 1");
  check(roi.margin >= 0.0, "roi margin must be >= 0");
  check(roi.intensity_scale > 0.0, "roi intensity_scale must be > 0");
  check(dct_k >= 1 && dct_k <= roi.height * roi.width, "dct_k must be in [1, roi area]");
  check(window >= 1 && window % 2 == 1, "window must be odd and >= 1");
  check(holdout > 0.0 && holdout < 1.0, "holdout must be in (0, 1)");
  check(!lambda || *lambda >= 0.0, "lambda must be >= 0");
  check(alpha >= 0.0, "alpha must be >= 0");
  check(decode_split == "test" || decode_split == "train" || decode_split == "all",
        "decode_split must be test, train or all");
  synth.Validate();
}

json RunConfigToJson(const RunConfig &c) {
  json synth;
  to_json(synth, c.synth);
  synth.erase("seed");
  return json{{"output", c.output.generic_string()},
              {"manifest", c.manifest},
              {"jobs", c.jobs},
              {"seed", c.seed},
              {"synth", synth},
              {"roi",
               {{"height", c.roi.height},
                {"width", c.roi.width},
                {"margin", c.roi.margin},
                {"intensity_scale", c.roi.intensity_scale}}},
              {"dct_k", c.dct_k},
              {"window", c.window},
              {"viseme_count", c.viseme_count},
              {"holdout", c.holdout},
              {"retrain_each_step", c.retrain_each_step},
              {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)},
              {"alpha", c.alpha},
              {"exact_permutation", c.exact_permutation},
              {"decode_split", c.decode_split}};
}

RunConfig RunConfigFromJson(const json &j) {
  RunConfig c;
  try {
    c.output = j.at("output").get<std::string>();
    c.manifest = j.at("manifest").get<std::string>();
    c.jobs = j.at("jobs").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    from_json(j.at("synth"), c.synth);
    const json &roi = j.at("roi");
    c.roi.height = roi.at("height").get<int>();
    c.roi.width = roi.at("width").get<int>();
    c.roi.margin = roi.at("margin").get<double>();
    c.roi.intensity_scale = roi.at("intensity_scale").get<double>();
    c.dct_k = j.at("dct_k").get<int>();
    c.window = j.at("window").get<int>();
    c.viseme_count = j.at("viseme_count").get<int>();
    c.holdout = j.at("holdout").get<double>();
    c.retrain_each_step = j.at("retrain_each_step").get<bool>();
    if (!j.at("lambda").is_null()) c.lambda = j.at("lambda").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.exact_permutation = j.at("exact_permutation").get<bool>();
    c.decode_split = j.at("decode_split").get<std::string>();
  } catch (const json::exception &e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
  c.synth.seed = c.seed;
  return c;
}

namespace {

// Overlays `patch` onto `base`, rejecting keys that base does not have.
void Overlay(json &base, const json &patch, const std::string &where) {
  if (!patch.is_object()) throw Error("config " + where + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw Error("unknown config key '" + path + "'");
    json &slot = base[it.key()];
    if (slot.is_object() && it.value().is_object())
      Overlay(slot, it.value(), path);
    else
      slot = it.value();
  }
}

void ApplyEnv(json &node, const std::string &prefix, const EnvLookup &env) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    std::string name = prefix + "_" + it.key();
    if (it.value().is_object()) {
      ApplyEnv(it.value(), name, env);
      continue;
    }
    std::string var = name;
    for (char &ch : var) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const char *value = env(var);
    if (!value) continue;
    json parsed = json::parse(value, nullptr, false);
    it.value() = parsed.is_discarded() ? json(value) : parsed;
  }
}

}  // namespace

RunConfig LoadRunConfig(const std::optional<fs::path> &file, const EnvLookup &env) {
  json j = RunConfigToJson(RunConfig());
  if (file) {
    json patch;
    try {
      patch = json::parse(ReadFile(*file));
    } catch (const json::exception &e) {
      throw Error("malformed config " + file->string() + ": " + e.what());
    }
    Overlay(j, patch, "");
  }
  if (env) ApplyEnv(j, "lrc", env);
  RunConfig config = RunConfigFromJson(j);
  config.Validate();
  return config;
}

namespace {

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json FeatureSettings(const RunConfig &c) {
  return json{{"roi_height", c.roi.height},
              {"roi_width", c.roi.width},
              {"roi_margin", c.roi.margin},
              {"roi_intensity_scale", c.roi.intensity_scale},
              {"dct_k", c.dct_k},
              {"window", c.window}};
}

json ParseJsonFile(const fs::path &path, const std::string &what) {
  if (!fs::exists(path)) throw Error("missing " + what + ": " + path.string());
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception &e) {
    throw Error("malformed " + what + " " + path.string() + ": " + e.what());
  }
}

Dataset LoadFeaturesManifest(const RunConfig &c) {
  const fs::path p = c.FeaturesDir() / "manifest.json";
  if (!fs::exists(p))
    throw Error("missing features: " + p.string() + " (run the features command)");
  return LoadManifest(p);
}

void RequireFingerprint(const std::string &have, const std::string &want,
                        const std::string &what) {
  if (have != want)
    throw Error("fingerprint mismatch: " + what + " has " +
                (have.empty() ? std::string("none") : have) + ", expected " + want);
}

Matrix LoadUtteranceFeatures(const Dataset &fd, const Utterance &u) {
  if (u.feature_path.empty()) throw Error("utterance '" + u.id + "' has no features");
  FeatureFile f = ReadFeatureFile(fd.Resolve(u.feature_path));
  RequireFingerprint(f.fingerprint, fd.fingerprint, "feature file " + u.feature_path);
  const AlignmentReport a = ValidateAlignment(u, f.frames.rows);
  if (!a.ok)
    throw Error("utterance '" + u.id + "': " + std::to_string(f.frames.rows) +
                " feature frames for " + std::to_string(u.frame_labels.size()) +
                " labels (delta " + std::to_string(a.delta) + ")");
  return std::move(f.frames);
}

std::vector<Point> LandmarkRow(const Matrix &m, std::size_t t) {
  std::vector<Point> pts(m.cols / 2);
  for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = {m(t, 2 * k), m(t, 2 * k + 1)};
  return pts;
}

// "image:HxW" -> (H, W)
std::pair<int, int> ImageShape(const FeatureFile &f, const std::string &name) {
  int h = 0, w = 0;
  if (!(f.flags & kFeatureImage) ||
      std::sscanf(f.layout.c_str(), "image:%dx%d", &h, &w) != 2 || h <= 0 || w <= 0 ||
      static_cast<std::size_t>(h) * w != f.frames.cols)
    throw Error("video file " + name + " lacks an image:HxW layout");
  return {h, w};
}

Matrix DctStream(const Dataset &ds, const Utterance &u, const RunConfig &c) {
  const FeatureFile video = ReadFeatureFile(ds.Resolve(u.video_path));
  const FeatureFile lmk = ReadFeatureFile(ds.Resolve(u.landmarks_path));
  const auto [h, w] = ImageShape(video, u.video_path);
  if (lmk.frames.rows != video.frames.rows || lmk.frames.cols < 8 || lmk.frames.cols % 2)
    throw Error("landmark file " + u.landmarks_path + " does not match its video");
  Matrix out(video.frames.rows, static_cast<std::size_t>(c.dct_k));
  Image img(h, w);
  for (std::size_t t = 0; t < video.frames.rows; ++t) {
    std::copy(video.frames.Row(t), video.frames.Row(t) + video.frames.cols,
              img.pixels.begin());
    const auto pts = LandmarkRow(lmk.frames, t);
    const RoiFrame roi = NormalizeRoi(img, pts, c.roi, static_cast<std::int64_t>(t));
    const auto coef = SelectCoefficients(Dct2d(roi.roi), c.dct_k);
    std::copy(coef.begin(), coef.end(), out.Row(t));
  }
  return out;
}

std::string RelativeTo(const fs::path &target, const fs::path &base) {
  return fs::relative(target, base).generic_string();
}

std::string JoinSymbols(std::span<const PhonemeId> ph) {
  std::string s;
  for (std::size_t i = 0; i < ph.size(); ++i) {
    if (i) s += ' ';
    s += PhonemeAlphabet::Symbol(ph[i]);
  }
  return s;
}

std::vector<PhonemeId> SplitSymbols(const std::string &s, const std::string &where) {
  std::vector<PhonemeId> out;
  for (const auto &tok : SplitWhitespace(s)) {
    auto p = PhonemeAlphabet::Find(tok);
    if (!p) throw Error("unknown phoneme '" + tok + "' in " + where);
    out.push_back(*p);
  }
  return out;
}

void WriteTable(const fs::path &path, const std::vector<std::string> &header,
                const std::vector<std::vector<std::string>> &rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "\t" : "") << header[i];
  os << '\n';
  for (const auto &r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i];
    os << '\n';
  }
  WriteFileAtomic(path, os.str());
}

std::string Num(double v) { return json(v).dump(); }

json OptionalNumber(const std::optional<double> &v) {
  return v ? json(*v) : json(nullptr);
}

json CohortBlock(const CohortComparison &c) {
  return json{{"repetition", c.repetition},
              {"group_x", "hearing-impaired"},
              {"group_y", "normal-hearing"},
              {"tail", TailName(Tail::kXGreater)},
              {"significance_level", kSignificanceLevel},
              {"rank_sum",
               {{"test", "rank-sum (Mann-Whitney U)"},
                {"statistic", c.rank_sum.u},
                {"p_value", c.rank_sum.p},
                {"method", MethodName(c.rank_sum.method)},
                {"significant", c.rank_sum_significant}}},
              {"t_test",
               {{"test", "Welch two-sample t"},
                {"statistic", c.t_test.t},
                {"df", c.t_test.df},
                {"p_value", c.t_test.p},
                {"significant", c.t_test_significant}}}};
}

// Repetitions for which every participant has data.
std::vector<int> CompleteRepetitions(std::span<const Participant> ps) {
  std::vector<int> reps;
  for (int r = 1; r <= 3; ++r) {
    bool all = !ps.empty();
    for (const auto &p : ps)
      all = all && static_cast<std::size_t>(r) <= p.accuracies.size() &&
            !p.accuracies[r - 1].empty();
    if (all) reps.push_back(r);
  }
  return reps;
}

}  // namespace

std::string RunSynth(const RunConfig &c) {
  c.Validate();
  SynthConfig s = c.synth;
  s.seed = c.seed;
  const fs::path dir = c.output / "corpus";
  const Dataset ds = GenCorpus(s, dir, c.Jobs());
  std::size_t frames = 0;
  for (const auto &u : ds.utterances) frames += u.frame_labels.size();
  return "synth: " + std::to_string(ds.utterances.size()) + " utterances, " +
         std::to_string(frames) + " frames, " + std::to_string(ds.lexicon.size()) +
         " words, " + std::to_string(ds.participants.size()) +
         " participants -> " + (dir / "manifest.json").generic_string() +
         " [" + ds.fingerprint + "]";
}

std::string RunFeatures(const RunConfig &c) {
  c.Validate();
  const fs::path manifest = c.CorpusManifest();
  if (!fs::exists(manifest)) throw Error("missing corpus manifest: " + manifest.string());
  const Dataset ds = LoadManifest(manifest);
  if (ds.utterances.empty()) throw Error("corpus has no utterances");
  const bool use_dct = !ds.utterances.front().video_path.empty();
  const bool use_ext = !ds.utterances.front().feature_path.empty();
  if (!use_dct && !use_ext)
    throw Error("corpus utterances carry neither features nor video");

  // streams[u] = windowed DCT and/or external parts.
  const std::size_t n = ds.utterances.size();
  std::vector<std::vector<Matrix>> streams(n);
  ParallelFor(n, c.Jobs(), [&](std::size_t i) {
    const Utterance &u = ds.utterances[i];
    if (u.video_path.empty() == use_dct || u.feature_path.empty() == use_ext)
      throw Error("utterance '" + u.id + "' has a different set of streams");
    std::vector<Matrix> parts;
    if (use_dct) parts.push_back(DctStream(ds, u, c));
    if (use_ext) parts.push_back(ReadFeatureFile(ds.Resolve(u.feature_path)).frames);
    for (const Matrix &m : parts) {
      const AlignmentReport a = ValidateAlignment(u, m.rows);
      if (!a.ok)
        throw Error("utterance '" + u.id + "': " + std::to_string(m.rows) +
                    " feature frames for " + std::to_string(u.frame_labels.size()) +
                    " labels (delta " + std::to_string(a.delta) + ")");
    }
    for (Matrix &m : parts) m = TemporalFuse(m, c.window);
    streams[i] = std::move(parts);
  });

  const std::size_t parts = streams.front().size();
  std::vector<Standardizer> stats;
  for (std::size_t k = 0; k < parts; ++k) {
    std::vector<Matrix> train;
    for (std::size_t i = 0; i < n; ++i)
      if (ds.utterances[i].split == "train") train.push_back(streams[i][k]);
    if (train.empty()) throw Error("no training utterances to fit standardization");
    stats.push_back(Standardizer::Fit(train));
  }

  std::string layout;
  std::uint32_t flags = c.window > 1 ? kFeatureTemporal : 0u;
  const std::string suffix = "@w" + std::to_string(c.window);
  if (use_dct) {
    layout = "dct:" + std::to_string(c.dct_k) + suffix;
    flags |= kFeatureDct;
  }
  if (use_ext) {
    if (!layout.empty()) layout += ",";
    layout += "external:" + std::to_string(streams.front().back().cols / c.window) + suffix;
    flags |= kFeatureExternal;
  }

  json settings = FeatureSettings(c);
  const std::string fingerprint =
      Fingerprint(ds.fingerprint + "|features|" + settings.dump() + "|" + layout);

  const fs::path dir = c.FeaturesDir();
  fs::create_directories(dir);
  const fs::path dir_abs = fs::absolute(dir);
  Dataset out = ds;
  out.root = dir;
  out.fingerprint = fingerprint;
  if (!out.lexicon_path.empty())
    out.lexicon_path = RelativeTo(fs::absolute(ds.Resolve(ds.lexicon_path)), dir_abs);
  out.config_json = json{{"source", ds.fingerprint},
                         {"features", settings},
                         {"layout", layout}}
                        .dump();
  std::size_t dim = 0;
  ParallelFor(n, c.Jobs(), [&](std::size_t i) {
    Utterance &u = out.utterances[i];
    FeatureFile f;
    f.flags = flags;
    f.layout = layout;
    f.fingerprint = fingerprint;
    f.frames = FuseEarly(streams[i], stats);
    u.label_path = RelativeTo(fs::absolute(ds.Resolve(u.label_path)), dir_abs);
    u.feature_path = u.id + ".lrcf";
    u.feature_kind = "fused";
    u.video_path.clear();
    u.landmarks_path.clear();
    WriteFeatureFile(dir / u.feature_path, f);
    if (i == 0) dim = f.frames.cols;
  });
  WriteFileAtomic(dir / "manifest.json", FormatManifest(out));
  return "features: " + std::to_string(n) + " utterances, dimension " +
         std::to_string(dim) + " (" + layout + ") -> " +
         (dir / "manifest.json").generic_string() + " [" + fingerprint + "]";
}

std::string RunVisemeMap(const RunConfig &c) {
  c.Validate();
  const Dataset fd = LoadFeaturesManifest(c);
  std::vector<LabeledSequence> seqs;
  for (const auto &u : fd.utterances)
    if (u.split == "train")
      seqs.push_back({LoadUtteranceFeatures(fd, u), u.frame_labels});
  VisemeMapOptions opts;
  opts.target = c.viseme_count;
  opts.seed = c.seed;
  opts.holdout_fraction = c.holdout;
  opts.retrain_each_step = c.retrain_each_step;
  opts.classes = PhonemeAlphabet::kSize;
  VisemeMap map = BuildVisemeMap(seqs, MakeLdaTrainer(c.lambda), opts);
  map.source_fingerprint = fd.fingerprint;
  map.fingerprint = Fingerprint(fd.fingerprint + "|visemes|" + FormatVisemeMap(map));
  WriteFileAtomic(c.VisemeMapPath(), FormatVisemeMap(map));
  std::string groups;
  for (const auto &g : map.Groups()) {
    if (g.size() < 2) continue;
    groups += groups.empty() ? " {" : " {";
    for (std::size_t k = 0; k < g.size(); ++k)
      groups += (k ? "," : "") + std::string(PhonemeAlphabet::Symbol(g[k]));
    groups += "}";
  }
  return "visememap: " + std::to_string(map.classes()) + " phonemes -> " +
         std::to_string(map.viseme_count) + " visemes, " +
         std::to_string(map.history.size()) + " merges" + groups + " [" +
         map.fingerprint + "]";
}

std::string RunTrain(const RunConfig &c) {
  c.Validate();
  const Dataset fd = LoadFeaturesManifest(c);
  if (!fs::exists(c.VisemeMapPath()))
    throw Error("missing viseme map: " + c.VisemeMapPath().string() +
                " (run the visememap command)");
  VisemeMap map = ParseVisemeMap(ReadFile(c.VisemeMapPath()), c.VisemeMapPath().string());
  RequireFingerprint(map.source_fingerprint, fd.fingerprint, "viseme map source");

  std::vector<Matrix> feats;
  std::vector<const Utterance *> utts;
  for (const auto &u : fd.utterances)
    if (u.split == "train") {
      feats.push_back(LoadUtteranceFeatures(fd, u));
      utts.push_back(&u);
    }
  std::vector<TrainingUtterance> training;
  for (std::size_t i = 0; i < feats.size(); ++i)
    training.push_back({&feats[i], &utts[i]->frame_labels});
  TrainOptions opts;
  opts.lambda = c.lambda;
  opts.alpha = c.alpha;
  RecognizerModel model = TrainRecognizer(training, map, opts);
  model.features_fingerprint = fd.fingerprint;
  model.fingerprint =
      Fingerprint(map.fingerprint + "|model|" + Num(model.lda.lambda) + "|" + Num(c.alpha));
  WriteModel(c.ModelPath(), model);
  std::size_t frames = 0;
  for (const auto &m : feats) frames += m.rows;
  return "train: " + std::to_string(training.size()) + " utterances, " +
         std::to_string(frames) + " frames, " + std::to_string(model.lda.visemes()) +
         " LDA discriminants over " + std::to_string(model.lda.dim()) +
         " dimensions, lambda " + Num(model.lda.lambda) + " -> " +
         c.ModelPath().generic_string() + " [" + model.fingerprint + "]";
}

std::string RunDecode(const RunConfig &c) {
  c.Validate();
  const RecognizerModel model = ReadModel(c.ModelPath());
  const Dataset fd = LoadFeaturesManifest(c);
  RequireFingerprint(model.features_fingerprint, fd.fingerprint, "model features");

  std::vector<const Utterance *> todo;
  for (const auto &u : fd.utterances)
    if (c.decode_split == "all" || u.split == c.decode_split) todo.push_back(&u);
  if (todo.empty()) throw Error("no utterances in split '" + c.decode_split + "'");

  std::vector<json> rows(todo.size());
  ParallelFor(todo.size(), c.Jobs(), [&](std::size_t i) {
    const Utterance &u = *todo[i];
    const DecodedUtterance d = Decode(model, LoadUtteranceFeatures(fd, u), fd.lexicon);
    rows[i] = json{{"id", u.id},
                   {"phonemes", JoinSymbols(d.phonemes)},
                   {"words", d.words},
                   {"log_prob", d.log_prob}};
  });

  const std::string fingerprint =
      Fingerprint(model.fingerprint + "|decode|" + fd.fingerprint + "|" + c.decode_split);
  json doc{{"format", "lrc-decode"},
           {"version", 1},
           {"fingerprint", fingerprint},
           {"model", model.fingerprint},
           {"features", fd.fingerprint},
           {"split", c.decode_split},
           {"config",
            {{"features", json::parse(fd.config_json).value("features", json::object())},
             {"visemes", model.visemes.viseme_count},
             {"lambda", model.lda.lambda},
             {"alpha", model.hmm.alpha}}},
           {"utterances", rows}};
  WriteFileAtomic(c.DecodePath(), doc.dump(1) + "\n");
  return "decode: " + std::to_string(rows.size()) + " " + c.decode_split +
         " utterances -> " + c.DecodePath().generic_string() + " [" + fingerprint + "]";
}

std::string RunEval(const RunConfig &c) {
  c.Validate();
  const json dec = ParseJsonFile(c.DecodePath(), "decode output");
  const Dataset fd = LoadFeaturesManifest(c);
  RequireFingerprint(dec.value("features", ""), fd.fingerprint, "decode output features");

  struct Row {
    const Utterance *u;
    std::vector<PhonemeId> phonemes;
    std::vector<std::string> words;
    double word_rate, frame_rate;
  };
  std::vector<Row> rows;
  for (const json &r : dec.at("utterances")) {
    const std::string id = r.at("id").get<std::string>();
    const Utterance *u = fd.Find(id);
    if (!u) throw Error("decoded utterance '" + id + "' is not in the corpus");
    Row row{u, SplitSymbols(r.at("phonemes").get<std::string>(), id),
            r.at("words").get<std::vector<std::string>>(), 0.0, 0.0};
    row.word_rate = WordRecognitionRate(u->text, row.words);
    row.frame_rate = FramePhonemeRate(u->frame_labels, row.phonemes);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("decode output has no utterances");
  // Aggregates are accumulated in id order, independent of decode order.
  std::sort(rows.begin(), rows.end(),
            [](const Row &a, const Row &b) { return a.u->id < b.u->id; });

  PhonemeTally tally;
  std::size_t frames = 0, hits = 0;
  std::vector<double> wr, fr;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_speaker;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_level;
  json per_utt = json::array();
  for (const Row &r : rows) {
    tally.Add(r.u->frame_labels, r.phonemes);
    frames += r.phonemes.size();
    for (std::size_t t = 0; t < r.phonemes.size(); ++t) hits += r.phonemes[t] == r.u->frame_labels[t];
    wr.push_back(r.word_rate);
    fr.push_back(r.frame_rate);
    by_speaker[r.u->speaker_id].first.push_back(r.word_rate);
    by_speaker[r.u->speaker_id].second.push_back(r.frame_rate);
    by_level[r.u->level].first.push_back(r.word_rate);
    by_level[r.u->level].second.push_back(r.frame_rate);
    per_utt.push_back({{"id", r.u->id},
                       {"speaker", r.u->speaker_id},
                       {"level", r.u->level},
                       {"frames", r.phonemes.size()},
                       {"word_rate", r.word_rate},
                       {"frame_phoneme_rate", r.frame_rate},
                       {"reference", r.u->text},
                       {"hypothesis", r.words}});
  }

  std::vector<std::vector<std::string>> t_speakers, t_levels, t_cum, t_ph;
  json speakers = json::array(), levels = json::array(), cumulative = json::array();
  for (const auto &[spk, v] : by_speaker) {
    const double w = Mean(v.first), f = Mean(v.second);
    speakers.push_back({{"speaker", spk}, {"utterances", v.first.size()},
                        {"word_rate", w}, {"frame_phoneme_rate", f}});
    t_speakers.push_back({spk, std::to_string(v.first.size()), Num(w), Num(f)});
    const auto curve = CumulativeCurve(v.first);
    cumulative.push_back({{"speaker", spk}, {"word_rate", curve}});
    for (std::size_t i = 0; i < curve.size(); ++i)
      t_cum.push_back({spk, std::to_string(i + 1), Num(curve[i])});
  }
  for (const auto &[lvl, v] : by_level) {
    const double w = Mean(v.first), f = Mean(v.second);
    levels.push_back({{"level", lvl}, {"utterances", v.first.size()},
                      {"word_rate", w}, {"frame_phoneme_rate", f}});
    t_levels.push_back({std::to_string(lvl), std::to_string(v.first.size()), Num(w), Num(f)});
  }
  json phonemes = json::array();
  const auto counts = tally.Finish();
  for (int p = 0; p < PhonemeAlphabet::kSize; ++p) {
    const auto &k = counts[p];
    const std::string sym(PhonemeAlphabet::Symbol(p));
    phonemes.push_back({{"phoneme", sym}, {"tp", k.tp}, {"fp", k.fp}, {"fn", k.fn},
                        {"precision", OptionalNumber(k.precision)},
                        {"recall", OptionalNumber(k.recall)}});
    t_ph.push_back({sym, std::to_string(k.tp), std::to_string(k.fp), std::to_string(k.fn),
                    k.precision ? Num(*k.precision) : "NA", k.recall ? Num(*k.recall) : "NA"});
  }

  const double word_rate = Mean(wr), frame_rate = Mean(fr);
  const double micro = static_cast<double>(hits) / static_cast<double>(frames);
  json tests = json::array();
  for (int rep : CompleteRepetitions(fd.participants)) {
    const bool both = std::any_of(fd.participants.begin(), fd.participants.end(),
                                  [](const Participant &p) { return p.cohort == Cohort::kHearingImpaired; }) &&
                      std::any_of(fd.participants.begin(), fd.participants.end(),
                                  [](const Participant &p) { return p.cohort == Cohort::kNormalHearing; });
    if (!both) break;
    tests.push_back(CohortBlock(CompareCohorts(fd.participants, rep, c.exact_permutation)));
  }

  const std::string fingerprint = Fingerprint(dec.value("fingerprint", "") + "|eval|" +
                                              (c.exact_permutation ? "exact" : "auto"));
  json report{{"format", "lrc-report"},
              {"version", 1},
              {"fingerprint", fingerprint},
              {"decode", dec.value("fingerprint", "")},
              {"config", dec.value("config", json::object())},
              {"summary",
               {{"utterances", rows.size()},
                {"frames", frames},
                {"word_rate", word_rate},
                {"frame_phoneme_rate", frame_rate},
                {"micro_frame_phoneme_rate", micro},
                {"phoneme_minus_word_rate", frame_rate - word_rate}}},
              {"utterances", per_utt},
              {"speakers", speakers},
              {"levels", levels},
              {"cumulative", cumulative},
              {"phonemes", phonemes},
              {"tests", tests}};
  fs::create_directories(c.PlotsDir());
  WriteTable(c.PlotsDir() / "system_speakers.tsv",
             {"speaker", "utterances", "word_rate", "frame_phoneme_rate"}, t_speakers);
  WriteTable(c.PlotsDir() / "system_levels.tsv",
             {"level", "utterances", "word_rate", "frame_phoneme_rate"}, t_levels);
  WriteTable(c.PlotsDir() / "system_cumulative.tsv", {"speaker", "sentence", "word_rate"},
             t_cum);
  WriteTable(c.PlotsDir() / "phonemes.tsv",
             {"phoneme", "tp", "fp", "fn", "precision", "recall"}, t_ph);
  WriteFileAtomic(c.ReportPath(), report.dump(1) + "\n");
  return "eval: " + std::to_string(rows.size()) + " utterances, word rate " +
         Fixed(word_rate) + ", frame phoneme rate " + Fixed(frame_rate) + " -> " +
         c.ReportPath().generic_string() + " [" + fingerprint + "]";
}

std::string RunStats(const RunConfig &c) {
  c.Validate();
  const fs::path manifest = c.CorpusManifest();
  if (!fs::exists(manifest)) throw Error("missing corpus manifest: " + manifest.string());
  const Dataset ds = LoadManifest(manifest);
  if (ds.participants.empty()) throw Error("manifest lists no participants");

  std::vector<std::vector<std::string>> t_part, t_cohort, t_level, t_cum;
  json participants = json::array();
  std::map<std::pair<std::string, int>, std::vector<double>> cohort_rep;
  for (const auto &p : ds.participants) {
    const std::string cohort(CohortName(p.cohort));
    json reps = json::array();
    for (int r = 1; r <= static_cast<int>(p.accuracies.size()); ++r) {
      if (p.accuracies[r - 1].empty()) continue;
      const double acc = ParticipantWordAccuracy(p, r);
      cohort_rep[{cohort, r}].push_back(acc);
      t_part.push_back({p.id, cohort, std::to_string(r), Num(acc)});
      const auto &row = p.accuracies[r - 1];
      std::map<int, std::vector<double>> lv;
      for (std::size_t s = 0; s < row.size(); ++s)
        if (s < p.sentence_levels.size()) lv[p.sentence_levels[s]].push_back(row[s]);
      json levels = json::object();
      for (const auto &[l, v] : lv) {
        levels[std::to_string(l)] = Mean(v);
        t_level.push_back({p.id, cohort, std::to_string(r), std::to_string(l), Num(Mean(v))});
      }
      const auto curve = CumulativeCurve(row);
      for (std::size_t s = 0; s < curve.size(); ++s)
        t_cum.push_back({p.id, cohort, std::to_string(r), std::to_string(s + 1), Num(curve[s])});
      reps.push_back({{"repetition", r}, {"word_accuracy", acc}, {"levels", levels},
                      {"cumulative", curve}});
    }
    participants.push_back({{"id", p.id}, {"cohort", cohort}, {"repetitions", reps}});
  }
  json cohorts = json::array();
  for (const auto &[key, v] : cohort_rep) {
    cohorts.push_back({{"cohort", key.first}, {"repetition", key.second},
                       {"participants", v.size()}, {"mean_word_accuracy", Mean(v)}});
    t_cohort.push_back({key.first, std::to_string(key.second), std::to_string(v.size()),
                        Num(Mean(v))});
  }

  json tests = json::array();
  std::string line;
  std::size_t n_hi = 0, n_nh = 0;
  for (const auto &p : ds.participants) (p.cohort == Cohort::kHearingImpaired ? n_hi : n_nh)++;
  for (int rep : CompleteRepetitions(ds.participants)) {
    const CohortComparison cmp = CompareCohorts(ds.participants, rep, c.exact_permutation);
    tests.push_back(CohortBlock(cmp));
    line += "; rep " + std::to_string(rep) + " rank-sum p=" + Fixed(cmp.rank_sum.p) +
            " t p=" + Fixed(cmp.t_test.p);
  }

  const std::string fingerprint = Fingerprint(ds.fingerprint + "|stats|" +
                                              (c.exact_permutation ? "exact" : "auto"));
  json doc{{"format", "lrc-stats"},
           {"version", 1},
           {"fingerprint", fingerprint},
           {"corpus", ds.fingerprint},
           {"participants", participants},
           {"cohorts", cohorts},
           {"tests", tests}};
  fs::create_directories(c.PlotsDir());
  WriteTable(c.PlotsDir() / "human_participants.tsv",
             {"participant", "cohort", "repetition", "word_accuracy"}, t_part);
  WriteTable(c.PlotsDir() / "human_cohorts.tsv",
             {"cohort", "repetition", "participants", "mean_word_accuracy"}, t_cohort);
  WriteTable(c.PlotsDir() / "human_levels.tsv",
             {"participant", "cohort", "repetition", "level", "word_accuracy"}, t_level);
  WriteTable(c.PlotsDir() / "human_cumulative.tsv",
             {"participant", "cohort", "repetition", "sentence", "cumulative_accuracy"}, t_cum);
  WriteFileAtomic(c.StatsPath(), doc.dump(1) + "\n");
  return "stats: " + std::to_string(n_hi) + " hearing-impaired vs " + std::to_string(n_nh) +
         " normal-hearing" + line + " -> " + c.StatsPath().generic_string() + " [" +
         fingerprint + "]";
}

std::string RunCommand(const std::string &command, const RunConfig &config) {
  if (command == "synth") return RunSynth(config);
  if (command == "features") return RunFeatures(config);
  if (command == "visememap") return RunVisemeMap(config);
  if (command == "train") return RunTrain(config);
  if (command == "decode") return RunDecode(config);
  if (command == "eval") return RunEval(config);
  if (command == "stats") return RunStats(config);
  throw Error("unknown command '" + command + "'");
}

}  // namespace lrc
