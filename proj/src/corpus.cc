// src/corpus.cc

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

#include "lrc/corpus.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lrc/common.h"

namespace lrc {

using nlohmann::json;

std::optional<PhonemeId> PhonemeAlphabet::Find(std::string_view symbol) {
  for (int i = 0; i < kSize; ++i)
    if (kSymbols[i] == symbol) return i;
  return std::nullopt;
}

std::string_view CohortName(Cohort c) {
  return c == Cohort::kHearingImpaired ? "hearing-impaired" : "normal-hearing";
}

Cohort ParseCohort(std::string_view name) {
  if (name == "hearing-impaired") return Cohort::kHearingImpaired;
  if (name == "normal-hearing") return Cohort::kNormalHearing;
  throw Error("unknown cohort '" + std::string(name) + "'");
}

void Lexicon::Add(std::string word, std::vector<PhonemeId> pronunciation) {
  if (word.empty()) throw Error("lexicon: empty word");
  if (pronunciation.empty())
    throw Error("lexicon: empty pronunciation for '" + word + "'");
  for (PhonemeId p : pronunciation)
    if (p < 0 || p >= PhonemeAlphabet::kSize)
      throw Error("lexicon: phoneme index out of range in '" + word + "'");
  if (index_.count(word)) throw Error("lexicon: duplicate word '" + word + "'");
  index_.emplace(word, entries_.size());
  entries_.push_back({std::move(word), std::move(pronunciation)});
}

const Lexicon::Entry *Lexicon::Find(const std::string &word) const {
  auto it = index_.find(word);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

namespace {

PhonemeId ParsePhoneme(std::string_view token, const std::string &source,
                       std::size_t line) {
  auto id = PhonemeAlphabet::Find(token);
  if (!id)
    throw Error("unknown phoneme '" + std::string(token) + "' at " + source +
                ":" + std::to_string(line));
  return *id;
}

bool SkipLine(std::string_view line) {
  line = Trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

Lexicon ReadLexicon(const std::filesystem::path &path) {
  std::istringstream is(ReadFile(path));
  Lexicon lexicon;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (SkipLine(line)) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("malformed lexicon record at " + path.string() + ":" +
                  std::to_string(n));
    std::string word(Trim(std::string_view(line).substr(0, tab)));
    std::vector<PhonemeId> pron;
    for (const auto &tok : SplitWhitespace(std::string_view(line).substr(tab + 1)))
      pron.push_back(ParsePhoneme(tok, path.string(), n));
    try {
      lexicon.Add(word, std::move(pron));
    } catch (const Error &e) {
      throw Error(std::string(e.what()) + " at " + path.string() + ":" +
                  std::to_string(n));
    }
  }
  return lexicon;
}

std::string FormatLexicon(const Lexicon &lexicon) {
  std::string out;
  for (const auto &e : lexicon.entries()) {
    out += e.word;
    out += '\t';
    for (std::size_t i = 0; i < e.pronunciation.size(); ++i) {
      if (i) out += ' ';
      out += PhonemeAlphabet::Symbol(e.pronunciation[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<PhonemeId> ParseLabels(const std::string &contents,
                                   const std::string &source_name) {
  std::istringstream is(contents);
  std::vector<PhonemeId> labels;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (SkipLine(line)) continue;
    auto fields = SplitWhitespace(line);
    if (fields.size() != 2)
      throw Error("malformed label record at " + source_name + ":" +
                  std::to_string(n));
    std::size_t index = 0;
    try {
      std::size_t used = 0;
      index = std::stoul(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw Error("malformed frame index '" + fields[0] + "' at " +
                  source_name + ":" + std::to_string(n));
    }
    if (index != labels.size())
      throw Error("frame index " + fields[0] + " out of sequence at " +
                  source_name + ":" + std::to_string(n) + " (expected " +
                  std::to_string(labels.size()) + ")");
    labels.push_back(ParsePhoneme(fields[1], source_name, n));
  }
  return labels;
}

std::vector<PhonemeId> ReadLabels(const std::filesystem::path &path) {
  return ParseLabels(ReadFile(path), path.string());
}

std::string FormatLabels(const std::vector<PhonemeId> &labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += PhonemeAlphabet::Symbol(labels[i]);
    out += '\n';
  }
  return out;
}

const Utterance *Dataset::Find(const std::string &id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &utterances[it->second];
}

void Dataset::Reindex() {
  index_.clear();
  for (std::size_t i = 0; i < utterances.size(); ++i)
    if (!index_.emplace(utterances[i].id, i).second)
      throw Error("duplicate utterance id '" + utterances[i].id + "'");
}

namespace {

template <typename T>
T Field(const json &record, const char *key, const std::string &where) {
  auto it = record.find(key);
  if (it == record.end())
    throw Error("malformed record: " + where + " lacks \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception &) {
    throw Error("malformed record: " + where + " has bad \"" + key + "\"");
  }
}

template <typename T>
T OptField(const json &record, const char *key, T fallback,
           const std::string &where) {
  if (!record.contains(key)) return fallback;
  return Field<T>(record, key, where);
}

void RequireFile(const std::filesystem::path &p, const std::string &where) {
  if (!std::filesystem::exists(p))
    throw Error("missing file: " + p.string() + " (referenced by " + where +
                ")");
}

}  // namespace

Dataset LoadManifest(const std::filesystem::path &path) {
  std::string text = ReadFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    throw Error("malformed manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error("malformed manifest " + path.string());

  Dataset ds;
  ds.root = path.has_parent_path() ? path.parent_path()
                                   : std::filesystem::path(".");
  ds.fingerprint = OptField<std::string>(doc, "fingerprint", "", "manifest");
  if (ds.fingerprint.empty()) ds.fingerprint = Fingerprint(text);
  if (doc.contains("config")) ds.config_json = doc["config"].dump();

  ds.lexicon_path = OptField<std::string>(doc, "lexicon", "", "manifest");
  if (!ds.lexicon_path.empty()) {
    RequireFile(ds.Resolve(ds.lexicon_path), "manifest");
    ds.lexicon = ReadLexicon(ds.Resolve(ds.lexicon_path));
  }

  const json &utts = doc.contains("utterances") ? doc["utterances"] : json();
  if (!utts.is_null() && !utts.is_array())
    throw Error("malformed manifest: \"utterances\" must be a list");
  std::size_t k = 0;
  for (const json &r : utts.is_array() ? utts : json::array()) {
    std::string where = "utterance #" + std::to_string(k++);
    if (!r.is_object()) throw Error("malformed record: " + where);
    Utterance u;
    u.id = Field<std::string>(r, "id", where);
    where += " '" + u.id + "'";
    u.speaker_id = Field<std::string>(r, "speaker", where);
    u.level = Field<int>(r, "level", where);
    if (u.level < 1 || u.level > 4)
      throw Error("malformed record: " + where + " level must be 1-4");
    u.text = Field<std::vector<std::string>>(r, "text", where);
    u.frame_rate = OptField<double>(r, "frame_rate", 50.0, where);
    if (!(u.frame_rate > 0.0))
      throw Error("malformed record: " + where + " frame_rate must be > 0");
    u.split = OptField<std::string>(r, "split", "train", where);
    if (u.split != "train" && u.split != "test")
      throw Error("malformed record: " + where + " split must be train/test");
    u.label_path = Field<std::string>(r, "label_path", where);
    u.feature_path = OptField<std::string>(r, "feature_path", "", where);
    u.feature_kind = OptField<std::string>(r, "feature_kind", "external", where);
    if (u.feature_kind != "external" && u.feature_kind != "fused")
      throw Error("malformed record: " + where +
                  " feature_kind must be external/fused");
    u.video_path = OptField<std::string>(r, "video_path", "", where);
    u.landmarks_path = OptField<std::string>(r, "landmarks_path", "", where);
    if (u.video_path.empty() != u.landmarks_path.empty())
      throw Error("malformed record: " + where +
                  " video_path and landmarks_path go together");

    RequireFile(ds.Resolve(u.label_path), where);
    u.frame_labels = ReadLabels(ds.Resolve(u.label_path));
    if (u.frame_labels.empty())
      throw Error("malformed record: " + where + " has no frame labels");
    for (const auto *p : {&u.feature_path, &u.video_path, &u.landmarks_path})
      if (!p->empty()) RequireFile(ds.Resolve(*p), where);
    for (const auto &w : u.text)
      if (!ds.lexicon_path.empty() && !ds.lexicon.Find(w))
        throw Error("out-of-vocabulary word '" + w + "' in " + where);
    ds.utterances.push_back(std::move(u));
  }
  ds.Reindex();

  if (doc.contains("participants")) {
    k = 0;
    for (const json &r : doc["participants"]) {
      std::string where = "participant #" + std::to_string(k++);
      Participant p;
      p.id = Field<std::string>(r, "id", where);
      p.cohort = ParseCohort(Field<std::string>(r, "cohort", where));
      p.accuracies =
          Field<std::vector<std::vector<double>>>(r, "accuracies", where);
      p.sentence_levels =
          OptField<std::vector<int>>(r, "sentence_levels", {}, where);
      if (p.accuracies.size() > 3)
        throw Error("malformed record: " + where + " has more than 3 repetitions");
      for (const auto &rep : p.accuracies)
        for (double a : rep)
          if (!(a >= 0.0 && a <= 1.0))
            throw Error("malformed record: " + where +
                        " accuracy outside [0,1]");
      ds.participants.push_back(std::move(p));
    }
  }
  return ds;
}

std::string FormatManifest(const Dataset &ds) {
  json doc;
  doc["format"] = "lrc-manifest";
  doc["version"] = 1;
  doc["fingerprint"] = ds.fingerprint;
  if (!ds.lexicon_path.empty()) doc["lexicon"] = ds.lexicon_path;
  if (!ds.config_json.empty()) doc["config"] = json::parse(ds.config_json);
  json utts = json::array();
  for (const auto &u : ds.utterances) {
    json r;
    r["id"] = u.id;
    r["speaker"] = u.speaker_id;
    r["level"] = u.level;
    r["text"] = u.text;
    r["frame_rate"] = u.frame_rate;
    r["split"] = u.split;
    r["label_path"] = u.label_path;
    if (!u.feature_path.empty()) {
      r["feature_path"] = u.feature_path;
      r["feature_kind"] = u.feature_kind;
    }
    if (!u.video_path.empty()) {
      r["video_path"] = u.video_path;
      r["landmarks_path"] = u.landmarks_path;
    }
    utts.push_back(std::move(r));
  }
  doc["utterances"] = std::move(utts);
  if (!ds.participants.empty()) {
    json ps = json::array();
    for (const auto &p : ds.participants) {
      json r;
      r["id"] = p.id;
      r["cohort"] = CohortName(p.cohort);
      r["accuracies"] = p.accuracies;
      r["sentence_levels"] = p.sentence_levels;
      ps.push_back(std::move(r));
    }
    doc["participants"] = std::move(ps);
  }
  return doc.dump(1) + "\n";
}

void SaveDataset(const Dataset &ds, const std::filesystem::path &dir) {
  if (!ds.lexicon_path.empty())
    WriteFileAtomic(dir / ds.lexicon_path, FormatLexicon(ds.lexicon));
  for (const auto &u : ds.utterances)
    WriteFileAtomic(dir / u.label_path, FormatLabels(u.frame_labels));
  WriteFileAtomic(dir / "manifest.json", FormatManifest(ds));
}

AlignmentReport ValidateAlignment(const Utterance &utterance,
                                  std::size_t feature_count) {
  AlignmentReport r;
  const std::size_t n = utterance.frame_labels.size();
  r.empty = n == 0;
  r.delta = static_cast<long>(feature_count) - static_cast<long>(n);
  r.ok = !r.empty && r.delta == 0;
  return r;
}

PhonemeString WordsToPhonemes(const std::vector<std::string> &text,
                              const Lexicon &lexicon) {
  PhonemeString out;
  for (const auto &w : text) {
    const auto *e = lexicon.Find(w);
    if (!e) throw Error("out-of-vocabulary word '" + w + "'");
    out.word_starts.push_back(out.phonemes.size());
    out.phonemes.insert(out.phonemes.end(), e->pronunciation.begin(),
                        e->pronunciation.end());
  }
  return out;
}

std::vector<PhonemeId> IntervalsToFrameLabels(
    const std::vector<Interval> &intervals, double frame_rate,
    std::optional<std::size_t> frame_count) {
  if (!(frame_rate > 0.0)) throw Error("frame rate must be positive");
  double end = 0.0;
  for (const auto &iv : intervals) {
    if (iv.end < iv.start) throw Error("interval ends before it starts");
    end = std::max(end, iv.end);
  }
  std::size_t n = frame_count ? *frame_count
                              : static_cast<std::size_t>(
                                    std::floor(end * frame_rate + 1e-9));
  std::vector<PhonemeId> labels(n, PhonemeAlphabet::kSilence);
  for (std::size_t i = 0; i < n; ++i) {
    double t = (static_cast<double>(i) + 0.5) / frame_rate;
    for (const auto &iv : intervals) {
      if (t >= iv.start && t < iv.end) {
        std::string_view sym = Trim(iv.symbol);
        if (!sym.empty()) {
          auto id = PhonemeAlphabet::Find(sym);
          if (!id)
            throw Error("unknown phoneme '" + std::string(sym) +
                        "' in interval tier");
          labels[i] = *id;
        }
        break;
      }
    }
  }
  return labels;
}

std::vector<Interval> ParseTextGrid(const std::string &contents) {
  std::istringstream is(contents);
  std::string line;
  std::vector<Interval> out;
  bool in_tier = false, done = false;
  Interval cur;
  int have = 0;  // bitmask of xmin/xmax/text seen for the current interval
  auto value_of = [](std::string_view l) {
    auto eq = l.find('=');
    return std::string(Trim(l.substr(eq + 1)));
  };
  while (!done && std::getline(is, line)) {
    std::string_view l = Trim(line);
    if (l.rfind("class =", 0) == 0) {
      if (in_tier && !out.empty()) break;
      in_tier = l.find("IntervalTier") != std::string_view::npos;
      continue;
    }
    if (!in_tier) continue;
    if (l.rfind("intervals [", 0) == 0) {
      cur = Interval{};
      have = 0;
    } else if (l.rfind("xmin =", 0) == 0) {
      cur.start = std::stod(value_of(l));
      have |= 1;
    } else if (l.rfind("xmax =", 0) == 0) {
      cur.end = std::stod(value_of(l));
      have |= 2;
    } else if (l.rfind("text =", 0) == 0) {
      std::string v = value_of(l);
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        v = v.substr(1, v.size() - 2);
      cur.symbol = v;
      if ((have & 3) == 3) out.push_back(cur);
      have = 0;
    }
  }
  if (out.empty()) throw Error("no interval tier found in TextGrid");
  return out;
}

std::vector<Interval> ReadIntervals(const std::filesystem::path &path) {
  std::string contents = ReadFile(path);
  if (contents.find("ooTextFile") != std::string::npos)
    return ParseTextGrid(contents);
  std::istringstream is(contents);
  std::vector<Interval> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (SkipLine(line)) continue;
    auto f = SplitWhitespace(line);
    if (f.size() != 2 && f.size() != 3)
      throw Error("malformed interval record at " + path.string() + ":" +
                  std::to_string(n));
    try {
      out.push_back({std::stod(f[0]), std::stod(f[1]), f.size() == 3 ? f[2] : ""});
    } catch (const std::exception &) {
      throw Error("malformed interval record at " + path.string() + ":" +
                  std::to_string(n));
    }
  }
  return out;
}

}  // namespace lrc
