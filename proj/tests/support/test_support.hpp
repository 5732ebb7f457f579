/* Copyright 2026 The sereval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Shared helpers for the unit and acceptance suites: fixture paths, scratch
// directories, a seeded value generator and synthetic manifest builders.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "sereval/corpusmeta.hpp"

#ifndef SEREVAL_FIXTURE_DIR
#error "SEREVAL_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace sereval::testing {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& rel) { return fs::path(SEREVAL_FIXTURE_DIR) / rel; }

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("sereval_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Runs `fn` and returns the library error code it raised, if any.
template <typename Fn>
std::optional<Errc> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(n) - 1)); }
  double real(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return real() < p; }

  std::vector<double> simplex(std::size_t c, double zero_prob = 0.2) {
    std::vector<double> v(c);
    double sum = 0.0;
    for (auto& x : v) {
      x = coin(zero_prob) ? 0.0 : real(0.01, 1.0);
      sum += x;
    }
    if (sum == 0.0) {
      v[index(c)] = 1.0;
      sum = 1.0;
    }
    for (auto& x : v) x /= sum;
    return v;
  }

  std::string bytes(std::size_t max_len) {
    std::string s(static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(max_len))), '\0');
    for (auto& ch : s) ch = static_cast<char>(integer(0, 255));
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline LabelSet label_set(std::size_t c) {
  static const char* names[] = {"Angry",   "Happy", "Neutral", "Sad",   "Fear",     "Disgust", "Surprise",
                                "Contempt", "Calm", "Bored",   "Excited", "Frustrated", "Other", "Confused"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c; ++i) out.emplace_back(i < 14 ? names[i] : "Label" + std::to_string(i));
  return LabelSet(out);
}

// In-memory manifest: `per_cell` utterances for every (speaker, class) pair
// with single-label votes; speakers named s00, s01, ...
inline corpus::DatasetManifest synthetic_manifest(std::size_t speakers, std::size_t classes, std::size_t per_cell,
                                                  const std::string& id = "synth") {
  corpus::DatasetManifest m;
  m.dataset_id = id;
  m.languages = {"en"};
  m.labels = label_set(classes);
  for (std::size_t s = 0; s < speakers; ++s) {
    char spk[32];
    std::snprintf(spk, sizeof spk, "s%02zu", s);
    m.speakers.emplace_back(spk);
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t k = 0; k < per_cell; ++k) {
        corpus::Utterance u;
        char id_buf[48];
        std::snprintf(id_buf, sizeof id_buf, "%s_c%zu_%03zu", spk, c, k);
        u.utt_id = id_buf;
        u.audio_ref = u.utt_id + ".wav";
        u.speaker_id = spk;
        u.hard_label = m.labels.key(c);
        m.utterances.push_back(std::move(u));
      }
    }
  }
  m.reindex();
  return m;
}

// Randomized manifest: random speaker count, uneven per-speaker volume and
// random class mix (every class has at least two samples).
inline corpus::DatasetManifest random_manifest(Gen& g, std::size_t speakers, std::size_t classes) {
  corpus::DatasetManifest m;
  m.dataset_id = "rand";
  m.languages = {"en"};
  m.labels = label_set(classes);
  std::size_t n = 0;
  std::vector<std::size_t> per_class(classes, 0);
  for (std::size_t s = 0; s < speakers; ++s) {
    const std::string spk = "spk" + std::to_string(s);
    m.speakers.push_back(spk);
    const auto count = static_cast<std::size_t>(g.integer(2, 15));
    for (std::size_t k = 0; k < count; ++k) {
      corpus::Utterance u;
      u.utt_id = "u" + std::to_string(n++);
      u.audio_ref = u.utt_id + ".wav";
      u.speaker_id = spk;
      const std::size_t c = g.index(classes);
      ++per_class[c];
      u.hard_label = m.labels.key(c);
      m.utterances.push_back(std::move(u));
    }
  }
  for (std::size_t c = 0; c < classes; ++c) {
    while (per_class[c] < 2) {
      corpus::Utterance u;
      u.utt_id = "u" + std::to_string(n++);
      u.audio_ref = u.utt_id + ".wav";
      u.speaker_id = m.speakers[g.index(speakers)];
      u.hard_label = m.labels.key(c);
      ++per_class[c];
      m.utterances.push_back(std::move(u));
    }
  }
  std::sort(m.speakers.begin(), m.speakers.end());
  m.reindex();
  return m;
}

}  // namespace sereval::testing
