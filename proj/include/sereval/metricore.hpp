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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sereval/ensemble.hpp"
#include "sereval/error.hpp"
#include "sereval/labels.hpp"

namespace sereval::metrics {

struct HardMetricReport {
  double wa = 0.0;  // overall accuracy
  double ua = 0.0;  // mean recall over classes present in the truths
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_invalid = 0;
};

// Per-class confusion counts. An Invalid prediction is a false negative for
// its truth class and a false positive for nobody.
struct ClassCounts {
  std::vector<std::size_t> tp, fp, fn, support;
};

inline ClassCounts class_counts(std::span<const std::optional<LabelIndex>> preds, std::span<const LabelIndex> truths,
                                std::size_t classes) {
  if (preds.size() != truths.size())
    throw Error(Errc::kLengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                           std::to_string(truths.size()) + " truths");
  if (truths.empty()) throw Error(Errc::kEmptyInput, "no samples to score");
  ClassCounts k{std::vector<std::size_t>(classes, 0), std::vector<std::size_t>(classes, 0),
                std::vector<std::size_t>(classes, 0), std::vector<std::size_t>(classes, 0)};
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const auto t = truths[i];
    if (t >= classes) throw Error(Errc::kUnknownTruthLabel, "truth index " + std::to_string(t) + " out of range");
    ++k.support[t];
    const auto& p = preds[i];
    if (p && *p >= classes) throw Error(Errc::kUnknownLabel, "prediction index out of range");
    if (p && *p == t) {
      ++k.tp[t];
    } else {
      ++k.fn[t];
      if (p) ++k.fp[*p];
    }
  }
  return k;
}

inline double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

inline HardMetricReport hard_metrics(std::span<const std::optional<LabelIndex>> preds,
                                     std::span<const LabelIndex> truths, std::size_t classes) {
  const auto k = class_counts(preds, truths, classes);
  HardMetricReport r;
  r.n_samples = truths.size();
  for (const auto& p : preds) r.n_invalid += p ? 0 : 1;

  std::size_t tp = 0, fp = 0, fn = 0, present = 0;
  double recall_sum = 0.0, f1_sum = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    tp += k.tp[c];
    fp += k.fp[c];
    fn += k.fn[c];
    if (k.support[c] == 0) continue;
    ++present;
    recall_sum += static_cast<double>(k.tp[c]) / static_cast<double>(k.support[c]);
    f1_sum += f1(k.tp[c], k.fp[c], k.fn[c]);
  }
  r.wa = static_cast<double>(tp) / static_cast<double>(r.n_samples);
  r.ua = recall_sum / static_cast<double>(present);
  r.macro_f1 = f1_sum / static_cast<double>(present);
  r.micro_f1 = f1(tp, fp, fn);
  return r;
}

enum class KldDirection {
  kTruthToPred,  // KL(truth || pred), smoothing the prediction
  kPredToTruth,  // KL(pred || truth), smoothing the truth
};

inline std::string_view to_string(KldDirection d) {
  return d == KldDirection::kTruthToPred ? "truth_to_pred" : "pred_to_truth";
}

struct DivergenceOptions {
  KldDirection direction = KldDirection::kTruthToPred;
  double epsilon = 1e-6;
};

struct Divergences {
  double kld = 0.0;
  double jsd = 0.0;
  double tvd = 0.0;
  double sim = 0.0;
  double mse = 0.0;
};

// KL(p || q') with q' = (q + eps) / (1 + C eps); 0 ln 0 = 0. Natural log.
inline double smoothed_kl(std::span<const double> p, std::span<const double> q, double eps) {
  const double norm = 1.0 + static_cast<double>(q.size()) * eps;
  double kl = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] <= 0.0) continue;
    kl += p[c] * std::log(p[c] * norm / (q[c] + eps));
  }
  return kl;
}

inline Divergences divergence_metrics(const SoftLabel& pred, const SoftLabel& truth,
                                      const DivergenceOptions& opt = {}) {
  if (pred.size() != truth.size() || pred.size() == 0)
    throw Error(Errc::kDimensionMismatch,
                "prediction has " + std::to_string(pred.size()) + " classes, truth " + std::to_string(truth.size()));
  const auto& p = pred.probs;
  const auto& t = truth.probs;
  const std::size_t classes = p.size();

  Divergences d;
  d.kld = opt.direction == KldDirection::kTruthToPred ? smoothed_kl(t, p, opt.epsilon) : smoothed_kl(p, t, opt.epsilon);

  double js = 0.0, abs_sum = 0.0, dot = 0.0, pp = 0.0, tt = 0.0, sq = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double m = 0.5 * (t[c] + p[c]);
    if (t[c] > 0.0) js += 0.5 * t[c] * std::log(t[c] / m);
    if (p[c] > 0.0) js += 0.5 * p[c] * std::log(p[c] / m);
    const double diff = t[c] - p[c];
    abs_sum += std::abs(diff);
    sq += diff * diff;
    dot += t[c] * p[c];
    pp += p[c] * p[c];
    tt += t[c] * t[c];
  }
  d.jsd = std::max(0.0, js);
  d.tvd = 0.5 * abs_sum;
  d.sim = (pp > 0.0 && tt > 0.0) ? std::clamp(dot / (std::sqrt(pp) * std::sqrt(tt)), -1.0, 1.0) : 0.0;
  d.mse = sq / static_cast<double>(classes);
  return d;
}

struct HardDecision {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double top1_acc = 0.0;
};

// Distributions are reduced to their argmax (ties to label-set order) and
// scored as hard labels.
inline HardDecision soft_hard_decision(std::span<const SoftLabel> preds, std::span<const SoftLabel> truths,
                                       std::size_t classes) {
  if (preds.size() != truths.size())
    throw Error(Errc::kLengthMismatch, "prediction and truth lists differ in length");
  std::vector<std::optional<LabelIndex>> p;
  std::vector<LabelIndex> t;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != classes || truths[i].size() != classes)
      throw Error(Errc::kDimensionMismatch, "distribution length differs from class count");
    p.emplace_back(ensemble::top1(preds[i].probs));
    t.push_back(ensemble::top1(truths[i].probs));
  }
  const auto r = hard_metrics(p, t, classes);
  return {r.macro_f1, r.micro_f1, r.wa};
}

struct SoftMetricReport {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double top1_acc = 0.0;
  double kld = 0.0;
  double jsd = 0.0;
  double tvd = 0.0;
  double sim = 0.0;
  double mse = 0.0;
  std::size_t n_samples = 0;
};

// Hard-decision scores plus divergences averaged over samples.
inline SoftMetricReport soft_metrics(std::span<const SoftLabel> preds, std::span<const SoftLabel> truths,
                                     std::size_t classes, const DivergenceOptions& opt = {}) {
  const auto hd = soft_hard_decision(preds, truths, classes);
  SoftMetricReport r;
  r.macro_f1 = hd.macro_f1;
  r.micro_f1 = hd.micro_f1;
  r.top1_acc = hd.top1_acc;
  r.n_samples = preds.size();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto d = divergence_metrics(preds[i], truths[i], opt);
    r.kld += d.kld;
    r.jsd += d.jsd;
    r.tvd += d.tvd;
    r.sim += d.sim;
    r.mse += d.mse;
  }
  const double n = static_cast<double>(preds.size());
  r.kld /= n;
  r.jsd /= n;
  r.tvd /= n;
  r.sim /= n;
  r.mse /= n;
  return r;
}

}  // namespace sereval::metrics
