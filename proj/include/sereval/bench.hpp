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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sereval/aliases.hpp"
#include "sereval/corpusmeta.hpp"
#include "sereval/ensemble.hpp"
#include "sereval/error.hpp"
#include "sereval/metricore.hpp"
#include "sereval/modelio.hpp"
#include "sereval/outparse.hpp"
#include "sereval/promptkit.hpp"
#include "sereval/splitter.hpp"
#include "sereval/util.hpp"

namespace sereval::bench {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kEnsembleSetting = "ensemble";
inline constexpr std::string_view kSftSetting = "SFT";

// ---------------------------------------------------------------------------
// Configuration

enum class PromptStyle { kZeroShot, kSft };
enum class EvalPartition { kAll, kTest };

struct AdapterConfig {
  std::string kind = "mock";  // mock | http
  std::string fixtures;       // mock only
  std::string model_id = "mock";
  modelio::HttpAdapterConfig http;
};

struct MetricOptions {
  metrics::DivergenceOptions divergence;
  corpus::TiePolicy tie_policy = corpus::TiePolicy::kNoAgreement;
};

inline std::vector<prompt::Variant> all_variants() {
  constexpr auto v = prompt::list_variants();
  return {v.begin(), v.end()};
}

struct RunConfig {
  std::string run_id = "run";
  std::vector<std::string> manifests;
  AdapterConfig adapter;
  std::vector<prompt::Variant> variants = all_variants();
  std::vector<prompt::Mode> modes{prompt::Mode::kHard};
  PromptStyle prompt_style = PromptStyle::kZeroShot;
  EvalPartition partition = EvalPartition::kAll;
  std::uint64_t seed = 0;
  int concurrency = 1;
  std::string output_dir = "runs";
  modelio::DecodeSettings decode;
  std::string alias_map;        // empty: shipped defaults
  std::string prompt_template;  // empty: built-in asset
  MetricOptions metrics;
  parse::ParseOptions parser;
  split::SplitOptions split;
};

namespace detail {

inline std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  return (path.is_absolute() ? path : fs::absolute(base / path)).lexically_normal().string();
}

[[noreturn]] inline void config_fail(const std::string& what) { throw Error(Errc::kConfigError, what); }

inline void only_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      config_fail("unknown key '" + k + "' in " + where);
  }
}

// Fixed-precision value used in scoreboards so reports compare byte-for-byte.
inline double round10(double x) { return std::floor(x * 1e10 + 0.5) / 1e10; }

inline void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) config_fail("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline json read_json(const std::string& path) {
  auto j = json::parse(util::read_file(path), nullptr, false);
  if (j.is_discarded()) config_fail(path + " is not valid JSON");
  return j;
}

}  // namespace detail

inline RunConfig config_from_json(const json& j, const fs::path& base_dir) {
  using detail::config_fail;
  if (!j.is_object()) config_fail("config must be a JSON object");
  detail::only_keys(j, {"run_id", "datasets", "adapter", "variants", "modes", "prompt_style", "partition", "seed",
                        "concurrency", "output_dir", "max_new_tokens", "alias_map", "prompt_template", "metrics",
                        "parser", "split"},
                    "config");
  RunConfig c;
  try {
    c.run_id = j.value("run_id", c.run_id);
    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty())
      config_fail("config needs a non-empty 'datasets' list");
    for (const auto& d : j["datasets"]) c.manifests.push_back(detail::resolve(base_dir, d.get<std::string>()));

    if (auto it = j.find("adapter"); it != j.end()) {
      const auto& a = *it;
      detail::only_keys(a, {"kind", "fixtures", "model", "endpoint", "timeout_s", "max_attempts", "backoff_ms",
                            "send_audio"},
                        "adapter");
      c.adapter.kind = a.value("kind", c.adapter.kind);
      if (c.adapter.kind != "mock" && c.adapter.kind != "http") config_fail("adapter.kind must be mock or http");
      c.adapter.fixtures = detail::resolve(base_dir, a.value("fixtures", std::string()));
      c.adapter.model_id = a.value("model", c.adapter.kind == "mock" ? std::string("mock") : std::string("model"));
      c.adapter.http.model = c.adapter.model_id;
      c.adapter.http.endpoint = a.value("endpoint", c.adapter.http.endpoint);
      c.adapter.http.timeout = std::chrono::seconds(a.value("timeout_s", 120));
      c.adapter.http.retry.max_attempts = a.value("max_attempts", c.adapter.http.retry.max_attempts);
      c.adapter.http.retry.initial_backoff = std::chrono::milliseconds(a.value("backoff_ms", 200));
      c.adapter.http.send_audio = a.value("send_audio", true);
      if (c.adapter.kind == "mock" && c.adapter.fixtures.empty()) config_fail("mock adapter needs 'fixtures'");
      if (c.adapter.http.retry.max_attempts < 1) config_fail("adapter.max_attempts must be at least 1");
    } else {
      config_fail("config needs an 'adapter' section");
    }

    if (auto it = j.find("variants"); it != j.end()) {
      c.variants.clear();
      for (const auto& v : *it) {
        auto parsed = prompt::variant_from_string(v.get<std::string>());
        if (!parsed) config_fail("unknown prompt variant '" + v.get<std::string>() + "'");
        c.variants.push_back(*parsed);
      }
      if (c.variants.empty()) config_fail("'variants' must not be empty");
      // Canonical order, no duplicates.
      std::vector<prompt::Variant> ordered;
      for (auto v : prompt::list_variants())
        if (std::find(c.variants.begin(), c.variants.end(), v) != c.variants.end()) ordered.push_back(v);
      c.variants = ordered;
    }
    if (auto it = j.find("modes"); it != j.end()) {
      c.modes.clear();
      std::set<prompt::Mode> seen;
      for (const auto& m : *it) {
        auto parsed = prompt::mode_from_string(m.get<std::string>());
        if (!parsed) config_fail("unknown mode '" + m.get<std::string>() + "'");
        seen.insert(*parsed);
      }
      c.modes.assign(seen.begin(), seen.end());
      if (c.modes.empty()) config_fail("'modes' must not be empty");
    }
    const auto style = j.value("prompt_style", std::string("zero_shot"));
    if (style == "zero_shot") c.prompt_style = PromptStyle::kZeroShot;
    else if (style == "sft") c.prompt_style = PromptStyle::kSft;
    else config_fail("prompt_style must be zero_shot or sft");
    const auto part = j.value("partition", std::string("all"));
    if (part == "all") c.partition = EvalPartition::kAll;
    else if (part == "test") c.partition = EvalPartition::kTest;
    else config_fail("partition must be all or test");

    c.seed = j.value("seed", std::uint64_t{0});
    c.concurrency = j.value("concurrency", 1);
    if (c.concurrency < 1) config_fail("concurrency must be at least 1");
    c.output_dir = detail::resolve(base_dir, j.value("output_dir", c.output_dir));
    c.decode.max_new_tokens = j.value("max_new_tokens", c.decode.max_new_tokens);
    if (c.decode.max_new_tokens < 1) config_fail("max_new_tokens must be at least 1");
    c.alias_map = detail::resolve(base_dir, j.value("alias_map", std::string()));
    c.prompt_template = detail::resolve(base_dir, j.value("prompt_template", std::string()));

    if (auto it = j.find("metrics"); it != j.end()) {
      detail::only_keys(*it, {"kld_direction", "epsilon", "tie_policy"}, "metrics");
      const auto dir = it->value("kld_direction", std::string("truth_to_pred"));
      if (dir == "truth_to_pred") c.metrics.divergence.direction = metrics::KldDirection::kTruthToPred;
      else if (dir == "pred_to_truth") c.metrics.divergence.direction = metrics::KldDirection::kPredToTruth;
      else config_fail("metrics.kld_direction must be truth_to_pred or pred_to_truth");
      c.metrics.divergence.epsilon = it->value("epsilon", 1e-6);
      if (!(c.metrics.divergence.epsilon > 0.0)) config_fail("metrics.epsilon must be positive");
      const auto tie = it->value("tie_policy", std::string("no_agreement"));
      if (tie == "no_agreement") c.metrics.tie_policy = corpus::TiePolicy::kNoAgreement;
      else if (tie == "label_order") c.metrics.tie_policy = corpus::TiePolicy::kLabelOrder;
      else config_fail("metrics.tie_policy must be no_agreement or label_order");
    }
    if (auto it = j.find("parser"); it != j.end()) {
      detail::only_keys(*it, {"whole_text_fallback", "renorm_tolerance"}, "parser");
      c.parser.whole_text_fallback = it->value("whole_text_fallback", true);
      c.parser.renorm_tolerance = it->value("renorm_tolerance", 1e-6);
    }
    if (auto it = j.find("split"); it != j.end()) {
      detail::only_keys(*it, {"unbalance_threshold"}, "split");
      c.split.unbalance_threshold = it->value("unbalance_threshold", c.split.unbalance_threshold);
    }
  } catch (const json::exception& e) {
    config_fail(std::string("malformed config: ") + e.what());
  }
  if (c.prompt_style == PromptStyle::kSft) c.modes = {prompt::Mode::kHard};
  return c;
}

// Applies a "dotted.path=value" override; the value is read as JSON when it
// parses and as a plain string otherwise.
inline void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) detail::config_fail("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  auto value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) detail::config_fail("override '" + assignment + "' has an empty key");
    if (!node->is_object()) detail::config_fail("override '" + assignment + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  auto j = detail::read_json(path);
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j, fs::absolute(fs::path(path)).parent_path());
}

// Fully resolved form (absolute paths); config_from_json accepts it back.
inline json to_json(const RunConfig& c) {
  json variants = json::array(), modes = json::array();
  for (auto v : c.variants) variants.push_back(std::string(prompt::to_string(v)));
  for (auto m : c.modes) modes.push_back(std::string(prompt::to_string(m)));
  json adapter{{"kind", c.adapter.kind}, {"model", c.adapter.model_id}};
  if (c.adapter.kind == "mock") {
    adapter["fixtures"] = c.adapter.fixtures;
  } else {
    adapter["endpoint"] = c.adapter.http.endpoint;
    adapter["timeout_s"] = c.adapter.http.timeout.count();
    adapter["max_attempts"] = c.adapter.http.retry.max_attempts;
    adapter["backoff_ms"] = c.adapter.http.retry.initial_backoff.count();
    adapter["send_audio"] = c.adapter.http.send_audio;
  }
  json j{{"run_id", c.run_id},
         {"datasets", c.manifests},
         {"adapter", adapter},
         {"variants", variants},
         {"modes", modes},
         {"prompt_style", c.prompt_style == PromptStyle::kZeroShot ? "zero_shot" : "sft"},
         {"partition", c.partition == EvalPartition::kAll ? "all" : "test"},
         {"seed", c.seed},
         {"concurrency", c.concurrency},
         {"output_dir", c.output_dir},
         {"max_new_tokens", c.decode.max_new_tokens},
         {"metrics",
          {{"kld_direction", std::string(metrics::to_string(c.metrics.divergence.direction))},
           {"epsilon", c.metrics.divergence.epsilon},
           {"tie_policy", std::string(corpus::to_string(c.metrics.tie_policy))}}},
         {"parser",
          {{"whole_text_fallback", c.parser.whole_text_fallback}, {"renorm_tolerance", c.parser.renorm_tolerance}}},
         {"split", {{"unbalance_threshold", c.split.unbalance_threshold}}}};
  if (!c.alias_map.empty()) j["alias_map"] = c.alias_map;
  if (!c.prompt_template.empty()) j["prompt_template"] = c.prompt_template;
  return j;
}

// Everything a run reads, loaded once.
struct Workspace {
  RunConfig config;
  parse::AliasMap aliases;  // base map before per-dataset overrides
  prompt::PromptTemplate tpl;
  std::vector<corpus::DatasetManifest> datasets;

  const corpus::DatasetManifest& dataset(const std::string& id) const {
    for (const auto& d : datasets)
      if (d.dataset_id == id) return d;
    throw Error(Errc::kMissingGroundTruth, "dataset '" + id + "' is not in the workspace");
  }
};

inline Workspace open_workspace(const RunConfig& config) {
  Workspace w{config, parse::AliasMap::defaults(), prompt::PromptTemplate::builtin(), {}};
  if (!config.alias_map.empty()) w.aliases = parse::AliasMap::load(config.alias_map);
  if (!config.prompt_template.empty()) w.tpl = prompt::PromptTemplate::load(config.prompt_template);
  std::set<std::string> ids;
  for (const auto& path : config.manifests) {
    w.datasets.push_back(corpus::load_manifest(path, w.aliases));
    if (!ids.insert(w.datasets.back().dataset_id).second)
      throw Error(Errc::kConfigError, "dataset '" + w.datasets.back().dataset_id + "' listed twice");
  }
  return w;
}

inline std::unique_ptr<modelio::ModelAdapter> make_adapter(const RunConfig& c) {
  if (c.adapter.kind == "mock")
    return std::make_unique<modelio::MockAdapter>(modelio::MockAdapter::load(c.adapter.fixtures, c.adapter.model_id));
  return std::make_unique<modelio::HttpAdapter>(c.adapter.http);
}

// Prompt settings scored for a run, in canonical order.
inline std::vector<std::string> setting_names(const RunConfig& c) {
  if (c.prompt_style == PromptStyle::kSft) return {std::string(kSftSetting)};
  std::vector<std::string> out;
  for (auto v : c.variants) out.emplace_back(prompt::to_string(v));
  return out;
}

inline bool wants_mode(const RunConfig& c, const corpus::DatasetManifest& d, prompt::Mode m) {
  if (std::find(c.modes.begin(), c.modes.end(), m) == c.modes.end()) return false;
  return m == prompt::Mode::kHard || d.has_votes();
}

// Utterances evaluated for a dataset, in manifest order.
inline std::vector<const corpus::Utterance*> eval_utterances(const Workspace& w, const corpus::DatasetManifest& d) {
  std::vector<const corpus::Utterance*> out;
  if (w.config.partition == EvalPartition::kAll) {
    for (const auto& u : d.utterances) out.push_back(&u);
    return out;
  }
  const auto plan = split::plan_splits(d, w.config.seed, w.config.split);
  std::set<std::string> test;
  for (const auto& f : plan.folds) test.insert(f.test_ids.begin(), f.test_ids.end());
  for (const auto& u : d.utterances)
    if (test.count(u.utt_id)) out.push_back(&u);
  return out;
}

// ---------------------------------------------------------------------------
// Run artifacts

struct SampleRecord {
  std::string dataset_id;
  std::string utt_id;
  std::string variant;
  prompt::Mode mode = prompt::Mode::kHard;
  std::string raw_text;
  std::optional<std::string> failure;
  parse::ParsedPrediction parsed;
};

struct RunArtifacts {
  std::string run_id;
  std::vector<SampleRecord> records;
  json environment;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const SampleRecord& r) { return r.failure.has_value(); }));
  }
};

inline json environment_fingerprint() {
  json env{{"sereval_version", std::string(kVersion)},
           {"parser_version", std::string(parse::kParserVersion)},
           {"wire_protocol", std::string(modelio::kWireProtocolVersion)},
           {"cplusplus", static_cast<long>(__cplusplus)}};
#if defined(__VERSION__)
  env["compiler"] = __VERSION__;
#endif
#if defined(__linux__)
  env["platform"] = "linux";
#elif defined(__APPLE__)
  env["platform"] = "darwin";
#elif defined(_WIN32)
  env["platform"] = "windows";
#endif
  return env;
}

inline json to_json(const SampleRecord& r, const LabelSet& labels) {
  json status{{"final_label_found", r.parsed.status.final_label_found},
              {"final_label_from_fallback", r.parsed.status.final_label_from_fallback},
              {"distribution_found", r.parsed.status.distribution_found},
              {"distribution_fallback_uniform", r.parsed.status.distribution_fallback_uniform},
              {"renormalized", r.parsed.status.renormalized}};
  json j{{"dataset_id", r.dataset_id},
         {"utt_id", r.utt_id},
         {"variant", r.variant},
         {"mode", std::string(prompt::to_string(r.mode))},
         {"raw_text", r.raw_text},
         {"failure", r.failure ? json(*r.failure) : json(nullptr)},
         {"final_label", r.parsed.final_label ? json(labels.key(*r.parsed.final_label)) : json(nullptr)},
         {"status", status}};
  if (r.parsed.distribution) j["distribution"] = r.parsed.distribution->probs;
  return j;
}

inline SampleRecord record_from_json(const json& j, const Workspace& w) {
  SampleRecord r;
  r.dataset_id = j.at("dataset_id").get<std::string>();
  const auto& labels = w.dataset(r.dataset_id).labels;
  r.utt_id = j.at("utt_id").get<std::string>();
  r.variant = j.at("variant").get<std::string>();
  r.mode = prompt::mode_from_string(j.at("mode").get<std::string>()).value_or(prompt::Mode::kHard);
  r.raw_text = j.at("raw_text").get<std::string>();
  if (!j.at("failure").is_null()) r.failure = j["failure"].get<std::string>();
  if (!j.at("final_label").is_null()) {
    r.parsed.final_label = labels.find(j["final_label"].get<std::string>());
    if (!r.parsed.final_label) throw Error(Errc::kMissingGroundTruth, "record label outside the label set");
  }
  if (auto it = j.find("distribution"); it != j.end()) r.parsed.distribution = SoftLabel{it->get<std::vector<double>>()};
  const auto& s = j.at("status");
  r.parsed.status = {s.at("final_label_found").get<bool>(), s.at("final_label_from_fallback").get<bool>(),
                     s.at("distribution_found").get<bool>(), s.at("distribution_fallback_uniform").get<bool>(),
                     s.at("renormalized").get<bool>()};
  return r;
}

inline std::vector<modelio::GenerationRequest> build_requests(const Workspace& w, bool with_audio) {
  const auto& c = w.config;
  std::vector<modelio::GenerationRequest> out;
  for (const auto& d : w.datasets) {
    const fs::path base = fs::path(d.descriptor_path).parent_path();
    const auto utts = eval_utterances(w, d);
    for (auto mode : {prompt::Mode::kHard, prompt::Mode::kDistribution}) {
      if (!wants_mode(c, d, mode)) continue;
      std::vector<std::pair<std::string, prompt::PromptText>> prompts;
      if (c.prompt_style == PromptStyle::kSft) {
        prompts.emplace_back(std::string(kSftSetting), prompt::render_sft_prompt(d.labels, w.tpl));
      } else {
        for (auto v : c.variants)
          prompts.emplace_back(std::string(prompt::to_string(v)), prompt::render_prompt({v, mode, d.labels}, w.tpl));
      }
      for (const auto* u : utts) {
        for (const auto& [name, text] : prompts) {
          modelio::GenerationRequest r;
          r.dataset_id = d.dataset_id;
          r.utt_id = u->utt_id;
          r.variant = name;
          r.mode = mode;
          r.audio = modelio::load_audio(u->audio_ref, base, with_audio);
          r.prompt = text;
          r.decode = c.decode;
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

inline fs::path records_path(const RunConfig& c) { return fs::path(c.output_dir) / "records.jsonl"; }
inline fs::path request_log_path(const RunConfig& c) { return fs::path(c.output_dir) / "requests.log.jsonl"; }

// Renders, generates and parses every (utterance, setting, mode). Responses
// are logged as they arrive so an interrupted run resumes; the canonical
// records file and terminal run manifest are written at the end.
inline RunArtifacts run_eval(const Workspace& w, modelio::ModelAdapter& adapter) {
  const auto& c = w.config;
  fs::create_directories(c.output_dir);
  const auto requests = build_requests(w, adapter.needs_audio());
  const auto responses = modelio::batch_generate(requests, adapter, {c.concurrency, request_log_path(c).string()});

  RunArtifacts art;
  art.run_id = c.run_id;
  art.environment = environment_fingerprint();
  std::ostringstream canonical;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& req = requests[i];
    const auto& res = responses[i];
    const auto& d = w.dataset(req.dataset_id);
    SampleRecord r;
    r.dataset_id = req.dataset_id;
    r.utt_id = req.utt_id;
    r.variant = req.variant;
    r.mode = req.mode;
    r.raw_text = res.raw_text;
    if (res.failure) r.failure = std::string(errc_name(*res.failure));
    r.parsed = parse::parse_response(res.ok() ? std::string_view(res.raw_text) : std::string_view(), d.labels,
                                     d.aliases, req.mode, c.parser);
    canonical << to_json(r, d.labels).dump() << '\n';
    art.records.push_back(std::move(r));
  }
  const std::string body = canonical.str();
  {
    std::ofstream out(records_path(c), std::ios::binary | std::ios::trunc);
    out << body;
  }
  detail::write_json(fs::path(c.output_dir) / "run.json",
                     {{"schema", "sereval.run/1"},
                      {"run_id", c.run_id},
                      {"records", art.records.size()},
                      {"failures", art.failures()},
                      {"records_sha256", util::sha256_hex(body)},
                      {"environment", art.environment},
                      {"config", to_json(c)}});
  return art;
}

inline RunArtifacts load_artifacts(const Workspace& w) {
  const auto path = records_path(w.config);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kConfigError, "no run artifacts at " + path.string());
  RunArtifacts art;
  art.run_id = w.config.run_id;
  art.environment = environment_fingerprint();
  std::string line;
  while (std::getline(in, line)) {
    if (util::trim(line).empty()) continue;
    art.records.push_back(record_from_json(json::parse(line), w));
  }
  return art;
}

// ---------------------------------------------------------------------------
// Scoring

namespace detail {

struct DatasetRecords {
  // setting -> utt_id -> record, per mode
  std::map<std::string, std::map<std::string, const SampleRecord*>> hard, dist;
};

inline std::map<std::string, DatasetRecords> index_records(const RunArtifacts& art) {
  std::map<std::string, DatasetRecords> out;
  for (const auto& r : art.records) {
    auto& d = out[r.dataset_id];
    (r.mode == prompt::Mode::kHard ? d.hard : d.dist)[r.variant][r.utt_id] = &r;
  }
  return out;
}

inline json hard_json(const metrics::HardMetricReport& m) {
  return {{"wa", round10(m.wa)},
          {"ua", round10(m.ua)},
          {"micro_f1", round10(m.micro_f1)},
          {"macro_f1", round10(m.macro_f1)},
          {"n_samples", m.n_samples},
          {"n_invalid", m.n_invalid}};
}

inline json soft_json(const metrics::SoftMetricReport& m) {
  return {{"macro_f1", round10(m.macro_f1)}, {"micro_f1", round10(m.micro_f1)}, {"top1_acc", round10(m.top1_acc)},
          {"kld", round10(m.kld)},           {"jsd", round10(m.jsd)},           {"tvd", round10(m.tvd)},
          {"sim", round10(m.sim)},           {"mse", round10(m.mse)},           {"n_samples", m.n_samples}};
}

// Settings sharing the maximum Macro-F1 (ties all marked).
inline json best_settings(const json& settings) {
  double best = -1.0;
  for (const auto& [name, s] : settings.items()) best = std::max(best, s.at("macro_f1").get<double>());
  json out = json::array();
  for (const auto& [name, s] : settings.items())
    if (s.at("macro_f1").get<double>() == best) out.push_back(name);
  return out;
}

}  // namespace detail

struct EnsembleRow {
  std::string dataset_id;
  ensemble::VoteRecord votes;
  SoftLabel distribution;
  LabelIndex top1 = 0;
};

// Prompt-ensemble vote aggregation over the hard-mode settings of each utterance.
// Empty for single-prompt (SFT) runs.
inline std::vector<EnsembleRow> ensemble_rows(const Workspace& w, const RunArtifacts& art) {
  std::vector<EnsembleRow> out;
  if (w.config.prompt_style == PromptStyle::kSft) return out;
  const auto settings = setting_names(w.config);
  const auto index = detail::index_records(art);
  for (const auto& d : w.datasets) {
    auto it = index.find(d.dataset_id);
    if (it == index.end()) continue;
    const auto& hard = it->second.hard;
    for (const auto* u : eval_utterances(w, d)) {
      std::vector<std::optional<LabelIndex>> votes;
      bool complete = true;
      for (const auto& s : settings) {
        auto sit = hard.find(s);
        if (sit == hard.end() || !sit->second.count(u->utt_id)) {
          complete = false;
          break;
        }
        votes.push_back(sit->second.at(u->utt_id)->parsed.final_label);
      }
      if (!complete) continue;
      EnsembleRow row;
      row.dataset_id = d.dataset_id;
      row.votes = ensemble::make_vote_record(u->utt_id, std::move(votes), d.num_classes());
      row.distribution = ensemble::aggregate(row.votes, d.num_classes(), static_cast<int>(settings.size()));
      row.top1 = ensemble::ensemble_top1(row.distribution);
      out.push_back(std::move(row));
    }
  }
  return out;
}

inline json to_json(const EnsembleRow& row, const LabelSet& labels) {
  auto j = ensemble::to_json(row.votes, labels);
  j["dataset_id"] = row.dataset_id;
  j["distribution"] = row.distribution.probs;
  j["top1"] = labels.key(row.top1);
  return j;
}

// Per-dataset scoreboard: hard metrics per setting and for the ensemble;
// soft metrics only where the manifest carries annotator votes.
inline json score(const Workspace& w, const RunArtifacts& art) {
  const auto& c = w.config;
  const auto settings = setting_names(c);
  const auto index = detail::index_records(art);
  const auto ens = ensemble_rows(w, art);

  for (const auto& r : art.records) {
    const auto& d = w.dataset(r.dataset_id);
    if (!d.find(r.utt_id))
      throw Error(Errc::kMissingGroundTruth, "record for unknown utterance " + r.dataset_id + "/" + r.utt_id);
  }

  json datasets = json::array();
  for (const auto& d : w.datasets) {
    auto it = index.find(d.dataset_id);
    if (it == index.end()) throw Error(Errc::kMissingGroundTruth, "no records for dataset " + d.dataset_id);
    const auto& recs = it->second;
    const auto utts = eval_utterances(w, d);
    const std::size_t classes = d.num_classes();

    std::vector<const corpus::Utterance*> hard_utts;
    std::vector<LabelIndex> hard_truths;
    std::size_t no_agreement = 0;
    for (const auto* u : utts) {
      if (auto t = corpus::hard_truth(*u, d.labels, c.metrics.tie_policy)) {
        hard_utts.push_back(u);
        hard_truths.push_back(*t);
      } else {
        ++no_agreement;
      }
    }
    if (hard_utts.empty()) throw Error(Errc::kMissingGroundTruth, d.dataset_id + " has no hard ground truth");

    json entry{{"dataset_id", d.dataset_id},
               {"labels", d.labels.keys()},
               {"num_classes", classes},
               {"n_utterances", utts.size()}};

    auto lookup = [&](const std::map<std::string, std::map<std::string, const SampleRecord*>>& by_setting,
                      const std::string& s, const std::string& utt) -> const SampleRecord& {
      auto sit = by_setting.find(s);
      if (sit == by_setting.end() || !sit->second.count(utt))
        throw Error(Errc::kMissingGroundTruth, "missing record " + d.dataset_id + "/" + utt + "/" + s);
      return *sit->second.at(utt);
    };

    json hard_settings = json::object();
    for (const auto& s : settings) {
      std::vector<std::optional<LabelIndex>> preds;
      std::vector<parse::ParsedPrediction> all;
      for (const auto* u : hard_utts) preds.push_back(lookup(recs.hard, s, u->utt_id).parsed.final_label);
      for (const auto* u : utts) all.push_back(lookup(recs.hard, s, u->utt_id).parsed);
      auto sj = detail::hard_json(metrics::hard_metrics(preds, hard_truths, classes));
      sj["parse_failure_rate"] = detail::round10(parse::parse_failure_rate(all, prompt::Mode::kHard));
      hard_settings[s] = std::move(sj);
    }

    std::map<std::string, const EnsembleRow*> ens_by_utt;
    for (const auto& row : ens)
      if (row.dataset_id == d.dataset_id) ens_by_utt[row.votes.utt_id] = &row;
    const bool have_ensemble = c.prompt_style == PromptStyle::kZeroShot && ens_by_utt.size() == utts.size();
    if (have_ensemble) {
      std::vector<std::optional<LabelIndex>> preds;
      for (const auto* u : hard_utts) preds.emplace_back(ens_by_utt.at(u->utt_id)->top1);
      hard_settings[std::string(kEnsembleSetting)] = detail::hard_json(metrics::hard_metrics(preds, hard_truths, classes));
    }
    entry["hard"] = {{"n_scored", hard_utts.size()},
                     {"n_no_agreement", no_agreement},
                     {"settings", hard_settings},
                     {"best", detail::best_settings(hard_settings)}};

    std::vector<const corpus::Utterance*> soft_utts;
    std::vector<SoftLabel> soft_truths;
    for (const auto* u : utts) {
      if (!u->votes) continue;
      soft_utts.push_back(u);
      soft_truths.push_back(corpus::build_soft_label(*u->votes, d.labels));
    }
    if (!soft_utts.empty()) {
      json soft_settings = json::object();
      if (wants_mode(c, d, prompt::Mode::kDistribution)) {
        for (const auto& s : settings) {
          std::vector<SoftLabel> preds;
          std::vector<parse::ParsedPrediction> all;
          for (const auto* u : soft_utts) preds.push_back(*lookup(recs.dist, s, u->utt_id).parsed.distribution);
          for (const auto* u : utts) all.push_back(lookup(recs.dist, s, u->utt_id).parsed);
          auto sj = detail::soft_json(metrics::soft_metrics(preds, soft_truths, classes, c.metrics.divergence));
          sj["parse_failure_rate"] = detail::round10(parse::parse_failure_rate(all, prompt::Mode::kDistribution));
          soft_settings[s] = std::move(sj);
        }
      }
      if (have_ensemble) {
        std::vector<SoftLabel> preds;
        for (const auto* u : soft_utts) preds.push_back(ens_by_utt.at(u->utt_id)->distribution);
        soft_settings[std::string(kEnsembleSetting)] =
            detail::soft_json(metrics::soft_metrics(preds, soft_truths, classes, c.metrics.divergence));
      }
      if (!soft_settings.empty()) {
        entry["soft"] = {{"n_scored", soft_utts.size()},
                         {"settings", soft_settings},
                         {"best", detail::best_settings(soft_settings)}};
      }
    }
    datasets.push_back(std::move(entry));
  }
  return {{"schema", "sereval.scoreboard/1"}, {"run_id", c.run_id}, {"datasets", datasets}};
}

inline std::string scoreboard_bytes(const json& scoreboard) { return scoreboard.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Markdown

namespace detail {

inline std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
  return buf;
}

inline std::string fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::vector<std::string> ordered_settings(const json& settings) {
  std::vector<std::string> out;
  for (auto v : prompt::list_variants())
    if (settings.contains(std::string(prompt::to_string(v)))) out.emplace_back(prompt::to_string(v));
  if (settings.contains(std::string(kSftSetting))) out.emplace_back(kSftSetting);
  if (settings.contains(std::string(kEnsembleSetting))) out.emplace_back(kEnsembleSetting);
  return out;
}

inline bool is_best(const json& section, const std::string& s) {
  for (const auto& b : section.at("best"))
    if (b.get<std::string>() == s) return true;
  return false;
}

}  // namespace detail

// Tables scaled x100; best Macro-F1 per dataset in bold.
inline std::string render_report(const json& scoreboard) {
  std::ostringstream md;
  md << "# Scoreboard: " << scoreboard.at("run_id").get<std::string>() << "\n\n";
  md << "## Hard-label metrics (rates in %, best Macro-F1 in bold)\n\n";
  for (const auto& d : scoreboard.at("datasets")) {
    const auto& hard = d.at("hard");
    md << "### " << d.at("dataset_id").get<std::string>() << "\n\n";
    md << "| Setting | UA | WA | Micro-F1 | Macro-F1 | Invalid | Parse fail |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& s : detail::ordered_settings(hard.at("settings"))) {
      const auto& m = hard["settings"][s];
      const std::string macro = detail::pct(m["macro_f1"].get<double>());
      md << "| " << s << " | " << detail::pct(m["ua"].get<double>()) << " | " << detail::pct(m["wa"].get<double>())
         << " | " << detail::pct(m["micro_f1"].get<double>()) << " | "
         << (detail::is_best(hard, s) ? "**" + macro + "**" : macro) << " | " << m["n_invalid"].get<std::size_t>()
         << " | " << (m.contains("parse_failure_rate") ? detail::pct(m["parse_failure_rate"].get<double>()) : "-")
         << " |\n";
    }
    md << "\n";
  }
  bool any_soft = false;
  for (const auto& d : scoreboard.at("datasets")) any_soft = any_soft || d.contains("soft");
  if (any_soft) {
    md << "## Soft-label metrics (F1, Top-1 and Sim in %, best Macro-F1 in bold)\n\n";
    for (const auto& d : scoreboard.at("datasets")) {
      if (!d.contains("soft")) continue;
      const auto& soft = d.at("soft");
      md << "### " << d.at("dataset_id").get<std::string>() << "\n\n";
      md << "| Setting | Macro-F1 | Micro-F1 | Top-1 | KLD | JSD | TVD | Sim | MSE |\n";
      md << "|---|---|---|---|---|---|---|---|---|\n";
      for (const auto& s : detail::ordered_settings(soft.at("settings"))) {
        const auto& m = soft["settings"][s];
        const std::string macro = detail::pct(m["macro_f1"].get<double>());
        md << "| " << s << " | " << (detail::is_best(soft, s) ? "**" + macro + "**" : macro) << " | "
           << detail::pct(m["micro_f1"].get<double>()) << " | " << detail::pct(m["top1_acc"].get<double>()) << " | "
           << detail::fixed(m["kld"].get<double>(), 4) << " | " << detail::fixed(m["jsd"].get<double>(), 4) << " | "
           << detail::fixed(m["tvd"].get<double>(), 4) << " | " << detail::pct(m["sim"].get<double>()) << " | "
           << detail::fixed(m["mse"].get<double>(), 4) << " |\n";
      }
      md << "\n";
    }
  }
  return md.str();
}

// ---------------------------------------------------------------------------
// Cross-domain transfer

struct TransferCell {
  std::string source;
  std::string target;
  double macro_f1 = 0.0;
  double best_zero_shot = 0.0;

  double delta() const { return macro_f1 - best_zero_shot; }
  bool in_domain() const { return source == target; }
};

struct TransferMatrix {
  std::vector<std::string> sources;
  std::vector<std::string> targets;
  std::vector<TransferCell> cells;  // row-major: sources x targets

  const TransferCell& at(const std::string& source, const std::string& target) const {
    for (const auto& c : cells)
      if (c.source == source && c.target == target) return c;
    throw Error(Errc::kIncompleteMatrix, "no cell " + source + " -> " + target);
  }
};

struct TransferInput {
  std::string source;
  std::string target;
  double macro_f1 = 0.0;
};

// Highest hard Macro-F1 of any zero-shot setting for the dataset.
inline double best_zero_shot(const json& zero_shot_scoreboard, const std::string& dataset_id) {
  for (const auto& d : zero_shot_scoreboard.at("datasets")) {
    if (d.at("dataset_id").get<std::string>() != dataset_id) continue;
    double best = -1.0;
    for (const auto& [name, m] : d.at("hard").at("settings").items()) best = std::max(best, m.at("macro_f1").get<double>());
    return best;
  }
  throw Error(Errc::kIncompleteMatrix, "zero-shot scoreboard lacks dataset " + dataset_id);
}

inline double setting_macro_f1(const json& scoreboard, const std::string& dataset_id, const std::string& setting) {
  for (const auto& d : scoreboard.at("datasets")) {
    if (d.at("dataset_id").get<std::string>() != dataset_id) continue;
    const auto& settings = d.at("hard").at("settings");
    if (!settings.contains(setting))
      throw Error(Errc::kIncompleteMatrix, "scoreboard lacks setting " + setting + " for " + dataset_id);
    return settings.at(setting).at("macro_f1").get<double>();
  }
  throw Error(Errc::kIncompleteMatrix, "scoreboard lacks dataset " + dataset_id);
}

inline TransferMatrix cross_domain(const std::vector<TransferInput>& runs, const json& zero_shot_scoreboard,
                                   std::vector<std::string> sources = {}, std::vector<std::string> targets = {}) {
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  if (sources.empty())
    for (const auto& r : runs) add_unique(sources, r.source);
  if (targets.empty())
    for (const auto& r : runs) add_unique(targets, r.target);

  std::map<std::pair<std::string, std::string>, double> given;
  for (const auto& r : runs) {
    if (!given.emplace(std::make_pair(r.source, r.target), r.macro_f1).second)
      throw Error(Errc::kIncompleteMatrix, "duplicate cell " + r.source + " -> " + r.target);
  }
  TransferMatrix m{sources, targets, {}};
  for (const auto& s : sources) {
    for (const auto& t : targets) {
      auto it = given.find({s, t});
      if (it == given.end()) throw Error(Errc::kIncompleteMatrix, "missing cell " + s + " -> " + t);
      m.cells.push_back({s, t, it->second, best_zero_shot(zero_shot_scoreboard, t)});
    }
  }
  if (given.size() != m.cells.size()) throw Error(Errc::kIncompleteMatrix, "cells outside the source x target grid");
  return m;
}

inline json to_json(const TransferMatrix& m) {
  json cells = json::array();
  for (const auto& c : m.cells) {
    cells.push_back({{"source", c.source},
                     {"target", c.target},
                     {"macro_f1", c.macro_f1},
                     {"best_zero_shot", c.best_zero_shot},
                     {"delta_vs_best_zero_shot", c.delta()},
                     {"in_domain", c.in_domain()}});
  }
  return {{"schema", "sereval.transfer/1"}, {"sources", m.sources}, {"targets", m.targets}, {"cells", cells}};
}

// Rows are sources, columns targets; "45.20 (+3.10)" style cells, in-domain
// cells in italics.
inline std::string render_transfer(const TransferMatrix& m) {
  std::ostringstream md;
  md << "| Source \\ Target |";
  for (const auto& t : m.targets) md << ' ' << t << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < m.targets.size(); ++i) md << "---|";
  md << '\n';
  for (const auto& s : m.sources) {
    md << "| " << s << " |";
    for (const auto& t : m.targets) {
      const auto& c = m.at(s, t);
      const double delta = 100.0 * c.delta();
      std::string cell = detail::pct(c.macro_f1) + " (" + (delta >= 0 ? "+" : "") + detail::fixed(delta, 2) + ")";
      md << ' ' << (c.in_domain() ? "*" + cell + "*" : cell) << " |";
    }
    md << '\n';
  }
  return md.str();
}

// Cross-domain config: {"zero_shot": scoreboard path, "cells": [{"source",
// "target", "scoreboard", "setting"?}], "sources"?, "targets"?}.
inline TransferMatrix cross_domain_from_json(const json& j, const fs::path& base) {
  try {
    detail::only_keys(j, {"zero_shot", "cells", "sources", "targets", "output_dir"}, "cross-domain config");
    const auto zero_shot = detail::read_json(detail::resolve(base, j.at("zero_shot").get<std::string>()));
    std::vector<TransferInput> runs;
    for (const auto& cell : j.at("cells")) {
      const auto sb = detail::read_json(detail::resolve(base, cell.at("scoreboard").get<std::string>()));
      const auto target = cell.at("target").get<std::string>();
      runs.push_back({cell.at("source").get<std::string>(), target,
                      setting_macro_f1(sb, target, cell.value("setting", std::string(kSftSetting)))});
    }
    return cross_domain(runs, zero_shot, j.value("sources", std::vector<std::string>{}),
                        j.value("targets", std::vector<std::string>{}));
  } catch (const json::exception& e) {
    throw Error(Errc::kConfigError, std::string("malformed cross-domain config: ") + e.what());
  }
}

inline TransferMatrix cross_domain_from_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  auto j = detail::read_json(path);
  for (const auto& o : overrides) apply_override(j, o);
  return cross_domain_from_json(j, fs::absolute(fs::path(path)).parent_path());
}

// ---------------------------------------------------------------------------
// SFT corpus export

struct SftRecord {
  std::string utt_id;
  std::string audio_ref;
  std::string partition;  // train | valid
  std::string prompt;
  std::string target;
};

inline std::vector<SftRecord> export_sft(const corpus::DatasetManifest& m, const split::SplitPlan& plan, int fold_id,
                                         corpus::TiePolicy policy = corpus::TiePolicy::kNoAgreement,
                                         const prompt::PromptTemplate& tpl = prompt::PromptTemplate::builtin()) {
  const split::Fold* fold = nullptr;
  for (const auto& f : plan.folds)
    if (f.fold_id == fold_id) fold = &f;
  if (!fold) throw Error(Errc::kConfigError, "plan has no fold " + std::to_string(fold_id));
  const auto prompt_text = prompt::render_sft_prompt(m.labels, tpl).text;
  std::vector<SftRecord> out;
  auto emit = [&](const std::vector<std::string>& ids, const char* partition) {
    for (const auto& id : ids) {
      const auto* u = m.find(id);
      if (!u) throw Error(Errc::kConfigError, "plan references unknown utterance " + id);
      auto label = corpus::hard_truth(*u, m.labels, policy);
      if (!label) continue;  // no consensus
      out.push_back({id, u->audio_ref, partition, prompt_text, prompt::render_sft_target(m.labels.key(*label), m.labels)});
    }
  };
  emit(fold->train_ids, "train");
  emit(fold->valid_ids, "valid");
  if (out.empty()) throw Error(Errc::kNoHardLabels, m.dataset_id + " fold " + std::to_string(fold_id) + " has no hard labels");
  return out;
}

inline json to_json(const SftRecord& r) {
  return {{"utt_id", r.utt_id},
          {"audio_ref", r.audio_ref},
          {"partition", r.partition},
          {"prompt", r.prompt},
          {"target", r.target}};
}

// ---------------------------------------------------------------------------
// Disclosure checklist

inline std::string file_sha256(const std::string& path) {
  return path.empty() ? std::string() : util::sha256_hex(util::read_file(path));
}

inline json parse_failure_rates(const Workspace& w, const RunArtifacts& art) {
  const auto index = detail::index_records(art);
  json out = json::object();
  for (const auto& d : w.datasets) {
    auto it = index.find(d.dataset_id);
    if (it == index.end()) continue;
    json per_mode = json::object();
    for (auto mode : {prompt::Mode::kHard, prompt::Mode::kDistribution}) {
      const auto& by = mode == prompt::Mode::kHard ? it->second.hard : it->second.dist;
      if (by.empty()) continue;
      json rates = json::object();
      for (const auto& [setting, recs] : by) {
        std::vector<parse::ParsedPrediction> preds;
        for (const auto& [utt, r] : recs) preds.push_back(r->parsed);
        rates[setting] = detail::round10(parse::parse_failure_rate(preds, mode));
      }
      per_mode[std::string(prompt::to_string(mode))] = rates;
    }
    out[d.dataset_id] = per_mode;
  }
  return out;
}

inline json emit_disclosure(const Workspace& w, const RunArtifacts& art) {
  const auto& c = w.config;
  json datasets = json::array();
  for (const auto& d : w.datasets) {
    json entry{{"dataset_id", d.dataset_id},
               {"descriptor_sha256", file_sha256(d.descriptor_path)},
               {"label_set", d.labels.displays()},
               {"label_source", std::string(corpus::to_string(d.label_source))},
               {"audio_source", std::string(corpus::to_string(d.audio_source))},
               {"dataset_aliases_sha256", d.dataset_aliases.sha256()}};
    try {
      entry["split_policy"] = std::string(split::to_string(split::plan_splits(d, c.seed, c.split).policy));
    } catch (const Error& e) {
      entry["split_policy"] = std::string("unsplittable: ") + e.what();
    }
    datasets.push_back(std::move(entry));
  }
  json model{{"adapter", c.adapter.kind}, {"model_id", c.adapter.model_id}};
  if (c.adapter.kind == "http") model["endpoint"] = c.adapter.http.endpoint;
  else model["fixtures_sha256"] = file_sha256(c.adapter.fixtures);

  return {{"schema", "sereval.disclosure/1"},
          {"run_id", c.run_id},
          {"model", model},
          {"prompt",
           {{"template_sha256", w.tpl.sha256()},
            {"style", c.prompt_style == PromptStyle::kZeroShot ? "zero_shot" : "sft"},
            {"variants", setting_names(c)},
            {"block_separator", "\n\n"},
            {"label_separator", ", "}}},
          {"decode",
           {{"strategy", "greedy"},
            {"temperature", 0},
            {"max_new_tokens", c.decode.max_new_tokens},
            {"wire_protocol", std::string(modelio::kWireProtocolVersion)}}},
          {"parser",
           {{"version", std::string(parse::kParserVersion)},
            {"alias_map_sha256", w.aliases.sha256()},
            {"final_label_marker", "last occurrence"},
            {"whole_text_fallback", c.parser.whole_text_fallback},
            {"renorm_tolerance", c.parser.renorm_tolerance},
            {"distribution_failure", "uniform"}}},
          {"metrics",
           {{"kld_direction", std::string(metrics::to_string(c.metrics.divergence.direction))},
            {"kld_epsilon", c.metrics.divergence.epsilon},
            {"log_base", "e"},
            {"hard_label_tie_policy", std::string(corpus::to_string(c.metrics.tie_policy))},
            {"argmax_tie_break", "label_set_order"},
            {"absent_class_handling", "excluded from UA and Macro-F1"},
            {"ensemble_prompts", setting_names(c).size()}}},
          {"seed", c.seed},
          {"datasets", datasets},
          {"parse_failure_rates", parse_failure_rates(w, art)},
          {"environment", art.environment},
          {"config", to_json(c)}};
}

// Rebuilds the run configuration from a checklist and confirms the template
// and alias map on disk still hash to the recorded values.
inline RunConfig config_from_disclosure(const json& checklist, const std::vector<std::string>& overrides = {}) {
  if (!checklist.is_object() || !checklist.contains("config") || !checklist.contains("prompt") ||
      !checklist.contains("parser"))
    throw Error(Errc::kConfigError, "not a disclosure checklist");
  json config = checklist.at("config");
  for (const auto& o : overrides) apply_override(config, o);
  auto c = config_from_json(config, fs::current_path());
  const auto tpl = c.prompt_template.empty() ? prompt::PromptTemplate::builtin()
                                             : prompt::PromptTemplate::load(c.prompt_template);
  if (tpl.sha256() != checklist.at("prompt").at("template_sha256").get<std::string>())
    throw Error(Errc::kConfigError, "prompt template hash differs from the checklist");
  const auto aliases = c.alias_map.empty() ? parse::AliasMap::defaults() : parse::AliasMap::load(c.alias_map);
  if (aliases.sha256() != checklist.at("parser").at("alias_map_sha256").get<std::string>())
    throw Error(Errc::kConfigError, "alias map hash differs from the checklist");
  return c;
}

// Accepts either a run config or an emitted disclosure checklist.
inline RunConfig load_any_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  const auto j = detail::read_json(path);
  if (j.is_object() && j.value("schema", std::string()) == "sereval.disclosure/1")
    return config_from_disclosure(j, overrides);
  return load_config(path, overrides);
}

}  // namespace sereval::bench
