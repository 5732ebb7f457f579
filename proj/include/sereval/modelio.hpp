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
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "sereval/error.hpp"
#include "sereval/promptkit.hpp"
#include "sereval/util.hpp"

namespace sereval::modelio {

inline constexpr std::string_view kWireProtocolVersion = "sereval-wire/1";

// Greedy decoding is the only strategy; it is sent as temperature 0.
struct DecodeSettings {
  int max_new_tokens = 512;
};

struct AudioPayload {
  std::string reference;             // locator from the manifest
  std::string format;                // e.g. "wav"
  std::optional<std::string> bytes;  // file contents when read
};

inline AudioPayload load_audio(const std::string& reference, const std::filesystem::path& base_dir, bool read) {
  namespace fs = std::filesystem;
  AudioPayload a;
  a.reference = reference;
  fs::path p(reference);
  auto ext = p.extension().string();
  a.format = ext.empty() ? "" : util::to_lower(ext.substr(1));
  if (read) {
    const fs::path full = p.is_absolute() ? p : base_dir / p;
    std::error_code ec;
    if (fs::is_regular_file(full, ec)) a.bytes = util::read_file(full.string());
  }
  return a;
}

struct GenerationRequest {
  std::string dataset_id;
  std::string utt_id;
  std::string variant;  // prompt setting name, e.g. "TA" or "SFT"
  prompt::Mode mode = prompt::Mode::kHard;
  AudioPayload audio;
  prompt::PromptText prompt;
  DecodeSettings decode;
};

struct AdapterMeta {
  std::string model_id;
  std::string endpoint;
  int attempts = 0;
};

struct ModelResponse {
  std::string dataset_id;
  std::string utt_id;
  std::string variant;
  prompt::Mode mode = prompt::Mode::kHard;
  std::string raw_text;  // verbatim, may be empty
  double latency_ms = 0.0;
  AdapterMeta meta;
  std::optional<Errc> failure;  // TransportError or AdapterRefused
  std::string error;

  bool ok() const noexcept { return !failure.has_value(); }
};

using RequestKey = std::tuple<std::string, std::string, std::string, std::string>;

inline RequestKey key_of(const GenerationRequest& r) {
  return {r.dataset_id, r.utt_id, r.variant, std::string(prompt::to_string(r.mode))};
}
inline RequestKey key_of(const ModelResponse& r) {
  return {r.dataset_id, r.utt_id, r.variant, std::string(prompt::to_string(r.mode))};
}

// Adapter failure that still reports how many attempts were made.
class AdapterError : public Error {
 public:
  AdapterError(Errc code, const std::string& what, int attempts) : Error(code, what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;

  // Returns the model text verbatim. Throws AdapterError on failure.
  virtual ModelResponse generate(const GenerationRequest& request) = 0;

  // Adapters that cannot serve overlapping calls return false; the scheduler
  // then runs them serially.
  virtual bool concurrent_safe() const { return true; }
  virtual bool needs_audio() const { return false; }
  virtual std::string model_id() const = 0;
  virtual std::string endpoint() const { return ""; }
};

// ---------------------------------------------------------------------------
// Mock adapter: plays back fixture lines
//   {"utt_id", "variant", "mode", "raw_text"}                (success)
//   {"utt_id", "variant", "mode", "error": "transport"|"refused"}
// with an optional "dataset_id" to disambiguate shared utterance ids.

struct FixtureEntry {
  std::optional<std::string> raw_text;
  std::optional<Errc> error;
};

class MockAdapter : public ModelAdapter {
 public:
  explicit MockAdapter(std::string model_id = "mock") : model_id_(std::move(model_id)) {}

  static MockAdapter load(const std::string& path, std::string model_id = "mock") {
    MockAdapter a(std::move(model_id));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::kConfigError, "cannot open fixture file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (util::trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw Error(Errc::kConfigError, path + ":" + std::to_string(lineno) + ": not a JSON object");
      try {
        FixtureEntry e;
        if (auto it = j.find("raw_text"); it != j.end()) e.raw_text = it->get<std::string>();
        if (auto it = j.find("error"); it != j.end()) {
          const auto kind = it->get<std::string>();
          if (kind == "transport") e.error = Errc::kTransportError;
          else if (kind == "refused") e.error = Errc::kAdapterRefused;
          else throw Error(Errc::kConfigError, "unknown fixture error '" + kind + "'");
        }
        if (!e.raw_text && !e.error) throw Error(Errc::kConfigError, "fixture needs raw_text or error");
        a.add(j.value("dataset_id", std::string()), j.at("utt_id").get<std::string>(),
              j.at("variant").get<std::string>(), j.at("mode").get<std::string>(), std::move(e));
      } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::kConfigError, path + ":" + std::to_string(lineno) + ": " + ex.what());
      }
    }
    return a;
  }

  void add(const std::string& dataset_id, const std::string& utt_id, const std::string& variant,
           const std::string& mode, FixtureEntry entry) {
    fixtures_[{dataset_id, utt_id, variant, mode}] = std::move(entry);
  }

  ModelResponse generate(const GenerationRequest& req) override {
    const std::string mode(prompt::to_string(req.mode));
    auto it = fixtures_.find({req.dataset_id, req.utt_id, req.variant, mode});
    if (it == fixtures_.end()) it = fixtures_.find({"", req.utt_id, req.variant, mode});
    if (it == fixtures_.end())
      throw AdapterError(Errc::kAdapterRefused, "no fixture for " + req.utt_id + "/" + req.variant + "/" + mode, 1);
    if (it->second.error) throw AdapterError(*it->second.error, "scripted failure for " + req.utt_id, 1);
    ModelResponse r;
    r.raw_text = *it->second.raw_text;
    r.meta = {model_id_, "", 1};
    return r;
  }

  std::string model_id() const override { return model_id_; }
  std::size_t size() const noexcept { return fixtures_.size(); }

 private:
  std::string model_id_;
  std::map<RequestKey, FixtureEntry> fixtures_;
};

// ---------------------------------------------------------------------------
// HTTP adapter speaking the JSON wire protocol (docs/wire_protocol.md).

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{5000};

  std::chrono::milliseconds backoff(int failed_attempts) const {
    double ms = static_cast<double>(initial_backoff.count());
    for (int i = 1; i < failed_attempts; ++i) ms *= multiplier;
    return std::chrono::milliseconds(
        static_cast<long long>(std::min(ms, static_cast<double>(max_backoff.count()))));
  }
};

struct HttpAdapterConfig {
  std::string endpoint = "http://127.0.0.1:8080/generate";
  std::string model = "model";
  std::chrono::seconds timeout{120};
  RetryPolicy retry;
  bool send_audio = true;
};

inline nlohmann::json wire_request(const GenerationRequest& req, const std::string& model) {
  nlohmann::json j{{"model", model},
                   {"prompt", req.prompt.text},
                   {"audio_b64", req.audio.bytes ? util::base64_encode(*req.audio.bytes) : std::string()},
                   {"audio_format", req.audio.format},
                   {"audio_ref", req.audio.reference},
                   {"max_new_tokens", req.decode.max_new_tokens},
                   {"temperature", 0},
                   {"utt_id", req.utt_id},
                   {"variant", req.variant},
                   {"mode", std::string(prompt::to_string(req.mode))}};
  if (!req.dataset_id.empty()) j["dataset_id"] = req.dataset_id;
  return j;
}

class HttpAdapter : public ModelAdapter {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpAdapter(HttpAdapterConfig config, Sleeper sleeper = {})
      : config_(std::move(config)), sleeper_(std::move(sleeper)) {
    const auto& url = config_.endpoint;
    const auto scheme = url.find("://");
    const auto path_at = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    base_ = path_at == std::string::npos ? url : url.substr(0, path_at);
    path_ = path_at == std::string::npos ? "/" : url.substr(path_at);
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

  ModelResponse generate(const GenerationRequest& req) override {
    const std::string body = wire_request(req, config_.model).dump();
    std::string last_error;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
      httplib::Client client(base_);
      client.set_connection_timeout(config_.timeout);
      client.set_read_timeout(config_.timeout);
      client.set_write_timeout(config_.timeout);
      auto res = client.Post(path_, body, "application/json");
      if (!res) {
        last_error = "transport: " + httplib::to_string(res.error());
      } else if (res->status == 200) {
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        auto text = j.is_object() ? j.find("text") : j.end();
        if (j.is_discarded() || !j.is_object() || text == j.end() || !text->is_string())
          throw AdapterError(Errc::kAdapterRefused, "response lacks a string 'text' field", attempt);
        ModelResponse r;
        r.raw_text = text->get<std::string>();
        r.meta = {config_.model, config_.endpoint, attempt};
        return r;
      } else if (res->status >= 500 || res->status == 429) {
        last_error = "HTTP " + std::to_string(res->status);
      } else {
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        std::string detail = res->body;
        if (!j.is_discarded() && j.is_object() && j.contains("error")) detail = j["error"].dump();
        throw AdapterError(Errc::kAdapterRefused, "HTTP " + std::to_string(res->status) + ": " + detail, attempt);
      }
      if (attempt < config_.retry.max_attempts) sleeper_(config_.retry.backoff(attempt));
    }
    throw AdapterError(Errc::kTransportError,
                       last_error + " after " + std::to_string(config_.retry.max_attempts) + " attempts",
                       config_.retry.max_attempts);
  }

  bool needs_audio() const override { return config_.send_audio; }
  std::string model_id() const override { return config_.model; }
  std::string endpoint() const override { return config_.endpoint; }

 private:
  HttpAdapterConfig config_;
  Sleeper sleeper_;
  std::string base_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Persistent request log for resumable batches. One JSON line per finished
// request, appended in completion order.

inline nlohmann::json to_json(const ModelResponse& r) {
  nlohmann::json j{{"dataset_id", r.dataset_id},
                   {"utt_id", r.utt_id},
                   {"variant", r.variant},
                   {"mode", std::string(prompt::to_string(r.mode))},
                   {"raw_text", r.raw_text},
                   {"latency_ms", r.latency_ms},
                   {"model_id", r.meta.model_id},
                   {"endpoint", r.meta.endpoint},
                   {"attempts", r.meta.attempts}};
  if (r.failure) {
    j["failure"] = std::string(errc_name(*r.failure));
    j["error"] = r.error;
  }
  return j;
}

inline ModelResponse response_from_json(const nlohmann::json& j) {
  ModelResponse r;
  r.dataset_id = j.value("dataset_id", std::string());
  r.utt_id = j.at("utt_id").get<std::string>();
  r.variant = j.at("variant").get<std::string>();
  r.mode = prompt::mode_from_string(j.at("mode").get<std::string>()).value_or(prompt::Mode::kHard);
  r.raw_text = j.value("raw_text", std::string());
  r.latency_ms = j.value("latency_ms", 0.0);
  r.meta = {j.value("model_id", std::string()), j.value("endpoint", std::string()), j.value("attempts", 0)};
  if (auto it = j.find("failure"); it != j.end()) {
    r.failure = it->get<std::string>() == "AdapterRefused" ? Errc::kAdapterRefused : Errc::kTransportError;
    r.error = j.value("error", std::string());
  }
  return r;
}

class RequestLog {
 public:
  RequestLog() = default;
  explicit RequestLog(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    while (in && std::getline(in, line)) {
      if (util::trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;  // torn tail line from an interrupted run
      auto r = response_from_json(j);
      entries_[key_of(r)] = std::move(r);
    }
  }

  bool enabled() const noexcept { return !path_.empty(); }

  // Successful responses only; failures are retried on resume.
  const ModelResponse* answered(const RequestKey& key) const {
    auto it = entries_.find(key);
    return it != entries_.end() && it->second.ok() ? &it->second : nullptr;
  }

  void append(const ModelResponse& r) {
    std::lock_guard lock(mu_);
    entries_[key_of(r)] = r;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << to_json(r).dump() << '\n';
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::string path_;
  std::map<RequestKey, ModelResponse> entries_;
  std::mutex mu_;
};

struct BatchOptions {
  int concurrency = 1;
  std::string log_path;  // empty: no persistence
};

// Runs every request with at most `concurrency` in flight. Results are
// returned in submission order; `on_response` fires in completion order.
// Requests already answered in the log are not re-sent.
inline std::vector<ModelResponse> batch_generate(std::span<const GenerationRequest> requests, ModelAdapter& adapter,
                                                 const BatchOptions& options,
                                                 const std::function<void(const ModelResponse&)>& on_response = {}) {
  if (options.concurrency < 1) throw Error(Errc::kConfigError, "concurrency limit must be at least 1");
  RequestLog log = options.log_path.empty() ? RequestLog() : RequestLog(options.log_path);

  std::vector<ModelResponse> results(requests.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (const auto* done = log.answered(key_of(requests[i]))) {
      results[i] = *done;
    } else {
      pending.push_back(i);
    }
  }

  std::mutex callback_mu;
  auto run_one = [&](std::size_t i) {
    const auto& req = requests[i];
    const auto start = std::chrono::steady_clock::now();
    ModelResponse r;
    try {
      r = adapter.generate(req);
    } catch (const AdapterError& e) {
      r.failure = e.code();
      r.error = e.what();
      r.meta = {adapter.model_id(), adapter.endpoint(), e.attempts()};
    } catch (const Error& e) {
      r.failure = e.code() == Errc::kAdapterRefused ? Errc::kAdapterRefused : Errc::kTransportError;
      r.error = e.what();
      r.meta = {adapter.model_id(), adapter.endpoint(), 1};
    } catch (const std::exception& e) {
      r.failure = Errc::kTransportError;
      r.error = e.what();
      r.meta = {adapter.model_id(), adapter.endpoint(), 1};
    }
    r.dataset_id = req.dataset_id;
    r.utt_id = req.utt_id;
    r.variant = req.variant;
    r.mode = req.mode;
    r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log.append(r);
    {
      std::lock_guard lock(callback_mu);
      if (on_response) on_response(r);
    }
    results[i] = std::move(r);
  };

  const int limit = adapter.concurrent_safe() ? options.concurrency : 1;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(limit), pending.size());
  if (workers <= 1) {
    for (auto i : pending) run_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next.fetch_add(1); k < pending.size(); k = next.fetch_add(1)) run_one(pending[k]);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace sereval::modelio
