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

// sereval command-line front end. Every subcommand reads one config file
// (a run config, a cross-domain config for `cross-domain`, or an emitted
// disclosure checklist in place of a run config) plus `--set key=value`
// overrides.
//
// Exit codes: 0 success, 1 runtime error, 2 configuration or manifest error,
// 3 run completed but some samples failed at the adapter.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sereval.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sereval;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSampleFailures = 3;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "Configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override a config value, e.g. --set seed=3 --set metrics.epsilon=1e-5");
}

bench::Workspace open(const Common& c) { return bench::open_workspace(bench::load_any_config(c.config, c.overrides)); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kConfigError, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

int cmd_validate(const Common& c) {
  const auto w = open(c);
  for (const auto& d : w.datasets) {
    std::size_t voted = 0, no_agreement = 0;
    for (const auto& u : d.utterances) {
      voted += u.votes.has_value();
      no_agreement += !corpus::hard_truth(u, d.labels, w.config.metrics.tie_policy).has_value();
    }
    std::printf("%s: %zu utterances, %zu classes, %zu speakers, %zu with votes, %zu without consensus\n",
                d.dataset_id.c_str(), d.utterances.size(), d.num_classes(), d.speakers.size(), voted, no_agreement);
  }
  std::printf("prompt template sha256 %s\nalias map sha256 %s\n", w.tpl.sha256().c_str(), w.aliases.sha256().c_str());
  return kExitOk;
}

int cmd_split(const Common& c) {
  const auto w = open(c);
  int rc = kExitOk;
  for (const auto& d : w.datasets) {
    const auto plan = split::plan_splits(d, w.config.seed, w.config.split);
    const auto audit = split::audit_plan(plan, d);
    const auto path = fs::path(w.config.output_dir) / "splits" / (d.dataset_id + ".json");
    write_json(path, split::to_json(plan));
    std::printf("%s: %s, %zu folds -> %s\n", d.dataset_id.c_str(), std::string(split::to_string(plan.policy)).c_str(),
                plan.folds.size(), path.string().c_str());
    for (const auto& f : audit.findings) {
      std::fprintf(stderr, "  audit %s: %s\n", std::string(split::to_string(f.kind)).c_str(), f.detail.c_str());
      rc = kExitRuntime;
    }
  }
  return rc;
}

int cmd_render(const Common& c) {
  const auto w = open(c);
  const auto requests = bench::build_requests(w, false);
  std::ostringstream out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& r : requests) {
    if (!seen.insert({r.dataset_id, r.variant, std::string(prompt::to_string(r.mode))}).second) continue;
    json fields = json::array();
    for (auto f : r.prompt.expected_fields) fields.push_back(std::string(prompt::marker(f)));
    out << json{{"dataset_id", r.dataset_id},
                {"variant", r.variant},
                {"mode", std::string(prompt::to_string(r.mode))},
                {"prompt", r.prompt.text},
                {"expected_fields", fields}}
               .dump()
        << '\n';
  }
  const auto path = fs::path(w.config.output_dir) / "prompts.jsonl";
  write_text(path, out.str());
  std::printf("%zu prompts -> %s\n", seen.size(), path.string().c_str());
  return kExitOk;
}

int cmd_run(const Common& c) {
  const auto w = open(c);
  auto adapter = bench::make_adapter(w.config);
  const auto art = bench::run_eval(w, *adapter);
  std::printf("%zu records, %zu adapter failures -> %s\n", art.records.size(), art.failures(),
              w.config.output_dir.c_str());
  return art.failures() ? kExitSampleFailures : kExitOk;
}

int cmd_score(const Common& c) {
  const auto w = open(c);
  const auto board = bench::score(w, bench::load_artifacts(w));
  const auto path = fs::path(w.config.output_dir) / "scoreboard.json";
  write_text(path, bench::scoreboard_bytes(board));
  std::printf("scoreboard -> %s\n", path.string().c_str());
  return kExitOk;
}

int cmd_ensemble(const Common& c) {
  const auto w = open(c);
  const auto rows = bench::ensemble_rows(w, bench::load_artifacts(w));
  if (rows.empty()) throw Error(Errc::kConfigError, "ensembling needs a multi-prompt zero-shot run");
  std::ostringstream out;
  for (const auto& r : rows) out << bench::to_json(r, w.dataset(r.dataset_id).labels).dump() << '\n';
  const auto path = fs::path(w.config.output_dir) / "ensemble.jsonl";
  write_text(path, out.str());
  std::printf("%zu ensemble rows -> %s\n", rows.size(), path.string().c_str());
  return kExitOk;
}

int cmd_report(const Common& c) {
  const auto w = open(c);
  const auto board = bench::score(w, bench::load_artifacts(w));
  const auto path = fs::path(w.config.output_dir) / "report.md";
  write_text(path, bench::render_report(board));
  std::printf("report -> %s\n", path.string().c_str());
  return kExitOk;
}

int cmd_cross_domain(const Common& c) {
  auto j = json::parse(util::read_file(c.config), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::kConfigError, c.config + " is not valid JSON");
  for (const auto& o : c.overrides) bench::apply_override(j, o);
  const fs::path base = fs::absolute(fs::path(c.config)).parent_path();
  const auto matrix = bench::cross_domain_from_json(j, base);
  const fs::path out_dir = bench::detail::resolve(base, j.value("output_dir", std::string("transfer")));
  write_json(out_dir / "transfer.json", bench::to_json(matrix));
  write_text(out_dir / "transfer.md", bench::render_transfer(matrix));
  std::printf("%zu x %zu transfer matrix -> %s\n", matrix.sources.size(), matrix.targets.size(), out_dir.string().c_str());
  return kExitOk;
}

int cmd_export_sft(const Common& c, const std::string& dataset, int fold) {
  const auto w = open(c);
  int written = 0;
  for (const auto& d : w.datasets) {
    if (!dataset.empty() && d.dataset_id != dataset) continue;
    const auto plan = split::plan_splits(d, w.config.seed, w.config.split);
    const auto records = bench::export_sft(d, plan, fold, w.config.metrics.tie_policy, w.tpl);
    std::ostringstream out;
    for (const auto& r : records) out << bench::to_json(r).dump() << '\n';
    const auto path = fs::path(w.config.output_dir) / "sft" / (d.dataset_id + ".fold" + std::to_string(fold) + ".jsonl");
    write_text(path, out.str());
    std::printf("%s fold %d: %zu records -> %s\n", d.dataset_id.c_str(), fold, records.size(), path.string().c_str());
    ++written;
  }
  if (written == 0) throw Error(Errc::kConfigError, "no dataset named '" + dataset + "'");
  return kExitOk;
}

int cmd_disclosure(const Common& c) {
  const auto w = open(c);
  const auto checklist = bench::emit_disclosure(w, bench::load_artifacts(w));
  const auto path = fs::path(w.config.output_dir) / "disclosure.json";
  write_json(path, checklist);
  std::printf("disclosure checklist -> %s\n", path.string().c_str());
  return kExitOk;
}

bool is_config_error(Errc code) {
  return code == Errc::kConfigError || code == Errc::kMalformedManifest || code == Errc::kUnknownLabel;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech emotion recognition evaluation harness for speech LLMs"};
  app.set_version_flag("--version", std::string(bench::kVersion));
  app.require_subcommand(1);

  Common common;
  std::string sft_dataset;
  int sft_fold = 0;
  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"validate", "Load and check dataset manifests, template and alias map"},
      {"split", "Plan speaker-independent splits and audit them"},
      {"render-prompts", "Render every prompt a run would send"},
      {"run", "Query the model for every (utterance, prompt, mode) and parse the replies"},
      {"score", "Compute the scoreboard from a finished run"},
      {"ensemble", "Write per-utterance vote aggregation from a finished run"},
      {"report", "Render the scoreboard of a finished run as Markdown"},
      {"cross-domain", "Build the source x target transfer matrix"},
      {"export-sft", "Write supervised fine-tuning records for one fold"},
      {"disclosure", "Emit the reproducibility checklist for a finished run"},
  };
  std::map<std::string, CLI::App*> cmds;
  for (const auto& e : entries) {
    auto* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, common);
    cmds[e.name] = cmd;
  }
  cmds["export-sft"]->add_option("--dataset", sft_dataset, "Dataset id (default: all datasets)");
  cmds["export-sft"]->add_option("--fold", sft_fold, "Fold id")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmds["validate"]->parsed()) return cmd_validate(common);
    if (cmds["split"]->parsed()) return cmd_split(common);
    if (cmds["render-prompts"]->parsed()) return cmd_render(common);
    if (cmds["run"]->parsed()) return cmd_run(common);
    if (cmds["score"]->parsed()) return cmd_score(common);
    if (cmds["ensemble"]->parsed()) return cmd_ensemble(common);
    if (cmds["report"]->parsed()) return cmd_report(common);
    if (cmds["cross-domain"]->parsed()) return cmd_cross_domain(common);
    if (cmds["export-sft"]->parsed()) return cmd_export_sft(common, sft_dataset, sft_fold);
    if (cmds["disclosure"]->parsed()) return cmd_disclosure(common);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error [config]: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
