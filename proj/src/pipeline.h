#pragma once

#include <string>
#include <vector>

#include "evaluate.h"
#include "ingest.h"
#include "serialize.h"
#include "trainer.h"

namespace defembed {

// End-to-end run description: data source, training hyperparameters and the
// artifacts to produce. Parsed from a flat key=value file with optional
// command-line overrides (later assignments win).
struct RunConfig {
  // Exactly one of these two must be set. `triples` points at an already
  // extracted subject<TAB>role<TAB>object file; `defs` points at annotated
  // definitions that are run through triple extraction first.
  std::string triples_path;
  std::string defs_path;
  // Stop-word list for extraction (one word per line). Only meaningful with
  // `defs`; empty means the built-in list.
  std::string stopwords_path;

  TrainConfig train;

  std::string model_out;                 // empty: don't save
  SaveMode model_format = SaveMode::kBinary;
  std::string metrics_path;              // per-epoch TSV log, streamed
  // Every `checkpoint_interval` epochs the current model is saved to
  // <model_out>.ckpt (atomically, latest wins). 0 disables checkpoints.
  int checkpoint_interval = 0;
  std::string dev_benchmark;             // adds a dev-spearman metrics column
  std::vector<std::string> eval_benchmarks;
  std::string eval_out;                  // TSV evaluation report
  std::string eval_json;                 // same report as a JSON array

  // Reads `path` as key=value lines ('#' comments, blank lines ignored),
  // then applies `overrides` ("key=value" strings) on top. Unknown keys and
  // malformed values raise UsageError. An empty `path` starts from defaults.
  static RunConfig parse(const std::string& path,
                         const std::vector<std::string>& overrides = {});

  // Canonical key=value dump of the effective configuration; parsing it back
  // reproduces this config. Written next to the model as <model_out>.cfg.
  std::string echo() const;

  void validate() const;
};

struct RunResult {
  Model model;
  double final_mean_loss = 0.0;
  std::vector<EvalReport> reports;
};

// Renders one report per line: name<TAB>spearman<TAB>scored<TAB>skipped.
std::string format_eval_reports_tsv(const std::vector<EvalReport>& reports);
std::string format_eval_reports_json(const std::vector<EvalReport>& reports);

// Executes ingest -> train -> save -> eval. Errors are re-raised with the
// failing stage prefixed to the message, keeping their status code. `log`
// receives human-readable progress lines (may be null).
RunResult run(const RunConfig& config, const Diagnostic& log = nullptr);

}  // namespace defembed
