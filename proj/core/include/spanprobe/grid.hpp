#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spanprobe/experiment.hpp"

namespace spanprobe {

/// The model x layer x combinator (x setting) sweep. Unset dimensions
/// fall back to the published sweep: all three encoders, their probe
/// layers, all six combinators, the base config's setting.
struct GridSpec {
  std::vector<EncoderName> models;
  std::map<EncoderName, std::vector<int>> layers;
  std::vector<ReprType> repr_types;
  std::vector<Setting> settings;
  /// Shared knobs (data, training recipe, out_dir). Its encoder spec is
  /// kept for cells of the same model name, so a resized mock grid works.
  ExperimentConfig base;
};

/// Probe layers swept per model: a quarter, half and all of the stack.
std::vector<int> default_probe_layers(EncoderName name);

/// One config per cell, ordered by (model, layer, combinator, setting).
std::vector<ExperimentConfig> expand_grid(const GridSpec& spec);

struct CellOutcome {
  ExperimentConfig config;
  std::string slug;
  bool ok = false;
  std::string error;  // failed cells: what went wrong
  std::filesystem::path report_path;
  std::filesystem::path log_path;  // worker output, when run in a worker
  std::optional<StoredCell> stored;
};

struct GridResult {
  std::vector<CellOutcome> cells;
  int failed = 0;
  std::filesystem::path out_dir;
  std::string summary_dev_tsv;
  std::string summary_dev_markdown;
  /// Present when every successful cell scored a labeled test split.
  std::optional<std::string> summary_test_tsv;
  std::optional<std::string> summary_test_markdown;
};

/// Run every cell, each writing its own run directory under
/// base.out_dir. workers >= 1 runs cells in that many forked worker
/// processes with per-cell logs, so one crashing cell cannot take the
/// sweep down; workers == 0 runs in-process. Failed cells are collected,
/// not fatal. Summary tables (dev, plus test when fully available) and
/// grid.json are written to base.out_dir.
GridResult run_grid(const GridSpec& spec, int workers = 1);

/// Rebuild summaries from the report.json files under an existing runs
/// directory. Read-only.
GridResult summarize_runs(const std::filesystem::path& out_dir);

}  // namespace spanprobe
