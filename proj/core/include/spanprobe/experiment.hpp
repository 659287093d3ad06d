#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spanprobe/checkpoint.hpp"
#include "spanprobe/classifier.hpp"
#include "spanprobe/corpus.hpp"
#include "spanprobe/eval_report.hpp"
#include "spanprobe/pipeline.hpp"

namespace spanprobe {

/// Everything one run needs. Data comes either from explicit file paths
/// or from `data_dir`, which is scanned for train.{csv,tsv} (combined,
/// Setting column required) or per-setting train_zero_shot.* /
/// train_one_shot.* files plus dev.* and optional test.*.
struct ExperimentConfig {
  EncoderSpec encoder = default_spec(EncoderName::MOCK);
  int layer = -1;  // -1 resolves to the top block layer
  ReprType repr_type = ReprType::XY;
  Setting setting = Setting::ZERO_SHOT;
  ContextMode context_mode = ContextMode::TARGET_ONLY;
  double locate_threshold = 0.5;
  /// Locate-failure rate on training rows above which a warning is
  /// recorded (the run still completes; failed rows are excluded).
  double locate_failure_ceiling = 0.05;
  TrainConfig train;
  std::filesystem::path data_dir;
  std::filesystem::path train_file;        // overrides data_dir resolution
  std::filesystem::path extra_train_file;  // extra one-shot rows when split across files
  std::filesystem::path dev_file;
  std::filesystem::path test_file;
  std::filesystem::path out_dir;  // empty: compute only, write nothing
  std::filesystem::path registry_dir;
  bool offline = false;
};

/// Directory name of a run under out_dir, e.g. "mock-xy-l2-zero_shot".
std::string experiment_slug(const ExperimentConfig& config);

int resolve_layer(const ExperimentConfig& config);

/// CSV/TSV by extension; anything else raises ConfigError.
TableFormat table_format_for(const std::filesystem::path& path);

/// The train/dev/test rows per the config's data source. A combined
/// training file is filtered to zero-shot tagged rows under the
/// zero-shot setting; per-setting files are taken as-is (a mistagged row
/// then fails in build_split).
SplitInputs load_split_inputs(const ExperimentConfig& config);

struct ExperimentResult {
  ExperimentConfig config;  // as run, layer resolved
  Checkpoint checkpoint;
  std::vector<EpochStats> trace;
  PrepareStats train_prepare;
  PrepareStats dev_prepare;
  PrepareStats test_prepare;
  EvaluationReport dev_report;
  /// Present when a test file exists and every test row is labeled.
  std::optional<EvaluationReport> test_report;
  std::vector<Prediction> dev_predictions;
  std::vector<Prediction> test_predictions;  // empty without a test file
  std::vector<std::string> warnings;
  std::string report_json;  // exact bytes of report.json
  std::filesystem::path run_dir;  // empty when out_dir is empty
};

/// Load the split, train the probe (frozen encoder), evaluate dev and, if
/// labeled, test; then write report.json, checkpoint.json and
/// predictions_*.tsv under out_dir/<slug>/. The report carries no
/// timestamps or machine state, so equal configs produce equal bytes.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// What grid summaries need back from a stored report.json.
struct StoredCell {
  RunKey key;
  EvaluationReport dev;
  std::optional<EvaluationReport> test;
  std::vector<std::string> warnings;
};

StoredCell load_stored_report(const std::filesystem::path& report_path);

/// "ID\tPrediction\tFallback" rows, one per record, in input order.
std::string predictions_tsv(const std::vector<Prediction>& predictions);

}  // namespace spanprobe
