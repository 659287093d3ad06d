// Command-line front end: run one probe experiment, sweep the full grid,
// locate an MWE in a sentence, or rebuild summary tables from stored runs.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spanprobe/experiment.hpp"
#include "spanprobe/grid.hpp"
#include "spanprobe/span_locator.hpp"
#include "spanprobe/text.hpp"

namespace {

using namespace spanprobe;

struct CommonFlags {
  std::string model = "mock";
  int layer = -1;
  std::string repr_type = "xy";
  std::string setting = "zero_shot";
  std::string context_mode = "target-only";
  double locate_threshold = 0.5;
  double locate_failure_ceiling = 0.05;
  int epochs = 10;
  double lr = 5e-5;
  double dropout = 0.5;
  int batch_size = 32;
  std::uint64_t seed = 42;
  double weight_decay = 0.01;
  std::string data_dir;
  std::string train_file, extra_train_file, dev_file, test_file;
  std::string out_dir = "runs";
  std::string registry_dir;
  bool offline = false;
  std::uint64_t mock_seed = 42;
  int mock_layers = -1;
  int mock_width = -1;
  int max_positions = -1;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--model", flags.model, "Encoder: mbert, xlmr, xlmr-large or mock")
      ->capture_default_str();
  cmd.add_option("--layer", flags.layer, "Probe layer; 0 = embedding output, -1 = top block")
      ->capture_default_str();
  cmd.add_option("--repr-type", flags.repr_type,
                 "Span combinator: xy, xy-diff, xy-prod, xy-prod-diff, self-attentive, max-pooling")
      ->capture_default_str();
  cmd.add_option("--setting", flags.setting, "Split setting: zero_shot or one_shot")
      ->capture_default_str();
  cmd.add_option("--context-mode", flags.context_mode,
                 "What the encoder sees: target-only or with-context")
      ->capture_default_str();
  cmd.add_option("--locate-threshold", flags.locate_threshold,
                 "Max normalized edit distance for an accepted MWE match")
      ->capture_default_str();
  cmd.add_option("--locate-failure-ceiling", flags.locate_failure_ceiling,
                 "Training locate-failure rate above which a warning is recorded")
      ->capture_default_str();
  cmd.add_option("--epochs", flags.epochs, "Training epochs")->capture_default_str();
  cmd.add_option("--lr", flags.lr, "AdamW learning rate")->capture_default_str();
  cmd.add_option("--dropout", flags.dropout, "Dropout probability before the probe layer")
      ->capture_default_str();
  cmd.add_option("--batch-size", flags.batch_size, "Mini-batch size")->capture_default_str();
  cmd.add_option("--seed", flags.seed, "Master seed for shuffle/dropout/init streams")
      ->capture_default_str();
  cmd.add_option("--weight-decay", flags.weight_decay, "Decoupled weight decay (bias exempt)")
      ->capture_default_str();
  cmd.add_option("--data-dir", flags.data_dir,
                 "Directory with train/dev/test files (csv or tsv)");
  cmd.add_option("--train-file", flags.train_file, "Training file; overrides --data-dir lookup");
  cmd.add_option("--extra-train-file", flags.extra_train_file,
                 "Extra one-shot training rows when split across files");
  cmd.add_option("--dev-file", flags.dev_file, "Dev file; overrides --data-dir lookup");
  cmd.add_option("--test-file", flags.test_file, "Test file; overrides --data-dir lookup");
  cmd.add_option("--out-dir", flags.out_dir, "Where run artifacts are written; '' skips writing")
      ->capture_default_str();
  cmd.add_option("--registry-dir", flags.registry_dir,
                 "Precomputed hidden-state registry for real encoder names");
  cmd.add_flag("--offline", flags.offline, "Never touch the network (registry/mock only)");
  cmd.add_option("--mock-seed", flags.mock_seed, "Seed of the mock encoder's hash")
      ->capture_default_str();
  cmd.add_option("--mock-layers", flags.mock_layers, "Mock encoder: number of block layers");
  cmd.add_option("--mock-width", flags.mock_width, "Mock encoder: hidden width");
  cmd.add_option("--max-positions", flags.max_positions,
                 "Override the encoder's positional capacity");
}

ExperimentConfig to_config(const CommonFlags& flags) {
  ExperimentConfig config;
  config.encoder = default_spec(parse_encoder_name(flags.model));
  config.encoder.mock_seed = flags.mock_seed;
  if (flags.mock_layers > 0) config.encoder.num_layers = flags.mock_layers;
  if (flags.mock_width > 0) config.encoder.hidden_width = flags.mock_width;
  if (flags.max_positions > 0) config.encoder.max_positions = flags.max_positions;
  config.layer = flags.layer;
  config.repr_type = parse_repr_type(flags.repr_type);
  config.setting = parse_setting(flags.setting);
  config.context_mode = parse_context_mode(flags.context_mode);
  config.locate_threshold = flags.locate_threshold;
  config.locate_failure_ceiling = flags.locate_failure_ceiling;
  config.train.epochs = flags.epochs;
  config.train.learning_rate = flags.lr;
  config.train.dropout_prob = flags.dropout;
  config.train.batch_size = flags.batch_size;
  config.train.seed = flags.seed;
  config.train.weight_decay = flags.weight_decay;
  config.data_dir = flags.data_dir;
  config.train_file = flags.train_file;
  config.extra_train_file = flags.extra_train_file;
  config.dev_file = flags.dev_file;
  config.test_file = flags.test_file;
  config.out_dir = flags.out_dir;
  config.registry_dir = flags.registry_dir;
  config.offline = flags.offline;
  return config;
}

void print_scores(const char* split, const EvaluationReport& report) {
  std::printf("%s macro F1: pooled %.4f over %d rows (", split, report.pooled, report.total);
  bool first = true;
  for (const auto& [lang, value] : report.per_language) {
    std::printf("%s%s %.4f", first ? "" : ", ", language_name(lang), value);
    first = false;
  }
  std::printf(")\n");
}

int cmd_run(const CommonFlags& flags) {
  const ExperimentResult result = run_experiment(to_config(flags));
  std::printf("run %s\n", experiment_slug(result.config).c_str());
  std::printf("trained on %d of %d labeled rows (%d locate failures, %d trimmed)\n",
              result.train_prepare.prepared, result.train_prepare.total,
              static_cast<int>(result.train_prepare.failures.size()),
              result.train_prepare.trimmed);
  for (const EpochStats& stats : result.trace) {
    std::printf("epoch %2d  loss %.4f  train acc %.4f", stats.epoch, stats.mean_loss,
                stats.train_accuracy);
    if (stats.dev_macro_f1.has_value()) std::printf("  dev F1 %.4f", *stats.dev_macro_f1);
    std::printf("\n");
  }
  print_scores("dev", result.dev_report);
  if (result.test_report.has_value()) print_scores("test", *result.test_report);
  for (const std::string& warning : result.warnings) {
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  }
  if (!result.run_dir.empty()) {
    std::printf("artifacts in %s\n", result.run_dir.string().c_str());
  }
  return 0;
}

int cmd_grid(const CommonFlags& flags, const std::vector<std::string>& models,
             const std::vector<int>& layers, const std::vector<std::string>& repr_types,
             const std::vector<std::string>& settings, int workers) {
  GridSpec spec;
  spec.base = to_config(flags);
  for (const std::string& name : models) spec.models.push_back(parse_encoder_name(name));
  if (!layers.empty()) {
    std::vector<EncoderName> affected = spec.models;
    if (affected.empty()) {
      affected = {EncoderName::MBERT, EncoderName::XLMR_BASE, EncoderName::XLMR_LARGE};
    }
    for (EncoderName model : affected) spec.layers[model] = layers;
  }
  for (const std::string& name : repr_types) spec.repr_types.push_back(parse_repr_type(name));
  for (const std::string& name : settings) spec.settings.push_back(parse_setting(name));

  const GridResult result = run_grid(spec, workers);
  const int total = static_cast<int>(result.cells.size());
  std::printf("grid: %d cells, %d failed\n", total, result.failed);
  for (const CellOutcome& cell : result.cells) {
    if (!cell.ok) std::fprintf(stderr, "failed %s: %s\n", cell.slug.c_str(), cell.error.c_str());
  }
  std::fputs(result.summary_dev_tsv.c_str(), stdout);
  std::printf("summaries in %s\n", result.out_dir.string().c_str());
  return result.failed == total ? 1 : 0;
}

int cmd_locate(const std::string& mwe, const std::string& sentence, double threshold) {
  const LocateResult result = try_locate_mwe(mwe, sentence, threshold);
  const std::u32string code_points = text::decode_utf8(sentence);
  const std::vector<text::Word> words = text::split_words_utf8(sentence);
  const CharSpan& span = result.best;
  const std::string matched =
      text::encode_utf8(std::u32string_view(code_points).substr(span.start, span.end - span.start));
  std::printf("%s\n", result.found ? "found" : "missed");
  std::printf("chars [%d,%d)  distance %d  normalized %.3f\n", span.start, span.end, span.distance,
              span.normalized_distance);
  if (!words.empty()) {
    const WordSpan word_span = char_span_to_word_span(span, words);
    std::printf("words [%d,%d]  match \"%s\"\n", word_span.first_word, word_span.last_word,
                matched.c_str());
  }
  return result.found ? 0 : 1;
}

int cmd_report(const std::string& out_dir, const std::string& style, const std::string& split) {
  const GridResult result = summarize_runs(out_dir);
  const bool markdown = style == "md" || style == "markdown";
  const std::string* table = nullptr;
  if (split == "dev") {
    table = markdown ? &result.summary_dev_markdown : &result.summary_dev_tsv;
  } else if (split == "test") {
    if (!result.summary_test_tsv.has_value()) {
      std::fprintf(stderr, "no complete test scores under %s\n", out_dir.c_str());
      return 1;
    }
    table = markdown ? &*result.summary_test_markdown : &*result.summary_test_tsv;
  } else {
    std::fprintf(stderr, "unknown split '%s' (expected dev or test)\n", split.c_str());
    return 1;
  }
  std::fputs(table->c_str(), stdout);
  for (const CellOutcome& cell : result.cells) {
    if (!cell.ok) std::fprintf(stderr, "skipped %s: %s\n", cell.slug.c_str(), cell.error.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Idiomaticity probing over contextual span representations"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file (sections per subcommand)");
  app.set_version_flag("--version", "spanprobe 0.1.0");

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Train and evaluate one probe");
  add_common_flags(*run, run_flags);

  CommonFlags grid_flags;
  std::vector<std::string> grid_models, grid_types, grid_settings;
  std::vector<int> grid_layers;
  int workers = 1;
  CLI::App* grid = app.add_subcommand("grid", "Sweep model x layer x combinator");
  add_common_flags(*grid, grid_flags);
  grid->add_option("--models", grid_models, "Models to sweep (default: mbert,xlmr,xlmr-large)")
      ->delimiter(',');
  grid->add_option("--layers", grid_layers,
                   "Layers to sweep for every selected model (default: per-model set)")
      ->delimiter(',');
  grid->add_option("--repr-types", grid_types, "Combinators to sweep (default: all six)")
      ->delimiter(',');
  grid->add_option("--settings", grid_settings, "Settings to sweep (default: --setting)")
      ->delimiter(',');
  grid->add_option("--workers", workers, "Worker processes; 0 runs cells in-process")
      ->capture_default_str();

  std::string locate_mwe_text, locate_sentence;
  double locate_threshold = 0.5;
  CLI::App* locate = app.add_subcommand("locate", "Find an MWE span in a sentence");
  locate->add_option("--mwe", locate_mwe_text, "The expression to look for")->required();
  locate->add_option("--sentence", locate_sentence, "The sentence to scan")->required();
  locate->add_option("--threshold", locate_threshold, "Max normalized edit distance")
      ->capture_default_str();

  std::string report_dir, report_style = "tsv", report_split = "dev";
  CLI::App* report = app.add_subcommand("report", "Summary table from stored runs");
  report->add_option("--out-dir", report_dir, "Runs directory to summarize")->required();
  report->add_option("--style", report_style, "Table style: tsv or md")->capture_default_str();
  report->add_option("--split", report_split, "Which scores: dev or test")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (grid->parsed()) {
      return cmd_grid(grid_flags, grid_models, grid_layers, grid_types, grid_settings, workers);
    }
    if (locate->parsed()) return cmd_locate(locate_mwe_text, locate_sentence, locate_threshold);
    if (report->parsed()) return cmd_report(report_dir, report_style, report_split);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
