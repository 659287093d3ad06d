#include "spanprobe/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spanprobe/errors.hpp"

namespace spanprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr char kReportSchema[] = "spanprobe-report/1";
}

std::string experiment_slug(const ExperimentConfig& config) {
  std::ostringstream slug;
  slug << encoder_name_str(config.encoder.name) << '-' << repr_type_name(config.repr_type) << "-l"
       << resolve_layer(config) << '-' << setting_name(config.setting);
  return slug.str();
}

int resolve_layer(const ExperimentConfig& config) {
  return config.layer < 0 ? config.encoder.num_layers : config.layer;
}

TableFormat table_format_for(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return TableFormat::CSV;
  if (ext == ".tsv") return TableFormat::TSV;
  throw ConfigError("cannot tell CSV from TSV for " + path.string() +
                    " (expected a .csv or .tsv extension)");
}

namespace {

fs::path find_variant(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".csv", ".tsv"}) {
    fs::path candidate = dir / (stem + ext);
    if (fs::exists(candidate)) return candidate;
  }
  return {};
}

}  // namespace

SplitInputs load_split_inputs(const ExperimentConfig& config) {
  fs::path train = config.train_file;
  fs::path extra = config.extra_train_file;
  fs::path dev = config.dev_file;
  fs::path test = config.test_file;

  const bool have_dir = !config.data_dir.empty();
  if (have_dir && !fs::is_directory(config.data_dir)) {
    throw ConfigError("data directory " + config.data_dir.string() + " does not exist");
  }

  bool combined = false;
  if (train.empty()) {
    if (!have_dir) throw ConfigError("no training data: set data_dir or train_file");
    train = find_variant(config.data_dir, "train");
    if (!train.empty()) {
      combined = true;
    } else {
      train = find_variant(config.data_dir, "train_zero_shot");
      if (train.empty()) {
        throw ConfigError("no training file in " + config.data_dir.string() +
                          " (looked for train.csv/tsv and train_zero_shot.csv/tsv)");
      }
    }
  }
  if (!combined && config.setting == Setting::ONE_SHOT && extra.empty()) {
    if (have_dir) extra = find_variant(config.data_dir, "train_one_shot");
    if (extra.empty()) {
      throw ConfigError("one-shot run needs the one-shot training rows: add train_one_shot.csv/tsv"
                        " next to the zero-shot file or pass extra_train_file");
    }
  }
  if (dev.empty()) {
    if (!have_dir) throw ConfigError("no dev data: set data_dir or dev_file");
    dev = find_variant(config.data_dir, "dev");
    if (dev.empty()) throw ConfigError("no dev.csv/tsv in " + config.data_dir.string());
  }
  if (test.empty() && have_dir) test = find_variant(config.data_dir, "test");

  SplitInputs inputs;
  LoadOptions train_options;
  if (!combined) train_options.default_setting = Setting::ZERO_SHOT;
  inputs.train = load_corpus(train, table_format_for(train), train_options);
  if (combined && config.setting == Setting::ZERO_SHOT) {
    std::erase_if(inputs.train, [](const ExampleRecord& record) {
      return record.setting_tag != Setting::ZERO_SHOT;
    });
  }
  if (!extra.empty()) {
    LoadOptions extra_options;
    extra_options.default_setting = Setting::ONE_SHOT;
    std::vector<ExampleRecord> rows = load_corpus(extra, table_format_for(extra), extra_options);
    inputs.train.insert(inputs.train.end(), std::make_move_iterator(rows.begin()),
                        std::make_move_iterator(rows.end()));
  }
  LoadOptions eval_options;
  eval_options.default_setting = config.setting;
  inputs.dev = load_corpus(dev, table_format_for(dev), eval_options);
  if (!test.empty()) inputs.test = load_corpus(test, table_format_for(test), eval_options);
  return inputs;
}

namespace {

struct PreparedSet {
  std::vector<std::optional<PreparedExample>> rows;  // index-aligned with the records
  PrepareStats stats;
};

PreparedSet prepare_aligned(const SpanPipeline& pipeline,
                            const std::vector<ExampleRecord>& records) {
  PreparedSet set;
  set.rows.reserve(records.size());
  set.stats.total = static_cast<int>(records.size());
  for (const ExampleRecord& record : records) {
    std::string reason;
    std::optional<PreparedExample> prepared = pipeline.prepare(record, &reason);
    if (prepared.has_value()) {
      ++set.stats.prepared;
      if (prepared->context_trimmed) ++set.stats.trimmed;
    } else {
      set.stats.failures.push_back({record.id, reason});
    }
    set.rows.push_back(std::move(prepared));
  }
  return set;
}

std::vector<Prediction> predict_set(const std::vector<ExampleRecord>& records,
                                    const PreparedSet& set, const ProbeParams& params,
                                    Label fallback) {
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Prediction prediction;
    prediction.record_id = records[i].id;
    if (set.rows[i].has_value()) {
      prediction.label = classify(*set.rows[i], params);
    } else {
      prediction.label = fallback;
      prediction.fallback = true;
    }
    out.push_back(std::move(prediction));
  }
  return out;
}

json encoder_json(const EncoderSpec& spec) {
  return {{"name", encoder_name_str(spec.name)},
          {"num_layers", spec.num_layers},
          {"hidden_width", spec.hidden_width},
          {"trainable", spec.trainable},
          {"max_positions", spec.max_positions},
          {"mock_seed", spec.mock_seed}};
}

json train_config_json(const TrainConfig& train) {
  return {{"epochs", train.epochs},
          {"learning_rate", train.learning_rate},
          {"dropout_prob", train.dropout_prob},
          {"batch_size", train.batch_size},
          {"seed", train.seed},
          {"weight_decay", train.weight_decay},
          {"adam_beta1", train.adam_beta1},
          {"adam_beta2", train.adam_beta2},
          {"adam_eps", train.adam_eps}};
}

json prepare_stats_json(const PrepareStats& stats) {
  json failures = json::array();
  for (const PrepareFailure& failure : stats.failures) {
    failures.push_back({{"id", failure.record_id}, {"reason", failure.reason}});
  }
  return {{"rows", stats.total},
          {"prepared", stats.prepared},
          {"trimmed", stats.trimmed},
          {"failures", std::move(failures)}};
}

json scores_json(const EvaluationReport& report) {
  json per_language = json::object();
  json counts = json::object();
  for (const auto& [lang, value] : report.per_language) per_language[language_name(lang)] = value;
  for (const auto& [lang, count] : report.counts) counts[language_name(lang)] = count;
  return {{"per_language", std::move(per_language)},
          {"counts", std::move(counts)},
          {"pooled", report.pooled},
          {"total", report.total}};
}

EvaluationReport scores_from_json(const json& j, const RunKey& key) {
  EvaluationReport report;
  report.key = key;
  for (const auto& [name, value] : j.at("per_language").items()) {
    report.per_language[parse_language(name)] = value.get<double>();
  }
  for (const auto& [name, value] : j.at("counts").items()) {
    report.counts[parse_language(name)] = value.get<int>();
  }
  report.pooled = j.at("pooled").get<double>();
  report.total = j.at("total").get<int>();
  return report;
}

std::string path_or_empty(const fs::path& path) { return path.generic_string(); }

}  // namespace

std::string predictions_tsv(const std::vector<Prediction>& predictions) {
  std::ostringstream out;
  out << "ID\tPrediction\tFallback\n";
  for (const Prediction& prediction : predictions) {
    out << prediction.record_id << '\t' << static_cast<int>(prediction.label) << '\t'
        << (prediction.fallback ? 1 : 0) << '\n';
  }
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = config;
  result.config.layer = resolve_layer(config);
  const int layer = result.config.layer;

  SplitInputs inputs = load_split_inputs(config);
  CorpusSplit split = build_split(std::move(inputs), config.setting);
  result.warnings = split.warnings;

  const std::unique_ptr<Encoder> encoder =
      make_encoder(config.encoder, {config.registry_dir, config.offline});
  PipelineOptions pipeline_options;
  pipeline_options.layer = layer;
  pipeline_options.context_mode = config.context_mode;
  pipeline_options.locate_threshold = config.locate_threshold;
  const SpanPipeline pipeline(*encoder, pipeline_options);

  std::vector<ExampleRecord> labeled_train;
  labeled_train.reserve(split.train.size());
  for (const ExampleRecord& record : split.train) {
    if (record.label.has_value()) labeled_train.push_back(record);
  }
  if (labeled_train.empty()) throw ValidationError("training split has no labeled rows");
  if (labeled_train.size() < split.train.size()) {
    result.warnings.push_back(std::to_string(split.train.size() - labeled_train.size()) +
                              " unlabeled training rows ignored (prediction-only rows)");
  }

  std::vector<PreparedExample> prepared_train =
      pipeline.prepare_many(labeled_train, &result.train_prepare);
  if (prepared_train.empty()) {
    throw ValidationError("every training row failed span preparation; check the locate threshold");
  }
  if (result.train_prepare.failure_rate() > config.locate_failure_ceiling) {
    std::ostringstream warning;
    warning << "locate failures on " << result.train_prepare.failures.size() << " of "
            << result.train_prepare.total << " training rows ("
            << result.train_prepare.failure_rate() * 100.0 << "%), above the ceiling of "
            << config.locate_failure_ceiling * 100.0 << "%";
    result.warnings.push_back(warning.str());
  }
  const Label fallback = majority_label(prepared_train);

  if (split.dev.empty()) throw ValidationError("dev split has no rows");
  const PreparedSet dev_set = prepare_aligned(pipeline, split.dev);
  result.dev_prepare = dev_set.stats;

  std::vector<std::size_t> labeled_dev;
  for (std::size_t i = 0; i < split.dev.size(); ++i) {
    if (split.dev[i].label.has_value()) labeled_dev.push_back(i);
  }
  if (labeled_dev.empty()) throw ValidationError("dev split has no labeled rows to score");

  EpochHook hook = [&](int, const ProbeParams& params) -> std::optional<double> {
    const std::vector<Prediction> predictions = predict_set(split.dev, dev_set, params, fallback);
    std::vector<Label> gold;
    std::vector<Label> predicted;
    gold.reserve(labeled_dev.size());
    for (std::size_t i : labeled_dev) {
      gold.push_back(*split.dev[i].label);
      predicted.push_back(predictions[i].label);
    }
    return macro_f1(gold, predicted);
  };

  TrainOutcome outcome = train_probe(prepared_train, config.repr_type,
                                     config.encoder.hidden_width, config.train, hook);
  result.trace = outcome.trace;

  const RunKey key{config.encoder.name, config.repr_type, layer, config.setting};
  result.dev_predictions = predict_set(split.dev, dev_set, outcome.params, fallback);
  {
    std::vector<ExampleRecord> records;
    std::vector<Label> labels;
    for (std::size_t i : labeled_dev) {
      records.push_back(split.dev[i]);
      labels.push_back(result.dev_predictions[i].label);
    }
    result.dev_report = build_report(key, records, labels);
  }
  if (labeled_dev.size() < split.dev.size()) {
    result.warnings.push_back(std::to_string(split.dev.size() - labeled_dev.size()) +
                              " unlabeled dev rows predicted but not scored");
  }

  if (!split.test.empty()) {
    const PreparedSet test_set = prepare_aligned(pipeline, split.test);
    result.test_prepare = test_set.stats;
    result.test_predictions = predict_set(split.test, test_set, outcome.params, fallback);
    const bool all_labeled =
        std::all_of(split.test.begin(), split.test.end(),
                    [](const ExampleRecord& record) { return record.label.has_value(); });
    if (all_labeled) {
      std::vector<Label> labels;
      labels.reserve(result.test_predictions.size());
      for (const Prediction& prediction : result.test_predictions) labels.push_back(prediction.label);
      result.test_report = build_report(key, split.test, labels);
    } else {
      result.warnings.push_back("test rows carry no (complete) gold labels; predictions written, "
                                "no test scores");
    }
  }

  result.checkpoint.encoder = config.encoder;
  result.checkpoint.layer = layer;
  result.checkpoint.setting = config.setting;
  result.checkpoint.context_mode = config.context_mode;
  result.checkpoint.locate_threshold = config.locate_threshold;
  result.checkpoint.train = config.train;
  result.checkpoint.fallback_label = fallback;
  result.checkpoint.params = outcome.params;

  // Assemble report.json: no timestamps, no host state, key order fixed
  // by the JSON library, so identical runs serialize identically.
  json report;
  report["schema"] = kReportSchema;
  report["run"] = {{"model", encoder_name_str(config.encoder.name)},
                   {"layer", layer},
                   {"repr_type", repr_type_name(config.repr_type)},
                   {"setting", setting_name(config.setting)}};
  report["config"] = {{"encoder", encoder_json(config.encoder)},
                      {"context_mode", context_mode_name(config.context_mode)},
                      {"locate_threshold", config.locate_threshold},
                      {"locate_failure_ceiling", config.locate_failure_ceiling},
                      {"train", train_config_json(config.train)},
                      {"registry_dir", path_or_empty(config.registry_dir)},
                      {"offline", config.offline}};
  report["train"] = {{"prepare", prepare_stats_json(result.train_prepare)},
                     {"labeled_rows", static_cast<int>(labeled_train.size())},
                     {"majority_label", static_cast<int>(fallback)}};
  json trace = json::array();
  for (const EpochStats& stats : result.trace) {
    trace.push_back({{"epoch", stats.epoch},
                     {"mean_loss", stats.mean_loss},
                     {"train_accuracy", stats.train_accuracy},
                     {"dev_macro_f1",
                      stats.dev_macro_f1.has_value() ? json(*stats.dev_macro_f1) : json(nullptr)}});
  }
  report["trace"] = std::move(trace);
  report["dev"] = {{"scores", scores_json(result.dev_report)},
                   {"prepare", prepare_stats_json(result.dev_prepare)}};
  report["test"] = result.test_report.has_value()
                       ? json{{"scores", scores_json(*result.test_report)},
                              {"prepare", prepare_stats_json(result.test_prepare)}}
                       : json(nullptr);
  report["warnings"] = result.warnings;
  result.report_json = report.dump(2) + "\n";

  if (!config.out_dir.empty()) {
    result.run_dir = config.out_dir / experiment_slug(config);
    fs::create_directories(result.run_dir);
    auto write_file = [](const fs::path& path, std::string_view content) {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
      out << content;
      if (!out) throw ConfigError("failed writing " + path.string());
    };
    write_file(result.run_dir / "report.json", result.report_json);
    write_file(result.run_dir / "checkpoint.json", checkpoint_to_json(result.checkpoint));
    write_file(result.run_dir / "predictions_dev.tsv", predictions_tsv(result.dev_predictions));
    if (!result.test_predictions.empty()) {
      write_file(result.run_dir / "predictions_test.tsv", predictions_tsv(result.test_predictions));
    }
  }
  return result;
}

StoredCell load_stored_report(const fs::path& report_path) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + report_path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw SchemaError(report_path.string() + ": not valid JSON: " + e.what());
  }
  try {
    if (j.value("schema", "") != kReportSchema) {
      throw SchemaError("missing or unexpected schema tag (want " + std::string(kReportSchema) +
                        ")");
    }
    StoredCell cell;
    const json& run = j.at("run");
    cell.key.encoder = parse_encoder_name(run.at("model").get<std::string>());
    cell.key.layer = run.at("layer").get<int>();
    cell.key.repr_type = parse_repr_type(run.at("repr_type").get<std::string>());
    cell.key.setting = parse_setting(run.at("setting").get<std::string>());
    cell.dev = scores_from_json(j.at("dev").at("scores"), cell.key);
    if (!j.at("test").is_null()) {
      cell.test = scores_from_json(j.at("test").at("scores"), cell.key);
    }
    for (const json& warning : j.at("warnings")) cell.warnings.push_back(warning.get<std::string>());
    return cell;
  } catch (const json::exception& e) {
    throw SchemaError(report_path.string() + ": malformed report: " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(report_path.string() + ": " + e.what());
  }
}

}  // namespace spanprobe
