#include "spanprobe/grid.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spanprobe/errors.hpp"

namespace spanprobe {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> default_probe_layers(EncoderName name) {
  switch (name) {
    case EncoderName::MBERT:
    case EncoderName::XLMR_BASE:
      return {4, 8, 12};
    case EncoderName::XLMR_LARGE:
      return {8, 12, 24};
    case EncoderName::MOCK:
      return {default_spec(EncoderName::MOCK).num_layers};
  }
  return {};
}

std::vector<ExperimentConfig> expand_grid(const GridSpec& spec) {
  std::vector<EncoderName> models = spec.models;
  if (models.empty()) {
    models = {EncoderName::MBERT, EncoderName::XLMR_BASE, EncoderName::XLMR_LARGE};
  }
  std::vector<ReprType> types = spec.repr_types;
  if (types.empty()) types.assign(std::begin(kAllReprTypes), std::end(kAllReprTypes));
  std::vector<Setting> settings = spec.settings;
  if (settings.empty()) settings = {spec.base.setting};

  std::vector<ExperimentConfig> cells;
  for (EncoderName model : models) {
    std::vector<int> layers;
    if (auto it = spec.layers.find(model); it != spec.layers.end() && !it->second.empty()) {
      layers = it->second;
    } else {
      layers = default_probe_layers(model);
    }
    EncoderSpec encoder_spec =
        spec.base.encoder.name == model ? spec.base.encoder : default_spec(model);
    encoder_spec.mock_seed = spec.base.encoder.mock_seed;
    for (int layer : layers) {
      for (ReprType type : types) {
        for (Setting setting : settings) {
          ExperimentConfig cell = spec.base;
          cell.encoder = encoder_spec;
          cell.layer = layer;
          cell.repr_type = type;
          cell.setting = setting;
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

namespace {

void run_cell_in_worker(const ExperimentConfig& config, const fs::path& log_path) {
  // In the forked child. Route all output to the cell log, run, and leave
  // with _exit so no parent-owned state unwinds twice.
  const int fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd >= 0) {
    ::dup2(fd, STDOUT_FILENO);
    ::dup2(fd, STDERR_FILENO);
    if (fd > STDERR_FILENO) ::close(fd);
  }
  int code = 0;
  try {
    run_experiment(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cell failed: %s\n", e.what());
    code = 1;
  } catch (...) {
    std::fprintf(stderr, "cell failed with a non-standard exception\n");
    code = 1;
  }
  std::fflush(nullptr);
  ::_exit(code);
}

std::string describe_wait_status(int status) {
  if (WIFEXITED(status)) {
    return "worker exited with status " + std::to_string(WEXITSTATUS(status));
  }
  if (WIFSIGNALED(status)) {
    return "worker killed by signal " + std::to_string(WTERMSIG(status));
  }
  return "worker ended abnormally";
}

std::string log_tail(const fs::path& log_path) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) return {};
  std::string line;
  std::string last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return last;
}

void build_summaries(GridResult& result) {
  std::vector<EvaluationReport> dev_reports;
  std::vector<EvaluationReport> test_reports;
  bool test_complete = true;
  for (const CellOutcome& cell : result.cells) {
    if (!cell.ok || !cell.stored.has_value()) continue;
    dev_reports.push_back(cell.stored->dev);
    if (cell.stored->test.has_value()) {
      test_reports.push_back(*cell.stored->test);
    } else {
      test_complete = false;
    }
  }
  result.summary_dev_tsv = emit_table(dev_reports, TableStyle::TSV);
  result.summary_dev_markdown = emit_table(dev_reports, TableStyle::MARKDOWN);
  if (test_complete && !test_reports.empty()) {
    result.summary_test_tsv = emit_table(test_reports, TableStyle::TSV);
    result.summary_test_markdown = emit_table(std::move(test_reports), TableStyle::MARKDOWN);
  }
}

void write_grid_outputs(const GridResult& result) {
  auto write_file = [](const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
  };
  write_file(result.out_dir / "summary.tsv", result.summary_dev_tsv);
  write_file(result.out_dir / "summary.md", result.summary_dev_markdown);
  if (result.summary_test_tsv.has_value()) {
    write_file(result.out_dir / "summary_test.tsv", *result.summary_test_tsv);
    write_file(result.out_dir / "summary_test.md", *result.summary_test_markdown);
  }

  json cells = json::array();
  for (const CellOutcome& cell : result.cells) {
    cells.push_back({{"slug", cell.slug},
                     {"ok", cell.ok},
                     {"error", cell.error},
                     {"report", cell.ok ? cell.slug + "/report.json" : std::string()}});
  }
  json j{{"schema", "spanprobe-grid/1"},
         {"cells", std::move(cells)},
         {"failed", result.failed}};
  write_file(result.out_dir / "grid.json", j.dump(2) + "\n");
}

}  // namespace

GridResult run_grid(const GridSpec& spec, int workers) {
  if (spec.base.out_dir.empty()) {
    throw ConfigError("grid runs need an out_dir; every cell writes its report there");
  }
  if (workers < 0) throw ConfigError("workers must be >= 0");
  std::vector<ExperimentConfig> configs = expand_grid(spec);
  if (configs.empty()) throw ConfigError("grid expands to zero cells");

  GridResult result;
  result.out_dir = spec.base.out_dir;
  fs::create_directories(result.out_dir);

  std::set<std::string> seen_slugs;
  for (const ExperimentConfig& config : configs) {
    CellOutcome cell;
    cell.config = config;
    cell.slug = experiment_slug(config);
    if (!seen_slugs.insert(cell.slug).second) {
      throw ConfigError("grid cells collide on run directory " + cell.slug);
    }
    cell.report_path = result.out_dir / cell.slug / "report.json";
    result.cells.push_back(std::move(cell));
  }

  if (workers == 0) {
    for (CellOutcome& cell : result.cells) {
      try {
        run_experiment(cell.config);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  } else {
    std::map<pid_t, std::size_t> running;
    std::size_t next = 0;
    while (next < result.cells.size() || !running.empty()) {
      while (next < result.cells.size() && static_cast<int>(running.size()) < workers) {
        CellOutcome& cell = result.cells[next];
        fs::create_directories(result.out_dir / cell.slug);
        cell.log_path = result.out_dir / cell.slug / "log.txt";
        std::fflush(nullptr);
        const pid_t pid = ::fork();
        if (pid < 0) throw ConfigError("fork failed; try fewer workers");
        if (pid == 0) run_cell_in_worker(cell.config, cell.log_path);  // never returns
        running[pid] = next++;
      }
      int status = 0;
      const pid_t done = ::waitpid(-1, &status, 0);
      if (done < 0) throw ConfigError("waitpid failed while collecting grid workers");
      const auto it = running.find(done);
      if (it == running.end()) continue;
      CellOutcome& cell = result.cells[it->second];
      running.erase(it);
      if (WIFEXITED(status) && WEXITSTATUS(status) == 0) {
        cell.ok = true;
      } else {
        const std::string tail = log_tail(cell.log_path);
        cell.error = describe_wait_status(status);
        if (!tail.empty()) cell.error += ": " + tail;
      }
    }
  }

  for (CellOutcome& cell : result.cells) {
    if (!cell.ok) {
      ++result.failed;
      continue;
    }
    try {
      cell.stored = load_stored_report(cell.report_path);
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
      ++result.failed;
    }
  }

  build_summaries(result);
  write_grid_outputs(result);
  return result;
}

GridResult summarize_runs(const fs::path& out_dir) {
  if (!fs::is_directory(out_dir)) {
    throw ConfigError("runs directory " + out_dir.string() + " does not exist");
  }
  GridResult result;
  result.out_dir = out_dir;
  std::vector<fs::path> run_dirs;
  for (const fs::directory_entry& entry : fs::directory_iterator(out_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "report.json")) {
      run_dirs.push_back(entry.path());
    }
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty()) {
    throw ConfigError("no run reports under " + out_dir.string() +
                      " (expected <run>/report.json directories)");
  }
  for (const fs::path& dir : run_dirs) {
    CellOutcome cell;
    cell.slug = dir.filename().string();
    cell.report_path = dir / "report.json";
    try {
      cell.stored = load_stored_report(cell.report_path);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
      ++result.failed;
    }
    result.cells.push_back(std::move(cell));
  }
  build_summaries(result);
  return result;
}

}  // namespace spanprobe
