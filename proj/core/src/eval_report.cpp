#include "spanprobe/eval_report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "spanprobe/errors.hpp"

namespace spanprobe {

namespace {

struct Confusion {
  long tp = 0, fp = 0, fn = 0;
};

double f1_from(const Confusion& c) {
  const double precision = (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
  const double recall = (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double macro_f1(const std::vector<int>& gold, const std::vector<int>& predicted) {
  if (gold.size() != predicted.size()) {
    throw ValidationError("gold and prediction lists differ in length");
  }
  if (gold.empty()) throw ValidationError("cannot score an empty prediction list");
  std::array<Confusion, 2> classes;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if ((gold[i] != 0 && gold[i] != 1) || (predicted[i] != 0 && predicted[i] != 1)) {
      throw ValidationError("labels must be 0 or 1");
    }
    for (int c = 0; c < 2; ++c) {
      const bool is_gold = gold[i] == c;
      const bool is_pred = predicted[i] == c;
      if (is_gold && is_pred) ++classes[c].tp;
      if (!is_gold && is_pred) ++classes[c].fp;
      if (is_gold && !is_pred) ++classes[c].fn;
    }
  }
  return (f1_from(classes[0]) + f1_from(classes[1])) / 2.0;
}

double macro_f1(const std::vector<Label>& gold, const std::vector<Label>& predicted) {
  std::vector<int> g(gold.size());
  std::vector<int> p(predicted.size());
  std::transform(gold.begin(), gold.end(), g.begin(),
                 [](Label l) { return static_cast<int>(l); });
  std::transform(predicted.begin(), predicted.end(), p.begin(),
                 [](Label l) { return static_cast<int>(l); });
  return macro_f1(g, p);
}

std::string encoder_display_name(EncoderName name) {
  switch (name) {
    case EncoderName::MBERT: return "mBERT";
    case EncoderName::XLMR_BASE: return "XLM-R";
    case EncoderName::XLMR_LARGE: return "XLM-R-L";
    case EncoderName::MOCK: return "mock";
  }
  return "?";
}

EncoderName parse_encoder_display_name(std::string_view name) {
  if (name == "mBERT") return EncoderName::MBERT;
  if (name == "XLM-R") return EncoderName::XLMR_BASE;
  if (name == "XLM-R-L") return EncoderName::XLMR_LARGE;
  if (name == "mock") return EncoderName::MOCK;
  return parse_encoder_name(name);  // accept CLI spellings too
}

bool RunKey::operator<(const RunKey& other) const {
  return std::tuple(encoder, layer, repr_type, setting) <
         std::tuple(other.encoder, other.layer, other.repr_type, other.setting);
}

EvaluationReport build_report(const RunKey& key, const std::vector<ExampleRecord>& records,
                              const std::vector<Label>& predictions) {
  if (records.size() != predictions.size()) {
    throw ValidationError("records and predictions differ in length");
  }
  if (records.empty()) throw ValidationError("cannot build a report from zero records");

  EvaluationReport report;
  report.key = key;
  std::map<Language, std::vector<Label>> gold_by_lang;
  std::map<Language, std::vector<Label>> pred_by_lang;
  std::vector<Label> gold_all;
  std::vector<Label> pred_all;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ExampleRecord& record = records[i];
    if (!record.label.has_value()) {
      throw ValidationError("row " + record.id + " has no gold label; cannot score it");
    }
    gold_by_lang[record.language].push_back(*record.label);
    pred_by_lang[record.language].push_back(predictions[i]);
    gold_all.push_back(*record.label);
    pred_all.push_back(predictions[i]);
  }
  for (const auto& [lang, gold] : gold_by_lang) {
    report.per_language[lang] = macro_f1(gold, pred_by_lang[lang]);
    report.counts[lang] = static_cast<int>(gold.size());
  }
  report.pooled = macro_f1(gold_all, pred_all);
  report.total = static_cast<int>(gold_all.size());
  return report;
}

namespace {

std::string format_score(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

enum class CellMark { NONE, PART_BEST, GLOBAL_BEST };

std::optional<double> report_cell(const EvaluationReport& report, int column) {
  if (column == 3) return report.pooled;
  const Language lang = static_cast<Language>(column);
  auto it = report.per_language.find(lang);
  if (it == report.per_language.end()) return std::nullopt;
  return it->second;
}

/// Column-wise bests: global per setting, and per (model, setting) block.
std::vector<std::array<CellMark, 4>> compute_marks(const std::vector<EvaluationReport>& sorted) {
  std::vector<std::array<CellMark, 4>> marks(sorted.size(),
                                             {CellMark::NONE, CellMark::NONE, CellMark::NONE,
                                              CellMark::NONE});
  for (int col = 0; col < 4; ++col) {
    std::map<Setting, double> global_best;
    std::map<std::pair<EncoderName, Setting>, double> part_best;
    for (const EvaluationReport& report : sorted) {
      const std::optional<double> value = report_cell(report, col);
      if (!value.has_value()) continue;
      auto [git, gnew] = global_best.try_emplace(report.key.setting, *value);
      if (!gnew) git->second = std::max(git->second, *value);
      auto part_key = std::make_pair(report.key.encoder, report.key.setting);
      auto [pit, pnew] = part_best.try_emplace(part_key, *value);
      if (!pnew) pit->second = std::max(pit->second, *value);
    }
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const std::optional<double> value = report_cell(sorted[i], col);
      if (!value.has_value()) continue;
      if (*value == global_best.at(sorted[i].key.setting)) {
        marks[i][col] = CellMark::GLOBAL_BEST;
      } else if (*value ==
                 part_best.at(std::make_pair(sorted[i].key.encoder, sorted[i].key.setting))) {
        marks[i][col] = CellMark::PART_BEST;
      }
    }
  }
  return marks;
}

}  // namespace

std::string emit_table(std::vector<EvaluationReport> reports, TableStyle style) {
  std::sort(reports.begin(), reports.end(),
            [](const EvaluationReport& a, const EvaluationReport& b) { return a.key < b.key; });

  std::ostringstream out;
  const bool markdown = style == TableStyle::MARKDOWN;
  if (markdown) {
    out << "| Model | Type | Layer | Setting | EN | PT | GL | Avg |\n";
    out << "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
  } else {
    out << "Model\tType\tLayer\tSetting\tEN\tPT\tGL\tAvg\n";
  }

  const auto marks = markdown ? compute_marks(reports)
                              : std::vector<std::array<CellMark, 4>>(
                                    reports.size(), {CellMark::NONE, CellMark::NONE, CellMark::NONE,
                                                     CellMark::NONE});
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EvaluationReport& report = reports[i];
    std::array<std::string, 4> cells;
    for (int col = 0; col < 4; ++col) {
      const std::optional<double> value = report_cell(report, col);
      if (!value.has_value()) {
        cells[col] = "-";
        continue;
      }
      std::string text = format_score(*value);
      if (marks[i][col] == CellMark::GLOBAL_BEST) {
        text = "**" + text + "**";
      } else if (marks[i][col] == CellMark::PART_BEST) {
        text = "<u>" + text + "</u>";
      }
      cells[col] = std::move(text);
    }
    if (markdown) {
      out << "| " << encoder_display_name(report.key.encoder) << " | "
          << repr_type_display(report.key.repr_type) << " | " << report.key.layer << " | "
          << setting_name(report.key.setting) << " | " << cells[0] << " | " << cells[1] << " | "
          << cells[2] << " | " << cells[3] << " |\n";
    } else {
      out << encoder_display_name(report.key.encoder) << '\t'
          << repr_type_display(report.key.repr_type) << '\t' << report.key.layer << '\t'
          << setting_name(report.key.setting) << '\t' << cells[0] << '\t' << cells[1] << '\t'
          << cells[2] << '\t' << cells[3] << '\n';
    }
  }
  return out.str();
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      fields.emplace_back(line.substr(begin, i - begin));
      begin = i + 1;
    }
  }
  return fields;
}

std::optional<double> parse_cell(const std::string& cell, int line_no) {
  if (cell == "-") return std::nullopt;
  try {
    std::size_t pos = 0;
    const double value = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return value;
  } catch (const std::exception&) {
    throw SchemaError("summary table line " + std::to_string(line_no) + ": bad score cell '" +
                      cell + "'");
  }
}

}  // namespace

std::vector<TableRow> parse_table(std::string_view tsv) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= tsv.size(); ++i) {
    if (i == tsv.size() || tsv[i] == '\n') {
      if (i > begin) lines.push_back(tsv.substr(begin, i - begin));
      begin = i + 1;
    }
  }
  if (lines.empty()) throw SchemaError("summary table is empty");
  if (lines[0] != "Model\tType\tLayer\tSetting\tEN\tPT\tGL\tAvg") {
    throw SchemaError("summary table has an unexpected header: " + std::string(lines[0]));
  }

  std::vector<TableRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::vector<std::string> fields = split_tabs(lines[li]);
    const int line_no = static_cast<int>(li) + 1;
    if (fields.size() != 8) {
      throw SchemaError("summary table line " + std::to_string(line_no) + ": expected 8 columns, got " +
                        std::to_string(fields.size()));
    }
    TableRow row;
    try {
      row.key.encoder = parse_encoder_display_name(fields[0]);
      row.key.repr_type = parse_repr_type(fields[1]);
      row.key.setting = parse_setting(fields[3]);
    } catch (const std::exception& e) {
      throw SchemaError("summary table line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      std::size_t pos = 0;
      row.key.layer = std::stoi(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
    } catch (const std::exception&) {
      throw SchemaError("summary table line " + std::to_string(line_no) + ": bad layer '" +
                        fields[2] + "'");
    }
    row.en = parse_cell(fields[4], line_no);
    row.pt = parse_cell(fields[5], line_no);
    row.gl = parse_cell(fields[6], line_no);
    row.avg = parse_cell(fields[7], line_no);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace spanprobe
