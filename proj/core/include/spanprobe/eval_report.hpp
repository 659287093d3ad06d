#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spanprobe/classifier.hpp"
#include "spanprobe/corpus.hpp"
#include "spanprobe/encoder.hpp"
#include "spanprobe/span_repr.hpp"

namespace spanprobe {

/// Macro-averaged F1 over the two classes. Per-class F1 is 2PR/(P+R),
/// taken as 0 when the class has neither predictions nor gold rows
/// (P+R = 0). Throws ValidationError on empty or mismatched inputs.
double macro_f1(const std::vector<int>& gold, const std::vector<int>& predicted);
double macro_f1(const std::vector<Label>& gold, const std::vector<Label>& predicted);

/// Table display name: mBERT / XLM-R / XLM-R-L / mock.
std::string encoder_display_name(EncoderName name);
EncoderName parse_encoder_display_name(std::string_view name);

/// Identifies one grid cell. Orders by (model, layer, combinator,
/// setting), the order summary tables are listed in.
struct RunKey {
  EncoderName encoder = EncoderName::MOCK;
  ReprType repr_type = ReprType::XY;
  int layer = 0;
  Setting setting = Setting::ZERO_SHOT;

  bool operator==(const RunKey&) const = default;
  bool operator<(const RunKey& other) const;
};

/// Scores of one cell: per-language macro F1 plus the pooled score over
/// all rows concatenated. Pooling is not the mean of the language scores.
struct EvaluationReport {
  RunKey key;
  std::map<Language, double> per_language;
  std::map<Language, int> counts;
  double pooled = 0.0;
  int total = 0;

  bool operator==(const EvaluationReport&) const = default;
};

/// Score predictions against gold labels, grouped by language. Every
/// record must be labeled and aligned index-for-index with `predictions`.
EvaluationReport build_report(const RunKey& key, const std::vector<ExampleRecord>& records,
                              const std::vector<Label>& predictions);

enum class TableStyle { TSV, MARKDOWN };

/// Render reports as a summary table (Model, Type, Layer, Setting, EN,
/// PT, GL, Avg), scores as percentages with two decimals, absent
/// languages as "-". Rows sort by RunKey. The markdown style bolds each
/// column's best score per setting and underlines the best within each
/// model block; TSV stays plain so it parses back.
std::string emit_table(std::vector<EvaluationReport> reports, TableStyle style);

struct TableRow {
  RunKey key;
  std::optional<double> en, pt, gl, avg;  // percentages as printed

  bool operator==(const TableRow&) const = default;
};

/// Parse an emit_table TSV back into rows. Throws SchemaError on an
/// unexpected header or malformed cells.
std::vector<TableRow> parse_table(std::string_view tsv);

}  // namespace spanprobe
