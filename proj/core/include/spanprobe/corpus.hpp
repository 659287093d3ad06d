#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spanprobe {

enum class Language { EN, PT, GL };

/// Dataset convention: 0 marks an idiomatic usage, 1 a non-idiomatic one.
enum class Label : int { IDIOMATIC = 0, NON_IDIOMATIC = 1 };

enum class Setting { ZERO_SHOT, ONE_SHOT };

const char* language_name(Language lang);
Language parse_language(std::string_view name);  // throws ValidationError
const char* setting_name(Setting setting);
Setting parse_setting(std::string_view name);  // accepts zero_shot / zero-shot etc.

/// One data row. `label` is empty for unlabeled evaluation rows; such rows
/// are only ever routed to prediction, never to training.
struct ExampleRecord {
  std::string id;
  Language language = Language::EN;
  std::string mwe;
  std::string previous;  // may be empty
  std::string target;    // never empty
  std::string next;      // may be empty
  std::optional<Label> label;
  Setting setting_tag = Setting::ZERO_SHOT;

  bool operator==(const ExampleRecord&) const = default;
};

enum class TableFormat { CSV, TSV };

/// Header names of the public release; override when a file uses others.
struct ColumnMapping {
  std::string id = "ID";
  std::string language = "Language";
  std::string mwe = "MWE";
  std::string setting = "Setting";
  std::string previous = "Previous";
  std::string target = "Target";
  std::string next = "Next";
  std::string label = "Label";
};

struct LoadOptions {
  ColumnMapping columns;
  /// Applied when the file has no Setting column. Files of the public
  /// release that predate the column (per-setting training files) need it.
  std::optional<Setting> default_setting;
};

/// Parse a CSV (RFC 4180) or TSV corpus file. Fields are whitespace
/// trimmed; row order is preserved. ID, Language, MWE and Target columns
/// are required; Previous/Next default to empty, a missing Label column
/// yields unlabeled records, and a missing Setting column is an error
/// unless `default_setting` is given.
std::vector<ExampleRecord> load_corpus(const std::filesystem::path& path, TableFormat format,
                                       const LoadOptions& options = {});

std::vector<ExampleRecord> parse_corpus(std::string_view content, TableFormat format,
                                        const LoadOptions& options = {},
                                        std::string_view source_name = "<string>");

/// Serialize records with the full column set. CSV output quotes per
/// RFC 4180; TSV refuses fields containing tabs or line breaks.
std::string serialize_corpus(const std::vector<ExampleRecord>& records, TableFormat format,
                             const ColumnMapping& columns = {});

void save_corpus(const std::filesystem::path& path, const std::vector<ExampleRecord>& records,
                 TableFormat format, const ColumnMapping& columns = {});

/// The three corpus roles as loaded from their separate files.
struct SplitInputs {
  std::vector<ExampleRecord> train;
  std::vector<ExampleRecord> dev;
  std::vector<ExampleRecord> test;
};

struct CorpusSplit {
  std::vector<ExampleRecord> train;
  std::vector<ExampleRecord> dev;
  std::vector<ExampleRecord> test;
  Setting setting = Setting::ZERO_SHOT;
  /// Soft invariant violations found in the source data. Empty for a
  /// zero-shot split exactly when train MWEs are disjoint from dev/test.
  std::vector<std::string> warnings;
};

/// Assemble a split for the requested setting. No row is dropped. For
/// ZERO_SHOT, every training row must be zero-shot tagged (one-shot rows
/// would leak evaluation MWEs); for ONE_SHOT, training consumes both
/// zero-shot and one-shot tagged rows. MWE identity for the disjointness
/// and coverage checks is case-folded exact string match.
CorpusSplit build_split(SplitInputs inputs, Setting setting);

}  // namespace spanprobe
