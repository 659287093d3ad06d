#include "spanprobe/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spanprobe/errors.hpp"
#include "spanprobe/text.hpp"

namespace spanprobe {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
  }
  return out;
}

/// Case-folded MWE key used for disjointness and coverage checks.
std::string mwe_key(const std::string& mwe) {
  return text::encode_utf8(text::fold(text::decode_utf8(mwe)));
}

// --- table reading ---------------------------------------------------------

/// Split raw table text into rows of fields. CSV follows RFC 4180: quoted
/// fields may contain separators, doubled quotes and line breaks. TSV has
/// no quoting, so a tab always separates and a newline always ends a row.
std::vector<std::vector<std::string>> read_rows(std::string_view content, char separator,
                                                bool rfc4180_quoting,
                                                std::string_view source_name) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;

  const auto end_field = [&] {
    row.push_back(field);
    field.clear();
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };

  std::size_t i = 0;
  while (i < content.size()) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (rfc4180_quoting && c == '"' && field.empty()) {
      in_quotes = true;
      row_has_content = true;
      ++i;
      continue;
    }
    if (c == separator) {
      end_field();
      row_has_content = true;
      ++i;
      continue;
    }
    if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      ++i;
      if (row_has_content || !field.empty() || !row.empty()) end_row();
      continue;
    }
    field.push_back(c);
    row_has_content = true;
    ++i;
  }
  if (in_quotes) {
    throw SchemaError(std::string(source_name) + ": unterminated quoted field");
  }
  if (row_has_content || !field.empty() || !row.empty()) end_row();
  return rows;
}

struct HeaderIndex {
  // -1 when the column is absent.
  int id = -1, language = -1, mwe = -1, setting = -1;
  int previous = -1, next = -1, target = -1, label = -1;
};

int find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::string(text::trim(header[i])) == name) return static_cast<int>(i);
  }
  return -1;
}

std::string field_at(const std::vector<std::string>& row, int index) {
  if (index < 0 || index >= static_cast<int>(row.size())) return {};
  return std::string(text::trim(row[static_cast<std::size_t>(index)]));
}

}  // namespace

const char* language_name(Language lang) {
  switch (lang) {
    case Language::EN: return "EN";
    case Language::PT: return "PT";
    case Language::GL: return "GL";
  }
  return "?";
}

Language parse_language(std::string_view name) {
  const std::string lower = lower_ascii(text::trim(name));
  if (lower == "en") return Language::EN;
  if (lower == "pt") return Language::PT;
  if (lower == "gl") return Language::GL;
  throw ValidationError("unknown language code \"" + std::string(name) + "\"");
}

const char* setting_name(Setting setting) {
  return setting == Setting::ZERO_SHOT ? "zero_shot" : "one_shot";
}

Setting parse_setting(std::string_view name) {
  std::string lower = lower_ascii(text::trim(name));
  std::replace(lower.begin(), lower.end(), '-', '_');
  if (lower == "zero_shot" || lower == "zeroshot") return Setting::ZERO_SHOT;
  if (lower == "one_shot" || lower == "oneshot") return Setting::ONE_SHOT;
  throw ValidationError("unknown setting \"" + std::string(name) + "\"");
}

std::vector<ExampleRecord> parse_corpus(std::string_view content, TableFormat format,
                                        const LoadOptions& options,
                                        std::string_view source_name) {
  const char separator = format == TableFormat::CSV ? ',' : '\t';
  const auto rows = read_rows(content, separator, format == TableFormat::CSV, source_name);
  if (rows.empty()) {
    throw SchemaError(std::string(source_name) + ": empty file, expected a header row");
  }

  const auto& header = rows.front();
  const ColumnMapping& cols = options.columns;
  HeaderIndex idx;
  idx.id = find_column(header, cols.id);
  idx.language = find_column(header, cols.language);
  idx.mwe = find_column(header, cols.mwe);
  idx.setting = find_column(header, cols.setting);
  idx.previous = find_column(header, cols.previous);
  idx.target = find_column(header, cols.target);
  idx.next = find_column(header, cols.next);
  idx.label = find_column(header, cols.label);

  const auto require = [&](int col, const std::string& name) {
    if (col < 0) {
      throw SchemaError(std::string(source_name) + ": missing column \"" + name + "\"");
    }
  };
  require(idx.id, cols.id);
  require(idx.language, cols.language);
  require(idx.mwe, cols.mwe);
  require(idx.target, cols.target);
  if (idx.setting < 0 && !options.default_setting.has_value()) {
    throw SchemaError(std::string(source_name) + ": missing column \"" + cols.setting +
                      "\" and no default setting given");
  }

  std::vector<ExampleRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ExampleRecord rec;
    rec.id = field_at(row, idx.id);
    const std::string row_name = rec.id.empty() ? "row " + std::to_string(r) : "row id " + rec.id;

    try {
      rec.language = parse_language(field_at(row, idx.language));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(source_name) + " " + row_name + ": " + e.what());
    }
    rec.mwe = field_at(row, idx.mwe);
    rec.previous = field_at(row, idx.previous);
    rec.target = field_at(row, idx.target);
    rec.next = field_at(row, idx.next);
    if (rec.target.empty()) {
      throw ValidationError(std::string(source_name) + " " + row_name + ": empty Target");
    }

    const std::string label_text = field_at(row, idx.label);
    if (!label_text.empty()) {
      if (label_text == "0") {
        rec.label = Label::IDIOMATIC;
      } else if (label_text == "1") {
        rec.label = Label::NON_IDIOMATIC;
      } else {
        throw ValidationError(std::string(source_name) + " " + row_name + ": label \"" +
                              label_text + "\" is not 0, 1 or empty");
      }
    }

    if (idx.setting >= 0) {
      const std::string setting_text = field_at(row, idx.setting);
      if (setting_text.empty() && options.default_setting.has_value()) {
        rec.setting_tag = *options.default_setting;
      } else {
        try {
          rec.setting_tag = parse_setting(setting_text);
        } catch (const ValidationError& e) {
          throw ValidationError(std::string(source_name) + " " + row_name + ": " + e.what());
        }
      }
    } else {
      rec.setting_tag = *options.default_setting;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ExampleRecord> load_corpus(const std::filesystem::path& path, TableFormat format,
                                       const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open corpus file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), format, options, path.string());
}

namespace {

std::string csv_escape(const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string tsv_field(const std::string& field) {
  if (field.find_first_of("\t\r\n") != std::string::npos) {
    throw ValidationError("TSV output forbids tabs and line breaks in field \"" + field + "\"");
  }
  return field;
}

}  // namespace

std::string serialize_corpus(const std::vector<ExampleRecord>& records, TableFormat format,
                             const ColumnMapping& cols) {
  const char sep = format == TableFormat::CSV ? ',' : '\t';
  const auto emit = [&](const std::string& field) {
    return format == TableFormat::CSV ? csv_escape(field) : tsv_field(field);
  };
  std::ostringstream out;
  out << emit(cols.id) << sep << emit(cols.language) << sep << emit(cols.mwe) << sep
      << emit(cols.setting) << sep << emit(cols.previous) << sep << emit(cols.target) << sep
      << emit(cols.next) << sep << emit(cols.label) << "\n";
  for (const auto& rec : records) {
    std::string label_text;
    if (rec.label.has_value()) {
      label_text = std::to_string(static_cast<int>(*rec.label));
    }
    out << emit(rec.id) << sep << emit(language_name(rec.language)) << sep << emit(rec.mwe) << sep
        << emit(setting_name(rec.setting_tag)) << sep << emit(rec.previous) << sep
        << emit(rec.target) << sep << emit(rec.next) << sep << emit(label_text) << "\n";
  }
  return out.str();
}

void save_corpus(const std::filesystem::path& path, const std::vector<ExampleRecord>& records,
                 TableFormat format, const ColumnMapping& cols) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write corpus file " + path.string());
  }
  out << serialize_corpus(records, format, cols);
}

CorpusSplit build_split(SplitInputs inputs, Setting setting) {
  if (setting == Setting::ZERO_SHOT) {
    for (const auto& rec : inputs.train) {
      if (rec.setting_tag != Setting::ZERO_SHOT) {
        throw ValidationError("zero-shot split: training row id " + rec.id +
                              " carries a one_shot tag");
      }
    }
  }

  CorpusSplit split;
  split.setting = setting;
  split.train = std::move(inputs.train);
  split.dev = std::move(inputs.dev);
  split.test = std::move(inputs.test);

  std::set<std::string> train_mwes;
  for (const auto& rec : split.train) train_mwes.insert(mwe_key(rec.mwe));

  if (setting == Setting::ZERO_SHOT) {
    std::set<std::string> flagged;
    for (const auto* part : {&split.dev, &split.test}) {
      for (const auto& rec : *part) {
        const std::string key = mwe_key(rec.mwe);
        if (train_mwes.count(key) && flagged.insert(key).second) {
          split.warnings.push_back("zero-shot MWE overlap between train and dev/test: \"" +
                                   rec.mwe + "\"");
        }
      }
    }
  } else {
    // Which labels does training provide per MWE?
    std::map<std::string, std::pair<bool, bool>> seen;  // (has idiomatic, has non-idiomatic)
    for (const auto& rec : split.train) {
      if (!rec.label.has_value()) continue;
      auto& entry = seen[mwe_key(rec.mwe)];
      if (*rec.label == Label::IDIOMATIC) entry.first = true;
      else entry.second = true;
    }
    std::set<std::string> flagged;
    for (const auto* part : {&split.dev, &split.test}) {
      for (const auto& rec : *part) {
        const std::string key = mwe_key(rec.mwe);
        if (!flagged.insert(key).second) continue;
        const auto it = seen.find(key);
        const bool has_idiomatic = it != seen.end() && it->second.first;
        const bool has_literal = it != seen.end() && it->second.second;
        if (!has_idiomatic || !has_literal) {
          std::string missing;
          if (!has_idiomatic && !has_literal) missing = "any";
          else missing = has_idiomatic ? "non-idiomatic" : "idiomatic";
          split.warnings.push_back("one-shot: MWE \"" + rec.mwe + "\" has no " + missing +
                                   " training example");
        }
      }
    }
  }
  return split;
}

}  // namespace spanprobe
