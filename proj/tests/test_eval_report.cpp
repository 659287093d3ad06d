#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "spanprobe/errors.hpp"
#include "spanprobe/eval_report.hpp"
#include "spanprobe/rng.hpp"
#include "support/oracles.hpp"

using namespace spanprobe;

namespace {

ExampleRecord labeled_row(const std::string& id, Language lang, Label label) {
  ExampleRecord rec;
  rec.id = id;
  rec.language = lang;
  rec.mwe = "big fish";
  rec.target = "He caught a big fish.";
  rec.label = label;
  return rec;
}

EvaluationReport report_with(EncoderName model, ReprType type, int layer, Setting setting,
                             double en, double pt, double gl, double avg) {
  EvaluationReport report;
  report.key = RunKey{model, type, layer, setting};
  report.per_language = {{Language::EN, en}, {Language::PT, pt}, {Language::GL, gl}};
  report.counts = {{Language::EN, 10}, {Language::PT, 10}, {Language::GL, 10}};
  report.pooled = avg;
  report.total = 30;
  return report;
}

}  // namespace

TEST_SUITE("eval_report") {

TEST_CASE("macro f1 at its reference points") {
  CHECK(macro_f1(std::vector<int>{0, 1, 0, 1}, {0, 1, 0, 1}) == doctest::Approx(1.0));
  CHECK(macro_f1(std::vector<int>{0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(0.5));
  CHECK(macro_f1(std::vector<int>{0, 0}, {1, 1}) == doctest::Approx(0.0));
  // One class absent from both contributes zero, not a crash.
  CHECK(macro_f1(std::vector<int>{0, 0}, {0, 0}) == doctest::Approx(0.5));
}

TEST_CASE("macro f1 validates its inputs") {
  CHECK_THROWS_AS(macro_f1(std::vector<int>{}, {}), ValidationError);
  CHECK_THROWS_AS(macro_f1(std::vector<int>{0, 1}, {0}), ValidationError);
  CHECK_THROWS_AS(macro_f1(std::vector<int>{0, 2}, {0, 1}), ValidationError);
  CHECK_THROWS_AS(macro_f1(std::vector<int>{0, 1}, {0, -1}), ValidationError);
}

TEST_CASE("macro f1 agrees with the confusion-count oracle on random vectors") {
  rng::Generator gen(rng::derive_stream(42, "f1-oracle"));
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(gen.next_below(40));
    std::vector<int> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = gen.next_bernoulli(0.5) ? 1 : 0;
      pred[i] = gen.next_bernoulli(0.5) ? 1 : 0;
    }
    const double expected = oracle::macro_f1(gold, pred);
    CHECK(macro_f1(gold, pred) == doctest::Approx(expected).epsilon(1e-12));

    // Swapping both label sets consistently changes nothing.
    std::vector<int> gold_swapped(n), pred_swapped(n);
    for (int i = 0; i < n; ++i) {
      gold_swapped[i] = 1 - gold[i];
      pred_swapped[i] = 1 - pred[i];
    }
    CHECK(macro_f1(gold_swapped, pred_swapped) == doctest::Approx(expected).epsilon(1e-12));

    // The Label overload is the same function.
    std::vector<Label> gold_labels(n), pred_labels(n);
    for (int i = 0; i < n; ++i) {
      gold_labels[i] = static_cast<Label>(gold[i]);
      pred_labels[i] = static_cast<Label>(pred[i]);
    }
    CHECK(macro_f1(gold_labels, pred_labels) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("display names round-trip") {
  CHECK(encoder_display_name(EncoderName::MBERT) == "mBERT");
  CHECK(encoder_display_name(EncoderName::XLMR_BASE) == "XLM-R");
  CHECK(encoder_display_name(EncoderName::XLMR_LARGE) == "XLM-R-L");
  CHECK(parse_encoder_display_name("XLM-R-L") == EncoderName::XLMR_LARGE);
  CHECK(parse_encoder_display_name("mBERT") == EncoderName::MBERT);
  CHECK(parse_encoder_display_name("mock") == EncoderName::MOCK);
  // Config spellings are accepted too.
  CHECK(parse_encoder_display_name("xlmr-large") == EncoderName::XLMR_LARGE);
}

TEST_CASE("run keys order by model, layer, combinator, setting") {
  const RunKey a{EncoderName::MBERT, ReprType::MAX_POOLING, 4, Setting::ONE_SHOT};
  const RunKey b{EncoderName::MBERT, ReprType::XY, 8, Setting::ZERO_SHOT};
  const RunKey c{EncoderName::XLMR_BASE, ReprType::XY, 4, Setting::ZERO_SHOT};
  const RunKey d{EncoderName::MBERT, ReprType::XY, 4, Setting::ZERO_SHOT};
  const RunKey e{EncoderName::MBERT, ReprType::XY_DIFF, 4, Setting::ZERO_SHOT};
  CHECK(a < b);       // same model, layer 4 before layer 8
  CHECK(b < c);       // model precedes everything
  CHECK(d < e);       // combinator order within a layer
  CHECK(d < a);       // xy before max-pooling
  CHECK_FALSE(a < a);
}

TEST_CASE("build_report groups by language and pools across them") {
  std::vector<ExampleRecord> records;
  std::vector<Label> predictions;
  std::vector<int> gold_all, pred_all, gold_en, pred_en, gold_pt, pred_pt;
  rng::Generator gen(rng::derive_stream(8, "report-rows"));
  for (int i = 0; i < 30; ++i) {
    const Language lang = i < 18 ? Language::EN : Language::PT;
    const int gold = gen.next_bernoulli(0.5) ? 1 : 0;
    const int pred = gen.next_bernoulli(0.7) ? gold : 1 - gold;
    records.push_back(labeled_row("r" + std::to_string(i), lang, static_cast<Label>(gold)));
    predictions.push_back(static_cast<Label>(pred));
    gold_all.push_back(gold);
    pred_all.push_back(pred);
    (lang == Language::EN ? gold_en : gold_pt).push_back(gold);
    (lang == Language::EN ? pred_en : pred_pt).push_back(pred);
  }

  const RunKey key{EncoderName::MOCK, ReprType::XY, 2, Setting::ZERO_SHOT};
  const EvaluationReport report = build_report(key, records, predictions);
  CHECK(report.key == key);
  CHECK(report.total == 30);
  CHECK(report.counts.at(Language::EN) == 18);
  CHECK(report.counts.at(Language::PT) == 12);
  CHECK(report.per_language.count(Language::GL) == 0);
  CHECK(report.per_language.at(Language::EN) ==
        doctest::Approx(oracle::macro_f1(gold_en, pred_en)));
  CHECK(report.per_language.at(Language::PT) ==
        doctest::Approx(oracle::macro_f1(gold_pt, pred_pt)));
  CHECK(report.pooled == doctest::Approx(oracle::macro_f1(gold_all, pred_all)));
}

TEST_CASE("single-language reports pool to that language's score") {
  std::vector<ExampleRecord> records;
  std::vector<Label> predictions;
  for (int i = 0; i < 8; ++i) {
    records.push_back(labeled_row("g" + std::to_string(i), Language::GL,
                                  static_cast<Label>(i % 2)));
    predictions.push_back(static_cast<Label>((i / 2) % 2));
  }
  const auto report = build_report({}, records, predictions);
  REQUIRE(report.per_language.size() == 1);
  CHECK(report.per_language.at(Language::GL) == doctest::Approx(report.pooled));
}

TEST_CASE("build_report rejects unlabeled or misaligned inputs") {
  std::vector<ExampleRecord> records{labeled_row("a", Language::EN, Label::IDIOMATIC)};
  CHECK_THROWS_AS(build_report({}, records, {}), ValidationError);
  records[0].label.reset();
  CHECK_THROWS_AS(build_report({}, records, {Label::IDIOMATIC}), ValidationError);
  CHECK_THROWS_AS(build_report({}, {}, {}), ValidationError);
}

TEST_CASE("the pooled column is not the mean of the language columns") {
  // The reference row: per-language 70.70 / 68.03 / 50.65 with pooled
  // 65.40. Were "Avg" a mean, it would print 63.13 instead.
  const auto baseline = report_with(EncoderName::MBERT, ReprType::XY, 0, Setting::ZERO_SHOT,
                                    0.7070, 0.6803, 0.5065, 0.6540);
  const double mean = (0.7070 + 0.6803 + 0.5065) / 3.0;
  CHECK(mean * 100 == doctest::Approx(63.126667));
  CHECK(baseline.pooled * 100 == doctest::Approx(65.40));
  CHECK(std::abs(baseline.pooled - mean) > 0.02);

  const std::string tsv = emit_table({baseline}, TableStyle::TSV);
  CHECK(tsv.find("70.70") != std::string::npos);
  CHECK(tsv.find("68.03") != std::string::npos);
  CHECK(tsv.find("50.65") != std::string::npos);
  CHECK(tsv.find("65.40") != std::string::npos);
  CHECK(tsv.find("63.13") == std::string::npos);

  // A synthetic three-language report pools over the concatenation too:
  // languages of different sizes pull the pooled score toward the bigger
  // one, which no mean of language scores reproduces.
  std::vector<ExampleRecord> records;
  std::vector<Label> predictions;
  std::vector<int> gold_all, pred_all;
  const struct { Language lang; int rows; double flip; } parts[] = {
      {Language::EN, 24, 0.1}, {Language::PT, 6, 0.5}, {Language::GL, 4, 0.8}};
  rng::Generator gen(rng::derive_stream(4, "pooled-vs-mean"));
  int row = 0;
  for (const auto& part : parts) {
    for (int i = 0; i < part.rows; ++i, ++row) {
      const int gold = i % 2;
      const int pred = gen.next_bernoulli(part.flip) ? 1 - gold : gold;
      records.push_back(labeled_row("p" + std::to_string(row), part.lang,
                                    static_cast<Label>(gold)));
      predictions.push_back(static_cast<Label>(pred));
      gold_all.push_back(gold);
      pred_all.push_back(pred);
    }
  }
  const auto report = build_report({}, records, predictions);
  CHECK(report.pooled == doctest::Approx(oracle::macro_f1(gold_all, pred_all)));
  double language_mean = 0.0;
  for (const auto& [lang, score] : report.per_language) language_mean += score / 3.0;
  CHECK(std::abs(report.pooled - language_mean) > 0.01);
}

TEST_CASE("tsv tables round-trip through parse_table") {
  const std::vector<EvaluationReport> reports{
      report_with(EncoderName::MBERT, ReprType::XY_DIFF, 12, Setting::ZERO_SHOT, 0.7624, 0.7227,
                  0.6427, 0.7285),
      report_with(EncoderName::XLMR_LARGE, ReprType::XY_PROD_DIFF, 24, Setting::ONE_SHOT, 0.9126,
                  0.8696, 0.8906, 0.8979),
  };
  const std::string tsv = emit_table(reports, TableStyle::TSV);
  const auto rows = parse_table(tsv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == reports[0].key);
  CHECK(*rows[0].en == doctest::Approx(76.24));
  CHECK(*rows[0].pt == doctest::Approx(72.27));
  CHECK(*rows[0].gl == doctest::Approx(64.27));
  CHECK(*rows[0].avg == doctest::Approx(72.85));
  CHECK(rows[1].key == reports[1].key);
  CHECK(*rows[1].avg == doctest::Approx(89.79));
}

TEST_CASE("empty and partial tables render sensibly") {
  CHECK(emit_table({}, TableStyle::TSV) == "Model\tType\tLayer\tSetting\tEN\tPT\tGL\tAvg\n");

  EvaluationReport partial;
  partial.key = RunKey{EncoderName::MOCK, ReprType::XY, 2, Setting::ZERO_SHOT};
  partial.per_language = {{Language::EN, 0.5}};
  partial.counts = {{Language::EN, 4}};
  partial.pooled = 0.5;
  partial.total = 4;
  const std::string tsv = emit_table({partial}, TableStyle::TSV);
  const auto rows = parse_table(tsv);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].en.has_value());
  CHECK_FALSE(rows[0].pt.has_value());
  CHECK_FALSE(rows[0].gl.has_value());

  // One data row exactly, after the header.
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 2);
}

TEST_CASE("rows sort by run key regardless of input order") {
  const auto late = report_with(EncoderName::XLMR_BASE, ReprType::XY, 4, Setting::ZERO_SHOT, 0.5,
                                0.5, 0.5, 0.5);
  const auto early = report_with(EncoderName::MBERT, ReprType::XY, 12, Setting::ZERO_SHOT, 0.6,
                                 0.6, 0.6, 0.6);
  const std::string tsv = emit_table({late, early}, TableStyle::TSV);
  CHECK(tsv.find("mBERT") < tsv.find("XLM-R"));
}

TEST_CASE("markdown marks global and per-model bests, ties included") {
  // mBERT holds the global EN best; XLM-R's block best is underlined.
  auto mbert_a = report_with(EncoderName::MBERT, ReprType::XY, 4, Setting::ZERO_SHOT, 0.90, 0.50,
                             0.50, 0.60);
  auto mbert_b = report_with(EncoderName::MBERT, ReprType::XY, 8, Setting::ZERO_SHOT, 0.80, 0.55,
                             0.50, 0.61);
  auto xlmr = report_with(EncoderName::XLMR_BASE, ReprType::XY, 4, Setting::ZERO_SHOT, 0.85, 0.60,
                          0.50, 0.62);
  const std::string md = emit_table({mbert_a, mbert_b, xlmr}, TableStyle::MARKDOWN);

  CHECK(md.find("**90.00**") != std::string::npos);      // global EN best
  CHECK(md.find("<u>85.00</u>") != std::string::npos);   // XLM-R block EN best
  CHECK(md.find("<u>80.00</u>") == std::string::npos);   // runner-up inside a block: plain
  CHECK(md.find("80.00") != std::string::npos);
  CHECK(md.find("**60.00**") != std::string::npos);      // global PT best sits with XLM-R
  CHECK(md.find("<u>55.00</u>") != std::string::npos);   // mBERT block PT best
  CHECK(md.find("**62.00**") != std::string::npos);      // global Avg best

  // GL is a three-way tie at 50.00: every cell is the global best.
  CHECK(md.find("<u>50.00</u>") == std::string::npos);
  std::size_t bold_ties = 0;
  for (std::size_t at = md.find("**50.00**"); at != std::string::npos;
       at = md.find("**50.00**", at + 1)) {
    ++bold_ties;
  }
  CHECK(bold_ties == 3);

  // Settings are ranked separately: a lone one-shot row is its own best.
  auto one_shot = report_with(EncoderName::MBERT, ReprType::XY, 4, Setting::ONE_SHOT, 0.40, 0.40,
                              0.40, 0.40);
  const std::string mixed = emit_table({mbert_a, one_shot}, TableStyle::MARKDOWN);
  CHECK(mixed.find("**40.00**") != std::string::npos);
}

TEST_CASE("parse_table rejects malformed input") {
  CHECK_THROWS_AS(parse_table(""), SchemaError);
  CHECK_THROWS_AS(parse_table("Model\tWrong\tHeader\n"), SchemaError);
  const std::string good_header = "Model\tType\tLayer\tSetting\tEN\tPT\tGL\tAvg\n";
  CHECK_THROWS_AS(parse_table(good_header + "mBERT\tx,y\t4\tzero_shot\tabc\t-\t-\t50.00\n"),
                  SchemaError);
  CHECK_THROWS_AS(parse_table(good_header + "mBERT\tx,y\t4\tzero_shot\t50.00\n"), SchemaError);
  CHECK_THROWS_AS(parse_table(good_header + "mBERT\tx,y\tfour\tzero_shot\t1\t1\t1\t1\n"),
                  SchemaError);
  CHECK_NOTHROW(parse_table(good_header));
}

}  // TEST_SUITE
