#pragma once

// Shared test data: a small three-language corpus for end-to-end runs, a
// linearly separable span fixture for optimizer checks, and scratch
// directory helpers.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spanprobe/corpus.hpp"
#include "spanprobe/pipeline.hpp"

namespace fixtures {

struct Corpus {
  std::vector<spanprobe::ExampleRecord> train;  // zero- and one-shot tagged rows
  std::vector<spanprobe::ExampleRecord> dev;
  std::vector<spanprobe::ExampleRecord> test;
};

/// 60 rows across EN/PT/GL: 30 train (18 zero-shot MWEs, 12 one-shot),
/// 15 dev, 15 test. Zero-shot train MWEs are disjoint from dev/test;
/// one-shot training covers every dev/test MWE with both labels. One
/// train row and one dev row carry an MWE their sentence does not
/// contain, and one target exercises CSV quoting.
Corpus small_corpus();

/// Write the corpus as per-setting files (train_zero_shot, train_one_shot,
/// dev, test) or as one combined train file with a Setting column.
void write_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir,
                      bool combined_train = false,
                      spanprobe::TableFormat format = spanprobe::TableFormat::CSV);

/// Cleanly separable spans: class means at +mu / -mu per coordinate with
/// small uniform noise, `span_words` rows each. Labels alternate.
std::vector<spanprobe::PreparedExample> separable_examples(int per_class, int width,
                                                           int span_words, std::uint64_t seed,
                                                           double mu = 0.75, double noise = 0.1);

/// Fresh scratch directory under the system temp root; unique per call.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace fixtures
