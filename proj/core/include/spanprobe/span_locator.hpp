#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spanprobe/errors.hpp"
#include "spanprobe/text.hpp"

namespace spanprobe {

/// Character extent of a located MWE. Offsets count code points of the
/// target sentence; `distance` is the Levenshtein cost against the
/// case-folded MWE and `normalized_distance` divides it by the MWE length.
struct CharSpan {
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  int distance = 0;
  double normalized_distance = 0.0;
};

/// Word-index extent of the located span, 0-based and inclusive.
struct WordSpan {
  int first_word = 0;
  int last_word = 0;
  int word_count = 1;
};

/// Levenshtein distance over code points with unit costs.
int edit_distance(std::u32string_view a, std::u32string_view b);
int edit_distance_utf8(std::string_view a, std::string_view b);

struct LocateOptions {
  /// Candidate substrings start and end on word boundaries. By default
  /// every word window is scored, which matches the exhaustive minimum
  /// exactly; a slack value restricts windows to word counts within
  /// +/- slack of the MWE's word count as a speedup.
  std::optional<int> word_count_slack;
};

/// Best word-boundary substring plus whether it clears the threshold.
struct LocateResult {
  bool found = false;
  CharSpan best;
};

class MweNotFound : public std::runtime_error {
 public:
  MweNotFound(const std::string& message, CharSpan best_candidate)
      : std::runtime_error(message), best(best_candidate) {}
  /// Closest candidate, kept for diagnostics.
  CharSpan best;
};

/// Scan word-boundary substrings of `sentence` for the one closest to the
/// case-folded `mwe` in character edit distance. Ties break on smaller
/// start offset, then shorter span. `found` holds when the normalized
/// distance is at most `max_norm_distance`.
LocateResult try_locate_mwe(std::string_view mwe, std::string_view sentence,
                            double max_norm_distance, const LocateOptions& options = {});

/// As try_locate_mwe, but throws MweNotFound when the threshold is missed.
CharSpan locate_mwe(std::string_view mwe, std::string_view sentence, double max_norm_distance,
                    const LocateOptions& options = {});

/// Smallest word interval whose character extent contains the span.
WordSpan char_span_to_word_span(const CharSpan& span, const std::vector<text::Word>& words);

}  // namespace spanprobe
