#include "spanprobe/span_locator.hpp"

#include <algorithm>
#include <cassert>
#include <tuple>

namespace spanprobe {

int edit_distance(std::u32string_view a, std::u32string_view b) {
  const std::size_t len_a = a.size();
  const std::size_t len_b = b.size();
  if (len_a == 0) return static_cast<int>(len_b);
  if (len_b == 0) return static_cast<int>(len_a);

  std::vector<int> prev(len_b + 1);
  std::vector<int> curr(len_b + 1);
  for (std::size_t j = 0; j <= len_b; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 0; i < len_a; ++i) {
    curr[0] = static_cast<int>(i) + 1;
    for (std::size_t j = 0; j < len_b; ++j) {
      const int deletion = prev[j + 1] + 1;
      const int insertion = curr[j] + 1;
      const int substitution = prev[j] + (a[i] == b[j] ? 0 : 1);
      curr[j + 1] = std::min({deletion, insertion, substitution});
    }
    std::swap(prev, curr);
  }
  return prev[len_b];
}

int edit_distance_utf8(std::string_view a, std::string_view b) {
  return edit_distance(text::decode_utf8(a), text::decode_utf8(b));
}

LocateResult try_locate_mwe(std::string_view mwe, std::string_view sentence,
                            double max_norm_distance, const LocateOptions& options) {
  if (mwe.empty()) throw ValidationError("locate_mwe: empty MWE");
  if (sentence.empty()) throw ValidationError("locate_mwe: empty sentence");

  const std::u32string folded_mwe = text::fold(text::decode_utf8(mwe));
  const std::u32string sentence_cps = text::decode_utf8(sentence);
  const std::u32string folded_sentence = text::fold(sentence_cps);
  const std::vector<text::Word> words = text::split_words(sentence_cps);

  const int mwe_len = static_cast<int>(folded_mwe.size());
  const auto normalize = [&](int distance) {
    return static_cast<double>(distance) / static_cast<double>(std::max(mwe_len, 1));
  };

  if (words.empty()) {
    // Whitespace-only sentence: no word-boundary candidates exist. Report
    // the whole sentence as the (failing) best candidate.
    CharSpan best;
    best.start = 0;
    best.end = static_cast<int>(folded_sentence.size());
    best.distance = edit_distance(folded_mwe, folded_sentence);
    best.normalized_distance = normalize(best.distance);
    return LocateResult{false, best};
  }

  int window_lo = 1;
  int window_hi = static_cast<int>(words.size());
  if (options.word_count_slack.has_value()) {
    const int mwe_words = static_cast<int>(text::split_words(folded_mwe).size());
    window_lo = std::max(1, mwe_words - *options.word_count_slack);
    window_hi = mwe_words + *options.word_count_slack;
  }

  bool have_best = false;
  CharSpan best;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (int count = window_lo; count <= window_hi; ++count) {
      const std::size_t j = i + static_cast<std::size_t>(count) - 1;
      if (j >= words.size()) break;
      const int start = words[i].begin;
      const int end = words[j].end;
      const std::u32string_view candidate =
          std::u32string_view(folded_sentence)
              .substr(static_cast<std::size_t>(start), static_cast<std::size_t>(end - start));
      const int distance = edit_distance(folded_mwe, candidate);
      const auto key = std::make_tuple(distance, start, end - start);
      const auto best_key = std::make_tuple(best.distance, best.start, best.end - best.start);
      if (!have_best || key < best_key) {
        best.start = start;
        best.end = end;
        best.distance = distance;
        best.normalized_distance = normalize(distance);
        have_best = true;
      }
    }
  }
  assert(have_best);
  return LocateResult{best.normalized_distance <= max_norm_distance, best};
}

CharSpan locate_mwe(std::string_view mwe, std::string_view sentence, double max_norm_distance,
                    const LocateOptions& options) {
  const LocateResult result = try_locate_mwe(mwe, sentence, max_norm_distance, options);
  if (!result.found) {
    throw MweNotFound("MWE \"" + std::string(mwe) + "\" not found within threshold " +
                          std::to_string(max_norm_distance) + "; best candidate at [" +
                          std::to_string(result.best.start) + ", " +
                          std::to_string(result.best.end) + ") has normalized distance " +
                          std::to_string(result.best.normalized_distance),
                      result.best);
  }
  return result.best;
}

WordSpan char_span_to_word_span(const CharSpan& span, const std::vector<text::Word>& words) {
  int first = -1;
  int last = -1;
  for (std::size_t w = 0; w < words.size(); ++w) {
    // Word overlaps the span's character extent.
    if (words[w].end > span.start && words[w].begin < span.end) {
      if (first < 0) first = static_cast<int>(w);
      last = static_cast<int>(w);
    }
  }
  // Preconditions guarantee the span covers at least one word.
  assert(first >= 0);
  if (first < 0) {
    throw ValidationError("char_span_to_word_span: span covers no word");
  }
  return WordSpan{first, last, last - first + 1};
}

}  // namespace spanprobe
