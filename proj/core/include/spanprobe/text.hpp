#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spanprobe::text {

/// Decode UTF-8 into code points. Throws ValidationError on malformed input.
std::u32string decode_utf8(std::string_view utf8);

std::string encode_utf8(std::u32string_view code_points);

/// Simple (1:1) case folding covering ASCII, Latin-1 Supplement and Latin
/// Extended-A — enough for the three task languages. Code points outside
/// those ranges are returned unchanged. Length-preserving, so character
/// offsets computed on folded text are valid for the original.
char32_t fold_char(char32_t cp);

std::u32string fold(std::u32string_view code_points);

/// Whitespace for word splitting: ASCII space/tab/newline family plus NBSP.
bool is_space(char32_t cp);

/// A whitespace-delimited word with its character (code point) extent.
struct Word {
  std::string utf8;
  int begin = 0;  // inclusive code-point offset in the sentence
  int end = 0;    // exclusive
};

std::vector<Word> split_words(std::u32string_view sentence);
std::vector<Word> split_words_utf8(std::string_view sentence);

/// Trim ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace spanprobe::text
