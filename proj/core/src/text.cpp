#include "spanprobe/text.hpp"

#include <array>

#include "spanprobe/errors.hpp"

namespace spanprobe::text {

namespace {

[[noreturn]] void bad_utf8(std::size_t byte_pos) {
  throw ValidationError("invalid UTF-8 at byte " + std::to_string(byte_pos));
}

}  // namespace

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      bad_utf8(i);
    }
    if (i + len > utf8.size()) bad_utf8(i);
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(utf8[i + k]);
      if ((b & 0xC0) != 0x80) bad_utf8(i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms and surrogates.
    static constexpr std::array<char32_t, 5> min_cp = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < min_cp[len]) bad_utf8(i);
    if (cp >= 0xD800 && cp <= 0xDFFF) bad_utf8(i);
    if (cp > 0x10FFFF) bad_utf8(i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t cp : code_points) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

char32_t fold_char(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  // Latin-1 Supplement uppercase block, skipping the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  // Latin Extended-A: case pairs alternate.
  if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
  if (cp == 0x17F) return U's';  // long s
  return cp;
}

std::u32string fold(std::u32string_view code_points) {
  std::u32string out;
  out.reserve(code_points.size());
  for (char32_t cp : code_points) out.push_back(fold_char(cp));
  return out;
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
         cp == U'\f' || cp == 0xA0;
}

std::vector<Word> split_words(std::u32string_view sentence) {
  std::vector<Word> words;
  const int n = static_cast<int>(sentence.size());
  int i = 0;
  while (i < n) {
    while (i < n && is_space(sentence[static_cast<std::size_t>(i)])) ++i;
    if (i >= n) break;
    const int begin = i;
    while (i < n && !is_space(sentence[static_cast<std::size_t>(i)])) ++i;
    Word w;
    w.begin = begin;
    w.end = i;
    w.utf8 = encode_utf8(sentence.substr(static_cast<std::size_t>(begin),
                                         static_cast<std::size_t>(i - begin)));
    words.push_back(std::move(w));
  }
  return words;
}

std::vector<Word> split_words_utf8(std::string_view sentence) {
  return split_words(decode_utf8(sentence));
}

std::string_view trim(std::string_view s) {
  const auto is_ascii_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_ascii_ws(s[b])) ++b;
  while (e > b && is_ascii_ws(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace spanprobe::text
