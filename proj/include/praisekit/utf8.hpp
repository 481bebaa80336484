#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "praisekit/error.hpp"

namespace praisekit::utf8 {

// Minimal UTF-8 handling. All public offsets in this library are Unicode
// scalar (code point) indices, not bytes, so datasets stay portable across
// implementations.

/// Decodes the code point starting at byte `pos`, advancing `pos` past it.
/// Malformed sequences throw ValidationError.
inline char32_t decode_next(std::string_view s, std::size_t& pos) {
  const auto fail = [&] {
    throw ValidationError("invalid UTF-8 at byte " + std::to_string(pos));
  };
  const unsigned char b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    fail();
  }
  if (pos + len > s.size()) fail();
  for (int i = 1; i < len; ++i) {
    const unsigned char b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) fail();
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong encodings and surrogates.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
      cp > 0x10FFFF) {
    fail();
  }
  pos += len;
  return cp;
}

/// Number of code points in a UTF-8 string.
inline std::size_t length(std::string_view s) {
  std::size_t pos = 0, n = 0;
  while (pos < s.size()) {
    decode_next(s, pos);
    ++n;
  }
  return n;
}

/// Byte offset of code point index `cp_index` (== s.size() when at end).
inline std::size_t byte_offset(std::string_view s, std::size_t cp_index) {
  std::size_t pos = 0, n = 0;
  while (n < cp_index && pos < s.size()) {
    decode_next(s, pos);
    ++n;
  }
  if (n < cp_index)
    throw ValidationError("code point index " + std::to_string(cp_index) +
                          " past end of text");
  return pos;
}

/// Substring by code point range [cp_start, cp_end).
inline std::string substr(std::string_view s, std::size_t cp_start,
                          std::size_t cp_end) {
  const std::size_t b0 = byte_offset(s, cp_start);
  const std::size_t b1 = byte_offset(s, cp_end);
  return std::string(s.substr(b0, b1 - b0));
}

inline bool is_whitespace(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\v' || cp == U'\f' || cp == 0xA0;
}

inline bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

/// Word characters: ASCII letters/digits, plus any code point above U+007F
/// that is not in the General Punctuation block (U+2000..U+206F). Keeps
/// accented words whole without dragging in curly quotes and dashes.
inline bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'0' && cp <= U'9') || (cp >= U'A' && cp <= U'Z') ||
           (cp >= U'a' && cp <= U'z');
  }
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  return !is_whitespace(cp);
}

inline std::string trim(std::string_view s) {
  const auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  };
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

/// ASCII-only lowercasing; non-ASCII passes through unchanged. Used for all
/// case-insensitive comparisons in the toolkit.
inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char ca = a[i], cb = b[i];
    if (ca >= 'A' && ca <= 'Z') ca = static_cast<char>(ca - 'A' + 'a');
    if (cb >= 'A' && cb <= 'Z') cb = static_cast<char>(cb - 'A' + 'a');
    if (ca != cb) return false;
  }
  return true;
}

}  // namespace praisekit::utf8
