#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "praisekit/error.hpp"
#include "praisekit/rng.hpp"
#include "praisekit/utf8.hpp"

namespace praisekit {

/// The three praise categories used for span labels. A dataset declares
/// which subset of them (its scheme) is active.
enum class PraiseLabel { Effort, Outcome, Person };

inline constexpr PraiseLabel kAllLabels[] = {
    PraiseLabel::Effort, PraiseLabel::Outcome, PraiseLabel::Person};

inline std::string label_name(PraiseLabel l) {
  switch (l) {
    case PraiseLabel::Effort:
      return "effort";
    case PraiseLabel::Outcome:
      return "outcome";
    case PraiseLabel::Person:
      return "person";
  }
  return "?";
}

inline std::optional<PraiseLabel> parse_label(std::string_view s) {
  if (s == "effort") return PraiseLabel::Effort;
  if (s == "outcome") return PraiseLabel::Outcome;
  if (s == "person") return PraiseLabel::Person;
  return std::nullopt;
}

/// Label scheme of a dataset, kept sorted and duplicate-free.
using Scheme = std::vector<PraiseLabel>;

inline Scheme make_scheme(std::initializer_list<PraiseLabel> ls) {
  Scheme s(ls);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline Scheme scheme_effort_outcome() {
  return make_scheme({PraiseLabel::Effort, PraiseLabel::Outcome});
}
inline Scheme scheme_person() { return make_scheme({PraiseLabel::Person}); }

inline bool scheme_contains(const Scheme& s, PraiseLabel l) {
  return std::find(s.begin(), s.end(), l) != s.end();
}

/// A labeled character range. Offsets are code point indices into the
/// owning response text, start inclusive, end exclusive.
struct PraiseSpan {
  PraiseLabel label{};
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const PraiseSpan&) const = default;
};

struct Token {
  std::string text;
  std::size_t start = 0;  // code point offsets into the owning text
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

struct LabeledResponse {
  std::string id;
  std::string text;
  std::vector<PraiseSpan> spans;
};

/// IO tag: a praise label or O (nullopt).
using Tag = std::optional<PraiseLabel>;

inline std::string tag_name(const Tag& t) {
  return t ? "I_" + label_name(*t) : "O";
}

/// Tokenization of one response with an IO tag per token. This is the unit
/// all metric computation operates on.
struct TaggedResponse {
  std::string text;
  std::vector<Token> tokens;
  std::vector<Tag> tags;
};

struct Dataset {
  Scheme scheme;
  std::vector<LabeledResponse> records;

  std::size_t size() const { return records.size(); }
};

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

/// Splits text into tokens: maximal runs of word characters (apostrophes
/// allowed word-internally) plus one token per remaining non-whitespace
/// character. Whitespace is skipped. Offsets are code point indices.
inline std::vector<Token> tokenize(std::string_view text) {
  struct Cp {
    char32_t cp;
    std::size_t byte_pos;
  };
  std::vector<Cp> cps;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t at = pos;
      cps.push_back({utf8::decode_next(text, pos), at});
    }
  }
  const auto slice = [&](std::size_t i, std::size_t j) {
    const std::size_t b0 = cps[i].byte_pos;
    const std::size_t b1 = j < cps.size() ? cps[j].byte_pos : text.size();
    return std::string(text.substr(b0, b1 - b0));
  };

  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    const char32_t c = cps[i].cp;
    if (utf8::is_whitespace(c)) {
      ++i;
      continue;
    }
    if (utf8::is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < n) {
        if (utf8::is_word_char(cps[j].cp)) {
          ++j;
        } else if (utf8::is_apostrophe(cps[j].cp) && j + 1 < n &&
                   utf8::is_word_char(cps[j + 1].cp)) {
          j += 2;  // word-internal apostrophe plus the following word char
        } else {
          break;
        }
      }
      out.push_back({slice(i, j), i, j});
      i = j;
    } else {
      out.push_back({slice(i, i + 1), i, i + 1});
      ++i;
    }
  }
  return out;
}

/// Reassembles token texts into a sentence: single spaces between tokens,
/// none before a token that starts with punctuation ("Hey" "," -> "Hey,").
inline std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (const std::string& t : toks) {
    if (t.empty()) continue;
    if (!out.empty()) {
      std::size_t pos = 0;
      const char32_t first = utf8::decode_next(t, pos);
      if (utf8::is_word_char(first)) out += ' ';
    }
    out += t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// IO tagging
// ---------------------------------------------------------------------------

/// Tags every token fully inside a span with that span's label, everything
/// else O. Span edges must coincide with token boundaries.
inline TaggedResponse spans_to_tags(const LabeledResponse& r) {
  TaggedResponse tr;
  tr.text = r.text;
  tr.tokens = tokenize(r.text);
  tr.tags.assign(tr.tokens.size(), std::nullopt);

  std::vector<PraiseSpan> spans = r.spans;
  std::sort(spans.begin(), spans.end(),
            [](const PraiseSpan& a, const PraiseSpan& b) {
              return a.start < b.start;
            });
  for (std::size_t k = 1; k < spans.size(); ++k) {
    if (spans[k].start < spans[k - 1].end) {
      throw OverlappingSpans("response '" + r.id + "': spans [" +
                             std::to_string(spans[k - 1].start) + "," +
                             std::to_string(spans[k - 1].end) + ") and [" +
                             std::to_string(spans[k].start) + "," +
                             std::to_string(spans[k].end) + ") overlap");
    }
  }

  for (const PraiseSpan& sp : spans) {
    std::size_t first = tr.tokens.size(), last = 0;
    bool any = false;
    for (std::size_t t = 0; t < tr.tokens.size(); ++t) {
      const Token& tok = tr.tokens[t];
      const bool straddles_start = tok.start < sp.start && sp.start < tok.end;
      const bool straddles_end = tok.start < sp.end && sp.end < tok.end;
      if (straddles_start || straddles_end) {
        throw MisalignedSpan("response '" + r.id + "': span edge at " +
                             std::to_string(straddles_start ? sp.start
                                                            : sp.end) +
                             " splits token '" + tok.text + "'");
      }
      if (tok.start >= sp.start && tok.end <= sp.end) {
        first = std::min(first, t);
        last = std::max(last, t);
        any = true;
      }
    }
    if (!any || tr.tokens[first].start != sp.start ||
        tr.tokens[last].end != sp.end) {
      throw MisalignedSpan("response '" + r.id + "': span [" +
                           std::to_string(sp.start) + "," +
                           std::to_string(sp.end) +
                           ") does not start and end on token boundaries");
    }
    for (std::size_t t = first; t <= last; ++t) tr.tags[t] = sp.label;
  }
  return tr;
}

/// Inverse of spans_to_tags: one span per maximal run of identical non-O
/// tags, covering [first token start, last token end).
inline std::vector<PraiseSpan> tags_to_spans(const TaggedResponse& tr) {
  std::vector<PraiseSpan> out;
  std::size_t i = 0;
  const std::size_t n = tr.tags.size();
  while (i < n) {
    if (!tr.tags[i]) {
      ++i;
      continue;
    }
    const PraiseLabel l = *tr.tags[i];
    std::size_t j = i;
    while (j + 1 < n && tr.tags[j + 1] && *tr.tags[j + 1] == l) ++j;
    out.push_back({l, tr.tokens[i].start, tr.tokens[j].end});
    i = j + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Checks all record-level invariants, throwing ValidationError (or the more
/// specific span errors) naming the offending record id. Also rejects
/// same-label spans with no token between them, which the IO scheme cannot
/// represent as two spans.
inline void validate_record(const LabeledResponse& r, const Scheme& scheme) {
  const std::size_t len = utf8::length(r.text);
  for (const PraiseSpan& sp : r.spans) {
    if (!scheme_contains(scheme, sp.label)) {
      throw ValidationError("response '" + r.id + "': label '" +
                            label_name(sp.label) +
                            "' is not in the dataset scheme");
    }
    if (sp.start >= sp.end || sp.end > len) {
      throw ValidationError("response '" + r.id + "': span offsets [" +
                            std::to_string(sp.start) + "," +
                            std::to_string(sp.end) +
                            ") out of range for text of length " +
                            std::to_string(len));
    }
  }
  TaggedResponse tagged = spans_to_tags(r);  // overlap + alignment checks
  // Canonical form: the IO round trip must reproduce the spans.
  std::vector<PraiseSpan> sorted = r.spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const PraiseSpan& a, const PraiseSpan& b) {
              return a.start < b.start;
            });
  if (tags_to_spans(tagged) != sorted) {
    throw ValidationError("response '" + r.id +
                          "': adjacent same-label spans are not "
                          "representable in the IO scheme; merge them");
  }
}

inline void validate_dataset(const Dataset& d) {
  std::set<std::string> ids;
  for (const LabeledResponse& r : d.records) {
    if (!ids.insert(r.id).second) {
      throw ValidationError("duplicate record id '" + r.id + "'");
    }
    validate_record(r, d.scheme);
  }
}

// ---------------------------------------------------------------------------
// Splitting and subsetting
// ---------------------------------------------------------------------------

/// Seeded shuffle, then prefix split into (train, rest). Pure function of
/// (record order, seed, train_count).
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& d,
                                                 std::uint64_t seed,
                                                 std::size_t train_count) {
  if (train_count > d.records.size()) {
    throw CountOutOfRange("train_count " + std::to_string(train_count) +
                          " exceeds dataset size " +
                          std::to_string(d.records.size()));
  }
  std::vector<std::size_t> order(d.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  Dataset train{d.scheme, {}}, rest{d.scheme, {}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_count ? train : rest).records.push_back(d.records[order[i]]);
  }
  return {std::move(train), std::move(rest)};
}

/// Seeded sample of n records without replacement.
inline Dataset subset(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n > d.records.size()) {
    throw CountOutOfRange("subset size " + std::to_string(n) +
                          " exceeds dataset size " +
                          std::to_string(d.records.size()));
  }
  return split_dataset(d, seed, n).first;
}

// ---------------------------------------------------------------------------
// Span length statistics
// ---------------------------------------------------------------------------

struct SpanLengthStats {
  std::map<std::size_t, std::size_t> histogram;  // token length -> count
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n-1); 0 when count < 2
};

/// Token-length histogram and moments for all spans of one label.
inline SpanLengthStats span_length_stats(const Dataset& d, PraiseLabel label) {
  SpanLengthStats st;
  double sum = 0.0, sumsq = 0.0;
  for (const LabeledResponse& r : d.records) {
    const std::vector<Token> toks = tokenize(r.text);
    for (const PraiseSpan& sp : r.spans) {
      if (sp.label != label) continue;
      std::size_t len = 0;
      for (const Token& t : toks) {
        if (t.start >= sp.start && t.end <= sp.end) ++len;
      }
      ++st.histogram[len];
      ++st.count;
      sum += static_cast<double>(len);
      sumsq += static_cast<double>(len) * static_cast<double>(len);
    }
  }
  if (st.count > 0) {
    const double n = static_cast<double>(st.count);
    st.mean = sum / n;
    if (st.count > 1) st.variance = (sumsq - sum * sum / n) / (n - 1.0);
  }
  return st;
}

}  // namespace praisekit
