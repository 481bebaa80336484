#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "praisekit/corpus.hpp"
#include "praisekit/error.hpp"
#include "praisekit/provider.hpp"
#include "praisekit/rng.hpp"
#include "praisekit/utf8.hpp"

namespace praisekit {

/// A maximal run of same-tag tokens within one response.
struct Segment {
  Tag tag;
  std::string text;
  std::size_t first_token = 0;
  std::size_t last_token = 0;

  std::size_t token_count() const { return last_token - first_token + 1; }
};

/// Rewrites available for one segment; index 0 is always the original text.
struct VariantSet {
  std::size_t segment_index = 0;
  std::vector<std::string> variants;
};

struct AugmentPlan {
  std::size_t multiplier = 1;
  std::size_t n_synonyms = 15;
  double temperature = 0.0;
  std::uint64_t seed = 0;
};

/// Splits a tagged response into its constituent components, one segment per
/// maximal tag run, covering all tokens in order.
inline std::vector<Segment> decompose(const TaggedResponse& tr) {
  std::vector<Segment> out;
  std::size_t i = 0;
  const std::size_t n = tr.tokens.size();
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && tr.tags[j + 1] == tr.tags[i]) ++j;
    Segment s;
    s.tag = tr.tags[i];
    s.first_token = i;
    s.last_token = j;
    s.text = utf8::substr(tr.text, tr.tokens[i].start, tr.tokens[j].end);
    out.push_back(std::move(s));
    i = j + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rewrite prompt
// ---------------------------------------------------------------------------

inline constexpr const char* kRewriteSystemPrompt =
    "You are required to rephrase the text in English through synonym "
    "replacement, ensuring the original context and meaning are preserved.";

inline std::string rewrite_user_prompt(const std::string& text,
                                       std::size_t n_synonyms) {
  return "Please note that the sentence structure and format must be "
         "preserved, with synonyms used only where they maintain the "
         "original meaning. Retain words and ideas from the original "
         "response in English. Maintain similar lengths to the original "
         "text. Please generate " +
         std::to_string(n_synonyms) +
         " unique sentences in English by applying synonym replacements to "
         "the text provided below. One item per line, do not include "
         "numbers or bullet points. Here is the text: " +
         text;
}

inline CompletionRequest build_rewrite_request(const std::string& text,
                                               std::size_t n_synonyms,
                                               double temperature,
                                               const std::string& model = "") {
  CompletionRequest req;
  req.model = model;
  req.temperature = temperature;
  req.messages = {{Role::system, kRewriteSystemPrompt},
                  {Role::user, rewrite_user_prompt(text, n_synonyms)}};
  return req;
}

// ---------------------------------------------------------------------------
// Sanitization
// ---------------------------------------------------------------------------

namespace detail {

using utf8::trim;

inline bool strip_enumeration_marker(std::string& s) {
  const std::string t = trim(s);
  std::size_t i = 0;
  if (i < t.size() && t[i] >= '0' && t[i] <= '9') {
    while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i;
    if (i < t.size() && (t[i] == '.' || t[i] == ')')) {
      s = trim(t.substr(i + 1));
      return true;
    }
    return false;
  }
  for (const char* bullet : {"\xE2\x80\xA2", "\xE2\x80\x93", "\xE2\x80\x94"}) {
    const std::string_view b(bullet);
    if (t.size() > b.size() && t.compare(0, b.size(), b) == 0) {
      s = trim(t.substr(b.size()));
      return true;
    }
  }
  if (t.size() > 1 && (t[0] == '-' || t[0] == '*') &&
      (t[1] == ' ' || t[1] == '\t')) {
    s = trim(t.substr(1));
    return true;
  }
  return false;
}

inline bool has_meta_prefix(const std::string& s) {
  static const std::vector<std::string> prefixes = {"sure", "here is",
                                                    "here are", "certainly"};
  const std::string low = utf8::to_lower(s);
  for (const std::string& p : prefixes) {
    if (low.size() < p.size() || low.compare(0, p.size(), p) != 0) continue;
    if (low.size() == p.size()) return true;
    const char next = low[p.size()];
    if (next < 'a' || next > 'z') return true;  // word boundary
  }
  return false;
}

inline bool strip_wrapping_quotes(std::string& s) {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"\"", "\""},
      {"'", "'"},
      {"\xE2\x80\x9C", "\xE2\x80\x9D"},   // curly double quotes
      {"\xE2\x80\x98", "\xE2\x80\x99"}};  // curly single quotes
  for (const auto& [open, close] : pairs) {
    if (s.size() > open.size() + close.size() &&
        s.compare(0, open.size(), open) == 0 &&
        s.compare(s.size() - close.size(), close.size(), close) == 0) {
      s = trim(s.substr(open.size(), s.size() - open.size() - close.size()));
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Cleans one raw provider line: trims, strips enumeration markers, removes
/// meta chatter ("Sure, here is ...:") up to the first colon (dropping pure
/// meta lines entirely), and unwraps quotes. Runs to a fixed point, so
/// sanitizing an already-clean line is the identity.
inline std::optional<std::string> sanitize_line(const std::string& raw) {
  std::string s = detail::trim(raw);
  for (int iter = 0; iter < 16; ++iter) {
    const std::string before = s;
    while (detail::strip_enumeration_marker(s)) {
    }
    if (detail::has_meta_prefix(s)) {
      const std::size_t colon = s.find(':');
      if (colon == std::string::npos) return std::nullopt;
      s = detail::trim(s.substr(colon + 1));
    }
    while (detail::strip_wrapping_quotes(s)) {
    }
    if (s == before) break;
  }
  if (s.empty()) return std::nullopt;
  return s;
}

/// Sanitizes a full line list: per-line cleanup, case-insensitive dedupe
/// (first occurrence wins), truncation to n_synonyms.
inline std::vector<std::string> sanitize_variant_lines(
    const std::vector<std::string>& lines, std::size_t n_synonyms) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const std::string& raw : lines) {
    const auto cleaned = sanitize_line(raw);
    if (!cleaned) continue;
    if (!seen.insert(utf8::to_lower(*cleaned)).second) continue;
    out.push_back(*cleaned);
    if (out.size() == n_synonyms) break;
  }
  return out;
}

inline std::vector<std::string> split_lines(const std::string& raw) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : raw) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

// ---------------------------------------------------------------------------
// Variant generation
// ---------------------------------------------------------------------------

/// Fetches sanitized rewrites for a segment. O segments shorter than two
/// tokens are not worth a provider call and degenerate to {original}; so do
/// segments whose rewrites all sanitize away (with a warning).
inline VariantSet generate_variants(const Segment& segment,
                                    std::size_t segment_index,
                                    CompletionProvider& provider,
                                    const AugmentPlan& plan,
                                    std::vector<std::string>* warnings = nullptr) {
  VariantSet vs;
  vs.segment_index = segment_index;
  vs.variants.push_back(segment.text);
  if (!segment.tag && segment.token_count() < 2) return vs;

  const std::string raw = provider.complete(
      build_rewrite_request(segment.text, plan.n_synonyms, plan.temperature));
  std::vector<std::string> cleaned =
      sanitize_variant_lines(split_lines(raw), plan.n_synonyms);
  const std::string original_lower = utf8::to_lower(segment.text);
  cleaned.erase(std::remove_if(cleaned.begin(), cleaned.end(),
                               [&](const std::string& v) {
                                 return utf8::to_lower(v) == original_lower;
                               }),
                cleaned.end());
  if (cleaned.empty() && warnings != nullptr) {
    warnings->push_back("segment '" + segment.text +
                        "' produced no usable rewrites; keeping original only");
  }
  for (std::string& v : cleaned) vs.variants.push_back(std::move(v));
  return vs;
}

// ---------------------------------------------------------------------------
// Recombination
// ---------------------------------------------------------------------------

/// Draws `count` synthetic responses by picking one variant per segment
/// uniformly at random. Segments are joined with single spaces unless the
/// next variant begins with punctuation (apostrophes still get a space so
/// tokens cannot merge across segments). Tokens of a chosen variant inherit
/// the segment's tag. Outputs are deduplicated against each other and the
/// original unless the variant pool is too small, in which case duplicates
/// are permitted and a warning is attached.
inline std::vector<LabeledResponse> recombine(
    const std::vector<Segment>& segments,
    const std::vector<VariantSet>& variant_sets, std::size_t count,
    std::uint64_t seed, std::vector<std::string>* warnings = nullptr,
    const std::vector<std::string>& dedup_against = {}) {
  if (segments.size() != variant_sets.size()) {
    throw Error("recombine: one VariantSet per segment required");
  }
  std::vector<LabeledResponse> out;
  if (count == 0) return out;

  const auto build = [&](const std::vector<std::size_t>& combo) {
    LabeledResponse r;
    std::size_t cp_len = 0;
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const std::string& v = variant_sets[k].variants[combo[k]];
      if (v.empty()) continue;
      if (!r.text.empty()) {
        std::size_t pos = 0;
        const char32_t first = utf8::decode_next(v, pos);
        if (utf8::is_word_char(first) || utf8::is_apostrophe(first)) {
          r.text += ' ';
          ++cp_len;
        }
      }
      const std::size_t start = cp_len;
      r.text += v;
      cp_len += utf8::length(v);
      if (segments[k].tag) r.spans.push_back({*segments[k].tag, start, cp_len});
    }
    return r;
  };

  // Usable pool: every combination except the all-original one.
  std::size_t pool = 1;
  for (const VariantSet& vs : variant_sets) {
    if (vs.variants.empty()) throw Error("recombine: empty VariantSet");
    if (pool > (std::size_t(1) << 40)) break;  // saturate, plenty already
    pool *= vs.variants.size();
  }
  bool allow_duplicates = pool - 1 < count;
  if (allow_duplicates && warnings != nullptr) {
    warnings->push_back("variant pool exhausted (" + std::to_string(pool - 1) +
                        " usable combinations < " + std::to_string(count) +
                        " requested); permitting duplicates");
  }

  std::set<std::string> seen;
  const std::vector<std::size_t> zeros(segments.size(), 0);
  seen.insert(build(zeros).text);
  for (const std::string& t : dedup_against) seen.insert(t);

  Rng rng(seed);
  std::vector<std::size_t> combo(segments.size(), 0);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 200 * count + 1000;
  while (out.size() < count) {
    for (std::size_t k = 0; k < combo.size(); ++k) {
      combo[k] = static_cast<std::size_t>(
          rng.bounded(variant_sets[k].variants.size()));
    }
    LabeledResponse r = build(combo);
    ++attempts;
    if (!allow_duplicates) {
      if (seen.count(r.text) > 0) {
        if (attempts >= max_attempts) {
          allow_duplicates = true;
          if (warnings != nullptr) {
            warnings->push_back(
                "recombination could not find enough distinct texts; "
                "permitting duplicates");
          }
        }
        continue;
      }
      seen.insert(r.text);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset augmentation
// ---------------------------------------------------------------------------

/// Expands a dataset to multiplier * |d| records: all originals plus
/// (multiplier - 1) synthetic rewrites per source, interleaved round-robin
/// across sources. Synthetic ids are "<source id>#aug<ordinal>". Provider
/// calls are cached by (segment text, n_synonyms, temperature) and may be
/// issued by up to `parallelism` threads; results are applied in segment
/// order, so the output is a pure function of (dataset, plan, provider).
inline Dataset augment_dataset(const Dataset& d, const AugmentPlan& plan,
                               CompletionProvider& provider,
                               std::vector<std::string>* warnings = nullptr,
                               std::size_t parallelism = 1) {
  if (plan.multiplier < 1) throw Error("augment: multiplier must be >= 1");
  if (plan.n_synonyms < 1) throw Error("augment: n_synonyms must be >= 1");

  Dataset out;
  out.scheme = d.scheme;
  out.records = d.records;
  if (plan.multiplier == 1) return out;

  struct SourceParts {
    std::vector<Segment> segments;
  };
  std::vector<SourceParts> parts(d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    parts[i].segments = decompose(spans_to_tags(d.records[i]));
  }

  // One provider call per distinct rewritable segment text.
  std::vector<const Segment*> to_fetch;
  std::set<std::string> fetch_seen;
  for (const SourceParts& sp : parts) {
    for (const Segment& s : sp.segments) {
      if (!s.tag && s.token_count() < 2) continue;
      if (fetch_seen.insert(s.text).second) to_fetch.push_back(&s);
    }
  }

  std::map<std::string, std::vector<std::string>> cache;
  std::mutex cache_mutex, warn_mutex;
  std::atomic<std::size_t> next_index{0}, completed{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next_index.fetch_add(1);
      if (i >= to_fetch.size()) return;
      {
        std::lock_guard<std::mutex> lk(failure_mutex);
        if (failure) return;
      }
      try {
        std::vector<std::string> local_warnings;
        VariantSet vs =
            generate_variants(*to_fetch[i], 0, provider, plan, &local_warnings);
        {
          std::lock_guard<std::mutex> lk(cache_mutex);
          cache[to_fetch[i]->text] = std::move(vs.variants);
        }
        if (!local_warnings.empty() && warnings != nullptr) {
          std::lock_guard<std::mutex> lk(warn_mutex);
          warnings->insert(warnings->end(), local_warnings.begin(),
                           local_warnings.end());
        }
        ++completed;
      } catch (...) {
        std::lock_guard<std::mutex> lk(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(parallelism, to_fetch.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const ProviderError& e) {
      throw ProviderError("augmentation aborted after " +
                          std::to_string(completed.load()) + "/" +
                          std::to_string(to_fetch.size()) +
                          " provider calls: " + e.what());
    }
  }

  // Recombine per source, then interleave one synthetic per source per round.
  std::vector<std::vector<LabeledResponse>> synths(d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const LabeledResponse& r = d.records[i];
    std::vector<VariantSet> vsets;
    for (std::size_t k = 0; k < parts[i].segments.size(); ++k) {
      const Segment& s = parts[i].segments[k];
      VariantSet vs;
      vs.segment_index = k;
      if (!s.tag && s.token_count() < 2) {
        vs.variants = {s.text};
      } else {
        vs.variants = cache.at(s.text);
      }
      vsets.push_back(std::move(vs));
    }
    synths[i] = recombine(parts[i].segments, vsets, plan.multiplier - 1,
                          derive_seed(plan.seed, r.id), warnings, {r.text});
    for (std::size_t j = 0; j < synths[i].size(); ++j) {
      synths[i][j].id = r.id + "#aug" + std::to_string(j + 1);
    }
  }
  for (std::size_t j = 0; j + 1 < plan.multiplier; ++j) {
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      out.records.push_back(std::move(synths[i][j]));
    }
  }
  return out;
}

}  // namespace praisekit
