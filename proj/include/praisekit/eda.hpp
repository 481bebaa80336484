#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "praisekit/corpus.hpp"
#include "praisekit/error.hpp"
#include "praisekit/rng.hpp"
#include "praisekit/utf8.hpp"

namespace praisekit {

/// Word -> synonyms table for the traditional augmentation baseline.
/// File format: UTF-8 TSV, one row per headword: `word<TAB>syn1|syn2|...`.
/// Lookup is case-insensitive.
struct SynonymLexicon {
  std::map<std::string, std::vector<std::string>> entries;  // lowercased keys

  const std::vector<std::string>* find(const std::string& word) const {
    const auto it = entries.find(utf8::to_lower(word));
    return it == entries.end() ? nullptr : &it->second;
  }

  bool empty() const { return entries.empty(); }
};

inline SynonymLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon file '" + path + "'");
  SynonymLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const std::string word = utf8::to_lower(line.substr(0, tab));
    std::vector<std::string> syns;
    std::string syn;
    for (char c : line.substr(tab + 1)) {
      if (c == '|') {
        if (!syn.empty()) syns.push_back(syn);
        syn.clear();
      } else {
        syn += c;
      }
    }
    if (!syn.empty()) syns.push_back(syn);
    if (!word.empty() && !syns.empty()) lex.entries[word] = std::move(syns);
  }
  return lex;
}

/// One word per line; blank lines and #-comments ignored.
inline std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stopword file '" + path + "'");
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.insert(utf8::to_lower(line));
  }
  return out;
}

namespace detail {

struct WorkItem {
  std::string text;
  Tag tag;
};

inline bool is_word_token(const std::string& t) {
  std::size_t pos = 0;
  return utf8::is_word_char(utf8::decode_next(t, pos));
}

/// Applies one full edit sequence (replace, insert, swap, delete) to a
/// token/tag list. Returns false if everything was deleted.
inline bool apply_edits(std::vector<WorkItem>& items, std::size_t n_edits,
                        const SynonymLexicon& lexicon,
                        const std::set<std::string>& stopwords, double p_edit,
                        Rng& rng) {
  // Synonym replacement of n random non-stopword lexicon words.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!is_word_token(items[i].text)) continue;
    const std::string low = utf8::to_lower(items[i].text);
    if (stopwords.count(low) > 0) continue;
    if (lexicon.find(low) != nullptr) candidates.push_back(i);
  }
  rng.shuffle(candidates);
  if (candidates.size() > n_edits) candidates.resize(n_edits);
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  for (std::size_t idx : candidates) {
    const auto* syns = lexicon.find(items[idx].text);
    const std::string& syn = (*syns)[rng.bounded(syns->size())];
    const Tag tag = items[idx].tag;  // expansions inherit the replaced tag
    std::vector<WorkItem> expansion;
    for (const Token& t : tokenize(syn)) expansion.push_back({t.text, tag});
    if (expansion.empty()) continue;
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(idx));
    items.insert(items.begin() + static_cast<std::ptrdiff_t>(idx),
                 expansion.begin(), expansion.end());
  }

  // Random insertion of lexicon synonyms of in-sentence words. Inserted
  // tokens are O unless dropped strictly inside a non-O run.
  for (std::size_t e = 0; e < n_edits; ++e) {
    std::vector<std::size_t> sources;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (is_word_token(items[i].text) &&
          lexicon.find(items[i].text) != nullptr) {
        sources.push_back(i);
      }
    }
    if (sources.empty()) break;
    const auto* syns =
        lexicon.find(items[sources[rng.bounded(sources.size())]].text);
    const std::string& syn = (*syns)[rng.bounded(syns->size())];
    const std::size_t pos = rng.bounded(items.size() + 1);
    Tag tag = std::nullopt;
    if (pos > 0 && pos < items.size() && items[pos - 1].tag &&
        items[pos - 1].tag == items[pos].tag) {
      tag = items[pos - 1].tag;
    }
    std::vector<WorkItem> expansion;
    for (const Token& t : tokenize(syn)) expansion.push_back({t.text, tag});
    items.insert(items.begin() + static_cast<std::ptrdiff_t>(pos),
                 expansion.begin(), expansion.end());
  }

  // Random swaps; tags travel with their tokens.
  if (items.size() >= 2) {
    for (std::size_t e = 0; e < n_edits; ++e) {
      const std::size_t i = rng.bounded(items.size());
      std::size_t j = rng.bounded(items.size());
      int guard = 0;
      while (j == i && ++guard < 64) j = rng.bounded(items.size());
      if (j != i) std::swap(items[i], items[j]);
    }
  }

  // Independent deletion.
  std::vector<WorkItem> kept;
  for (WorkItem& it : items) {
    if (rng.next_double() >= p_edit) kept.push_back(std::move(it));
  }
  items = std::move(kept);
  return !items.empty();
}

inline LabeledResponse assemble(const std::vector<WorkItem>& items,
                                const Scheme& scheme) {
  LabeledResponse r;
  std::vector<std::size_t> starts, ends;
  std::size_t cp_len = 0;
  for (const WorkItem& it : items) {
    if (!r.text.empty()) {
      std::size_t pos = 0;
      if (utf8::is_word_char(utf8::decode_next(it.text, pos))) {
        r.text += ' ';
        ++cp_len;
      }
    }
    starts.push_back(cp_len);
    r.text += it.text;
    cp_len += utf8::length(it.text);
    ends.push_back(cp_len);
  }
  std::size_t i = 0;
  while (i < items.size()) {
    if (!items[i].tag) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < items.size() && items[j + 1].tag == items[i].tag) ++j;
    r.spans.push_back({*items[i].tag, starts[i], ends[j]});
    i = j + 1;
  }
  (void)scheme;
  return r;
}

}  // namespace detail

/// Traditional augmentation: every source record yields
/// `variants_per_record` synthetic records, each produced by applying
/// synonym replacement, random insertion, random swap and random deletion
/// collectively (n = max(1, floor(p_edit * token count)) edits for the
/// first three, per-token probability p_edit for deletion). Variants that
/// collapse to zero tokens or break span alignment are regenerated a
/// bounded number of times, then fall back to an unedited copy with a
/// warning. Synthetic ids are "<source id>#eda<ordinal>"; the output holds
/// only the synthetics.
inline Dataset eda_augment(const Dataset& d, std::size_t variants_per_record,
                           const SynonymLexicon& lexicon, std::uint64_t seed,
                           double p_edit = 0.1,
                           const std::set<std::string>& stopwords = {},
                           std::vector<std::string>* warnings = nullptr) {
  if (lexicon.empty()) throw EmptyLexicon("synonym lexicon is empty");
  if (p_edit <= 0.0 || p_edit >= 1.0) {
    throw Error("eda: p_edit must be in (0, 1)");
  }

  Dataset out;
  out.scheme = d.scheme;
  for (const LabeledResponse& r : d.records) {
    const TaggedResponse tagged = spans_to_tags(r);
    std::vector<detail::WorkItem> base;
    for (std::size_t i = 0; i < tagged.tokens.size(); ++i) {
      base.push_back({tagged.tokens[i].text, tagged.tags[i]});
    }
    const std::size_t n_edits = std::max<std::size_t>(
        1, static_cast<std::size_t>(p_edit * static_cast<double>(base.size())));

    Rng rng(derive_seed(seed, r.id));
    for (std::size_t v = 1; v <= variants_per_record; ++v) {
      LabeledResponse synth;
      bool ok = false;
      for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
        std::vector<detail::WorkItem> items = base;
        if (!detail::apply_edits(items, n_edits, lexicon, stopwords, p_edit,
                                 rng)) {
          continue;  // everything deleted; redraw
        }
        synth = detail::assemble(items, d.scheme);
        try {
          spans_to_tags(synth);  // alignment check
          ok = true;
        } catch (const Error&) {
          // token merge across items; redraw
        }
      }
      if (!ok) {
        synth = r;
        synth.spans = r.spans;
        if (warnings != nullptr) {
          warnings->push_back("eda: record '" + r.id +
                              "' kept an unedited copy after retries");
        }
      }
      synth.id = r.id + "#eda" + std::to_string(v);
      out.records.push_back(std::move(synth));
    }
  }
  return out;
}

}  // namespace praisekit
