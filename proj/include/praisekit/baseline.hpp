#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "praisekit/corpus.hpp"
#include "praisekit/utf8.hpp"

namespace praisekit {

/// Phrase-memorization tagger: remembers the normalized token sequence of
/// every training span and tags exact re-occurrences. It generalizes to
/// nothing beyond memorized surface forms, which makes its test score a
/// direct read-out of how much surface diversity augmentation added.
struct Gazetteer {
  std::map<PraiseLabel, std::set<std::vector<std::string>>> entries;

  std::size_t max_entry_length() const {
    std::size_t n = 0;
    for (const auto& [label, seqs] : entries) {
      for (const auto& s : seqs) n = std::max(n, s.size());
    }
    return n;
  }
};

inline std::vector<std::string> normalize_tokens(const std::string& text) {
  std::vector<std::string> out;
  for (const Token& t : tokenize(text)) out.push_back(utf8::to_lower(t.text));
  return out;
}

inline Gazetteer build_gazetteer(const Dataset& train) {
  Gazetteer g;
  for (const LabeledResponse& r : train.records) {
    for (const PraiseSpan& sp : r.spans) {
      std::vector<std::string> seq =
          normalize_tokens(utf8::substr(r.text, sp.start, sp.end));
      if (!seq.empty()) g.entries[sp.label].insert(std::move(seq));
    }
  }
  return g;
}

/// Greedy left-to-right scan. At each position the longest matching entry
/// across all labels wins; length ties break by label order
/// effort > outcome > person (fixed and documented); the scan resumes after
/// a match. Unmatched tokens stay O.
inline TaggedResponse gazetteer_tag(const std::string& text,
                                    const Gazetteer& g) {
  TaggedResponse tr;
  tr.text = text;
  tr.tokens = tokenize(text);
  tr.tags.assign(tr.tokens.size(), std::nullopt);

  std::vector<std::string> low;
  low.reserve(tr.tokens.size());
  for (const Token& t : tr.tokens) low.push_back(utf8::to_lower(t.text));

  const std::size_t max_len = g.max_entry_length();
  std::size_t i = 0;
  while (i < low.size()) {
    bool matched = false;
    const std::size_t cap = std::min(max_len, low.size() - i);
    for (std::size_t len = cap; len >= 1 && !matched; --len) {
      const std::vector<std::string> window(low.begin() + i,
                                            low.begin() + i + len);
      for (PraiseLabel label : kAllLabels) {
        const auto it = g.entries.find(label);
        if (it == g.entries.end() || it->second.count(window) == 0) continue;
        for (std::size_t k = 0; k < len; ++k) tr.tags[i + k] = label;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return tr;
}

/// JSON dump format: {"effort": ["great job", ...], ...} with space-joined,
/// sorted normalized phrases.
inline nlohmann::ordered_json gazetteer_to_json(const Gazetteer& g) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (PraiseLabel label : kAllLabels) {
    const auto it = g.entries.find(label);
    if (it == g.entries.end()) continue;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& seq : it->second) {
      std::string joined;
      for (const std::string& t : seq) {
        if (!joined.empty()) joined += ' ';
        joined += t;
      }
      list.push_back(joined);
    }
    j[label_name(label)] = std::move(list);
  }
  return j;
}

inline Gazetteer gazetteer_from_json(const nlohmann::json& j) {
  Gazetteer g;
  if (!j.is_object()) throw ValidationError("gazetteer JSON must be an object");
  for (const auto& [key, list] : j.items()) {
    const auto label = parse_label(key);
    if (!label) throw ValidationError("unknown gazetteer label '" + key + "'");
    if (!list.is_array()) {
      throw ValidationError("gazetteer entries for '" + key +
                            "' must be an array");
    }
    for (const auto& phrase : list) {
      std::vector<std::string> seq =
          normalize_tokens(phrase.get<std::string>());
      if (!seq.empty()) g.entries[*label].insert(std::move(seq));
    }
  }
  return g;
}

}  // namespace praisekit
