#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "praisekit/corpus.hpp"
#include "praisekit/error.hpp"
#include "praisekit/provider.hpp"
#include "praisekit/utf8.hpp"

namespace praisekit {

/// Guideline text shown to the model before the few-shot examples. The
/// texts ship as plain-text resources in data/ and are loaded verbatim.
struct LessonPrinciple {
  Scheme scheme;
  std::string text;
};

inline constexpr const char* kEvaluatorSystemEffortOutcome =
    "You are a response evaluator designed to output JSON. Your task is to "
    "analyze tutor responses based on the principles of effective praise "
    "focusing on 'effort' and 'outcome'. Extract words or phrases that "
    "represent praise for the student's effort and outcome, and output the "
    "results in JSON format with keys titled 'effort' and 'outcome'.";

inline constexpr const char* kEvaluatorSystemPerson =
    "You are a response evaluator designed to output JSON. Your task is to "
    "analyze tutor responses based on the principles of effective praise "
    "focusing on undesired part 'person_based praise'. Extract words or "
    "phrases that represent person-based praise for the student's, and "
    "output the results in JSON format with keys titled 'person'.";

inline constexpr const char* kReadyReply =
    "Sure, can you provide a tutor response for analysis";
inline constexpr const char* kReadyReplyQ =
    "Sure, can you provide a tutor response for analysis?";
inline constexpr const char* kAgainReply = "Nice, let's do it again.";

/// Serializes a label -> phrase-list map the way the training examples are
/// written: {"effort": [], "outcome": ["Great job"]}.
inline std::string phrase_map_to_json(
    const Scheme& scheme,
    const std::map<PraiseLabel, std::vector<std::string>>& phrases) {
  std::string out = "{";
  bool first_key = true;
  for (PraiseLabel l : scheme) {
    if (!first_key) out += ", ";
    first_key = false;
    out += nlohmann::json(label_name(l)).dump();
    out += ": [";
    const auto it = phrases.find(l);
    if (it != phrases.end()) {
      bool first_item = true;
      for (const std::string& p : it->second) {
        if (!first_item) out += ", ";
        first_item = false;
        out += nlohmann::json(p).dump();
      }
    }
    out += "]";
  }
  out += "}";
  return out;
}

/// The conversation prefix shared by fine-tune export and live tagging:
/// system instruction, lesson principle, the two built-in few-shot
/// exchanges, and the tutor response to analyze as the final user turn.
inline std::vector<ChatMessage> build_evaluator_messages(
    const Scheme& scheme, const std::string& principle_text,
    const std::string& response_text) {
  const bool person = scheme == scheme_person();
  if (!person && scheme != scheme_effort_outcome()) {
    throw SchemeMismatch(
        "fine-tune format is defined for the {effort, outcome} and {person} "
        "schemes");
  }
  std::vector<ChatMessage> m;
  m.push_back({Role::system, person ? kEvaluatorSystemPerson
                                    : kEvaluatorSystemEffortOutcome});
  m.push_back({Role::user, principle_text});
  m.push_back({Role::assistant, kReadyReply});
  if (person) {
    m.push_back({Role::user,
                 "You are smart and capable of completing this assignment "
                 "with success."});
    m.push_back({Role::assistant, "{\"person\": [\"smart\"]}"});
    m.push_back({Role::user, kAgainReply});
    m.push_back({Role::assistant, kReadyReplyQ});
    m.push_back({Role::user,
                 "Fantastic job, Kevin! You are the smartest student I have "
                 "ever met! I wish all students were as smart as you."});
    m.push_back({Role::assistant,
                 "{\"person\": [\"smartest student\", \"as smart as you\"]}"});
  } else {
    m.push_back({Role::user, "Great job! You are a genius!"});
    m.push_back({Role::assistant,
                 "{\"effort\": [], \"outcome\": [\"Great job\"]}"});
    m.push_back({Role::user, kAgainReply});
    m.push_back({Role::assistant, kReadyReplyQ});
    m.push_back({Role::user,
                 "You are almost there! I am proud of how you are "
                 "persevering through and striving to solve the problem. "
                 "Keep going!"});
    m.push_back({Role::assistant,
                 "{\"effort\": [\"persevering through and striving to solve "
                 "the problem\", \"Keep going\"], \"outcome\": []}"});
  }
  m.push_back({Role::user, kAgainReply});
  m.push_back({Role::assistant, kReadyReply});
  m.push_back({Role::user, response_text});
  return m;
}

/// Label content of one record: each span's exact surface text, grouped by
/// label, in order of appearance.
inline std::map<PraiseLabel, std::vector<std::string>> record_phrases(
    const LabeledResponse& r) {
  std::vector<PraiseSpan> spans = r.spans;
  std::sort(spans.begin(), spans.end(),
            [](const PraiseSpan& a, const PraiseSpan& b) {
              return a.start < b.start;
            });
  std::map<PraiseLabel, std::vector<std::string>> out;
  for (const PraiseSpan& sp : spans) {
    out[sp.label].push_back(utf8::substr(r.text, sp.start, sp.end));
  }
  return out;
}

/// Writes one JSONL training line per record:
/// {"messages": [{"role": ..., "content": ...}, ...]}.
inline void export_finetune(const Dataset& d, const LessonPrinciple& principle,
                            std::ostream& out) {
  if (principle.scheme != d.scheme) {
    throw SchemeMismatch("lesson principle scheme does not match dataset");
  }
  for (const LabeledResponse& r : d.records) {
    std::vector<ChatMessage> messages =
        build_evaluator_messages(d.scheme, principle.text, r.text);
    messages.push_back(
        {Role::assistant, phrase_map_to_json(d.scheme, record_phrases(r))});
    nlohmann::ordered_json line;
    line["messages"] = nlohmann::ordered_json::array();
    for (const ChatMessage& m : messages) {
      line["messages"].push_back(
          {{"role", role_name(m.role)}, {"content", m.content}});
    }
    out << line.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Prediction parsing
// ---------------------------------------------------------------------------

namespace detail {

/// First balanced {...} block, tolerating code fences and surrounding prose.
inline std::string first_json_block(const std::string& raw) {
  const std::size_t open = raw.find('{');
  if (open == std::string::npos) {
    throw NoJsonFound("no '{' in model output");
  }
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return raw.substr(open, i - open + 1);
    }
  }
  throw NoJsonFound("unbalanced '{' in model output");
}

}  // namespace detail

/// Parses a model's label JSON. Missing scheme keys become empty lists;
/// keys outside the scheme are ignored. Total: any input yields either a
/// map or a typed error.
inline std::map<PraiseLabel, std::vector<std::string>> parse_prediction(
    const std::string& raw, const Scheme& scheme) {
  const std::string block = detail::first_json_block(raw);
  const nlohmann::json j = nlohmann::json::parse(block, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InvalidJson("model output block is not a JSON object");
  }
  std::map<PraiseLabel, std::vector<std::string>> out;
  for (PraiseLabel l : scheme) {
    out[l] = {};
    const auto it = j.find(label_name(l));
    if (it == j.end()) continue;
    if (!it->is_array()) {
      throw WrongValueType("key '" + label_name(l) + "' is not a list");
    }
    for (const auto& item : *it) {
      if (!item.is_string()) {
        throw WrongValueType("key '" + label_name(l) +
                             "' contains a non-string item");
      }
      out[l].push_back(item.get<std::string>());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phrase alignment
// ---------------------------------------------------------------------------

struct UnalignedPhrase {
  PraiseLabel label{};
  std::string phrase;
};

struct AlignResult {
  TaggedResponse tagged;
  std::vector<UnalignedPhrase> diagnostics;
};

/// Maps predicted phrases back onto token spans: each phrase is matched as a
/// token subsequence (case-insensitive) at the leftmost position whose
/// tokens are not yet consumed by an earlier phrase; matched tokens take the
/// phrase's label. Phrases that cannot be placed tag nothing and are
/// reported in diagnostics. Labels are processed in effort, outcome, person
/// order, phrases in list order.
inline AlignResult align_phrases(
    const std::string& text,
    const std::map<PraiseLabel, std::vector<std::string>>& phrases) {
  AlignResult res;
  res.tagged.text = text;
  res.tagged.tokens = tokenize(text);
  res.tagged.tags.assign(res.tagged.tokens.size(), std::nullopt);
  std::vector<bool> consumed(res.tagged.tokens.size(), false);

  for (const auto& [label, list] : phrases) {
    for (const std::string& phrase : list) {
      const std::vector<Token> ptoks = tokenize(phrase);
      bool placed = false;
      if (!ptoks.empty()) {
        for (std::size_t s = 0;
             s + ptoks.size() <= res.tagged.tokens.size() && !placed; ++s) {
          bool match = true;
          for (std::size_t k = 0; k < ptoks.size(); ++k) {
            if (consumed[s + k] ||
                !utf8::iequals(res.tagged.tokens[s + k].text,
                               ptoks[k].text)) {
              match = false;
              break;
            }
          }
          if (!match) continue;
          for (std::size_t k = 0; k < ptoks.size(); ++k) {
            consumed[s + k] = true;
            res.tagged.tags[s + k] = label;
          }
          placed = true;
        }
      }
      if (!placed) res.diagnostics.push_back({label, phrase});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Predictions file
// ---------------------------------------------------------------------------

/// One line of a predictions JSONL file: {"id": "...", "raw": "..."}.
struct RawPrediction {
  std::string id;
  std::string raw;
};

inline std::vector<RawPrediction> parse_predictions_jsonl(
    const std::string& contents, const std::string& source_name) {
  std::vector<RawPrediction> out;
  std::size_t line_no = 0, pos = 0;
  while (pos <= contents.size()) {
    const std::size_t nl = contents.find('\n', pos);
    const std::string line =
        contents.substr(pos, nl == std::string::npos ? std::string::npos
                                                     : nl - pos);
    pos = nl == std::string::npos ? contents.size() + 1 : nl + 1;
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") ||
        !j.contains("raw")) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": expected {\"id\": ..., \"raw\": ...}");
    }
    out.push_back({j["id"].get<std::string>(), j["raw"].get<std::string>()});
  }
  return out;
}

}  // namespace praisekit
