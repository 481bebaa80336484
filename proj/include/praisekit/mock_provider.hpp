#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "praisekit/corpus.hpp"
#include "praisekit/provider.hpp"
#include "praisekit/rng.hpp"
#include "praisekit/utf8.hpp"

namespace praisekit {

// Deterministic offline stand-in for a chat-completion backend. It ships in
// the main library (not test-only) so the whole experiment pipeline runs
// without network access or keys.
//
// Rewrite-shaped prompts are answered with n lines built by cyclic word
// substitution from a fixed table, rotated by the seed; the set of lines a
// segment can produce is stable across seeds (the rotation only reorders a
// full cycle), which keeps augmentation pools comparable between runs.
// Lines that substitution alone cannot make distinct are repaired by
// inserting filler words, preserving word order. Tagging-shaped prompts get
// a JSON answer from a keyword heuristic; anything else echoes the last
// user message.

inline const std::map<std::string, std::vector<std::string>>&
mock_synonym_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"great",
       {"grand", "splendid", "superb", "terrific", "tremendous", "marvelous",
        "outstanding", "remarkable", "exceptional", "stellar", "magnificent",
        "glorious", "admirable", "impressive", "phenomenal"}},
      {"good",
       {"fine", "solid", "strong", "sound", "decent", "worthy", "commendable",
        "laudable", "respectable", "polished", "skillful", "tidy", "neat",
        "proper", "quality"}},
      {"perfect",
       {"flawless", "spotless", "impeccable", "faultless", "ideal", "pristine",
        "exact", "complete", "absolute", "supreme", "immaculate",
        "unblemished", "exemplary", "masterful", "refined"}},
      {"wonderful",
       {"delightful", "lovely", "fabulous", "charming", "pleasing", "joyful",
        "radiant", "dazzling", "sparkling", "shining", "gleaming", "sunny",
        "cheerful", "heartening", "uplifting"}},
      {"job",
       {"work", "task", "performance", "accomplishment", "achievement",
        "undertaking", "assignment", "production", "execution", "delivery",
        "showing", "outing", "feat", "deed", "milestone"}},
      {"work",
       {"labor", "craft", "handiwork", "workmanship", "product", "creation",
        "piece", "contribution", "composition", "construction", "masterwork",
        "artistry", "finish", "submission", "output"}},
      {"result",
       {"outcome", "conclusion", "finding", "resolution", "attainment",
        "completion", "success", "triumph", "victory", "win", "payoff",
        "return", "reward", "prize", "breakthrough"}},
      {"answer",
       {"response", "reply", "retort", "explanation", "account", "statement",
        "demonstration", "proof", "justification", "clarification",
        "interpretation", "breakdown", "walkthrough", "derivation",
        "verdict"}},
      {"steady",
       {"constant", "consistent", "unwavering", "relentless", "patient",
        "enduring", "sustained", "continuous", "stable", "regular",
        "reliable", "devoted", "committed", "faithful", "dogged"}},
      {"tireless",
       {"untiring", "unflagging", "energetic", "vigorous", "spirited",
        "driven", "motivated", "eager", "earnest", "zealous", "ambitious",
        "active", "dynamic", "lively", "industrious"}},
      {"persistent",
       {"determined", "resolute", "tenacious", "steadfast", "stubborn",
        "firm", "gritty", "tough", "hardy", "bold", "brave", "courageous",
        "fearless", "intent", "focused"}},
      {"diligent",
       {"careful", "thorough", "meticulous", "attentive", "conscientious",
        "studious", "disciplined", "methodical", "rigorous", "orderly",
        "deliberate", "mindful", "painstaking", "systematic", "organized"}},
      {"effort",
       {"exertion", "striving", "toil", "diligence", "industry",
        "application", "commitment", "devotion", "engagement", "initiative",
        "drive", "hustle", "push", "grind", "stamina"}},
      {"persistence",
       {"perseverance", "endurance", "tenacity", "resolve", "determination",
        "grit", "willpower", "backbone", "fortitude", "spirit", "heart",
        "resilience", "steadfastness", "constancy", "doggedness"}},
      {"practice",
       {"rehearsal", "repetition", "training", "drilling", "exercise",
        "preparation", "study", "review", "routine", "discipline",
        "homework", "groundwork", "legwork", "iteration", "refinement"}},
      {"dedication",
       {"loyalty", "focus", "attention", "concentration", "investment",
        "care", "earnestness", "seriousness", "intensity", "passion",
        "enthusiasm", "zeal", "ardor", "vigor", "energy"}},
      {"smart",
       {"clever", "bright", "sharp", "quick", "intelligent", "brainy",
        "gifted", "talented", "wise", "astute", "keen", "savvy", "canny",
        "apt", "adept"}},
      {"genius",
       {"prodigy", "whiz", "mastermind", "intellect", "virtuoso", "savant",
        "ace", "wizard", "talent", "natural", "star", "standout", "marvel",
        "wonder", "phenom"}},
      {"hard",
       {"tough", "demanding", "strenuous", "arduous", "rigorous", "taxing",
        "challenging", "laborious", "grueling", "exacting", "heavy", "stiff",
        "formidable", "serious", "intense"}},
      {"paid",
       {"rewarded", "repaid", "returned", "compensated", "recognized",
        "honored", "acknowledged", "fulfilled", "validated", "justified",
        "vindicated", "affirmed", "confirmed", "celebrated", "settled"}},
  };
  return table;
}

inline const std::vector<std::string>& mock_filler_words() {
  static const std::vector<std::string> fillers = {
      "truly",   "really", "indeed",  "surely", "honestly", "frankly",
      "clearly", "simply", "just",    "quite",  "rather",   "very",
      "so",      "pretty", "genuinely", "notably"};
  return fillers;
}

namespace detail {

inline constexpr std::size_t kMockCycle = 15;

inline bool starts_upper(const std::string& s) {
  return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
}

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') {
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
  }
  return s;
}

inline std::string mock_rewrite_lines(const std::string& text, std::size_t n,
                                      std::uint64_t seed) {
  const auto& table = mock_synonym_table();
  const auto& fillers = mock_filler_words();
  const std::uint64_t rot = seed % kMockCycle;
  const std::vector<Token> words = tokenize(text);

  std::set<std::string> seen;
  seen.insert(utf8::to_lower(text));
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = static_cast<std::size_t>((i + rot) % kMockCycle);
    std::vector<std::string> toks;
    toks.reserve(words.size());
    for (const Token& w : words) {
      const auto it = table.find(utf8::to_lower(w.text));
      if (it != table.end()) {
        std::string v = it->second[t % it->second.size()];
        if (starts_upper(w.text)) v = capitalize(std::move(v));
        toks.push_back(std::move(v));
      } else {
        toks.push_back(w.text);
      }
    }
    std::string line = join_tokens(toks);
    // Filler repair: insert words until the line is new, keeping word order.
    std::size_t attempt = i + rot;
    std::vector<std::string> repaired = toks;
    while (seen.count(utf8::to_lower(line)) > 0) {
      const std::string& filler = fillers[attempt % fillers.size()];
      const std::size_t pos =
          (attempt / fillers.size()) % (repaired.size() + 1);
      repaired.insert(repaired.begin() + static_cast<std::ptrdiff_t>(pos),
                      filler);
      line = join_tokens(repaired);
      ++attempt;
      if (attempt > i + rot + 4096) break;  // unreachable in practice
    }
    seen.insert(utf8::to_lower(line));
    lines.push_back(std::move(line));
  }

  std::string out = "Sure, here are the rephrasings:";
  for (const std::string& l : lines) {
    out += '\n';
    out += l;
  }
  return out;
}

/// Keyword phrases the tagging heuristic recognizes, per label.
inline const std::map<PraiseLabel, std::vector<std::string>>&
mock_keyword_phrases() {
  static const std::map<PraiseLabel, std::vector<std::string>> phrases = {
      {PraiseLabel::Effort,
       {"hard work", "working hard", "persevering", "keep going",
        "keep trying", "effort", "persistence", "practice", "dedication",
        "striving"}},
      {PraiseLabel::Outcome,
       {"great job", "good job", "great work", "good work", "well done",
        "perfect", "excellent", "nice work", "great answer", "correct"}},
      {PraiseLabel::Person,
       {"smartest student", "as smart as you", "smart", "genius", "clever",
        "brilliant", "gifted", "talented"}},
  };
  return phrases;
}

inline std::string mock_tag_response(const std::string& text,
                                     const Scheme& scheme) {
  const std::vector<Token> toks = tokenize(text);
  std::vector<bool> used(toks.size(), false);
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (PraiseLabel label : scheme) {
    std::vector<std::pair<std::size_t, std::string>> found;
    const auto it = mock_keyword_phrases().find(label);
    if (it != mock_keyword_phrases().end()) {
      for (const std::string& phrase : it->second) {
        const std::vector<Token> ptoks = tokenize(phrase);
        if (ptoks.empty()) continue;
        for (std::size_t s = 0; s + ptoks.size() <= toks.size(); ++s) {
          bool match = true;
          for (std::size_t k = 0; k < ptoks.size(); ++k) {
            if (used[s + k] ||
                !utf8::iequals(toks[s + k].text, ptoks[k].text)) {
              match = false;
              break;
            }
          }
          if (!match) continue;
          for (std::size_t k = 0; k < ptoks.size(); ++k) used[s + k] = true;
          found.emplace_back(
              s, utf8::substr(text, toks[s].start,
                              toks[s + ptoks.size() - 1].end));
        }
      }
    }
    std::sort(found.begin(), found.end());
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (auto& [pos, surface] : found) list.push_back(surface);
    out[label_name(label)] = std::move(list);
  }
  return out.dump();
}

}  // namespace detail

/// Deterministic function of (request content, seed); see the file comment
/// for the behavior per prompt shape.
inline std::string mock_complete(const CompletionRequest& req,
                                 std::uint64_t seed) {
  std::string last_user;
  std::string system;
  for (const ChatMessage& m : req.messages) {
    if (m.role == Role::user) last_user = m.content;
    if (m.role == Role::system && system.empty()) system = m.content;
  }

  if (last_user.find("applying synonym replacements") != std::string::npos) {
    std::string text;
    const std::string marker = "Here is the text:";
    const std::size_t at = last_user.find(marker);
    if (at != std::string::npos) {
      text = last_user.substr(at + marker.size());
      while (!text.empty() && (text.front() == ' ' || text.front() == '\n')) {
        text.erase(text.begin());
      }
      while (!text.empty() && (text.back() == ' ' || text.back() == '\n')) {
        text.pop_back();
      }
    }
    std::size_t n = 15;
    const std::size_t gen = last_user.find("generate ");
    if (gen != std::string::npos) {
      std::size_t p = gen + 9, value = 0;
      bool any = false;
      while (p < last_user.size() && last_user[p] >= '0' &&
             last_user[p] <= '9') {
        value = value * 10 + static_cast<std::size_t>(last_user[p] - '0');
        ++p;
        any = true;
      }
      if (any && value > 0) n = value;
    }
    return detail::mock_rewrite_lines(text, n, seed);
  }

  if (system.find("designed to output JSON") != std::string::npos) {
    const Scheme scheme = system.find("'person'") != std::string::npos
                              ? scheme_person()
                              : scheme_effort_outcome();
    return detail::mock_tag_response(last_user, scheme);
  }

  return last_user;
}

class MockProvider : public CompletionProvider {
 public:
  explicit MockProvider(std::uint64_t seed = 0) : seed_(seed) {}

  std::string complete(const CompletionRequest& req) override {
    return mock_complete(req, seed_);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace praisekit
