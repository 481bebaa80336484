// Regenerates the bundled synthetic corpora under data/.
//
// Train and test praise phrases come from disjoint pools: train spans use
// the base adjective+noun phrases, test spans use rewrite variants of those
// phrases drawn through the offline provider, so a tagger that memorizes
// surface forms scores zero on the test set until augmentation widens its
// coverage. Phrase/template assignments are latin-square balanced: each
// phrase appears in five train records and five test records (one per
// variant index).

#include <cassert>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "praisekit/augment.hpp"
#include "praisekit/baseline.hpp"
#include "praisekit/corpus.hpp"
#include "praisekit/dataset_io.hpp"
#include "praisekit/mock_provider.hpp"

using namespace praisekit;

namespace {

struct Piece {
  std::string text;
  std::optional<PraiseLabel> label;
};

LabeledResponse build_record(const std::string& id,
                             const std::vector<Piece>& pieces) {
  LabeledResponse r;
  r.id = id;
  std::size_t cp = 0;
  for (const Piece& p : pieces) {
    const std::size_t start = cp;
    r.text += p.text;
    cp += utf8::length(p.text);
    if (p.label) r.spans.push_back({*p.label, start, cp});
  }
  return r;
}

const std::vector<std::string> kNames = {"Kevin", "Maria",  "Alex",  "Jordan",
                                         "Sam",   "Priya",  "Chen",  "Dana",
                                         "José",  "Fatima", "Lena",  "Mohamed"};

std::vector<Piece> fill_template(std::size_t tmpl, const std::string& name,
                                 const std::string& outcome,
                                 const std::string& effort) {
  const Piece o{outcome, PraiseLabel::Outcome};
  const Piece e{effort, PraiseLabel::Effort};
  switch (tmpl % 5) {
    case 0:
      return {{"Hey " + name + ", that was a ", std::nullopt},
              o,
              {" on this problem. I could see the ", std::nullopt},
              e,
              {" behind it.", std::nullopt}};
    case 1:
      return {{name + ", what a ", std::nullopt},
              o,
              {" today. Your ", std::nullopt},
              e,
              {" kept it moving.", std::nullopt}};
    case 2:
      return {{"Nice going, " + name + ". That step shows a ", std::nullopt},
              o,
              {", and it took ", std::nullopt},
              e,
              {" to get there.", std::nullopt}};
    case 3:
      return {{"Thanks for sticking with it, " + name + ". You turned in a ",
               std::nullopt},
              o,
              {" through ", std::nullopt},
              e,
              {" alone.", std::nullopt}};
    default:
      return {{name + ", the last move landed a ", std::nullopt},
              o,
              {". All that ", std::nullopt},
              e,
              {" made the difference.", std::nullopt}};
  }
}

/// Variant pool for a phrase as the augmentation pipeline sees it
/// (index 0 = original).
std::vector<std::string> variant_pool(const std::string& phrase) {
  MockProvider mock(0);
  Segment seg;
  seg.tag = PraiseLabel::Outcome;  // any non-O tag; only the text matters
  seg.text = phrase;
  seg.first_token = 0;
  seg.last_token = 1;
  AugmentPlan plan;
  return generate_variants(seg, 0, mock, plan).variants;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(out_dir);

  const std::vector<std::string> outcome_phrases = {
      "great job",      "good work",      "perfect result", "wonderful answer",
      "great work",     "good job",       "perfect answer", "wonderful result"};
  const std::vector<std::string> effort_phrases = {
      "steady effort",       "tireless persistence", "persistent practice",
      "diligent dedication", "steady practice",      "tireless effort",
      "persistent dedication", "diligent persistence"};

  Dataset train{scheme_effort_outcome(), {}};
  for (std::size_t i = 0; i < 40; ++i) {
    const std::size_t c = i % 8, r = i / 8;
    train.records.push_back(build_record(
        "train" + std::to_string(i + 1),
        fill_template(r, kNames[i % kNames.size()], outcome_phrases[c],
                      effort_phrases[(c + r) % 8])));
  }

  Dataset test{scheme_effort_outcome(), {}};
  for (std::size_t j = 0; j < 40; ++j) {
    const std::size_t c = j % 8, r = j / 8;
    const std::vector<std::string> opool = variant_pool(outcome_phrases[c]);
    const std::vector<std::string> epool =
        variant_pool(effort_phrases[(c + r) % 8]);
    assert(opool.size() > 5 && epool.size() > 5);
    test.records.push_back(build_record(
        "test" + std::to_string(j + 1),
        fill_template(r + 2, kNames[(j + 5) % kNames.size()], opool[1 + r],
                      epool[1 + r])));
  }

  validate_dataset(train);
  validate_dataset(test);

  // Train and test span pools must be disjoint, and the two labels must
  // never share an entry sequence (keeps the gazetteer scan tie-free).
  const Gazetteer gtrain = build_gazetteer(train);
  const Gazetteer gtest = build_gazetteer(test);
  for (PraiseLabel l : {PraiseLabel::Effort, PraiseLabel::Outcome}) {
    for (const auto& seq : gtest.entries.at(l)) {
      if (gtrain.entries.at(l).count(seq) > 0) {
        std::cerr << "pool overlap detected\n";
        return 1;
      }
    }
  }
  for (const auto& seq : gtrain.entries.at(PraiseLabel::Effort)) {
    if (gtrain.entries.at(PraiseLabel::Outcome).count(seq) > 0) {
      std::cerr << "cross-label tie in train pool\n";
      return 1;
    }
  }

  Dataset person{scheme_person(), {}};
  const std::vector<std::pair<std::string, std::string>> person_bits = {
      {"You are smart, NAME.", "smart"},
      {"Honestly NAME, you are a genius.", "genius"},
      {"NAME, only a clever mind finds that.", "clever"},
      {"You are brilliant, NAME, top to bottom.", "brilliant"},
      {"NAME, you must be gifted.", "gifted"}};
  for (std::size_t i = 0; i < person_bits.size(); ++i) {
    const std::string name = kNames[i % kNames.size()];
    std::string text = person_bits[i].first;
    const std::size_t at = text.find("NAME");
    text.replace(at, 4, name);
    const std::string& word = person_bits[i].second;
    const std::size_t byte_at = text.find(word);
    const std::size_t cp_start = utf8::length(text.substr(0, byte_at));
    LabeledResponse r;
    r.id = "person" + std::to_string(i + 1);
    r.text = text;
    r.spans.push_back(
        {PraiseLabel::Person, cp_start, cp_start + utf8::length(word)});
    person.records.push_back(std::move(r));
  }
  const std::vector<std::string> plain = {
      "That was a fine answer on the warmup.",
      "Keep at the practice schedule we set.",
      "You finished every exercise today.",
      "The second draft reads far better.",
      "Thanks for showing your steps clearly."};
  for (std::size_t i = 0; i < plain.size(); ++i) {
    person.records.push_back(
        {"person" + std::to_string(person_bits.size() + i + 1), plain[i], {}});
  }
  validate_dataset(person);

  save_dataset(train, out_dir + "/synthetic_train.json");
  save_dataset(test, out_dir + "/synthetic_test.json");
  save_dataset(person, out_dir + "/sample_person.json");
  std::cout << "wrote " << train.records.size() << " train, "
            << test.records.size() << " test, " << person.records.size()
            << " person records under " << out_dir << "\n";
  return 0;
}
