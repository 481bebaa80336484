#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "praisekit/corpus.hpp"
#include "praisekit/dataset_io.hpp"
#include "praisekit/rng.hpp"

using namespace praisekit;

namespace {

std::vector<std::string> token_texts(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const Token& t : toks) out.push_back(t.text);
  return out;
}

LabeledResponse make_response(const std::string& id, const std::string& text,
                              std::vector<PraiseSpan> spans) {
  return {id, text, std::move(spans)};
}

/// Random but canonical tagged response: tags drawn per token, spans derived
/// from the tag runs themselves.
TaggedResponse random_tagged(Rng& rng, std::size_t max_tokens = 15) {
  static const std::vector<std::string> words = {
      "you",  "did", "a",    "great", "job",  "hard", "work", "keep",
      "going", "so",  "smart", "well",  "done", "the",  "paid", "off"};
  const std::size_t n = rng.bounded(max_tokens + 1);
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < n; ++i) {
    toks.push_back(words[rng.bounded(words.size())]);
  }
  TaggedResponse tr;
  tr.text = join_tokens(toks);
  tr.tokens = tokenize(tr.text);
  REQUIRE(tr.tokens.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (rng.bounded(4)) {
      case 0:
        tr.tags.push_back(PraiseLabel::Effort);
        break;
      case 1:
        tr.tags.push_back(PraiseLabel::Outcome);
        break;
      case 2:
        tr.tags.push_back(PraiseLabel::Person);
        break;
      default:
        tr.tags.push_back(std::nullopt);
        break;
    }
  }
  return tr;
}

}  // namespace

TEST_CASE("rng reference stream is pinned") {
  Rng r(1);
  CHECK(r.next() == 12966619160104079557ULL);
  CHECK(r.next() == 9600361134598540522ULL);
  CHECK(r.next() == 10590380919521690900ULL);
  CHECK(fnv1a64("great job") == 11895191122007457069ULL);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng r2(42);
  r2.shuffle(v);
  CHECK(v == std::vector<int>{7, 3, 8, 9, 5, 6, 4, 1, 0, 2});
}

TEST_CASE("tokenize splits word runs and isolates punctuation") {
  CHECK(token_texts(tokenize("Hey Kevin, you did a great job.")) ==
        std::vector<std::string>{"Hey", "Kevin", ",", "you", "did", "a",
                                 "great", "job", "."});
  CHECK(tokenize("").empty());
  CHECK(token_texts(tokenize("You're smart!")) ==
        std::vector<std::string>{"You're", "smart", "!"});
}

TEST_CASE("tokenize offsets are code point indices") {
  const std::string text = "José did piqué!";
  const std::vector<Token> toks = tokenize(text);
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].text == "José");
  CHECK(toks[0].start == 0);
  CHECK(toks[0].end == 4);
  CHECK(toks[2].text == "piqué");
  CHECK(toks[3].text == "!");
  CHECK(toks[3].start == 14);
  for (const Token& t : toks) {
    CHECK(utf8::substr(text, t.start, t.end) == t.text);
  }
}

TEST_CASE("tokenize property: ordered, non-overlapping, offset-faithful") {
  Rng rng(99);
  const std::string alphabet = "ab N.,!'e";
  for (int iter = 0; iter < 300; ++iter) {
    std::string text;
    const std::size_t len = rng.bounded(30);
    for (std::size_t i = 0; i < len; ++i) {
      text += alphabet[rng.bounded(alphabet.size())];
    }
    const std::vector<Token> toks = tokenize(text);
    std::size_t prev_end = 0;
    for (const Token& t : toks) {
      CHECK(t.start >= prev_end);
      CHECK(t.start < t.end);
      CHECK(utf8::substr(text, t.start, t.end) == t.text);
      CHECK(!t.text.empty());
      prev_end = t.end;
    }
  }
}

TEST_CASE("spans_to_tags assigns I tags inside spans") {
  SECTION("person span") {
    const auto r = make_response("r", "You are so smart",
                                 {{PraiseLabel::Person, 11, 16}});
    const TaggedResponse tr = spans_to_tags(r);
    REQUIRE(tr.tags.size() == 4);
    CHECK(tr.tags ==
          std::vector<Tag>{std::nullopt, std::nullopt, std::nullopt,
                           PraiseLabel::Person});
  }
  SECTION("no spans -> all O") {
    const TaggedResponse tr =
        spans_to_tags(make_response("r", "you did it", {}));
    for (const Tag& t : tr.tags) CHECK(!t.has_value());
  }
  SECTION("outcome span over two tokens") {
    const auto r = make_response("r", "Hey Kevin, you did a great job.",
                                 {{PraiseLabel::Outcome, 21, 30}});
    const TaggedResponse tr = spans_to_tags(r);
    REQUIRE(tr.tags.size() == 9);
    std::vector<Tag> want(9, std::nullopt);
    want[6] = PraiseLabel::Outcome;
    want[7] = PraiseLabel::Outcome;
    CHECK(tr.tags == want);
  }
}

TEST_CASE("spans_to_tags rejects bad spans") {
  CHECK_THROWS_AS(spans_to_tags(make_response("r", "great job",
                                              {{PraiseLabel::Outcome, 0, 3}})),
                  MisalignedSpan);
  CHECK_THROWS_AS(
      spans_to_tags(make_response("r", "a great job done",
                                  {{PraiseLabel::Outcome, 2, 11},
                                   {PraiseLabel::Effort, 8, 16}})),
      OverlappingSpans);
  // span covering only whitespace cannot sit on token boundaries
  CHECK_THROWS_AS(spans_to_tags(make_response("r", "a  b",
                                              {{PraiseLabel::Effort, 1, 2}})),
                  MisalignedSpan);
}

TEST_CASE("tags_to_spans emits one span per maximal run") {
  TaggedResponse tr;
  tr.text = "aa bb cc dd ee";
  tr.tokens = tokenize(tr.text);
  SECTION("single run") {
    tr.tags = {std::nullopt, std::nullopt, PraiseLabel::Effort,
               PraiseLabel::Effort, std::nullopt};
    const auto spans = tags_to_spans(tr);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == PraiseSpan{PraiseLabel::Effort, 6, 11});
  }
  SECTION("all O") {
    tr.tags.assign(5, std::nullopt);
    CHECK(tags_to_spans(tr).empty());
  }
  SECTION("runs split by O") {
    tr.tags = {PraiseLabel::Outcome, std::nullopt, PraiseLabel::Outcome,
               std::nullopt, std::nullopt};
    const auto spans = tags_to_spans(tr);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].start == 0);
    CHECK(spans[0].end == 2);
    CHECK(spans[1].start == 6);
    CHECK(spans[1].end == 8);
  }
}

TEST_CASE("IO round trip is the identity on canonical responses") {
  Rng rng(7);
  for (int iter = 0; iter < 500; ++iter) {
    const TaggedResponse tr = random_tagged(rng);
    const std::vector<PraiseSpan> spans = tags_to_spans(tr);
    LabeledResponse r{"r", tr.text, spans};
    const TaggedResponse back = spans_to_tags(r);
    CHECK(back.tags == tr.tags);
    CHECK(tags_to_spans(back) == spans);

    // Tag count conservation: tokens tagged L match the summed span lengths.
    for (PraiseLabel l : kAllLabels) {
      std::size_t tagged = 0;
      for (const Tag& t : tr.tags) tagged += t == Tag{l} ? 1 : 0;
      std::size_t span_tokens = 0;
      for (const PraiseSpan& sp : spans) {
        if (sp.label != l) continue;
        for (const Token& t : tr.tokens) {
          if (t.start >= sp.start && t.end <= sp.end) ++span_tokens;
        }
      }
      CHECK(tagged == span_tokens);
    }
  }
}

TEST_CASE("split_dataset shuffles then prefix-splits deterministically") {
  Dataset d{scheme_effort_outcome(), {}};
  for (int i = 0; i < 129; ++i) {
    d.records.push_back({"r" + std::to_string(i), "fine work here", {}});
  }
  const auto [train, test] = split_dataset(d, 3, 64);
  CHECK(train.records.size() == 64);
  CHECK(test.records.size() == 65);

  std::set<std::string> ids;
  for (const auto& r : train.records) ids.insert(r.id);
  for (const auto& r : test.records) ids.insert(r.id);
  CHECK(ids.size() == 129);

  const auto [train2, test2] = split_dataset(d, 3, 64);
  for (std::size_t i = 0; i < train.records.size(); ++i) {
    CHECK(train.records[i].id == train2.records[i].id);
  }

  const auto [empty_train, all] = split_dataset(d, 3, 0);
  CHECK(empty_train.records.empty());
  CHECK(all.records.size() == 129);

  CHECK_THROWS_AS(split_dataset(d, 3, 130), CountOutOfRange);
}

TEST_CASE("subset draws a reproducible sample without replacement") {
  Dataset d{scheme_effort_outcome(), {}};
  for (int i = 0; i < 64; ++i) {
    d.records.push_back({"r" + std::to_string(i), "fine work here", {}});
  }
  const Dataset s13 = subset(d, 13, 5);
  CHECK(s13.records.size() == 13);
  std::set<std::string> ids;
  for (const auto& r : s13.records) ids.insert(r.id);
  CHECK(ids.size() == 13);

  const Dataset again = subset(d, 13, 5);
  for (std::size_t i = 0; i < 13; ++i) {
    CHECK(s13.records[i].id == again.records[i].id);
  }

  const Dataset all = subset(d, 64, 5);
  CHECK(all.records.size() == 64);

  const Dataset other = subset(d, 13, 6);
  std::set<std::string> other_ids;
  for (const auto& r : other.records) other_ids.insert(r.id);
  CHECK(ids != other_ids);

  CHECK_THROWS_AS(subset(d, 65, 1), CountOutOfRange);
}

TEST_CASE("span_length_stats histograms by token length") {
  Dataset d{scheme_effort_outcome(), {}};
  d.records.push_back(make_response("a", "a great job done",
                                    {{PraiseLabel::Outcome, 2, 11}}));
  d.records.push_back(make_response("b", "nice try kid",
                                    {{PraiseLabel::Outcome, 0, 8}}));
  d.records.push_back(make_response(
      "c", "you kept going strong", {{PraiseLabel::Outcome, 4, 21}}));

  const SpanLengthStats st = span_length_stats(d, PraiseLabel::Outcome);
  CHECK(st.count == 3);
  CHECK(st.histogram == std::map<std::size_t, std::size_t>{{2, 2}, {3, 1}});
  CHECK_THAT(st.mean, Catch::Matchers::WithinAbs(2.3333, 1e-3));

  CHECK(span_length_stats(d, PraiseLabel::Effort).histogram.empty());

  Dataset single{scheme_effort_outcome(), {}};
  single.records.push_back(
      make_response("s", "great job", {{PraiseLabel::Outcome, 0, 9}}));
  CHECK(span_length_stats(single, PraiseLabel::Outcome).histogram ==
        std::map<std::size_t, std::size_t>{{2, 1}});
}

TEST_CASE("validator rejects IO-unrepresentable adjacent same-label spans") {
  // "great job" as two back-to-back outcome spans cannot round-trip.
  const auto r = make_response("r", "a great job",
                               {{PraiseLabel::Outcome, 2, 7},
                                {PraiseLabel::Outcome, 8, 11}});
  CHECK_THROWS_AS(validate_record(r, scheme_effort_outcome()), ValidationError);
  // With an O token between them the two spans are fine.
  const auto ok = make_response("r", "great and job",
                                {{PraiseLabel::Outcome, 0, 5},
                                 {PraiseLabel::Outcome, 10, 13}});
  CHECK_NOTHROW(validate_record(ok, scheme_effort_outcome()));
}

TEST_CASE("dataset loader reports the offending record id") {
  const std::string dir = PRAISEKIT_FIXTURE_DIR;
  const auto expect_throw = [&](const std::string& file,
                                const std::string& id) {
    try {
      load_dataset(dir + "/" + file);
      FAIL("expected a validation error for " << file);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(id) != std::string::npos);
    }
  };
  expect_throw("invalid_overlap.json", "bad_overlap");
  expect_throw("invalid_misaligned.json", "bad_misaligned");
  expect_throw("invalid_bad_label.json", "bad_label");
  expect_throw("invalid_dup_id.json", "r1");
  expect_throw("invalid_offsets.json", "bad_offsets");
  CHECK_NOTHROW(load_dataset(dir + "/valid_small.json"));
}

TEST_CASE("dataset save/load round trip preserves everything") {
  const std::string dir = PRAISEKIT_DATA_DIR;
  const Dataset d = load_dataset(dir + "/synthetic_train.json");
  CHECK(d.records.size() == 40);
  const std::string once = dataset_to_string(d);
  const Dataset back = dataset_from_json(nlohmann::json::parse(once));
  CHECK(dataset_to_string(back) == once);
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(d.records[i].id == back.records[i].id);
    CHECK(d.records[i].text == back.records[i].text);
    CHECK(d.records[i].spans == back.records[i].spans);
  }
}

TEST_CASE("join_tokens glues punctuation to the previous token") {
  CHECK(join_tokens({"Hey", "Kevin", ",", "you", "did", "."}) ==
        "Hey Kevin, you did.");
  CHECK(join_tokens({}) == "");
}
