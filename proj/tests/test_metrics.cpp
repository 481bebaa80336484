#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "praisekit/corpus.hpp"
#include "praisekit/metrics.hpp"
#include "praisekit/rng.hpp"

using namespace praisekit;
using Catch::Matchers::WithinAbs;

namespace {

TaggedResponse tag_text(const std::string& text,
                        const std::vector<Tag>& tags) {
  TaggedResponse tr;
  tr.text = text;
  tr.tokens = tokenize(text);
  REQUIRE(tr.tokens.size() == tags.size());
  tr.tags = tags;
  return tr;
}

/// Independent oracle: one pass per (token, label) triple with no shared
/// logic with count_confusion.
ConfusionCounts naive_counts(const TaggedResponse& gt,
                             const TaggedResponse& pred, PraiseLabel label) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < gt.tags.size(); ++i) {
    const bool g = gt.tags[i].has_value() && gt.tags[i].value() == label;
    const bool p = pred.tags[i].has_value() && pred.tags[i].value() == label;
    if (g && p) {
      c.tp += 1;
    }
    if (!g && p) {
      c.fp += 1;
    }
    if (g && !p) {
      c.fn += 1;
    }
  }
  return c;
}

Tag random_tag(Rng& rng) {
  switch (rng.bounded(4)) {
    case 0:
      return PraiseLabel::Effort;
    case 1:
      return PraiseLabel::Outcome;
    case 2:
      return PraiseLabel::Person;
    default:
      return std::nullopt;
  }
}

}  // namespace

TEST_CASE("count_confusion counts token-level agreement") {
  // "Hey Kevin, you did a great job." with gold outcome on "great job"
  const std::string text = "Hey Kevin, you did a great job.";
  std::vector<Tag> gt_tags(9, std::nullopt);
  gt_tags[6] = gt_tags[7] = PraiseLabel::Outcome;
  const TaggedResponse gt = tag_text(text, gt_tags);

  SECTION("prediction with one extra token") {
    std::vector<Tag> pred_tags(9, std::nullopt);
    pred_tags[5] = pred_tags[6] = pred_tags[7] = PraiseLabel::Outcome;
    const ConfusionCounts c =
        count_confusion(gt, tag_text(text, pred_tags), PraiseLabel::Outcome);
    CHECK(c.tp == 2);
    CHECK(c.fp == 1);
    CHECK(c.fn == 0);
  }
  SECTION("identical prediction") {
    const ConfusionCounts c = count_confusion(gt, gt, PraiseLabel::Outcome);
    CHECK(c.tp == 2);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
  }
  SECTION("prediction missing one token") {
    std::vector<Tag> pred_tags(9, std::nullopt);
    pred_tags[6] = PraiseLabel::Outcome;
    const ConfusionCounts c =
        count_confusion(gt, tag_text(text, pred_tags), PraiseLabel::Outcome);
    CHECK(c.tp == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 1);
  }
  SECTION("different texts are refused") {
    std::vector<Tag> other(2, std::nullopt);
    CHECK_THROWS_AS(count_confusion(gt, tag_text("great job", other),
                                    PraiseLabel::Outcome),
                    TokenMismatch);
  }
}

TEST_CASE("metric_scores implements the three formulas") {
  const MetricParams p;
  SECTION("worked example (2, 1, 0)") {
    const MetricScores s = metric_scores({2, 1, 0}, p);
    CHECK_THAT(s.iou, WithinAbs(0.6667, 5e-4));
    CHECK_THAT(s.m_iou, WithinAbs(0.9091, 5e-4));
    CHECK_THAT(s.f_beta, WithinAbs(0.9091, 5e-4));
  }
  SECTION("no praise anywhere scores 1") {
    const MetricScores s = metric_scores({0, 0, 0}, p);
    CHECK(s.iou == 1.0);
    CHECK(s.m_iou == 1.0);
    CHECK(s.f_beta == 1.0);
  }
  SECTION("worked example (3, 2, 1)") {
    const MetricScores s = metric_scores({3, 2, 1}, p);
    CHECK_THAT(s.iou, WithinAbs(0.5, 5e-4));
    CHECK_THAT(s.m_iou, WithinAbs(0.6818, 5e-4));
    CHECK_THAT(s.f_beta, WithinAbs(0.7143, 5e-4));
  }
}

TEST_CASE("metric identities and monotonicity") {
  Rng rng(123);
  for (int iter = 0; iter < 1000; ++iter) {
    const ConfusionCounts c{rng.bounded(8), rng.bounded(8), rng.bounded(8)};
    const MetricScores base = metric_scores(c, {0.2, 2.0});

    // alpha = 1 collapses the modified IoU onto plain IoU.
    CHECK(metric_scores(c, {1.0, 2.0}).m_iou == base.iou);

    // beta = 2 algebraic identity.
    const double tp = static_cast<double>(c.tp);
    const double direct =
        c.tp + c.fp + c.fn == 0
            ? 1.0
            : tp / (tp + 0.2 * static_cast<double>(c.fp) +
                    0.8 * static_cast<double>(c.fn));
    CHECK_THAT(base.f_beta, WithinAbs(direct, 1e-12));

    // F2 dominates M-IoU at alpha=0.2, equality iff fn==0 or tp==0.
    CHECK(base.f_beta >= base.m_iou - 1e-15);
    if (c.fn != 0 && c.tp != 0) CHECK(base.f_beta > base.m_iou);

    // Non-increasing in fp and fn for fixed tp.
    const MetricScores more_fp =
        metric_scores({c.tp, c.fp + 1, c.fn}, {0.2, 2.0});
    const MetricScores more_fn =
        metric_scores({c.tp, c.fp, c.fn + 1}, {0.2, 2.0});
    CHECK(more_fp.iou <= base.iou);
    CHECK(more_fp.m_iou <= base.m_iou);
    CHECK(more_fp.f_beta <= base.f_beta);
    CHECK(more_fn.iou <= base.iou);
    CHECK(more_fn.m_iou <= base.m_iou);
    CHECK(more_fn.f_beta <= base.f_beta);
  }
}

TEST_CASE("swapping gt and pred swaps fp and fn") {
  Rng rng(321);
  static const std::vector<std::string> words = {"aa", "bb", "cc", "dd"};
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + rng.bounded(12);
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < n; ++i) {
      toks.push_back(words[rng.bounded(words.size())]);
    }
    const std::string text = join_tokens(toks);
    std::vector<Tag> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(random_tag(rng));
      b.push_back(random_tag(rng));
    }
    const TaggedResponse ta = tag_text(text, a), tb = tag_text(text, b);
    const ConfusionCounts ab = count_confusion(ta, tb, PraiseLabel::Effort);
    const ConfusionCounts ba = count_confusion(tb, ta, PraiseLabel::Effort);
    CHECK(ab.tp == ba.tp);
    CHECK(ab.fp == ba.fn);
    CHECK(ab.fn == ba.fp);
    CHECK(metric_scores(ab).iou == metric_scores(ba).iou);

    // brute-force oracle agreement on every label
    for (PraiseLabel l : kAllLabels) {
      const ConfusionCounts fast = count_confusion(ta, tb, l);
      const ConfusionCounts slow = naive_counts(ta, tb, l);
      CHECK(fast.tp == slow.tp);
      CHECK(fast.fp == slow.fp);
      CHECK(fast.fn == slow.fn);
    }
  }
}

TEST_CASE("score_corpus macro-averages per-response scores") {
  Dataset gt{scheme_effort_outcome(), {}};
  gt.records.push_back({"a", "a great job", {{PraiseLabel::Outcome, 2, 11}}});
  gt.records.push_back(
      {"b", "solid work friend", {{PraiseLabel::Outcome, 0, 10}}});

  std::map<std::string, TaggedResponse> preds;
  preds["a"] = spans_to_tags(gt.records[0]);  // exact -> 1.0
  // half the tokens -> m_iou = 1/(1+1) = 0.5
  preds["b"] = spans_to_tags(
      {"b", "solid work friend", {{PraiseLabel::Outcome, 0, 5}}});

  const CorpusScores cs = score_corpus(gt, preds, PraiseLabel::Outcome, {});
  REQUIRE(cs.per_response.size() == 2);
  CHECK_THAT(cs.per_response[0].scores.m_iou, WithinAbs(1.0, 1e-12));
  CHECK_THAT(cs.per_response[1].scores.m_iou, WithinAbs(0.5, 1e-12));
  CHECK_THAT(cs.mean.m_iou, WithinAbs(0.75, 1e-12));

  SECTION("all-identical predictions mean 1.0") {
    preds["b"] = spans_to_tags(gt.records[1]);
    const CorpusScores perfect =
        score_corpus(gt, preds, PraiseLabel::Outcome, {});
    CHECK_THAT(perfect.mean.iou, WithinAbs(1.0, 1e-12));
    CHECK_THAT(perfect.mean.m_iou, WithinAbs(1.0, 1e-12));
    CHECK_THAT(perfect.mean.f_beta, WithinAbs(1.0, 1e-12));
  }
  SECTION("single response mean equals its scores") {
    Dataset one{scheme_effort_outcome(), {gt.records[0]}};
    std::vector<Tag> tags(3, PraiseLabel::Outcome);  // "a" tagged too: fp=1
    std::map<std::string, TaggedResponse> p{
        {"a", tag_text("a great job", tags)}};
    const CorpusScores cs1 = score_corpus(one, p, PraiseLabel::Outcome, {});
    CHECK_THAT(cs1.mean.m_iou, WithinAbs(2.0 / 2.2, 1e-12));
  }
  SECTION("missing prediction is an error naming the id") {
    preds.erase("b");
    try {
      score_corpus(gt, preds, PraiseLabel::Outcome, {});
      FAIL("expected MissingPrediction");
    } catch (const MissingPrediction& e) {
      CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
  }
  SECTION("degenerate responses are counted and reported separately") {
    Dataset d{scheme_effort_outcome(), {}};
    d.records.push_back({"x", "plain text here", {}});
    d.records.push_back({"y", "a great job", {{PraiseLabel::Outcome, 2, 11}}});
    std::map<std::string, TaggedResponse> p;
    p["x"] = spans_to_tags(d.records[0]);
    p["y"] = spans_to_tags({"y", "a great job", {}});  // all fn
    const CorpusScores cs2 = score_corpus(d, p, PraiseLabel::Outcome, {});
    CHECK(cs2.degenerate_count == 1);
    CHECK_THAT(cs2.mean.m_iou, WithinAbs(0.5, 1e-12));
    REQUIRE(cs2.mean_excluding_degenerate.has_value());
    CHECK_THAT(cs2.mean_excluding_degenerate->m_iou, WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("aggregate_runs computes mean and standard error") {
  const RunAggregate constant = aggregate_runs({0.5, 0.5, 0.5, 0.5, 0.5});
  CHECK_THAT(constant.mean, WithinAbs(0.5, 1e-12));
  REQUIRE(constant.standard_error.has_value());
  CHECK_THAT(*constant.standard_error, WithinAbs(0.0, 1e-12));

  const RunAggregate two = aggregate_runs({0.4, 0.6});
  CHECK_THAT(two.mean, WithinAbs(0.5, 1e-12));
  REQUIRE(two.standard_error.has_value());
  CHECK_THAT(*two.standard_error, WithinAbs(0.1, 1e-12));

  const RunAggregate one = aggregate_runs({0.7});
  CHECK_THAT(one.mean, WithinAbs(0.7, 1e-12));
  CHECK(!one.standard_error.has_value());

  CHECK_THROWS_AS(aggregate_runs({}), EmptyInput);
}
