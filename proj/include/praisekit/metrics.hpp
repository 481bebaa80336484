#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "praisekit/corpus.hpp"
#include "praisekit/error.hpp"

namespace praisekit {

/// Token-level confusion counts for one label.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct MetricParams {
  double alpha = 0.2;  // weight applied to FP tokens in the modified IoU
  double beta = 2.0;   // F-beta recall weight
};

struct MetricScores {
  double iou = 0.0;
  double m_iou = 0.0;
  double f_beta = 0.0;
};

/// Counts per-token agreement for one label. Both responses must tokenize
/// the same text identically.
inline ConfusionCounts count_confusion(const TaggedResponse& gt,
                                       const TaggedResponse& pred,
                                       PraiseLabel label) {
  if (gt.tokens != pred.tokens) {
    throw TokenMismatch(
        "ground truth and prediction do not share a token sequence");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < gt.tags.size(); ++i) {
    const bool g = gt.tags[i] && *gt.tags[i] == label;
    const bool p = pred.tags[i] && *pred.tags[i] == label;
    if (g && p)
      ++c.tp;
    else if (p)
      ++c.fp;
    else if (g)
      ++c.fn;
  }
  return c;
}

/// IoU, modified IoU, and F-beta from confusion counts:
///   iou    = tp / (tp + fp + fn)
///   m_iou  = tp / (tp + alpha*fp + fn)
///   f_beta = (1+b^2)*tp / ((1+b^2)*tp + fp + b^2*fn)
/// When tp+fp+fn = 0 (no praise present and none predicted) every metric is
/// 1 by convention.
inline MetricScores metric_scores(const ConfusionCounts& c,
                                  const MetricParams& p = {}) {
  if (c.tp + c.fp + c.fn == 0) return {1.0, 1.0, 1.0};
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double b2 = p.beta * p.beta;
  MetricScores s;
  s.iou = tp / (tp + fp + fn);
  s.m_iou = tp / (tp + p.alpha * fp + fn);
  s.f_beta = ((1.0 + b2) * tp) / ((1.0 + b2) * tp + fp + b2 * fn);
  return s;
}

struct ResponseScore {
  std::string id;
  ConfusionCounts counts;
  MetricScores scores;
  bool degenerate = false;  // tp+fp+fn == 0, scored 1 by convention
};

/// Per-response scores plus their unweighted (macro) mean over responses.
/// Responses where the label is absent from both sides score 1 and are
/// included in the mean; `mean_excluding_degenerate` shows the sensitivity
/// to that convention.
struct CorpusScores {
  std::vector<ResponseScore> per_response;
  MetricScores mean;
  std::optional<MetricScores> mean_excluding_degenerate;
  std::size_t degenerate_count = 0;
};

inline CorpusScores score_corpus(
    const Dataset& gt, const std::map<std::string, TaggedResponse>& preds,
    PraiseLabel label, const MetricParams& p = {}) {
  CorpusScores out;
  MetricScores sum{}, sum_nd{};
  std::size_t n_nd = 0;
  for (const LabeledResponse& r : gt.records) {
    const auto it = preds.find(r.id);
    if (it == preds.end()) {
      throw MissingPrediction("no prediction for response '" + r.id + "'");
    }
    const TaggedResponse tagged = spans_to_tags(r);
    ResponseScore rs;
    rs.id = r.id;
    rs.counts = count_confusion(tagged, it->second, label);
    rs.scores = metric_scores(rs.counts, p);
    rs.degenerate = rs.counts.tp + rs.counts.fp + rs.counts.fn == 0;
    sum.iou += rs.scores.iou;
    sum.m_iou += rs.scores.m_iou;
    sum.f_beta += rs.scores.f_beta;
    if (rs.degenerate) {
      ++out.degenerate_count;
    } else {
      sum_nd.iou += rs.scores.iou;
      sum_nd.m_iou += rs.scores.m_iou;
      sum_nd.f_beta += rs.scores.f_beta;
      ++n_nd;
    }
    out.per_response.push_back(std::move(rs));
  }
  if (out.per_response.empty()) {
    throw EmptyInput("cannot score an empty corpus");
  }
  const double n = static_cast<double>(out.per_response.size());
  out.mean = {sum.iou / n, sum.m_iou / n, sum.f_beta / n};
  if (n_nd > 0) {
    const double m = static_cast<double>(n_nd);
    out.mean_excluding_degenerate =
        MetricScores{sum_nd.iou / m, sum_nd.m_iou / m, sum_nd.f_beta / m};
  }
  return out;
}

struct RunAggregate {
  double mean = 0.0;
  std::optional<double> standard_error;  // absent for a single run
};

/// Mean and standard error (sample sd over sqrt(n)) across repeated runs.
inline RunAggregate aggregate_runs(const std::vector<double>& run_means) {
  if (run_means.empty()) throw EmptyInput("aggregate_runs: no runs");
  RunAggregate a;
  double sum = 0.0;
  for (double v : run_means) sum += v;
  const double n = static_cast<double>(run_means.size());
  a.mean = sum / n;
  if (run_means.size() >= 2) {
    double ss = 0.0;
    for (double v : run_means) ss += (v - a.mean) * (v - a.mean);
    a.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return a;
}

}  // namespace praisekit
