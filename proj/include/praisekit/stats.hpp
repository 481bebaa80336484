#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "praisekit/error.hpp"

namespace praisekit {

enum class Alternative { less, greater, two_sided };

inline std::string alternative_name(Alternative a) {
  switch (a) {
    case Alternative::less:
      return "less";
    case Alternative::greater:
      return "greater";
    case Alternative::two_sided:
      return "two_sided";
  }
  return "?";
}

struct MwuResult {
  double u1 = 0.0;     // U statistic of the first sample
  double u_min = 0.0;  // min(U1, U2); the value reported in tables
  double p = 1.0;
  enum class Method { exact, normal_approx } method = Method::exact;
};

/// Null distribution of the Mann-Whitney U statistic for sample sizes
/// (n1, n2) without ties: counts[u] is the number of rank subsets of size n1
/// from {1..n1+n2} whose rank sum equals u + n1(n1+1)/2. Computed by dynamic
/// programming over subset sums; the total is C(n1+n2, n1).
inline std::vector<std::uint64_t> mwu_null_counts(std::size_t n1,
                                                  std::size_t n2) {
  const std::size_t total = n1 + n2;
  const std::size_t max_sum = total * (total + 1) / 2;
  // ways[k][s]: subsets of {1..i} of size k summing to s, i rolled in-place.
  std::vector<std::vector<std::uint64_t>> ways(
      n1 + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
  ways[0][0] = 1;
  for (std::size_t i = 1; i <= total; ++i) {
    for (std::size_t k = std::min(n1, i); k >= 1; --k) {
      for (std::size_t s = max_sum; s >= i; --s) {
        ways[k][s] += ways[k - 1][s - i];
      }
    }
  }
  const std::size_t offset = n1 * (n1 + 1) / 2;  // minimal rank sum
  std::vector<std::uint64_t> counts(n1 * n2 + 1, 0);
  for (std::size_t u = 0; u < counts.size(); ++u) {
    counts[u] = ways[n1][offset + u];
  }
  return counts;
}

/// Exact one- or two-sided p-value for an integer U observed under the
/// tie-free null distribution.
inline double mwu_exact_pvalue(double u1, std::size_t n1, std::size_t n2,
                               Alternative alt) {
  const std::vector<std::uint64_t> counts = mwu_null_counts(n1, n2);
  double total = 0.0, le = 0.0, ge = 0.0;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    const double c = static_cast<double>(counts[u]);
    total += c;
    if (static_cast<double>(u) <= u1 + 1e-9) le += c;
    if (static_cast<double>(u) >= u1 - 1e-9) ge += c;
  }
  switch (alt) {
    case Alternative::less:
      return le / total;
    case Alternative::greater:
      return ge / total;
    case Alternative::two_sided:
      return std::min(1.0, 2.0 * std::min(le, ge) / total);
  }
  return 1.0;
}

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct RankInfo {
  double rank_sum_a = 0.0;
  bool has_ties = false;
  double tie_term = 0.0;  // sum over tie groups of (t^3 - t)
};

inline RankInfo midranks(const std::vector<double>& a,
                         const std::vector<double>& b) {
  struct Entry {
    double value;
    bool from_a;
  };
  std::vector<Entry> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Entry& x, const Entry& y) {
                     return x.value < y.value;
                   });
  RankInfo info;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1].value == pooled[i].value) {
      ++j;
    }
    const double t = static_cast<double>(j - i + 1);
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    if (j > i) {
      info.has_ties = true;
      info.tie_term += t * t * t - t;
    }
    for (std::size_t k = i; k <= j; ++k) {
      if (pooled[k].from_a) info.rank_sum_a += mid;
    }
    i = j + 1;
  }
  return info;
}

}  // namespace detail

/// Mann-Whitney U test. U1 = R_a - n1(n1+1)/2 with midranks for ties.
/// Exact p by full enumeration of the null distribution when
/// n1 + n2 <= 20 and the pooled sample is tie-free; otherwise the normal
/// approximation with continuity and tie correction. `alternative::less`
/// tests whether `a` is stochastically smaller than `b`.
inline MwuResult mann_whitney_u(const std::vector<double>& a,
                                const std::vector<double>& b,
                                Alternative alt) {
  if (a.empty() || b.empty()) {
    throw EmptySample("mann_whitney_u: both samples must be non-empty");
  }
  const std::size_t n1 = a.size(), n2 = b.size();
  const double nn = static_cast<double>(n1) * static_cast<double>(n2);
  const detail::RankInfo info = detail::midranks(a, b);
  MwuResult res;
  res.u1 = info.rank_sum_a -
           static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
  res.u_min = std::min(res.u1, nn - res.u1);

  if (n1 + n2 <= 20 && !info.has_ties) {
    res.method = MwuResult::Method::exact;
    res.p = mwu_exact_pvalue(res.u1, n1, n2, alt);
    return res;
  }

  res.method = MwuResult::Method::normal_approx;
  const double n = static_cast<double>(n1 + n2);
  const double mu = nn / 2.0;
  const double var =
      nn / 12.0 * ((n + 1.0) - info.tie_term / (n * (n - 1.0)));
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  const double sigma = std::sqrt(var);
  switch (alt) {
    case Alternative::less:
      res.p = detail::normal_cdf((res.u1 - mu + 0.5) / sigma);
      break;
    case Alternative::greater:
      res.p = 1.0 - detail::normal_cdf((res.u1 - mu - 0.5) / sigma);
      break;
    case Alternative::two_sided: {
      const double z = std::max(0.0, std::fabs(res.u1 - mu) - 0.5) / sigma;
      res.p = std::min(1.0, 2.0 * (1.0 - detail::normal_cdf(z)));
      break;
    }
  }
  return res;
}

/// Projects an expert rating onto the metric scale through the observed
/// model rating/metric ratio, assuming the two scales are linearly related:
/// returns expert_rating * (model_metric / model_rating).
inline double estimate_expert_benchmark(double model_rating,
                                        double model_metric,
                                        double expert_rating) {
  if (model_rating <= 0.0) {
    throw DivisionByZero("estimate_expert_benchmark: model rating must be > 0");
  }
  return expert_rating * (model_metric / model_rating);
}

}  // namespace praisekit
