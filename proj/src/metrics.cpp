#include "elmprune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "elmprune/errors.hpp"

namespace elmprune::metrics {

double accuracy(const Vector& predicted, const Vector& actual) {
  if (predicted.size() != actual.size()) {
    throw ContractViolation("accuracy: length mismatch (" + std::to_string(predicted.size()) +
                            " vs " + std::to_string(actual.size()) + ")");
  }
  if (actual.size() == 0) throw ContractViolation("accuracy: empty input");
  const auto hits = (predicted.array() == actual.array()).count();
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

double auc(const Vector& scores, const Vector& actual) {
  if (scores.size() != actual.size()) throw ContractViolation("auc: length mismatch");
  if (!scores.allFinite()) throw ContractViolation("auc: scores must be finite");
  const auto n = static_cast<std::size_t>(scores.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores(static_cast<Eigen::Index>(a)) < scores(static_cast<Eigen::Index>(b));
  });

  // Sum of doubled mid-ranks of the positives keeps everything integral.
  std::uint64_t positives = 0;
  std::uint64_t rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    const double v = scores(static_cast<Eigen::Index>(order[i]));
    while (j < n && scores(static_cast<Eigen::Index>(order[j])) == v) ++j;
    // 1-based ranks i+1..j share mid-rank (i + 1 + j) / 2.
    const std::uint64_t mid_x2 = i + 1 + j;
    for (std::size_t k = i; k < j; ++k) {
      if (actual(static_cast<Eigen::Index>(order[k])) > 0.0) {
        ++positives;
        rank_sum_x2 += mid_x2;
      }
    }
    i = j;
  }
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw ContractViolation("auc: undefined with a single class present");
  }
  // U = R+ - P(P+1)/2, doubled.
  const std::uint64_t u_x2 = rank_sum_x2 - positives * (positives + 1);
  return static_cast<double>(u_x2) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("summarize: no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return MetricSummary{mean, sd, values.size()};
}

}  // namespace elmprune::metrics
