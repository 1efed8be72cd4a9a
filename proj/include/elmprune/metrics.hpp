#pragma once

#include <cstddef>
#include <span>

#include "elmprune/linalg.hpp"

namespace elmprune::metrics {

/// Mean and sample (n - 1) standard deviation over repeated runs.
struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n_runs = 0;
};

/// Fraction of positions where predicted == actual.
double accuracy(const Vector& predicted, const Vector& actual);

/// Area under the ROC curve for labels in {-1, +1}, with half credit for tied
/// scores (Mann-Whitney normalization). O(N log N) via mid-ranks. Throws
/// ContractViolation when only one class is present.
double auc(const Vector& scores, const Vector& actual);

MetricSummary summarize(std::span<const double> values);

}  // namespace elmprune::metrics
