#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "elmprune/dataset.hpp"
#include "elmprune/elm.hpp"

namespace elmprune::pruning {

/// Held-out measure used to compare network sizes. Higher is better; the
/// corresponding error is 1 - metric, and delta is expressed in that unit.
enum class SelectionMetric { kAccuracy, kAuc };

SelectionMetric parse_metric(std::string_view name);
std::string_view to_string(SelectionMetric metric);

double evaluate(SelectionMetric metric, const Vector& scores, const Vector& labels);

struct TraceStep {
  std::size_t size = 0;
  double metric = 0.0;
  /// Best metric over this and all earlier steps.
  double best_metric = 0.0;
};

/// Sizes visited by a selection scheme, in visiting order.
struct PruneTrace {
  std::vector<TraceStep> steps;
  std::size_t chosen_size = 0;
  double chosen_metric = 0.0;
};

struct SelectionResult {
  ElmModel model;
  PruneTrace trace;
  /// Wall time of the selection procedure. For rbp/random_prune this covers
  /// the pruning pass only; the caller adds the initial training time.
  double wall_seconds = 0.0;
  /// For pruning: indices (into the input model) of the retained neurons, in
  /// removal-priority order. Empty for growing schemes.
  std::vector<std::size_t> retained;
};

inline constexpr double kNeverStop = std::numeric_limits<double>::infinity();

/// Increasing integer grid lo, lo*ratio, ... , hi (rounded, deduplicated,
/// always containing lo and hi). ratio > 1.
std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, double ratio);

/// Pruning schedule from `max_size` down to 1: every size when
/// max_size <= 2000, otherwise a geometric grid with ratio 0.9.
std::vector<std::size_t> default_prune_schedule(std::size_t max_size);

/// Up to 12 geometric sizes in [1, n - 1] for the M < N baseline.
std::vector<std::size_t> std_grid(std::size_t n_train);

/// Relevance-based pruning. Neurons are ranked by |beta| (descending, ties by
/// index) and dropped from the tail following `schedule` (strictly
/// decreasing, every entry <= model size). Beta is not re-solved while
/// pruning. The walk stops at the first size whose validation error exceeds
/// the best error seen so far by more than `delta`; the previous size is
/// returned. With `refit_on`, beta is re-solved on that training set for the
/// chosen size only.
SelectionResult rbp(const ElmModel& model, const Dataset& val, double delta,
                    const std::vector<std::size_t>& schedule,
                    SelectionMetric metric = SelectionMetric::kAccuracy,
                    const Dataset* refit_on = nullptr,
                    double rcond = linalg::kDefaultRcond);

/// Same walk as rbp with a uniformly random removal order.
SelectionResult random_prune(const ElmModel& model, const Dataset& val, double delta,
                             const std::vector<std::size_t>& schedule, std::uint64_t seed,
                             SelectionMetric metric = SelectionMetric::kAccuracy);

/// Shared pruning walk for an explicit keep-priority order (a permutation of
/// the model's neurons; the last entries are removed first).
SelectionResult prune_in_order(const ElmModel& model, const Dataset& val, double delta,
                               const std::vector<std::size_t>& schedule,
                               const std::vector<std::size_t>& order, SelectionMetric metric);

/// Neuron indices sorted by |beta| descending; equal magnitudes keep index order.
std::vector<std::size_t> relevance_order(const Vector& beta);

struct ForwardOptions {
  double delta = 0.02;
  SelectionMetric metric = SelectionMetric::kAccuracy;
  Activation activation = Activation::kTanh;
  /// The validation curve counts as levelled once the best metric inside
  /// the trailing window (sizes in (M / window, M]) fails to beat the best
  /// metric below it by delta. Must exceed the width of the dip around the
  /// interpolation point M = N.
  double plateau_window = 32.0;
  double rcond = linalg::kDefaultRcond;
};

/// Forward growing: a fresh ELM (new W, b) at each grid size, stopping when
/// the validation curve levels off or the grid runs out. Returns the best
/// validation model seen.
SelectionResult forward_grow(const Dataset& train, const Dataset& val,
                             const std::vector<std::size_t>& grid, std::uint64_t seed,
                             const ForwardOptions& options = {});

/// Best validation model among std_grid(N) sizes, all strictly below N.
SelectionResult std_select(const Dataset& train, const Dataset& val, std::uint64_t seed,
                           Activation activation = Activation::kTanh,
                           SelectionMetric metric = SelectionMetric::kAccuracy,
                           double rcond = linalg::kDefaultRcond);

}  // namespace elmprune::pruning
