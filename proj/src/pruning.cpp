#include "elmprune/pruning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "elmprune/errors.hpp"
#include "elmprune/metrics.hpp"
#include "elmprune/rng.hpp"

namespace elmprune::pruning {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_schedule(const std::vector<std::size_t>& schedule, std::size_t model_size) {
  if (schedule.empty()) throw ContractViolation("pruning: empty schedule");
  if (schedule.front() > model_size) {
    throw ContractViolation("pruning: schedule starts at " + std::to_string(schedule.front()) +
                            " but the model has " + std::to_string(model_size) + " neurons");
  }
  if (schedule.back() < 1) throw ContractViolation("pruning: schedule sizes must be >= 1");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] >= schedule[i - 1]) {
      throw ContractViolation("pruning: schedule must be strictly decreasing");
    }
  }
}

void check_grid(const std::vector<std::size_t>& grid) {
  if (grid.empty()) throw ContractViolation("forward_grow: empty grid");
  if (grid.front() < 1) throw ContractViolation("forward_grow: grid sizes must be >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw ContractViolation("forward_grow: grid must be strictly increasing");
    }
  }
}

void check_compatible(const ElmModel& model, const Dataset& val) {
  if (val.dims() != model.hidden().inputs()) {
    throw ContractViolation("pruning: validation data has " + std::to_string(val.dims()) +
                            " features, model expects " +
                            std::to_string(model.hidden().inputs()));
  }
}

// Grows through `grid`; a plateau_window <= 1 disables the plateau stop.
SelectionResult grow(const Dataset& train_data, const Dataset& val,
                     const std::vector<std::size_t>& grid, std::uint64_t seed,
                     const ForwardOptions& options, bool allow_stop) {
  check_grid(grid);
  if (val.dims() != train_data.dims()) {
    throw ContractViolation("forward_grow: train and validation feature counts differ");
  }
  if (std::isnan(options.delta)) throw ContractViolation("forward_grow: delta is NaN");
  const auto start = Clock::now();

  PruneTrace trace;
  std::optional<ElmModel> best_model;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t size : grid) {
    const HiddenLayer layer =
        init_hidden(size, train_data.dims(), options.activation, derive_seed(seed, size));
    ElmModel model = elmprune::train(layer, train_data, options.rcond);
    const double metric = evaluate(options.metric, predict_scores(model, val.x()), val.y());
    if (metric > best) {
      best = metric;
      best_model = std::move(model);
      trace.chosen_size = size;
      trace.chosen_metric = metric;
    }
    trace.steps.push_back({size, metric, best});

    if (allow_stop && options.plateau_window > 1.0) {
      const double boundary = static_cast<double>(size) / options.plateau_window;
      double old_best = -std::numeric_limits<double>::infinity();
      double recent_best = -std::numeric_limits<double>::infinity();
      for (const auto& step : trace.steps) {
        double& slot = static_cast<double>(step.size) <= boundary ? old_best : recent_best;
        slot = std::max(slot, step.metric);
      }
      if (std::isfinite(old_best) && recent_best < old_best + options.delta) break;
    }
  }
  return SelectionResult{std::move(*best_model), std::move(trace), seconds_since(start), {}};
}

}  // namespace

SelectionMetric parse_metric(std::string_view name) {
  if (name == "accuracy") return SelectionMetric::kAccuracy;
  if (name == "auc") return SelectionMetric::kAuc;
  throw ContractViolation("unknown metric '" + std::string(name) +
                          "' (expected accuracy or auc)");
}

std::string_view to_string(SelectionMetric metric) {
  return metric == SelectionMetric::kAuc ? "auc" : "accuracy";
}

double evaluate(SelectionMetric metric, const Vector& scores, const Vector& labels) {
  if (metric == SelectionMetric::kAuc) return metrics::auc(scores, labels);
  return metrics::accuracy(labels_from_scores(scores), labels);
}

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, double ratio) {
  if (lo < 1 || hi < lo) throw ContractViolation("geometric_grid: need 1 <= lo <= hi");
  if (!(ratio > 1.0)) throw ContractViolation("geometric_grid: ratio must exceed 1");
  std::vector<std::size_t> grid;
  for (double x = static_cast<double>(lo); x < static_cast<double>(hi); x *= ratio) {
    grid.push_back(static_cast<std::size_t>(std::llround(x)));
  }
  grid.push_back(hi);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<std::size_t> default_prune_schedule(std::size_t max_size) {
  if (max_size < 1) throw ContractViolation("default_prune_schedule: size must be >= 1");
  std::vector<std::size_t> schedule;
  if (max_size <= 2000) {
    schedule.resize(max_size);
    std::iota(schedule.rbegin(), schedule.rend(), std::size_t{1});
    return schedule;
  }
  schedule = geometric_grid(1, max_size, 1.0 / 0.9);
  std::reverse(schedule.begin(), schedule.end());
  return schedule;
}

std::vector<std::size_t> std_grid(std::size_t n_train) {
  if (n_train < 3) throw ContractViolation("std_grid: need at least 3 training samples");
  constexpr int kPoints = 12;
  const double top = std::log(static_cast<double>(n_train - 1));
  std::vector<std::size_t> grid;
  for (int i = 0; i < kPoints; ++i) {
    const double x = std::exp(top * i / (kPoints - 1));
    grid.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(x)), 1,
                                           n_train - 1));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<std::size_t> relevance_order(const Vector& beta) {
  std::vector<std::size_t> order(static_cast<std::size_t>(beta.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(beta(static_cast<Eigen::Index>(a))) >
           std::abs(beta(static_cast<Eigen::Index>(b)));
  });
  return order;
}

SelectionResult prune_in_order(const ElmModel& model, const Dataset& val, double delta,
                               const std::vector<std::size_t>& schedule,
                               const std::vector<std::size_t>& order, SelectionMetric metric) {
  const std::size_t total = model.neurons();
  check_schedule(schedule, total);
  check_compatible(model, val);
  if (!(delta >= 0.0)) throw ContractViolation("pruning: delta must be non-negative");
  if (order.size() != total) throw ContractViolation("pruning: order must cover every neuron");
  {
    std::vector<bool> seen(total, false);
    for (std::size_t k : order) {
      if (k >= total || seen[k]) throw ContractViolation("pruning: order is not a permutation");
      seen[k] = true;
    }
  }
  const auto start = Clock::now();

  const Matrix h = hidden_output(model.hidden(), val.x());
  const Vector& beta = model.beta();
  Vector scores = h * beta;
  std::size_t current = total;

  PruneTrace trace;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t size : schedule) {
    for (std::size_t k = size; k < current; ++k) {
      const auto col = static_cast<Eigen::Index>(order[k]);
      scores.noalias() -= beta(col) * h.col(col);
    }
    current = size;
    const double value = evaluate(metric, scores, val.y());
    best = std::max(best, value);
    trace.steps.push_back({size, value, best});
    // error > best_error + delta, written on the metric scale.
    if (value < best - delta) break;
    trace.chosen_size = size;
    trace.chosen_metric = value;
  }

  std::vector<std::size_t> retained(order.begin(),
                                    order.begin() + static_cast<std::ptrdiff_t>(trace.chosen_size));
  Vector kept_beta(static_cast<Eigen::Index>(retained.size()));
  for (std::size_t i = 0; i < retained.size(); ++i) {
    kept_beta(static_cast<Eigen::Index>(i)) = beta(static_cast<Eigen::Index>(retained[i]));
  }
  ElmModel pruned(select_neurons(model.hidden(), retained), std::move(kept_beta));
  return SelectionResult{std::move(pruned), std::move(trace), seconds_since(start),
                         std::move(retained)};
}

SelectionResult rbp(const ElmModel& model, const Dataset& val, double delta,
                    const std::vector<std::size_t>& schedule, SelectionMetric metric,
                    const Dataset* refit_on, double rcond) {
  const auto start = Clock::now();
  SelectionResult result =
      prune_in_order(model, val, delta, schedule, relevance_order(model.beta()), metric);
  if (refit_on != nullptr) {
    result.model = elmprune::train(result.model.hidden(), *refit_on, rcond);
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

SelectionResult random_prune(const ElmModel& model, const Dataset& val, double delta,
                             const std::vector<std::size_t>& schedule, std::uint64_t seed,
                             SelectionMetric metric) {
  Rng rng(seed);
  return prune_in_order(model, val, delta, schedule, random_permutation(model.neurons(), rng),
                        metric);
}

SelectionResult forward_grow(const Dataset& train, const Dataset& val,
                             const std::vector<std::size_t>& grid, std::uint64_t seed,
                             const ForwardOptions& options) {
  return grow(train, val, grid, seed, options, true);
}

SelectionResult std_select(const Dataset& train, const Dataset& val, std::uint64_t seed,
                           Activation activation, SelectionMetric metric, double rcond) {
  ForwardOptions options;
  options.metric = metric;
  options.activation = activation;
  options.rcond = rcond;
  return grow(train, val, std_grid(train.size()), seed, options, false);
}

}  // namespace elmprune::pruning
