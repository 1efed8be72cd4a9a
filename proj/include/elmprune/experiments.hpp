#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "elmprune/data.hpp"
#include "elmprune/elm.hpp"
#include "elmprune/errors.hpp"
#include "elmprune/pruning.hpp"

namespace elmprune::experiments {

enum class ExperimentKind { kJunkSweep, kSizeSweep, kFakeNeuron, kPruneCompare, kMethodTable };

/// "junk-sweep", "size-sweep", "fake-neuron", "prune-compare", "method-table".
ExperimentKind parse_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

/// Rejected configuration; field() names the offending key.
class ConfigError : public ContractViolation {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Network sizes to visit. Text forms: "auto", "list:5,10,20",
/// "geom:LO:HI:RATIO", "lin:LO:HI:STEP". HI = 0 stands for M*.
struct GridSpec {
  enum class Kind { kAuto, kList, kGeometric, kLinear };
  Kind kind = Kind::kAuto;
  std::vector<std::size_t> sizes;
  std::size_t lo = 1;
  std::size_t hi = 0;
  double step = 1.25;

  static GridSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Two-moons data plus junk features. Sweeps draw an independent training
/// set (n_train) and test set (n_test); the method table splits one pool of
/// n_samples with the configured SplitSpec.
struct SyntheticSource {
  std::size_t n_train = 100;
  std::size_t n_test = 1000;
  std::size_t n_samples = 400;
  double noise = 0.1;
  std::size_t junk = 100;
  std::vector<std::size_t> junk_counts{0, 10, 100};
  data::JunkDistribution junk_distribution = data::JunkDistribution::kUniform;
};

/// Pre-featurized samples; every protocol re-splits them once per repeat.
struct CsvSource {
  std::filesystem::path path;
  data::LabelColumn label_column = -1L;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSizeSweep;
  std::variant<SyntheticSource, CsvSource> source = SyntheticSource{};
  std::size_t mstar = 1000;
  double delta = 0.02;
  Activation activation = Activation::kTanh;
  pruning::SelectionMetric metric = pruning::SelectionMetric::kAccuracy;
  /// Random initializations.
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10,
                                   11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  /// Cross-validation re-splits (repeated random sub-sampling).
  std::vector<std::uint64_t> repeats{0};
  data::SplitSpec split;
  GridSpec grid;
  bool standardize = false;
  bool refit = false;
  double plateau_window = 32.0;
  double rcond = linalg::kDefaultRcond;
  /// 0 = OpenMP default.
  int threads = 0;
  std::filesystem::path out_dir = "results";
};

/// Throws ConfigError.
void validate(const ExperimentConfig& config);

/// JSON config file (see README for keys). Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// Grid after resolving "auto" and M* for this config. For sweeps "auto"
/// also inserts the training-set size so the interpolation point is visited.
std::vector<std::size_t> resolve_grid(const ExperimentConfig& config, std::size_t n_train);

/// One (repeat, seed, group, size) measurement.
struct Record {
  std::string group;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t size = 0;
  double value = 0.0;
  double extra = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t split_fingerprint = 0;
};

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Columns holding wall-clock measurements (excluded from reproducibility checks).
  std::vector<std::string> timing_columns;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
  std::string text(std::size_t row, std::string_view name) const;
};

struct RunReport {
  ExperimentKind kind;
  Table table;
  std::vector<Record> records;
};

RunReport run_junk_sweep(const ExperimentConfig& config);
RunReport run_size_sweep(const ExperimentConfig& config);
RunReport run_fake_neuron(const ExperimentConfig& config);
RunReport run_prune_compare(const ExperimentConfig& config);
RunReport run_method_table(const ExperimentConfig& config);
RunReport run(const ExperimentConfig& config);

/// Output weights of the layer trained with one extra random column
/// (the disconnected neuron) appended to H; the last entry belongs to it.
Vector fit_with_fake_neuron(const HiddenLayer& layer, const Dataset& train, std::uint64_t seed,
                            double rcond = linalg::kDefaultRcond);

std::string format_csv(const Table& table);
std::string format_text(const Table& table);
std::string format_summary_json(const RunReport& report, const ExperimentConfig& config);

struct WrittenFiles {
  std::filesystem::path csv;
  std::filesystem::path summary;
};

/// Writes <experiment>_<timestamp>.csv and summary.json into out_dir.
WrittenFiles write_report(const RunReport& report, const ExperimentConfig& config,
                          const std::filesystem::path& out_dir, const std::string& timestamp);

/// UTC time as YYYYmmddTHHMMSSZ.
std::string utc_timestamp();

}  // namespace elmprune::experiments
