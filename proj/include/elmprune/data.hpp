#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "elmprune/dataset.hpp"

namespace elmprune::data {

/// Two interleaved half circles in the plane. Class +1: (cos t, sin t);
/// class -1: (1 - cos t, 0.5 - sin t); t ~ U[0, pi). Each point gets
/// isotropic Gaussian noise with standard deviation noise_sd. Samples are
/// ordered class +1 first.
Dataset gen_two_moons(std::size_t n_per_class, double noise_sd, std::uint64_t seed);

enum class JunkDistribution { kUniform, kGaussian };

JunkDistribution parse_junk_distribution(std::string_view name);

/// Appends `count` feature rows drawn independently of the labels
/// (U[-1, 1] or N(0, 1)). The original rows are untouched.
Dataset add_junk_features(const Dataset& data, std::size_t count, std::uint64_t seed,
                          JunkDistribution distribution = JunkDistribution::kUniform);

struct SplitSpec {
  double train_frac = 0.7;
  double val_frac = 0.2;
  double test_frac = 0.1;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
  /// Sample indices into the source dataset, ascending.
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  std::vector<std::size_t> test_idx;

  /// FNV-1a over the three index lists; identical partitions hash equal.
  std::uint64_t fingerprint() const;
};

/// Throws ContractViolation for an invalid spec (fractions outside (0, 1) or
/// not summing to 1).
void validate(const SplitSpec& spec);

/// Largest-remainder split sizes for n samples.
std::vector<std::size_t> split_sizes(std::size_t n, const SplitSpec& spec);

/// Disjoint partition of the samples into train/val/test. Part sizes follow
/// largest-remainder rounding of N * fraction; when stratified, each class is
/// spread so every part's class counts are within one sample of
/// proportional. Throws ContractViolation when a part would lack a class.
Split split(const Dataset& data, const SplitSpec& spec);

/// Repeated random sub-sampling: one split per seed.
struct CvPlan {
  std::vector<std::uint64_t> seeds;
};

std::vector<Split> make_cv_splits(const Dataset& data, const CvPlan& plan, const SplitSpec& spec);

Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices);

/// Per-feature z-scoring fitted on one dataset and applied to others.
class Standardizer {
 public:
  explicit Standardizer(const Matrix& x);
  Dataset apply(const Dataset& data) const;

 private:
  Vector mean_;
  Vector scale_;
};

// -- CSV ---------------------------------------------------------------------

enum class CsvErrorKind {
  kIo,
  kEmpty,
  kMalformedRow,
  kNonNumeric,
  kMissingLabelColumn,
  kBadLabel,
  kSingleClass,
};

std::string_view to_string(CsvErrorKind kind);

/// Ingestion failure with 1-based file line and 1-based column context
/// (0 when not applicable).
class CsvError : public std::runtime_error {
 public:
  CsvError(CsvErrorKind kind, std::size_t line, std::size_t column, const std::string& detail);

  CsvErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  CsvErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Label column selected by header name or 0-based index. Negative index
/// counts from the end (-1 = last column).
using LabelColumn = std::variant<std::string, long>;

/// Parses a comma-separated file: optional header row (detected when the
/// first row has a non-numeric cell), one sample per row. Labels must be
/// {-1, +1} or {0, 1} (0 maps to -1). Throws CsvError.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column);
Dataset parse_csv(std::string_view text, const LabelColumn& label_column);

/// Writes header x1..xD,label and full-precision values; load_csv on the
/// result reproduces the dataset exactly.
void write_csv(const std::filesystem::path& path, const Dataset& data);
std::string format_csv(const Dataset& data);

}  // namespace elmprune::data
