#include "elmprune/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "elmprune/errors.hpp"
#include "elmprune/rng.hpp"

namespace elmprune::data {

Dataset gen_two_moons(std::size_t n_per_class, double noise_sd, std::uint64_t seed) {
  if (n_per_class < 1) throw ContractViolation("gen_two_moons: n_per_class must be >= 1");
  if (!(noise_sd >= 0.0)) throw ContractViolation("gen_two_moons: noise_sd must be >= 0");
  const auto n = static_cast<Eigen::Index>(n_per_class);
  Matrix x(2, 2 * n);
  Vector y(2 * n);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const bool upper = i < n;
    const double t = rng.uniform(0.0, std::numbers::pi);
    const double nx = noise_sd * rng.normal();
    const double ny = noise_sd * rng.normal();
    if (upper) {
      x(0, i) = std::cos(t) + nx;
      x(1, i) = std::sin(t) + ny;
    } else {
      x(0, i) = 1.0 - std::cos(t) + nx;
      x(1, i) = 0.5 - std::sin(t) + ny;
    }
    y(i) = upper ? 1.0 : -1.0;
  }
  return Dataset(std::move(x), std::move(y));
}

JunkDistribution parse_junk_distribution(std::string_view name) {
  if (name == "uniform") return JunkDistribution::kUniform;
  if (name == "gaussian") return JunkDistribution::kGaussian;
  throw ContractViolation("unknown junk distribution '" + std::string(name) +
                          "' (expected uniform or gaussian)");
}

Dataset add_junk_features(const Dataset& data, std::size_t count, std::uint64_t seed,
                          JunkDistribution distribution) {
  if (count == 0) return data;
  const Eigen::Index d = data.x().rows();
  const Eigen::Index n = data.x().cols();
  Matrix x(d + static_cast<Eigen::Index>(count), n);
  x.topRows(d) = data.x();
  Rng rng(seed);
  for (Eigen::Index r = d; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      x(r, c) = distribution == JunkDistribution::kUniform ? rng.uniform(-1.0, 1.0) : rng.normal();
    }
  }
  return Dataset(std::move(x), data.y());
}

// -- splitting ---------------------------------------------------------------

void validate(const SplitSpec& spec) {
  const std::array<double, 3> fracs{spec.train_frac, spec.val_frac, spec.test_frac};
  for (double f : fracs) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ContractViolation("split: every fraction must lie in (0, 1)");
    }
  }
  if (std::abs(fracs[0] + fracs[1] + fracs[2] - 1.0) > 1e-9) {
    throw ContractViolation("split: fractions must sum to 1");
  }
}

namespace {

// Largest-remainder apportionment of `total` by `weights` (ties go to the
// earlier part).
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / weight_sum;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    assigned += counts[i];
    remainders.emplace_back(quota - std::floor(quota), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

// Per-class counts for each part: floor/ceil of the proportional quota, with
// row sums (classes) and column sums (parts) both exact. The rounding is a
// tiny 0/1 transportation problem, solved by enumeration.
std::vector<std::vector<std::size_t>> stratified_counts(const std::vector<std::size_t>& class_sizes,
                                                        const std::vector<std::size_t>& part_sizes,
                                                        std::size_t total) {
  const std::size_t classes = class_sizes.size();
  const std::size_t parts = part_sizes.size();
  std::vector<std::vector<std::size_t>> base(classes, std::vector<std::size_t>(parts));
  std::vector<std::vector<double>> frac(classes, std::vector<double>(parts));
  std::vector<long> class_left(classes);
  std::vector<long> part_left(parts);
  for (std::size_t p = 0; p < parts; ++p) part_left[p] = static_cast<long>(part_sizes[p]);
  for (std::size_t c = 0; c < classes; ++c) {
    class_left[c] = static_cast<long>(class_sizes[c]);
    for (std::size_t p = 0; p < parts; ++p) {
      const double quota = static_cast<double>(class_sizes[c]) *
                           static_cast<double>(part_sizes[p]) / static_cast<double>(total);
      base[c][p] = static_cast<std::size_t>(std::floor(quota));
      frac[c][p] = quota - std::floor(quota);
      class_left[c] -= static_cast<long>(base[c][p]);
      part_left[p] -= static_cast<long>(base[c][p]);
    }
  }
  const std::size_t cells = classes * parts;
  double best_score = -1.0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
    std::vector<long> rows(classes, 0);
    std::vector<long> cols(parts, 0);
    double score = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if ((mask >> cell) & 1U) {
        ++rows[cell / parts];
        ++cols[cell % parts];
        score += frac[cell / parts][cell % parts];
      }
    }
    if (rows == class_left && cols == part_left && score > best_score) {
      best_score = score;
      best_mask = mask;
    }
  }
  if (best_score < 0.0) throw NumericalFailure("split: stratified rounding has no solution");
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if ((best_mask >> cell) & 1U) ++base[cell / parts][cell % parts];
  }
  return base;
}

constexpr std::array<const char*, 3> kPartNames{"train", "validation", "test"};

Dataset make_part(const Dataset& data, const std::vector<std::size_t>& idx, std::size_t part) {
  try {
    return subset(data, idx);
  } catch (const ContractViolation& e) {
    throw ContractViolation(std::string("split: ") + kPartNames[part] +
                            " part is unusable (" + e.what() + "); dataset too small");
  }
}

}  // namespace

std::vector<std::size_t> split_sizes(std::size_t n, const SplitSpec& spec) {
  validate(spec);
  return apportion(n, {spec.train_frac, spec.val_frac, spec.test_frac});
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices) {
  Matrix x(data.x().rows(), static_cast<Eigen::Index>(indices.size()));
  Vector y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= data.size()) throw ContractViolation("subset: index out of range");
    const auto src = static_cast<Eigen::Index>(indices[i]);
    x.col(static_cast<Eigen::Index>(i)) = data.x().col(src);
    y(static_cast<Eigen::Index>(i)) = data.y()(src);
  }
  return Dataset(std::move(x), std::move(y));
}

Split split(const Dataset& data, const SplitSpec& spec) {
  const std::vector<std::size_t> sizes = split_sizes(data.size(), spec);
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    if (sizes[p] < 2) {
      throw ContractViolation(std::string("split: ") + kPartNames[p] + " part would hold " +
                              std::to_string(sizes[p]) + " sample(s); dataset too small");
    }
  }
  Rng rng(spec.seed);
  std::array<std::vector<std::size_t>, 3> parts;
  if (spec.stratified) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < data.size(); ++i) {
      by_class[data.y()(static_cast<Eigen::Index>(i)) > 0.0 ? 0 : 1].push_back(i);
    }
    const auto counts = stratified_counts({by_class[0].size(), by_class[1].size()}, sizes,
                                          data.size());
    for (std::size_t c = 0; c < 2; ++c) {
      const auto perm = random_permutation(by_class[c].size(), rng);
      std::size_t next = 0;
      for (std::size_t p = 0; p < 3; ++p) {
        if (counts[c][p] == 0) {
          throw ContractViolation(std::string("split: ") + kPartNames[p] +
                                  " part gets no samples of one class; dataset too small");
        }
        for (std::size_t k = 0; k < counts[c][p]; ++k) parts[p].push_back(by_class[c][perm[next++]]);
      }
    }
  } else {
    const auto perm = random_permutation(data.size(), rng);
    std::size_t next = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < sizes[p]; ++k) parts[p].push_back(perm[next++]);
    }
  }
  for (auto& part : parts) std::sort(part.begin(), part.end());
  Dataset train = make_part(data, parts[0], 0);
  Dataset val = make_part(data, parts[1], 1);
  Dataset test = make_part(data, parts[2], 2);
  return Split{std::move(train), std::move(val),      std::move(test),
               std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

std::uint64_t Split::fingerprint() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (v >> (8 * byte)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const auto* part : {&train_idx, &val_idx, &test_idx}) {
    mix(part->size());
    for (std::size_t i : *part) mix(i);
  }
  return hash;
}

std::vector<Split> make_cv_splits(const Dataset& data, const CvPlan& plan, const SplitSpec& spec) {
  if (plan.seeds.empty()) throw ContractViolation("make_cv_splits: no seeds");
  if (std::set<std::uint64_t>(plan.seeds.begin(), plan.seeds.end()).size() != plan.seeds.size()) {
    throw ContractViolation("make_cv_splits: seeds must be distinct");
  }
  std::vector<Split> splits;
  splits.reserve(plan.seeds.size());
  for (std::uint64_t seed : plan.seeds) {
    SplitSpec s = spec;
    s.seed = seed;
    splits.push_back(split(data, s));
  }
  return splits;
}

Standardizer::Standardizer(const Matrix& x)
    : mean_(x.rowwise().mean()), scale_(x.rows()) {
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double var = (x.row(r).array() - mean_(r)).square().mean();
    scale_(r) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
}

Dataset Standardizer::apply(const Dataset& data) const {
  if (data.x().rows() != mean_.size()) {
    throw ContractViolation("Standardizer: feature count mismatch");
  }
  Matrix x = (data.x().colwise() - mean_).array().colwise() / scale_.array();
  return Dataset(std::move(x), data.y());
}

// -- CSV ---------------------------------------------------------------------

std::string_view to_string(CsvErrorKind kind) {
  switch (kind) {
    case CsvErrorKind::kIo: return "io";
    case CsvErrorKind::kEmpty: return "empty";
    case CsvErrorKind::kMalformedRow: return "malformed-row";
    case CsvErrorKind::kNonNumeric: return "non-numeric";
    case CsvErrorKind::kMissingLabelColumn: return "missing-label-column";
    case CsvErrorKind::kBadLabel: return "bad-label";
    case CsvErrorKind::kSingleClass: return "single-class";
  }
  return "?";
}

namespace {

std::string describe(CsvErrorKind kind, std::size_t line, std::size_t column,
                     const std::string& detail) {
  std::ostringstream out;
  out << "csv " << to_string(kind);
  if (line > 0) out << " at row " << line;
  if (line > 0 && column > 0) out << ", column " << column;
  out << ": " << detail;
  return out.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

}  // namespace

CsvError::CsvError(CsvErrorKind kind, std::size_t line, std::size_t column,
                   const std::string& detail)
    : std::runtime_error(describe(kind, line, column, detail)),
      kind_(kind),
      line_(line),
      column_(column) {}

Dataset parse_csv(std::string_view text, const LabelColumn& label_column) {
  struct Row {
    std::size_t line;
    std::vector<std::string_view> cells;
  };
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++line_no;
    if (!trim(line).empty()) rows.push_back({line_no, split_cells(line)});
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (rows.empty()) throw CsvError(CsvErrorKind::kEmpty, 0, 0, "no rows");

  bool has_header = false;
  for (auto cell : rows.front().cells) {
    double v = 0.0;
    if (!parse_number(cell, v)) has_header = true;
  }
  const std::size_t width = rows.front().cells.size();
  if (width < 2) {
    throw CsvError(CsvErrorKind::kMalformedRow, rows.front().line, 0,
                   "need at least one feature column and a label column");
  }

  std::size_t label_idx = 0;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    if (!has_header) {
      throw CsvError(CsvErrorKind::kMissingLabelColumn, 0, 0,
                     "label column '" + *name + "' requested but the file has no header");
    }
    const auto& header = rows.front().cells;
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      throw CsvError(CsvErrorKind::kMissingLabelColumn, rows.front().line, 0,
                     "no column named '" + *name + "'");
    }
    label_idx = static_cast<std::size_t>(it - header.begin());
  } else {
    const long index = std::get<long>(label_column);
    const long resolved = index < 0 ? static_cast<long>(width) + index : index;
    if (resolved < 0 || resolved >= static_cast<long>(width)) {
      throw CsvError(CsvErrorKind::kMissingLabelColumn, 0, 0,
                     "label column index " + std::to_string(index) + " out of range for " +
                         std::to_string(width) + " columns");
    }
    label_idx = static_cast<std::size_t>(resolved);
  }

  const std::size_t first = has_header ? 1 : 0;
  if (rows.size() <= first) throw CsvError(CsvErrorKind::kEmpty, 0, 0, "no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size() - first);
  Matrix x(static_cast<Eigen::Index>(width - 1), n);
  Vector raw_labels(n);
  for (std::size_t r = first; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.cells.size() != width) {
      throw CsvError(CsvErrorKind::kMalformedRow, row.line, 0,
                     "expected " + std::to_string(width) + " cells, found " +
                         std::to_string(row.cells.size()));
    }
    const auto col = static_cast<Eigen::Index>(r - first);
    Eigen::Index feature = 0;
    for (std::size_t c = 0; c < width; ++c) {
      double value = 0.0;
      if (!parse_number(row.cells[c], value)) {
        throw CsvError(CsvErrorKind::kNonNumeric, row.line, c + 1,
                       "cannot parse '" + std::string(row.cells[c]) + "' as a finite number");
      }
      if (c == label_idx) {
        raw_labels(col) = value;
      } else {
        x(feature++, col) = value;
      }
    }
  }

  bool zero_one = false;
  bool minus_one = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = raw_labels(i);
    const std::size_t line = rows[first + static_cast<std::size_t>(i)].line;
    if (v == 0.0) {
      zero_one = true;
    } else if (v == -1.0) {
      minus_one = true;
    } else if (v != 1.0) {
      throw CsvError(CsvErrorKind::kBadLabel, line, label_idx + 1,
                     "label must be -1/+1 or 0/1");
    }
    if (zero_one && minus_one) {
      throw CsvError(CsvErrorKind::kBadLabel, line, label_idx + 1,
                     "labels mix the 0/1 and -1/+1 conventions");
    }
  }
  Vector y = raw_labels.unaryExpr([](double v) { return v == 1.0 ? 1.0 : -1.0; });
  if ((y.array() > 0.0).all() || (y.array() < 0.0).all()) {
    throw CsvError(CsvErrorKind::kSingleClass, 0, 0, "all samples carry the same label");
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(CsvErrorKind::kIo, 0, 0, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), label_column);
}

std::string format_csv(const Dataset& data) {
  std::string out;
  for (std::size_t d = 0; d < data.dims(); ++d) out += "x" + std::to_string(d + 1) + ",";
  out += "label\n";
  char buf[64];
  for (Eigen::Index n = 0; n < data.x().cols(); ++n) {
    for (Eigen::Index d = 0; d < data.x().rows(); ++d) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), data.x()(d, n));
      out.append(buf, res.ptr);
      out += ',';
    }
    out += data.y()(n) > 0.0 ? "1\n" : "-1\n";
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError(CsvErrorKind::kIo, 0, 0, "cannot write " + path.string());
  out << format_csv(data);
  if (!out) throw CsvError(CsvErrorKind::kIo, 0, 0, "write failed for " + path.string());
}

}  // namespace elmprune::data
