#include "elmprune/dataset.hpp"

#include <string>

#include "elmprune/errors.hpp"

namespace elmprune {

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.cols() != y_.size()) {
    throw ContractViolation("Dataset: X has " + std::to_string(x_.cols()) +
                            " samples but y has " + std::to_string(y_.size()) + " labels");
  }
  if (x_.rows() < 1) throw ContractViolation("Dataset: no features");
  if (x_.cols() < 2) throw ContractViolation("Dataset: need at least two samples");
  linalg::require_finite(x_, "Dataset X");
  bool has_pos = false;
  bool has_neg = false;
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_(i) == 1.0) {
      has_pos = true;
    } else if (y_(i) == -1.0) {
      has_neg = true;
    } else {
      throw ContractViolation("Dataset: label at sample " + std::to_string(i) +
                              " is not -1 or +1");
    }
  }
  if (!has_pos || !has_neg) throw ContractViolation("Dataset: both classes must be present");
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>((y_.array() == static_cast<double>(label)).count());
}

}  // namespace elmprune
