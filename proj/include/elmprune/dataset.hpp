#pragma once

#include <cstddef>

#include "elmprune/linalg.hpp"

namespace elmprune {

/// Binary-labelled samples: features x (D x N, one sample per column) and
/// labels y in {-1, +1}. Always holds at least two samples and both classes.
class Dataset {
 public:
  /// Validates the invariants; throws ContractViolation on failure.
  Dataset(Matrix x, Vector y);

  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  std::size_t dims() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t count(int label) const;

  bool operator==(const Dataset& other) const {
    return x_.rows() == other.x_.rows() && x_.cols() == other.x_.cols() &&
           x_ == other.x_ && y_ == other.y_;
  }

 private:
  Matrix x_;
  Vector y_;
};

}  // namespace elmprune
