#include "elmprune/linalg.hpp"

#include <string>

#include "elmprune/errors.hpp"

namespace elmprune::linalg {
namespace {

template <typename Dense>
void check_finite(const Dense& a, std::string_view what) {
  if (a.size() == 0) {
    throw ContractViolation(std::string(what) + ": empty matrix");
  }
  if (!a.allFinite()) {
    throw ContractViolation(std::string(what) + ": non-finite entry");
  }
}

void check_rcond(double rcond) {
  if (!(rcond >= 0.0)) throw ContractViolation("rcond must be non-negative");
}

Eigen::BDCSVD<Matrix> decompose(const Matrix& a, bool vectors) {
  check_finite(a, "svd");
  const unsigned options = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<Matrix> solver(a, options);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("svd: decomposition did not converge (" + std::to_string(a.rows()) +
                           "x" + std::to_string(a.cols()) + ")");
  }
  if (!solver.singularValues().allFinite()) {
    throw NumericalFailure("svd: non-finite singular values");
  }
  return solver;
}

// Number of singular values strictly above rcond * sigma_max.
Eigen::Index retained_rank(const Vector& s, double rcond) {
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = rcond * s(0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return rank;
}

}  // namespace

void require_finite(const Matrix& a, std::string_view what) { check_finite(a, what); }
void require_finite(const Vector& a, std::string_view what) { check_finite(a, what); }

Svd svd(const Matrix& a) {
  auto solver = decompose(a, true);
  return Svd{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vector singular_values(const Matrix& a) { return decompose(a, false).singularValues(); }

Matrix pseudoinverse(const Matrix& a, double rcond) {
  check_rcond(rcond);
  const auto solver = decompose(a, true);
  const Vector& s = solver.singularValues();
  const Eigen::Index rank = retained_rank(s, rcond);
  const Vector inv = s.head(rank).cwiseInverse();
  return solver.matrixV().leftCols(rank) * inv.asDiagonal() *
         solver.matrixU().leftCols(rank).transpose();
}

Vector min_norm_lsq(const Matrix& h, const Vector& y, double rcond) {
  check_rcond(rcond);
  if (h.rows() != y.size()) {
    throw ContractViolation("min_norm_lsq: H has " + std::to_string(h.rows()) +
                            " rows but y has length " + std::to_string(y.size()));
  }
  check_finite(y, "min_norm_lsq: y");
  const auto solver = decompose(h, true);
  const Vector& s = solver.singularValues();
  const Eigen::Index rank = retained_rank(s, rcond);
  const Vector projected = solver.matrixU().leftCols(rank).transpose() * y;
  return solver.matrixV().leftCols(rank) * projected.cwiseQuotient(s.head(rank));
}

double smallest_nonzero_singular_value(const Matrix& a, double rcond) {
  check_rcond(rcond);
  const Vector s = singular_values(a);
  const Eigen::Index rank = retained_rank(s, rcond);
  return rank == 0 ? 0.0 : s(rank - 1);
}

}  // namespace elmprune::linalg
