#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace elmprune {

/// Dense real matrix. Storage is column-major (Eigen default) everywhere in
/// the library: samples are columns of X (D x N), neurons are rows of W
/// (M x D) and columns of H (N x M).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Singular values at or below rcond * sigma_max are treated as zero.
inline constexpr double kDefaultRcond = 1e-12;

/// Thin SVD: a = u * diag(s) * v^T with u (rows x k), v (cols x k),
/// k = min(rows, cols), s non-negative and non-increasing.
struct Svd {
  Matrix u;
  Vector s;
  Matrix v;
};

/// Throws ContractViolation if `a` is empty or holds a non-finite entry.
void require_finite(const Matrix& a, std::string_view what);
void require_finite(const Vector& a, std::string_view what);

/// Throws NumericalFailure if the decomposition does not converge.
Svd svd(const Matrix& a);

/// Singular values only (non-increasing).
Vector singular_values(const Matrix& a);

/// Moore-Penrose inverse: singular values above rcond * sigma_max are
/// inverted, the rest are zeroed.
Matrix pseudoinverse(const Matrix& a, double rcond = kDefaultRcond);

/// Minimal-norm least-squares solution pinv(h) * y, computed from the SVD
/// without forming pinv(h).
Vector min_norm_lsq(const Matrix& h, const Vector& y, double rcond = kDefaultRcond);

/// min{ s_i : s_i > rcond * sigma_max }, or 0 when nothing passes.
double smallest_nonzero_singular_value(const Matrix& a, double rcond = kDefaultRcond);

}  // namespace linalg
}  // namespace elmprune
