#pragma once

// Independent reference computations used by the test suites. None of these
// call into the code paths they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace elmprune::testing {

/// AUC by enumerating every positive/negative pair (ties count 1/2).
inline double brute_force_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (labels(i) <= 0) continue;
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
      if (labels(j) > 0) continue;
      pairs += 1.0;
      if (scores(i) > scores(j)) wins += 1.0;
      else if (scores(i) == scores(j)) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Least squares via the normal equations (full column rank only).
inline Eigen::VectorXd normal_equations_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd gram = h.transpose() * h;
  return gram.ldlt().solve(h.transpose() * y);
}

inline double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = b.norm();
  return scale == 0.0 ? a.norm() : (a - b).norm() / scale;
}

inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  return (da * db).sum() / std::sqrt((da * da).sum() * (db * db).sum());
}

/// Random matrix with entries in [-1, 1] from a test-local generator.
inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(gen);
  return m;
}

/// rows x cols matrix of the given rank (product of two random factors).
inline Eigen::MatrixXd random_low_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank,
                                       std::mt19937_64& gen) {
  return random_matrix(rows, rank, gen) * random_matrix(rank, cols, gen);
}

}  // namespace elmprune::testing
