#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "elmprune/dataset.hpp"
#include "elmprune/linalg.hpp"

namespace elmprune {

enum class Activation { kSigmoid, kTanh, kRelu };

/// Accepts "sigmoid", "tanh", "relu"; throws ContractViolation otherwise.
Activation parse_activation(std::string_view name);
std::string_view to_string(Activation activation);

inline double activate(Activation activation, double v) {
  switch (activation) {
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-v));
    case Activation::kTanh: return std::tanh(v);
    case Activation::kRelu: return v > 0.0 ? v : 0.0;
  }
  return v;
}

/// Random projection (W, b) and activation g. Immutable once built.
class HiddenLayer {
 public:
  /// weights is M x D, bias has length M; every entry must lie in [-1, 1].
  HiddenLayer(Matrix weights, Vector bias, Activation activation);

  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }
  Activation activation() const { return activation_; }
  std::size_t neurons() const { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(weights_.cols()); }

 private:
  Matrix weights_;
  Vector bias_;
  Activation activation_;
};

/// A hidden layer plus its trained output weights.
class ElmModel {
 public:
  ElmModel(HiddenLayer hidden, Vector beta);

  const HiddenLayer& hidden() const { return hidden_; }
  const Vector& beta() const { return beta_; }
  std::size_t neurons() const { return hidden_.neurons(); }

 private:
  HiddenLayer hidden_;
  Vector beta_;
};

/// Draws W and b i.i.d. U[-1, 1]. Neuron i consumes D draws for its weight
/// row followed by one for its bias, so a layer of M neurons is a prefix of
/// the layer of M + 1 neurons built from the same seed.
HiddenLayer init_hidden(std::size_t neurons, std::size_t inputs, Activation activation,
                        std::uint64_t seed);

/// H = g(W X + b 1^T)^T, shape N x M. The product runs through Eigen; the
/// bias + activation pass is an OpenMP loop over neurons.
Matrix hidden_output(const HiddenLayer& layer, const Matrix& x);

namespace reference {
/// Scalar triple-loop evaluation of the hidden layer; test oracle for the
/// parallel kernel.
Matrix hidden_output(const HiddenLayer& layer, const Matrix& x);
}  // namespace reference

/// beta = pinv(H) y on the training data.
ElmModel train(const HiddenLayer& layer, const Dataset& data,
               double rcond = linalg::kDefaultRcond);

/// Output weights fitted to a precomputed hidden output H.
ElmModel train_on_hidden(const HiddenLayer& layer, const Matrix& h, const Vector& y,
                         double rcond = linalg::kDefaultRcond);

/// z_n = beta^T g(W x_n + b).
Vector predict_scores(const ElmModel& model, const Matrix& x);

/// +1 where score >= 0, else -1 (sign(0) = +1).
Vector labels_from_scores(const Vector& scores);
Vector predict_labels(const ElmModel& model, const Matrix& x);

/// H with one extra column of i.i.d. U[-1, 1] entries on the right. The
/// column is drawn without looking at any labels.
Matrix append_fake_neuron(const Matrix& h, std::uint64_t seed);

/// Keeps the neurons listed in `keep` (in that order).
HiddenLayer select_neurons(const HiddenLayer& layer, const std::vector<std::size_t>& keep);

}  // namespace elmprune
