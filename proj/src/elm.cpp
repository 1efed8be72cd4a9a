#include "elmprune/elm.hpp"

#include <string>

#include "elmprune/errors.hpp"
#include "elmprune/rng.hpp"

namespace elmprune {
namespace {

void require_input_dims(const HiddenLayer& layer, const Matrix& x, std::string_view what) {
  if (static_cast<std::size_t>(x.rows()) != layer.inputs()) {
    throw ContractViolation(std::string(what) + ": X has " + std::to_string(x.rows()) +
                            " features, layer expects " + std::to_string(layer.inputs()));
  }
  if (x.cols() < 1) throw ContractViolation(std::string(what) + ": X has no samples");
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ContractViolation("unknown activation '" + std::string(name) +
                          "' (expected sigmoid, tanh or relu)");
}

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "?";
}

HiddenLayer::HiddenLayer(Matrix weights, Vector bias, Activation activation)
    : weights_(std::move(weights)), bias_(std::move(bias)), activation_(activation) {
  if (weights_.rows() < 1 || weights_.cols() < 1) {
    throw ContractViolation("HiddenLayer: W must be at least 1x1");
  }
  if (bias_.size() != weights_.rows()) {
    throw ContractViolation("HiddenLayer: bias length " + std::to_string(bias_.size()) +
                            " != neuron count " + std::to_string(weights_.rows()));
  }
  linalg::require_finite(weights_, "HiddenLayer W");
  linalg::require_finite(bias_, "HiddenLayer b");
  if (weights_.cwiseAbs().maxCoeff() > 1.0 || bias_.cwiseAbs().maxCoeff() > 1.0) {
    throw ContractViolation("HiddenLayer: entries of W and b must lie in [-1, 1]");
  }
}

ElmModel::ElmModel(HiddenLayer hidden, Vector beta)
    : hidden_(std::move(hidden)), beta_(std::move(beta)) {
  if (static_cast<std::size_t>(beta_.size()) != hidden_.neurons()) {
    throw ContractViolation("ElmModel: beta length " + std::to_string(beta_.size()) +
                            " != neuron count " + std::to_string(hidden_.neurons()));
  }
  linalg::require_finite(beta_, "ElmModel beta");
}

HiddenLayer init_hidden(std::size_t neurons, std::size_t inputs, Activation activation,
                        std::uint64_t seed) {
  if (neurons < 1 || inputs < 1) {
    throw ContractViolation("init_hidden: neuron and input counts must be >= 1");
  }
  Rng rng(seed);
  const auto m = static_cast<Eigen::Index>(neurons);
  const auto d = static_cast<Eigen::Index>(inputs);
  Matrix weights(m, d);
  Vector bias(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) weights(i, j) = rng.uniform(-1.0, 1.0);
    bias(i) = rng.uniform(-1.0, 1.0);
  }
  return HiddenLayer(std::move(weights), std::move(bias), activation);
}

Matrix hidden_output(const HiddenLayer& layer, const Matrix& x) {
  require_input_dims(layer, x, "hidden_output");
  Matrix h = x.transpose() * layer.weights().transpose();
  const Eigen::Index cols = h.cols();
  const Eigen::Index rows = h.rows();
  const Vector& bias = layer.bias();
  const Activation g = layer.activation();
#pragma omp parallel for schedule(static) if (cols * rows > 4096)
  for (Eigen::Index m = 0; m < cols; ++m) {
    double* col = h.col(m).data();
    const double b = bias(m);
    for (Eigen::Index n = 0; n < rows; ++n) col[n] = activate(g, col[n] + b);
  }
  return h;
}

namespace reference {

Matrix hidden_output(const HiddenLayer& layer, const Matrix& x) {
  require_input_dims(layer, x, "reference::hidden_output");
  const Matrix& w = layer.weights();
  Matrix h(x.cols(), w.rows());
  for (Eigen::Index n = 0; n < x.cols(); ++n) {
    for (Eigen::Index m = 0; m < w.rows(); ++m) {
      double acc = layer.bias()(m);
      for (Eigen::Index d = 0; d < w.cols(); ++d) acc += w(m, d) * x(d, n);
      h(n, m) = activate(layer.activation(), acc);
    }
  }
  return h;
}

}  // namespace reference

ElmModel train_on_hidden(const HiddenLayer& layer, const Matrix& h, const Vector& y,
                         double rcond) {
  if (static_cast<std::size_t>(h.cols()) != layer.neurons()) {
    throw ContractViolation("train_on_hidden: H column count does not match the layer");
  }
  return ElmModel(layer, linalg::min_norm_lsq(h, y, rcond));
}

ElmModel train(const HiddenLayer& layer, const Dataset& data, double rcond) {
  return train_on_hidden(layer, hidden_output(layer, data.x()), data.y(), rcond);
}

Vector predict_scores(const ElmModel& model, const Matrix& x) {
  return hidden_output(model.hidden(), x) * model.beta();
}

Vector labels_from_scores(const Vector& scores) {
  return scores.unaryExpr([](double z) { return z >= 0.0 ? 1.0 : -1.0; });
}

Vector predict_labels(const ElmModel& model, const Matrix& x) {
  return labels_from_scores(predict_scores(model, x));
}

Matrix append_fake_neuron(const Matrix& h, std::uint64_t seed) {
  linalg::require_finite(h, "append_fake_neuron");
  Matrix out(h.rows(), h.cols() + 1);
  out.leftCols(h.cols()) = h;
  Rng rng(seed);
  for (Eigen::Index n = 0; n < h.rows(); ++n) out(n, h.cols()) = rng.uniform(-1.0, 1.0);
  return out;
}

HiddenLayer select_neurons(const HiddenLayer& layer, const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw ContractViolation("select_neurons: nothing to keep");
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix weights(m, layer.weights().cols());
  Vector bias(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t src = keep[static_cast<std::size_t>(i)];
    if (src >= layer.neurons()) throw ContractViolation("select_neurons: index out of range");
    weights.row(i) = layer.weights().row(static_cast<Eigen::Index>(src));
    bias(i) = layer.bias()(static_cast<Eigen::Index>(src));
  }
  return HiddenLayer(std::move(weights), std::move(bias), layer.activation());
}

}  // namespace elmprune
