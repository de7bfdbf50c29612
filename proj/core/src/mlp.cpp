#include <cmath>

#include "packscope/classifiers.hpp"
#include "packscope/error.hpp"

namespace packscope {

namespace {

double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Activations of every layer for one input; acts[0] is the input itself and
// the last entry holds the single output logit.
std::vector<std::vector<double>> forward(std::span<const DenseLayer> layers, std::span<const double> input) {
  std::vector<std::vector<double>> acts;
  acts.reserve(layers.size() + 1);
  acts.emplace_back(input.begin(), input.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto& prev = acts.back();
    std::vector<double> out(layer.outputs);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      double z = layer.biases[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * prev[i];
      const bool hidden = l + 1 < layers.size();
      out[o] = hidden ? std::max(z, 0.0) : z;
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

}  // namespace

std::vector<DenseLayer> init_mlp_layers(std::size_t inputs, std::span<const std::size_t> hidden, std::uint64_t seed) {
  if (hidden.empty()) throw Error(ErrorCode::InvalidParams, "MLP needs at least one hidden layer");
  Xorshift64Star rng(derive_seed(seed, "mlp-init"));
  std::vector<DenseLayer> layers;
  std::size_t fan_in = inputs;
  auto add_layer = [&](std::size_t fan_out) {
    if (fan_out == 0) throw Error(ErrorCode::InvalidParams, "hidden layer sizes must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer layer{fan_in, fan_out, std::vector<double>(fan_in * fan_out), std::vector<double>(fan_out, 0.0)};
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (auto h : hidden) add_layer(h);
  add_layer(1);
  return layers;
}

double mlp_logit(std::span<const DenseLayer> layers, std::span<const double> input) {
  return forward(layers, input).back().front();
}

MlpObjective mlp_objective(std::span<const DenseLayer> layers, const Matrix& x, std::span<const int> labels) {
  MlpObjective out;
  out.grads.reserve(layers.size());
  for (const auto& layer : layers) {
    out.grads.push_back({layer.inputs, layer.outputs, std::vector<double>(layer.weights.size(), 0.0),
                         std::vector<double>(layer.biases.size(), 0.0)});
  }
  const std::size_t n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t s = 0; s < n; ++s) {
    const auto acts = forward(layers, x.row(s));
    const double z = acts.back().front();
    const double y = labels[s];
    out.loss += softplus(z) - y * z;

    // delta holds dLoss/dz for the current layer's pre-activations.
    std::vector<double> delta{(sigmoid(z) - y) * inv_n};
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& layer = layers[l];
      auto& grad = out.grads[l];
      const auto& input = acts[l];
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        grad.biases[o] += delta[o];
        double* gw = grad.weights.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) gw[i] += delta[o] * input[i];
      }
      if (l == 0) break;
      std::vector<double> prev(layer.inputs, 0.0);
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double* w = layer.weights.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += w[i] * delta[o];
      }
      // ReLU gate: the derivative at exactly 0 is taken as 0.
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        if (!(input[i] > 0.0)) prev[i] = 0.0;
      }
      delta = std::move(prev);
    }
  }
  out.loss *= inv_n;
  return out;
}

TrainedModel train_mlp(const Matrix& features, std::span<const int> labels, const MlpParams& params, std::uint64_t seed) {
  if (features.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
  if (labels.size() != features.rows()) throw Error(ErrorCode::DimensionMismatch, "label count does not match row count");
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::NonBinaryLabels, "labels must be 0 or 1");
  }
  if (!(params.learning_rate > 0.0)) throw Error(ErrorCode::InvalidParams, "learning rate must be positive");

  auto scaler = fit_scaler(features);
  const Matrix x = scaler.apply(features);
  MlpModel body{params, init_mlp_layers(x.cols(), params.hidden_sizes, seed)};
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto obj = mlp_objective(body.layers, x, labels);
    if (!std::isfinite(obj.loss)) throw Error(ErrorCode::NonFiniteLoss, "MLP training diverged");
    for (std::size_t l = 0; l < body.layers.size(); ++l) {
      auto& layer = body.layers[l];
      const auto& grad = obj.grads[l];
      for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= params.learning_rate * grad.weights[i];
      for (std::size_t i = 0; i < layer.biases.size(); ++i) layer.biases[i] -= params.learning_rate * grad.biases[i];
    }
  }
  return {std::move(scaler), seed, std::move(body)};
}

}  // namespace packscope
