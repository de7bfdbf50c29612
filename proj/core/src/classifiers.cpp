#include "packscope/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "packscope/error.hpp"

namespace packscope {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Knn: return "knn";
    case ModelKind::LogReg: return "logreg";
    case ModelKind::RandomForest: return "rf";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::LinearSvm: return "svm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::Knn, ModelKind::LogReg, ModelKind::RandomForest, ModelKind::Mlp, ModelKind::LinearSvm}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown model kind '" + std::string(text) + "' (knn|logreg|rf|mlp|svm)");
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_training_input(const Matrix& features, std::span<const int> labels) {
  if (features.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
  if (labels.size() != features.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match row count");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::NonBinaryLabels, "labels must be 0 or 1");
  }
}

void require_finite(double loss, std::string_view what) {
  if (!std::isfinite(loss)) throw Error(ErrorCode::NonFiniteLoss, std::string(what) + " training diverged");
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double knn_score(const KnnModel& m, std::span<const double> x) {
  const std::size_t n = m.train.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = m.train.row(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double diff = row[j] - x[j];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  const std::size_t k = m.params.k;
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::size_t positive = 0;
  for (std::size_t i = 0; i < k; ++i) positive += static_cast<std::size_t>(m.labels[dist[i].second]);
  return static_cast<double>(positive) / static_cast<double>(k);
}

}  // namespace

LinearObjective logreg_objective(const Matrix& x, std::span<const int> labels, std::span<const double> weights,
                                 double bias, double l2) {
  const std::size_t n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  LinearObjective out;
  out.grad_weights.assign(weights.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const double z = dot(weights, row) + bias;
    const double y = labels[i];
    out.loss += softplus(z) - y * z;
    const double residual = sigmoid(z) - y;
    for (std::size_t j = 0; j < row.size(); ++j) out.grad_weights[j] += residual * row[j];
    out.grad_bias += residual;
  }
  out.loss *= inv_n;
  out.grad_bias *= inv_n;
  double norm2 = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    out.grad_weights[j] = out.grad_weights[j] * inv_n + l2 * weights[j];
    norm2 += weights[j] * weights[j];
  }
  out.loss += 0.5 * l2 * norm2;
  return out;
}

LinearObjective hinge_objective(const Matrix& x, std::span<const int> labels, std::span<const double> weights,
                                double bias, double c) {
  const std::size_t n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  LinearObjective out;
  out.grad_weights.assign(weights.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const double y = labels[i] == 1 ? 1.0 : -1.0;
    const double margin = y * (dot(weights, row) + bias);
    if (margin < 1.0) {
      out.loss += 1.0 - margin;
      for (std::size_t j = 0; j < row.size(); ++j) out.grad_weights[j] -= y * row[j];
      out.grad_bias -= y;
    }
  }
  out.loss *= inv_n;
  out.grad_bias *= inv_n;
  double norm2 = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    out.grad_weights[j] = out.grad_weights[j] * inv_n + weights[j] / c;
    norm2 += weights[j] * weights[j];
  }
  out.loss += norm2 / (2.0 * c);
  return out;
}

TrainedModel train_knn(const Matrix& features, std::span<const int> labels, const KnnParams& params) {
  check_training_input(features, labels);
  if (params.k == 0) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
  if (params.k > features.rows()) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(params.k) + " exceeds " +
                                          std::to_string(features.rows()) + " training rows");
  }
  auto scaler = fit_scaler(features);
  KnnModel body{params, scaler.apply(features), std::vector<int>(labels.begin(), labels.end())};
  return {std::move(scaler), 0, std::move(body)};
}

TrainedModel train_logreg(const Matrix& features, std::span<const int> labels, const LogRegParams& params) {
  check_training_input(features, labels);
  if (!(params.learning_rate > 0.0)) throw Error(ErrorCode::InvalidParams, "learning rate must be positive");
  auto scaler = fit_scaler(features);
  const Matrix x = scaler.apply(features);
  LogRegModel body{params, std::vector<double>(x.cols(), 0.0), 0.0};
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto obj = logreg_objective(x, labels, body.weights, body.bias, params.l2);
    require_finite(obj.loss, "logistic regression");
    for (std::size_t j = 0; j < body.weights.size(); ++j) body.weights[j] -= params.learning_rate * obj.grad_weights[j];
    body.bias -= params.learning_rate * obj.grad_bias;
  }
  return {std::move(scaler), 0, std::move(body)};
}

TrainedModel train_linear_svm(const Matrix& features, std::span<const int> labels, const SvmParams& params) {
  check_training_input(features, labels);
  if (!(params.learning_rate > 0.0) || !(params.c > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "learning rate and C must be positive");
  }
  auto scaler = fit_scaler(features);
  const Matrix x = scaler.apply(features);
  SvmModel body{params, std::vector<double>(x.cols(), 0.0), 0.0};
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto obj = hinge_objective(x, labels, body.weights, body.bias, params.c);
    require_finite(obj.loss, "linear SVM");
    for (std::size_t j = 0; j < body.weights.size(); ++j) body.weights[j] -= params.learning_rate * obj.grad_weights[j];
    body.bias -= params.learning_rate * obj.grad_bias;
  }
  return {std::move(scaler), 0, std::move(body)};
}

TrainedModel train_model(const Matrix& features, std::span<const int> labels, const TrainConfig& config) {
  switch (config.kind) {
    case ModelKind::Knn: return train_knn(features, labels, config.knn);
    case ModelKind::LogReg: return train_logreg(features, labels, config.logreg);
    case ModelKind::LinearSvm: return train_linear_svm(features, labels, config.svm);
    case ModelKind::RandomForest: return train_random_forest(features, labels, config.forest, config.seed);
    case ModelKind::Mlp: return train_mlp(features, labels, config.mlp, config.seed);
  }
  throw Error(ErrorCode::InvalidParams, "unknown model kind");
}

double predict_confidence(const TrainedModel& model, std::span<const double> features) {
  const auto x = model.scaler.apply(features);
  const double score = std::visit(
      [&](const auto& body) -> double {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          return knn_score(body, x);
        } else if constexpr (std::is_same_v<T, LogRegModel> || std::is_same_v<T, SvmModel>) {
          return sigmoid(dot(body.weights, x) + body.bias);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          double sum = 0.0;
          for (const auto& tree : body.trees) sum += tree.predict(x);
          return body.trees.empty() ? 0.5 : sum / static_cast<double>(body.trees.size());
        } else {
          return sigmoid(mlp_logit(body.layers, x));
        }
      },
      model.body);
  return std::clamp(score, 0.0, 1.0);
}

int predict(const TrainedModel& model, std::span<const double> features) {
  return label_for_score(predict_confidence(model, features));
}

}  // namespace packscope
