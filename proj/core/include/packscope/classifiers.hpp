#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "packscope/matrix.hpp"
#include "packscope/rng.hpp"

namespace packscope {

enum class ModelKind : std::uint8_t { Knn = 1, LogReg = 2, RandomForest = 3, Mlp = 4, LinearSvm = 5 };

/// knn, logreg, rf, mlp, svm
[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
[[nodiscard]] ModelKind parse_model_kind(std::string_view text);

// ---------------------------------------------------------------------------
// Standardization

/// Per-feature mean and population standard deviation of the training rows.
/// Zero-variance features scale to 0.
class StandardScaler {
 public:
  StandardScaler() = default;
  StandardScaler(std::vector<double> mean, std::vector<double> stddev);

  [[nodiscard]] std::size_t dimension() const noexcept { return mean_.size(); }
  [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }
  [[nodiscard]] const std::vector<double>& stddev() const noexcept { return stddev_; }

  [[nodiscard]] std::vector<double> apply(std::span<const double> row) const;
  [[nodiscard]] Matrix apply(const Matrix& rows) const;

  friend bool operator==(const StandardScaler&, const StandardScaler&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

/// Throws EmptyTrainingSet.
[[nodiscard]] StandardScaler fit_scaler(const Matrix& train);
[[nodiscard]] std::vector<double> apply_scaler(const StandardScaler& scaler, std::span<const double> row);

// ---------------------------------------------------------------------------
// Hyperparameters

struct KnnParams {
  std::size_t k = 5;
  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct LogRegParams {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  friend bool operator==(const LogRegParams&, const LogRegParams&) = default;
};

struct SvmParams {
  double c = 1.0;
  double learning_rate = 0.01;
  std::size_t epochs = 500;
  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;           ///< 0 = unlimited
  std::size_t min_leaf = 1;
  std::size_t features_per_split = 0;  ///< 0 = ceil(sqrt(d))
  bool bootstrap = true;               ///< off only for tests
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct MlpParams {
  std::vector<std::size_t> hidden_sizes{64};
  double learning_rate = 0.01;
  std::size_t epochs = 500;
  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// ---------------------------------------------------------------------------
// Model bodies

struct KnnModel {
  KnnParams params;
  Matrix train;  ///< standardized training rows
  std::vector<int> labels;
  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

struct LogRegModel {
  LogRegParams params;
  std::vector<double> weights;
  double bias = 0.0;
  friend bool operator==(const LogRegModel&, const LogRegModel&) = default;
};

struct SvmModel {
  SvmParams params;
  std::vector<double> weights;
  double bias = 0.0;
  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

/// Internal nodes route `value <= threshold` to `left`. Every node carries the
/// fraction of class-1 training rows that reached it; leaves use it as output.
struct TreeNode {
  static constexpr std::uint32_t kLeaf = 0xFFFFFFFFu;

  std::uint32_t feature = kLeaf;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double positive_fraction = 0.0;

  [[nodiscard]] bool is_leaf() const noexcept { return feature == kLeaf; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  /// Class-1 fraction of the leaf reached by `row`.
  [[nodiscard]] double predict(std::span<const double> row) const;
  [[nodiscard]] std::size_t depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
  ForestParams params;
  std::vector<DecisionTree> trees;
  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// weights are outputs x inputs, row-major.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> biases;
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// ReLU hidden layers, one sigmoid output unit.
struct MlpModel {
  MlpParams params;
  std::vector<DenseLayer> layers;
  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Alternative order matches ModelKind values minus one.
using ModelBody = std::variant<KnnModel, LogRegModel, ForestModel, MlpModel, SvmModel>;

struct TrainedModel {
  StandardScaler scaler;
  std::uint64_t seed = 0;
  ModelBody body;

  [[nodiscard]] ModelKind kind() const noexcept { return static_cast<ModelKind>(body.index() + 1); }
  [[nodiscard]] std::size_t dimension() const noexcept { return scaler.dimension(); }

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// ---------------------------------------------------------------------------
// Training. Every trainer standardizes its input and attaches the scaler.
// Labels must be 0 or 1. Common errors: EmptyTrainingSet, DimensionMismatch,
// NonBinaryLabels.

/// Throws KTooLarge when k exceeds the training size.
[[nodiscard]] TrainedModel train_knn(const Matrix& features, std::span<const int> labels, const KnnParams& params);

/// Full-batch gradient descent on mean cross-entropy + (l2/2)|w|^2.
/// Throws NonFiniteLoss on divergence.
[[nodiscard]] TrainedModel train_logreg(const Matrix& features, std::span<const int> labels, const LogRegParams& params);

/// Subgradient descent on mean hinge loss + |w|^2 / (2C), labels mapped to -1/+1.
[[nodiscard]] TrainedModel train_linear_svm(const Matrix& features, std::span<const int> labels, const SvmParams& params);

/// Bootstrap-sampled Gini trees. Tree t draws from derive_seed(seed, "tree", t)
/// so trees may be grown in parallel without changing the result.
[[nodiscard]] TrainedModel train_random_forest(const Matrix& features, std::span<const int> labels,
                                               const ForestParams& params, std::uint64_t seed);

[[nodiscard]] TrainedModel train_mlp(const Matrix& features, std::span<const int> labels, const MlpParams& params,
                                     std::uint64_t seed);

struct TrainConfig {
  ModelKind kind = ModelKind::RandomForest;
  std::uint64_t seed = 1;
  KnnParams knn;
  LogRegParams logreg;
  SvmParams svm;
  ForestParams forest;
  MlpParams mlp;
};

[[nodiscard]] TrainedModel train_model(const Matrix& features, std::span<const int> labels, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Prediction

/// Score in [0, 1] read as "probability of packed". Throws DimensionMismatch.
///   knn: fraction of the k nearest neighbours labelled 1
///   logreg, svm: sigmoid of the margin
///   rf: mean leaf class-1 fraction across trees
///   mlp: sigmoid output
[[nodiscard]] double predict_confidence(const TrainedModel& model, std::span<const double> features);

/// 1 iff score >= 0.5 (an exact 0.5 resolves to packed).
[[nodiscard]] int predict(const TrainedModel& model, std::span<const double> features);

[[nodiscard]] constexpr int label_for_score(double score) noexcept { return score >= 0.5 ? 1 : 0; }

/// Confidence in the emitted verdict: score for packed, 1 - score otherwise.
[[nodiscard]] constexpr double verdict_confidence(double score) noexcept { return score >= 0.5 ? score : 1.0 - score; }

// ---------------------------------------------------------------------------
// Objectives and building blocks, exposed for gradient checks and tests.
// They operate on already standardized features.

[[nodiscard]] double sigmoid(double z) noexcept;

struct LinearObjective {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

[[nodiscard]] LinearObjective logreg_objective(const Matrix& x, std::span<const int> labels,
                                               std::span<const double> weights, double bias, double l2);

/// Subgradient takes 0 for the hinge term when the margin is exactly 1.
[[nodiscard]] LinearObjective hinge_objective(const Matrix& x, std::span<const int> labels,
                                              std::span<const double> weights, double bias, double c);

/// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights drawn layer by layer in
/// row-major order from derive_seed(seed, "mlp-init"); biases zero.
[[nodiscard]] std::vector<DenseLayer> init_mlp_layers(std::size_t inputs, std::span<const std::size_t> hidden,
                                                      std::uint64_t seed);

/// Output-unit logit.
[[nodiscard]] double mlp_logit(std::span<const DenseLayer> layers, std::span<const double> input);

struct MlpObjective {
  double loss = 0.0;
  std::vector<DenseLayer> grads;  ///< same shapes as the layers
};

/// Mean binary cross-entropy and its backpropagated gradient.
[[nodiscard]] MlpObjective mlp_objective(std::span<const DenseLayer> layers, const Matrix& x, std::span<const int> labels);

[[nodiscard]] double gini_impurity(std::size_t positives, std::size_t total) noexcept;

struct SplitChoice {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Best Gini split of `rows` on one feature: thresholds are midpoints between
/// consecutive distinct values, each side must keep at least min_leaf rows.
[[nodiscard]] SplitChoice best_split_on_feature(const Matrix& x, std::span<const int> labels,
                                                std::span<const std::size_t> rows, std::size_t feature,
                                                std::size_t min_leaf);

/// Grows one tree on `rows` (duplicates allowed, as in a bootstrap sample).
[[nodiscard]] DecisionTree grow_tree(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                                     const ForestParams& params, Xorshift64Star& rng);

}  // namespace packscope
