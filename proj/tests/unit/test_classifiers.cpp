#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "packscope/classifiers.hpp"
#include "packscope/error.hpp"
#include "packscope/rng.hpp"

namespace packscope {
namespace {

template <class Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

struct Dataset {
  Matrix x;
  std::vector<int> y;
};

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(-2.0, 2.0);
  }
  return m;
}

std::vector<int> random_labels(std::size_t n, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.below(2));
  y[0] = 0;
  y[1] = 1;
  return y;
}

// Two Gaussian-ish clusters around -1 and +1 in every dimension.
Dataset clusters(std::size_t n, std::size_t d, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  Dataset ds{Matrix(n, d), std::vector<int>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    ds.y[r] = static_cast<int>(r % 2);
    for (std::size_t c = 0; c < d; ++c) {
      const double noise = rng.uniform(-1.0, 1.0) + rng.uniform(-1.0, 1.0);
      ds.x(r, c) = (ds.y[r] ? 1.0 : -1.0) + 0.8 * noise;
    }
  }
  return ds;
}

double training_accuracy(const TrainedModel& m, const Matrix& x, std::span<const int> y) {
  std::size_t ok = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) ok += predict(m, x.row(r)) == y[r];
  return static_cast<double>(ok) / static_cast<double>(x.rows());
}

bool grad_close(double analytic, double numeric, double tol) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale <= tol;
}

// --- scaler -----------------------------------------------------------------

TEST(Scaler, SingleRowScalesToZero) {
  Matrix x(1, 3);
  x(0, 0) = 4;
  x(0, 1) = -1;
  x(0, 2) = 9;
  const auto s = fit_scaler(x);
  for (double v : s.apply(x.row(0))) EXPECT_EQ(v, 0.0);
}

TEST(Scaler, TwoPointColumn) {
  const Matrix x(2, 1, std::vector<double>{0, 2});
  const auto s = fit_scaler(x);
  EXPECT_EQ(s.apply(x.row(0))[0], -1.0);
  EXPECT_EQ(s.apply(x.row(1))[0], 1.0);
}

TEST(Scaler, ConstantColumn) {
  const Matrix x(3, 1, std::vector<double>{5, 5, 5});
  const auto s = fit_scaler(x);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(s.apply(x.row(r))[0], 0.0);
}

TEST(Scaler, EmptyTrainingSet) {
  EXPECT_EQ(error_of([] { (void)fit_scaler(Matrix(0, 3)); }), ErrorCode::EmptyTrainingSet);
}

TEST(Scaler, RefitOnScaledDataIsStandard) {
  const auto x = random_matrix(50, 6, 3);
  const auto scaled = fit_scaler(x).apply(x);
  const auto again = fit_scaler(scaled);
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_NEAR(again.mean()[c], 0.0, 1e-12);
    EXPECT_NEAR(again.stddev()[c], 1.0, 1e-12);
  }
}

// --- knn --------------------------------------------------------------------

TEST(Knn, ExactMatchK1) {
  const auto x = random_matrix(10, 3, 5);
  std::vector<int> y(10, 0);
  y[4] = 1;
  const auto m = train_knn(x, y, {1});
  EXPECT_EQ(predict(m, x.row(4)), 1);
  EXPECT_EQ(predict_confidence(m, x.row(4)), 1.0);
}

TEST(Knn, VoteFractions) {
  // Points on a line; the query at 0 sees the three nearest neighbours.
  const Matrix x(5, 1, std::vector<double>{0.1, -0.2, 0.3, 5, 6});
  const auto m = train_knn(x, std::vector<int>{1, 1, 0, 0, 0}, {3});
  const double q[] = {0.0};
  EXPECT_NEAR(predict_confidence(m, q), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(predict(m, q), 1);
  EXPECT_NEAR(verdict_confidence(predict_confidence(m, q)), 2.0 / 3.0, 1e-15);

  const auto m2 = train_knn(x, std::vector<int>{0, 0, 1, 1, 1}, {3});
  EXPECT_NEAR(predict_confidence(m2, q), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(predict(m2, q), 0);
}

TEST(Knn, TieResolvesToPacked) {
  EXPECT_EQ(label_for_score(0.5), 1);
  const Matrix x(2, 1, std::vector<double>{-1, 1});
  const auto m = train_knn(x, std::vector<int>{0, 1}, {2});
  const double q[] = {0.0};
  EXPECT_EQ(predict_confidence(m, q), 0.5);
  EXPECT_EQ(predict(m, q), 1);
}

TEST(Knn, MatchesBruteForceOracle) {
  auto ds = clusters(48, 4, 7);
  Matrix train(0, 4);
  std::vector<int> labels;
  std::vector<std::size_t> queries;
  for (std::size_t r = 0; r < 48; ++r) {
    if (r % 6 == 5) {
      queries.push_back(r);
    } else {
      train.push_row(ds.x.row(r));
      labels.push_back(ds.y[r]);
    }
  }
  ASSERT_EQ(train.rows(), 40u);
  ASSERT_EQ(queries.size(), 8u);
  const auto m = train_knn(train, labels, {5});
  const auto scaler = fit_scaler(train);
  for (auto q : queries) {
    const auto sq = scaler.apply(ds.x.row(q));
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t r = 0; r < train.rows(); ++r) {
      const auto sr = scaler.apply(train.row(r));
      double d = 0;
      for (std::size_t c = 0; c < 4; ++c) d += (sr[c] - sq[c]) * (sr[c] - sq[c]);
      dist.emplace_back(d, r);
    }
    std::ranges::sort(dist);
    int votes = 0;
    for (std::size_t i = 0; i < 5; ++i) votes += labels[dist[i].second];
    EXPECT_DOUBLE_EQ(predict_confidence(m, ds.x.row(q)), votes / 5.0);
  }
}

TEST(Knn, PermutationAndScaleInvariance) {
  const auto ds = clusters(30, 3, 9);
  const auto queries = random_matrix(20, 3, 10);
  const auto base = train_knn(ds.x, ds.y, {5});

  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::ranges::reverse(perm);
  std::ranges::rotate(perm, perm.begin() + 7);
  std::vector<int> py;
  for (auto i : perm) py.push_back(ds.y[i]);
  const auto permuted = train_knn(ds.x.select_rows(perm), py, {5});

  Matrix scaled = ds.x;
  Matrix scaled_q = queries;
  for (std::size_t r = 0; r < scaled.rows(); ++r) {
    for (auto& v : scaled.row(r)) v *= 3.5;
  }
  for (std::size_t r = 0; r < scaled_q.rows(); ++r) {
    for (auto& v : scaled_q.row(r)) v *= 3.5;
  }
  const auto rescaled = train_knn(scaled, ds.y, {5});

  for (std::size_t r = 0; r < queries.rows(); ++r) {
    EXPECT_EQ(predict(base, queries.row(r)), predict(permuted, queries.row(r)));
    EXPECT_EQ(predict(base, queries.row(r)), predict(rescaled, scaled_q.row(r)));
  }
}

TEST(Knn, Errors) {
  const auto x = random_matrix(4, 2, 1);
  const std::vector<int> y{0, 1, 0, 1};
  EXPECT_EQ(error_of([&] { (void)train_knn(x, y, {5}); }), ErrorCode::KTooLarge);
  EXPECT_EQ(error_of([&] { (void)train_knn(Matrix(0, 2), std::vector<int>{}, {1}); }), ErrorCode::EmptyTrainingSet);
  EXPECT_EQ(error_of([&] { (void)train_knn(x, std::vector<int>{0, 1, 2, 1}, {1}); }), ErrorCode::NonBinaryLabels);
  const auto m = train_knn(x, y, {1});
  const double short_row[] = {1.0};
  EXPECT_EQ(error_of([&] { (void)predict(m, short_row); }), ErrorCode::DimensionMismatch);
}

// --- logistic regression ----------------------------------------------------

TEST(LogReg, ZeroWeightsGiveHalf) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  LogRegParams p;
  p.epochs = 1;
  p.learning_rate = 1e-300;
  const Matrix x(2, 1, std::vector<double>{-1, 1});
  const auto m = train_logreg(x, std::vector<int>{0, 1}, p);
  const double q[] = {0.3};
  EXPECT_NEAR(predict_confidence(m, q), 0.5, 1e-12);
}

TEST(LogReg, SeparableOneDimensional) {
  const Matrix x(2, 1, std::vector<double>{-1, 1});
  const std::vector<int> y{0, 1};
  const auto m = train_logreg(x, y, {0.1, 500, 0.0});
  EXPECT_EQ(training_accuracy(m, x, y), 1.0);
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
  const auto x = random_matrix(20, 24, 11);
  const auto y = random_labels(20, 12);
  Xorshift64Star rng(13);
  std::vector<double> w(24);
  for (auto& v : w) v = rng.uniform(-0.5, 0.5);
  const double b = 0.2;
  const double l2 = 0.01;
  const auto obj = logreg_objective(x, y, w, b, l2);
  const double h = 1e-6;
  for (std::size_t j = 0; j < w.size(); ++j) {
    auto wp = w;
    auto wm = w;
    wp[j] += h;
    wm[j] -= h;
    const double num = (logreg_objective(x, y, wp, b, l2).loss - logreg_objective(x, y, wm, b, l2).loss) / (2 * h);
    EXPECT_TRUE(grad_close(obj.grad_weights[j], num, 1e-5)) << j << ": " << obj.grad_weights[j] << " vs " << num;
  }
  const double num_b = (logreg_objective(x, y, w, b + h, l2).loss - logreg_objective(x, y, w, b - h, l2).loss) / (2 * h);
  EXPECT_TRUE(grad_close(obj.grad_bias, num_b, 1e-5));
}

TEST(LogReg, MonotoneInMargin) {
  const auto ds = clusters(40, 2, 14);
  const auto m = train_logreg(ds.x, ds.y, {});
  const auto& body = std::get<LogRegModel>(m.body);
  auto margin = [&](std::span<const double> row) {
    const auto s = m.scaler.apply(row);
    double z = body.bias;
    for (std::size_t i = 0; i < s.size(); ++i) z += body.weights[i] * s[i];
    return z;
  };
  const auto q = random_matrix(50, 2, 15);
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t r = 0; r < q.rows(); ++r) pairs.emplace_back(margin(q.row(r)), predict_confidence(m, q.row(r)));
  std::ranges::sort(pairs);
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i - 1].second, pairs[i].second);
}

TEST(LogReg, DivergenceIsNonFiniteLoss) {
  const auto ds = clusters(20, 3, 16);
  EXPECT_EQ(error_of([&] { (void)train_logreg(ds.x, ds.y, {1e308, 50, 0.0}); }), ErrorCode::NonFiniteLoss);
}

// --- linear svm -------------------------------------------------------------

TEST(Svm, SeparableOneDimensional) {
  const Matrix x(2, 1, std::vector<double>{-1, 1});
  const std::vector<int> y{0, 1};
  const auto m = train_linear_svm(x, y, {});
  EXPECT_EQ(training_accuracy(m, x, y), 1.0);
  const auto& body = std::get<SvmModel>(m.body);
  EXPECT_GT(body.weights[0], 0.0);
}

TEST(Svm, IdenticalFeaturesCollapseToBias) {
  const Matrix x(5, 2, 3.0);
  const std::vector<int> y{1, 1, 1, 0, 0};
  const auto m = train_linear_svm(x, y, {});
  const auto& body = std::get<SvmModel>(m.body);
  const double q[] = {3.0, 3.0};
  EXPECT_EQ(predict(m, q), body.bias >= 0 ? 1 : 0);
  EXPECT_NEAR(predict_confidence(m, q), sigmoid(body.bias), 1e-15);
}

TEST(Svm, SubgradientMatchesAwayFromKinks) {
  const auto x = random_matrix(20, 24, 17);
  const auto y = random_labels(20, 18);
  Xorshift64Star rng(19);
  std::vector<double> w(24);
  for (auto& v : w) v = rng.uniform(-0.3, 0.3);
  const double b = -0.1;
  const double c = 1.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double m = b;
    for (std::size_t j = 0; j < 24; ++j) m += w[j] * x(r, j);
    ASSERT_GT(std::abs(1.0 - (y[r] ? 1.0 : -1.0) * m), 1e-3) << "sample on a kink";
  }
  const auto obj = hinge_objective(x, y, w, b, c);
  const double h = 1e-7;
  for (std::size_t j = 0; j < w.size(); ++j) {
    auto wp = w;
    auto wm = w;
    wp[j] += h;
    wm[j] -= h;
    const double num = (hinge_objective(x, y, wp, b, c).loss - hinge_objective(x, y, wm, b, c).loss) / (2 * h);
    EXPECT_TRUE(grad_close(obj.grad_weights[j], num, 1e-5)) << j;
  }
  const double num_b = (hinge_objective(x, y, w, b + h, c).loss - hinge_objective(x, y, w, b - h, c).loss) / (2 * h);
  EXPECT_TRUE(grad_close(obj.grad_bias, num_b, 1e-5));
}

// --- random forest ----------------------------------------------------------

TEST(RandomForest, GiniSplitOnFourPoints) {
  const Matrix x(4, 1, std::vector<double>{0, 1, 2, 3});
  const std::vector<int> y{0, 0, 1, 1};
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const auto s = best_split_on_feature(x, y, rows, 0, 1);
  ASSERT_TRUE(s.valid);
  EXPECT_GT(s.threshold, 1.0);
  EXPECT_LT(s.threshold, 2.0);
  EXPECT_DOUBLE_EQ(s.gain, 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity(2, 4), 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity(0, 4), 0.0);
}

TEST(RandomForest, ThresholdRoutesLessOrEqualLeft) {
  const Matrix x(4, 1, std::vector<double>{0, 1, 2, 3});
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  const auto m = train_random_forest(x, std::vector<int>{0, 0, 1, 1}, p, 1);
  const auto& tree = std::get<ForestModel>(m.body).trees[0];
  ASSERT_FALSE(tree.nodes[0].is_leaf());
  std::vector<double> at(1, tree.nodes[0].threshold);
  EXPECT_EQ(tree.predict(at), 0.0);
}

TEST(RandomForest, SingleTreeShattersConsistentData) {
  // Random labels on distinct points: only a full-depth tree fits them.
  const auto x = random_matrix(120, 5, 21);
  const auto y = random_labels(120, 22);
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  const auto m = train_random_forest(x, y, p, 3);
  EXPECT_EQ(training_accuracy(m, x, y), 1.0);

  // XOR needs a zero-gain first split.
  const Matrix xor_x(4, 2, std::vector<double>{0, 0, 0, 1, 1, 0, 1, 1});
  const std::vector<int> xor_y{0, 1, 1, 0};
  EXPECT_EQ(training_accuracy(train_random_forest(xor_x, xor_y, p, 1), xor_x, xor_y), 1.0);
}

TEST(RandomForest, DeterministicForSeed) {
  const auto ds = clusters(80, 6, 23);
  ForestParams p;
  p.n_trees = 25;
  const auto a = train_random_forest(ds.x, ds.y, p, 42);
  const auto b = train_random_forest(ds.x, ds.y, p, 42);
  const auto c = train_random_forest(ds.x, ds.y, p, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto q = random_matrix(30, 6, 24);
  for (std::size_t r = 0; r < q.rows(); ++r) EXPECT_EQ(predict_confidence(a, q.row(r)), predict_confidence(b, q.row(r)));
}

TEST(RandomForest, DepthAndLeafLimits) {
  const auto x = random_matrix(200, 4, 25);
  const auto y = random_labels(200, 26);
  ForestParams p;
  p.n_trees = 5;
  p.max_depth = 3;
  const auto m = train_random_forest(x, y, p, 1);
  for (const auto& t : std::get<ForestModel>(m.body).trees) {
    EXPECT_LE(t.depth(), 3u);
    for (const auto& node : t.nodes) {
      EXPECT_GE(node.positive_fraction, 0.0);
      EXPECT_LE(node.positive_fraction, 1.0);
    }
  }
}

TEST(RandomForest, Errors) {
  EXPECT_EQ(error_of([] { (void)train_random_forest(Matrix(0, 2), std::vector<int>{}, {}, 1); }),
            ErrorCode::EmptyTrainingSet);
  ForestParams p;
  p.n_trees = 0;
  EXPECT_EQ(error_of([&] { (void)train_random_forest(Matrix(2, 1), std::vector<int>{0, 1}, p, 1); }),
            ErrorCode::InvalidParams);
}

// --- mlp --------------------------------------------------------------------

TEST(Mlp, ZeroFinalLayerGivesHalf) {
  const std::size_t hidden[] = {5};
  auto layers = init_mlp_layers(3, hidden, 1);
  std::ranges::fill(layers.back().weights, 0.0);
  const auto x = random_matrix(10, 3, 27);
  for (std::size_t r = 0; r < x.rows(); ++r) EXPECT_EQ(sigmoid(mlp_logit(layers, x.row(r))), 0.5);
}

TEST(Mlp, GlorotInitRange) {
  const std::size_t hidden[] = {16, 8};
  const auto layers = init_mlp_layers(24, hidden, 7);
  ASSERT_EQ(layers.size(), 3u);
  for (const auto& l : layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.inputs + l.outputs));
    for (double w : l.weights) EXPECT_LE(std::abs(w), limit);
    for (double b : l.biases) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(layers[0].inputs, 24u);
  EXPECT_EQ(layers[2].outputs, 1u);
  EXPECT_EQ(init_mlp_layers(24, hidden, 7), layers);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  const auto x = random_matrix(20, 24, 29);
  const auto y = random_labels(20, 30);
  const std::size_t hidden[] = {8, 4};
  auto layers = init_mlp_layers(24, hidden, 31);
  Xorshift64Star rng(32);
  for (auto& l : layers) {
    for (auto& b : l.biases) b = rng.uniform(-0.1, 0.1);
  }
  const auto obj = mlp_objective(layers, x, y);
  const double h = 1e-6;
  std::size_t checked = 0;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (std::size_t k = 0; k < layers[li].weights.size(); ++k) {
      auto plus = layers;
      auto minus = layers;
      plus[li].weights[k] += h;
      minus[li].weights[k] -= h;
      const double num = (mlp_objective(plus, x, y).loss - mlp_objective(minus, x, y).loss) / (2 * h);
      EXPECT_TRUE(grad_close(obj.grads[li].weights[k], num, 1e-4)) << li << "/" << k;
      ++checked;
    }
    for (std::size_t k = 0; k < layers[li].biases.size(); ++k) {
      auto plus = layers;
      auto minus = layers;
      plus[li].biases[k] += h;
      minus[li].biases[k] -= h;
      const double num = (mlp_objective(plus, x, y).loss - mlp_objective(minus, x, y).loss) / (2 * h);
      EXPECT_TRUE(grad_close(obj.grads[li].biases[k], num, 1e-4)) << li << "/b" << k;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 24u * 8 + 8 + 8 * 4 + 4 + 4 + 1);
}

// Pinned by running the configuration once: every point ends with |score - 0.5| > 0.49.
TEST(Mlp, LearnsXor) {
  const Matrix x(4, 2, std::vector<double>{0, 0, 0, 1, 1, 0, 1, 1});
  const std::vector<int> y{0, 1, 1, 0};
  MlpParams p;
  p.hidden_sizes = {8};
  p.learning_rate = 0.1;
  p.epochs = 1000;
  const auto m = train_mlp(x, y, p, 1);
  EXPECT_EQ(training_accuracy(m, x, y), 1.0);
}

TEST(Mlp, Errors) {
  MlpParams p;
  p.hidden_sizes.clear();
  EXPECT_EQ(error_of([&] { (void)train_mlp(Matrix(2, 1), std::vector<int>{0, 1}, p, 1); }), ErrorCode::InvalidParams);
  p = {};
  p.learning_rate = 1e308;
  p.epochs = 50;
  const auto ds = clusters(20, 3, 33);
  EXPECT_EQ(error_of([&] { (void)train_mlp(ds.x, ds.y, p, 1); }), ErrorCode::NonFiniteLoss);
}

// --- shared -----------------------------------------------------------------

TEST(Classifiers, ScoresInUnitIntervalForAllKinds) {
  const auto ds = clusters(60, 5, 35);
  const auto q = random_matrix(40, 5, 36);
  for (auto kind : {ModelKind::Knn, ModelKind::LogReg, ModelKind::RandomForest, ModelKind::Mlp, ModelKind::LinearSvm}) {
    TrainConfig cfg;
    cfg.kind = kind;
    cfg.forest.n_trees = 10;
    cfg.mlp.epochs = 50;
    const auto m = train_model(ds.x, ds.y, cfg);
    EXPECT_EQ(m.kind(), kind);
    EXPECT_EQ(m.dimension(), 5u);
    EXPECT_GE(training_accuracy(m, ds.x, ds.y), 0.8) << to_string(kind);
    for (std::size_t r = 0; r < q.rows(); ++r) {
      const double s = predict_confidence(m, q.row(r));
      ASSERT_TRUE(std::isfinite(s));
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
      ASSERT_EQ(predict(m, q.row(r)), label_for_score(s));
    }
  }
}

TEST(Classifiers, KindNames) {
  EXPECT_EQ(parse_model_kind("rf"), ModelKind::RandomForest);
  EXPECT_EQ(parse_model_kind("svm"), ModelKind::LinearSvm);
  EXPECT_EQ(to_string(ModelKind::Knn), "knn");
  EXPECT_THROW((void)parse_model_kind("xgboost"), Error);
}

}  // namespace
}  // namespace packscope
