#include <algorithm>
#include <cmath>

#include "packscope/classifiers.hpp"
#include "packscope/error.hpp"
#include "packscope/parallel.hpp"

namespace packscope {

double DecisionTree::predict(std::span<const double> row) const {
  std::size_t idx = 0;
  while (!nodes[idx].is_leaf()) {
    const auto& node = nodes[idx];
    idx = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[idx].positive_fraction;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    const auto [idx, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[idx].is_leaf()) {
      stack.emplace_back(nodes[idx].left, d + 1);
      stack.emplace_back(nodes[idx].right, d + 1);
    }
  }
  return deepest;
}

double gini_impurity(std::size_t positives, std::size_t total) noexcept {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

SplitChoice best_split_on_feature(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                                  std::size_t feature, std::size_t min_leaf) {
  const std::size_t n = rows.size();
  std::vector<std::pair<double, int>> sorted(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sorted[i] = {x(rows[i], feature), labels[rows[i]]};
    positives += static_cast<std::size_t>(labels[rows[i]]);
  }
  std::sort(sorted.begin(), sorted.end());

  const double parent = gini_impurity(positives, n);
  const std::size_t floor = std::max<std::size_t>(min_leaf, 1);
  SplitChoice best;
  best.feature = feature;
  std::size_t left_pos = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left_pos += static_cast<std::size_t>(sorted[i].second);
    const double lo = sorted[i].first;
    const double hi = sorted[i + 1].first;
    if (!(lo < hi)) continue;
    const std::size_t nl = i + 1;
    const std::size_t nr = n - nl;
    if (nl < floor || nr < floor) continue;
    const double weighted = (static_cast<double>(nl) * gini_impurity(left_pos, nl) +
                             static_cast<double>(nr) * gini_impurity(positives - left_pos, nr)) /
                            static_cast<double>(n);
    const double gain = parent - weighted;
    if (!best.valid || gain > best.gain) {
      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold < hi)) threshold = lo;
      best = {true, feature, threshold, gain};
    }
  }
  return best;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> labels, const ForestParams& params, Xorshift64Star& rng)
      : x_(x), labels_(labels), params_(params), rng_(rng), order_(x.cols()) {
    const std::size_t d = x.cols();
    per_split_ = params.features_per_split != 0
                     ? std::min(params.features_per_split, d)
                     : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    per_split_ = std::max<std::size_t>(per_split_, 1);
  }

  std::uint32_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const auto idx = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::size_t positives = 0;
    for (auto r : rows) positives += static_cast<std::size_t>(labels_[r]);
    tree_.nodes[idx].positive_fraction = static_cast<double>(positives) / static_cast<double>(rows.size());

    const bool pure = positives == 0 || positives == rows.size();
    const bool depth_capped = params_.max_depth != 0 && depth >= params_.max_depth;
    if (pure || depth_capped || rows.size() < 2 * std::max<std::size_t>(params_.min_leaf, 1)) return idx;

    const auto split = choose_split(rows);
    if (!split.valid) return idx;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const auto l = build(std::move(left), depth + 1);
    const auto r = build(std::move(right), depth + 1);
    auto& node = tree_.nodes[idx];
    node.feature = static_cast<std::uint32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return idx;
  }

  DecisionTree take() { return std::move(tree_); }

 private:
  // Examines a random subset of per_split_ features; if none of them admits a
  // split, keeps drawing from the remaining features.
  SplitChoice choose_split(std::span<const std::size_t> rows) {
    const std::size_t d = order_.size();
    for (std::size_t j = 0; j < d; ++j) order_[j] = j;
    for (std::size_t j = d - 1; j > 0; --j) std::swap(order_[j], order_[rng_.below(j + 1)]);

    SplitChoice best;
    for (std::size_t j = 0; j < d; ++j) {
      if (j >= per_split_ && best.valid) break;
      const auto candidate = best_split_on_feature(x_, labels_, rows, order_[j], params_.min_leaf);
      if (candidate.valid && (!best.valid || candidate.gain > best.gain)) best = candidate;
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> labels_;
  const ForestParams& params_;
  Xorshift64Star& rng_;
  std::vector<std::size_t> order_;
  std::size_t per_split_ = 1;
  DecisionTree tree_;
};

}  // namespace

DecisionTree grow_tree(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                       const ForestParams& params, Xorshift64Star& rng) {
  if (rows.empty()) throw Error(ErrorCode::EmptyTrainingSet, "cannot grow a tree on zero rows");
  TreeBuilder builder(x, labels, params, rng);
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return builder.take();
}

TrainedModel train_random_forest(const Matrix& features, std::span<const int> labels, const ForestParams& params,
                                 std::uint64_t seed) {
  if (features.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
  if (labels.size() != features.rows()) throw Error(ErrorCode::DimensionMismatch, "label count does not match row count");
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::NonBinaryLabels, "labels must be 0 or 1");
  }
  if (params.n_trees == 0) throw Error(ErrorCode::InvalidParams, "n_trees must be >= 1");

  auto scaler = fit_scaler(features);
  const Matrix x = scaler.apply(features);
  const std::size_t n = x.rows();

  ForestModel body{params, std::vector<DecisionTree>(params.n_trees)};
  parallel_for(params.n_trees, [&](std::size_t t) {
    Xorshift64Star rng(derive_seed(seed, "tree", t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    }
    body.trees[t] = grow_tree(x, labels, rows, params, rng);
  });
  return {std::move(scaler), seed, std::move(body)};
}

}  // namespace packscope
