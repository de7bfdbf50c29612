#include <gtest/gtest.h>

#include "packscope/binary_io.hpp"
#include "packscope/error.hpp"
#include "packscope/model_io.hpp"
#include "packscope/rng.hpp"
#include "test_support.hpp"

namespace packscope {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(-3.0, 3.0);
  }
  return m;
}

TrainedModel trained(ModelKind kind) {
  const auto x = random_matrix(60, 24, 1);
  std::vector<int> y;
  for (std::size_t r = 0; r < x.rows(); ++r) y.push_back(x(r, 0) + x(r, 1) > 0 ? 1 : 0);
  TrainConfig cfg;
  cfg.kind = kind;
  cfg.seed = 77;
  cfg.forest.n_trees = 15;
  cfg.mlp.hidden_sizes = {16, 8};
  cfg.mlp.epochs = 40;
  return train_model(x, y, cfg);
}

ErrorCode decode_error(const Bytes& bytes) {
  try {
    (void)decode_model(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decoded corrupt model";
  return ErrorCode::IoError;
}

class ModelRoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(ModelRoundTrip, IdenticalScores) {
  test::TempDir dir;
  const auto model = trained(GetParam());
  save_model(model, dir / "m.psmd");
  const auto back = load_model(dir / "m.psmd");
  EXPECT_EQ(back, model);
  EXPECT_EQ(encode_model(back), encode_model(model));
  const auto q = random_matrix(100, 24, 2);
  for (std::size_t r = 0; r < q.rows(); ++r) ASSERT_EQ(predict_confidence(back, q.row(r)), predict_confidence(model, q.row(r)));
}

TEST_P(ModelRoundTrip, RejectsEveryTruncation) {
  const auto bytes = encode_model(trained(GetParam()));
  for (std::size_t n = 0; n < bytes.size(); n += 1 + n / 8) {
    const Bytes cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
    ASSERT_EQ(decode_error(cut), ErrorCode::CorruptModel) << n;
  }
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(decode_error(trailing), ErrorCode::CorruptModel);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, ModelRoundTrip,
                         ::testing::Values(ModelKind::Knn, ModelKind::LogReg, ModelKind::RandomForest, ModelKind::Mlp,
                                           ModelKind::LinearSvm),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(ModelIo, Header) {
  const auto bytes = encode_model(trained(ModelKind::LogReg));
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PSMD");
  EXPECT_EQ(bytes[4] | (bytes[5] << 8), kModelFormatVersion);
  EXPECT_EQ(bytes[6], static_cast<std::uint8_t>(ModelKind::LogReg));
}

TEST(ModelIo, Errors) {
  auto bytes = encode_model(trained(ModelKind::LinearSvm));
  auto wrong_magic = bytes;
  wrong_magic[0] = 'X';
  EXPECT_EQ(decode_error(wrong_magic), ErrorCode::CorruptModel);
  auto wrong_version = bytes;
  wrong_version[4] = 9;
  EXPECT_EQ(decode_error(wrong_version), ErrorCode::VersionMismatch);
  auto wrong_kind = bytes;
  wrong_kind[6] = 42;
  EXPECT_EQ(decode_error(wrong_kind), ErrorCode::CorruptModel);

  try {
    save_model(trained(ModelKind::Knn), "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  try {
    (void)load_model("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(ModelIo, RejectsBackwardTreeLinks) {
  auto model = trained(ModelKind::RandomForest);
  auto& tree = std::get<ForestModel>(model.body).trees[0];
  ASSERT_FALSE(tree.nodes[0].is_leaf());
  tree.nodes[0].left = 0;
  EXPECT_EQ(decode_error(encode_model(model)), ErrorCode::CorruptModel);
}

TEST(ModelIo, Deterministic) {
  EXPECT_EQ(encode_model(trained(ModelKind::RandomForest)), encode_model(trained(ModelKind::RandomForest)));
  EXPECT_EQ(encode_model(trained(ModelKind::Mlp)), encode_model(trained(ModelKind::Mlp)));
}

}  // namespace
}  // namespace packscope
