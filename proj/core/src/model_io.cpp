#include "packscope/model_io.hpp"

#include <cstring>

#include "packscope/error.hpp"

namespace packscope {

namespace {

constexpr std::string_view kMagic = "PSMD";

std::uint32_t to_u32(std::size_t v) {
  if (v > 0xFFFFFFFFu) throw Error(ErrorCode::InvalidParams, "value does not fit the model format");
  return static_cast<std::uint32_t>(v);
}

void check(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::CorruptModel, what);
}

void write_body(ByteWriter& w, const KnnModel& m) {
  w.u32(to_u32(m.params.k));
  w.u32(to_u32(m.train.rows()));
  w.u32(to_u32(m.train.cols()));
  w.f64_array(m.train.data());
  std::vector<std::uint32_t> labels(m.labels.begin(), m.labels.end());
  w.u32_array(labels);
}

void write_body(ByteWriter& w, const LogRegModel& m) {
  w.f64(m.params.learning_rate);
  w.u32(to_u32(m.params.epochs));
  w.f64(m.params.l2);
  w.f64_array(m.weights);
  w.f64(m.bias);
}

void write_body(ByteWriter& w, const SvmModel& m) {
  w.f64(m.params.c);
  w.f64(m.params.learning_rate);
  w.u32(to_u32(m.params.epochs));
  w.f64_array(m.weights);
  w.f64(m.bias);
}

void write_body(ByteWriter& w, const ForestModel& m) {
  w.u32(to_u32(m.params.n_trees));
  w.u32(to_u32(m.params.max_depth));
  w.u32(to_u32(m.params.min_leaf));
  w.u32(to_u32(m.params.features_per_split));
  w.u32(m.params.bootstrap ? 1 : 0);
  w.u32(to_u32(m.trees.size()));
  for (const auto& tree : m.trees) {
    w.u32(to_u32(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      w.u32(node.feature);
      w.f64(node.threshold);
      w.u32(node.left);
      w.u32(node.right);
      w.f64(node.positive_fraction);
    }
  }
}

void write_body(ByteWriter& w, const MlpModel& m) {
  w.f64(m.params.learning_rate);
  w.u32(to_u32(m.params.epochs));
  std::vector<std::uint32_t> hidden;
  for (auto h : m.params.hidden_sizes) hidden.push_back(to_u32(h));
  w.u32_array(hidden);
  w.u32(to_u32(m.layers.size()));
  for (const auto& layer : m.layers) {
    w.u32(to_u32(layer.inputs));
    w.u32(to_u32(layer.outputs));
    w.f64_array(layer.weights);
    w.f64_array(layer.biases);
  }
}

KnnModel read_knn(ByteReader& r, std::size_t dim) {
  KnnModel m;
  m.params.k = r.u32();
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  auto data = r.f64_array();
  check(data.size() == std::size_t{rows} * cols && cols == dim, "knn training matrix shape mismatch");
  m.train = Matrix(rows, cols, std::move(data));
  const auto labels = r.u32_array();
  check(labels.size() == rows, "knn label count mismatch");
  for (auto y : labels) {
    check(y <= 1, "knn label out of range");
    m.labels.push_back(static_cast<int>(y));
  }
  check(m.params.k >= 1 && m.params.k <= rows, "knn k out of range");
  return m;
}

LogRegModel read_logreg(ByteReader& r, std::size_t dim) {
  LogRegModel m;
  m.params.learning_rate = r.f64();
  m.params.epochs = r.u32();
  m.params.l2 = r.f64();
  m.weights = r.f64_array();
  m.bias = r.f64();
  check(m.weights.size() == dim, "logreg weight count mismatch");
  return m;
}

SvmModel read_svm(ByteReader& r, std::size_t dim) {
  SvmModel m;
  m.params.c = r.f64();
  m.params.learning_rate = r.f64();
  m.params.epochs = r.u32();
  m.weights = r.f64_array();
  m.bias = r.f64();
  check(m.weights.size() == dim, "svm weight count mismatch");
  return m;
}

ForestModel read_forest(ByteReader& r, std::size_t dim) {
  ForestModel m;
  m.params.n_trees = r.u32();
  m.params.max_depth = r.u32();
  m.params.min_leaf = r.u32();
  m.params.features_per_split = r.u32();
  m.params.bootstrap = r.u32() != 0;
  const std::uint32_t trees = r.u32();
  check(trees >= 1, "forest has no trees");
  for (std::uint32_t t = 0; t < trees; ++t) {
    DecisionTree tree;
    const std::uint32_t count = r.u32();
    check(count >= 1 && std::size_t{count} * 28 <= r.remaining(), "tree node count invalid");
    tree.nodes.resize(count);
    for (auto& node : tree.nodes) {
      node.feature = r.u32();
      node.threshold = r.f64();
      node.left = r.u32();
      node.right = r.u32();
      node.positive_fraction = r.f64();
    }
    // Children must point strictly forward so prediction always terminates.
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto& node = tree.nodes[i];
      if (node.is_leaf()) continue;
      check(node.feature < dim, "tree split feature out of range");
      check(node.left > i && node.left < count && node.right > i && node.right < count, "tree child index invalid");
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

MlpModel read_mlp(ByteReader& r, std::size_t dim) {
  MlpModel m;
  m.params.learning_rate = r.f64();
  m.params.epochs = r.u32();
  m.params.hidden_sizes.clear();
  for (auto h : r.u32_array()) m.params.hidden_sizes.push_back(h);
  const std::uint32_t count = r.u32();
  check(count >= 2, "mlp needs at least two layers");
  std::size_t expected_inputs = dim;
  for (std::uint32_t l = 0; l < count; ++l) {
    DenseLayer layer;
    layer.inputs = r.u32();
    layer.outputs = r.u32();
    layer.weights = r.f64_array();
    layer.biases = r.f64_array();
    check(layer.inputs == expected_inputs, "mlp layer input width mismatch");
    check(layer.weights.size() == layer.inputs * layer.outputs && layer.biases.size() == layer.outputs,
          "mlp layer shape mismatch");
    expected_inputs = layer.outputs;
    m.layers.push_back(std::move(layer));
  }
  check(m.layers.back().outputs == 1, "mlp output layer must have one unit");
  return m;
}

}  // namespace

Bytes encode_model(const TrainedModel& model) {
  ByteWriter w;
  w.raw(kMagic);
  w.u16(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.kind()));
  w.u64(model.seed);
  w.f64_array(model.scaler.mean());
  w.f64_array(model.scaler.stddev());
  std::visit([&](const auto& body) { write_body(w, body); }, model.body);
  return w.take();
}

TrainedModel decode_model(std::span<const std::uint8_t> data) {
  ByteReader r(data, ErrorCode::CorruptModel);
  const auto magic = r.raw(4);
  check(std::memcmp(magic.data(), kMagic.data(), 4) == 0, "bad magic; not a model file");
  const std::uint16_t version = r.u16();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) + " is not supported");
  }
  const std::uint8_t kind = r.u8();
  check(kind >= 1 && kind <= 5, "unknown model kind tag");

  TrainedModel model;
  model.seed = r.u64();
  auto mean = r.f64_array();
  auto stddev = r.f64_array();
  check(mean.size() == stddev.size(), "scaler shape mismatch");
  model.scaler = StandardScaler(std::move(mean), std::move(stddev));
  const std::size_t dim = model.scaler.dimension();

  switch (static_cast<ModelKind>(kind)) {
    case ModelKind::Knn: model.body = read_knn(r, dim); break;
    case ModelKind::LogReg: model.body = read_logreg(r, dim); break;
    case ModelKind::RandomForest: model.body = read_forest(r, dim); break;
    case ModelKind::Mlp: model.body = read_mlp(r, dim); break;
    case ModelKind::LinearSvm: model.body = read_svm(r, dim); break;
  }
  check(r.at_end(), "trailing bytes after model body");
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  if (path.empty()) throw Error(ErrorCode::IoError, "empty model path");
  return decode_model(read_file(path));
}

}  // namespace packscope
