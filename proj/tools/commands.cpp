#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include "json.hpp"

#include "packscope/binary_io.hpp"
#include "packscope/error.hpp"
#include "packscope/features.hpp"
#include "packscope/model_io.hpp"
#include "packscope/parallel.hpp"
#include "packscope/png_io.hpp"
#include "packscope/rng.hpp"

namespace packscope::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + where + "." + key + "'");
  }
}

void read_size(const json& obj, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_number_unsigned()) config_error(std::string(key) + " must be a non-negative integer");
  out = obj[key].get<std::size_t>();
}

void read_u64(const json& obj, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_number_unsigned()) config_error(std::string(key) + " must be a non-negative integer");
  out = obj[key].get<std::uint64_t>();
}

void read_double(const json& obj, const char* key, double& out) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_number()) config_error(std::string(key) + " must be a number");
  out = obj[key].get<double>();
}

void read_bool(const json& obj, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_boolean()) config_error(std::string(key) + " must be a boolean");
  out = obj[key].get<bool>();
}

void read_path(const json& obj, const char* key, fs::path& out) {
  if (!obj.contains(key)) return;
  if (!obj[key].is_string()) config_error(std::string(key) + " must be a string");
  out = obj[key].get<std::string>();
}

std::string read_string(const json& obj, const char* key) {
  if (!obj[key].is_string()) config_error(std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

std::vector<double> read_doubles(const json& v, const char* key) {
  if (!v.is_array()) config_error(std::string(key) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(std::string(key) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// rethrow library errors from config values as ConfigError
template <class Fn>
auto as_config(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    config_error(e.what());
  }
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

fs::path manifest_path(const RunConfig& config) { return config.paths.corpus / kManifestFileName; }

FeatureTable labelled_features(const RunConfig& config, const Manifest& manifest) {
  auto table = read_feature_file(config.paths.features);
  attach_labels(table, manifest);
  return table;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

Metrics write_reports(const RunConfig& config, std::span<const PredictionRow> rows, std::string_view model_name,
                      std::string_view suffix, bool write_predictions) {
  std::vector<LabelPrediction> lp;
  std::vector<ScoredLabel> scored;
  for (const auto& r : rows) {
    lp.push_back({r.label, r.pred});
    scored.push_back({r.label, r.score});
  }
  const auto cm = confusion_from_predictions(lp);
  const auto metrics = compute_metrics(cm);
  const Metrics one[] = {metrics};
  const auto edges = default_confidence_edges();

  const auto& dir = config.paths.reports;
  fs::create_directories(dir);
  const std::string tag(suffix);
  if (write_predictions) write_file_atomic(dir / ("predictions_" + tag + ".csv"), format_predictions(rows));
  write_file_atomic(dir / ("confusion_" + tag + ".csv"), "tp,fp,tn,fn\n" + std::to_string(cm.tp) + "," +
                                                             std::to_string(cm.fp) + "," + std::to_string(cm.tn) +
                                                             "," + std::to_string(cm.fn) + "\n");
  write_file_atomic(dir / ("metrics_" + tag + ".csv"), format_metrics_report(model_name, aggregate_runs(one)));
  write_file_atomic(dir / ("confidence_" + tag + ".csv"),
                    format_confidence_report(confidence_report(scored, edges)));
  return metrics;
}

std::vector<PredictionRow> score_rows(const TrainedModel& model, const FeatureTable& table) {
  std::vector<PredictionRow> rows(table.size());
  parallel_for(table.size(), [&](std::size_t i) {
    const double score = predict_confidence(model, table.features.row(i));
    rows[i] = {table.ids[i], table.labels[i], label_for_score(score), score};
  });
  return rows;
}

}  // namespace

void RunConfig::validate() const {
  as_config([&] {
    CorpusConfig c = corpus;
    c.seed = seed;
    c.validate();
    bank.validate();
    return 0;
  });
  const std::array<double, 3> f{split.train, split.val, split.test};
  if (f[0] < 0 || f[1] < 0 || f[2] < 0 || std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    config_error("split fractions must be non-negative and sum to 1");
  }
  if (width.mode == WidthPolicy::Mode::Fixed && width.fixed_width == 0) config_error("fixed width must be positive");
  if (runs == 0) config_error("runs must be at least 1");
  if (train.knn.k == 0) config_error("knn.k must be at least 1");
  if (!(train.logreg.learning_rate > 0) || train.logreg.epochs == 0 || !(train.logreg.l2 >= 0)) {
    config_error("logreg needs learning_rate > 0, epochs >= 1, l2 >= 0");
  }
  if (!(train.svm.c > 0) || !(train.svm.learning_rate > 0) || train.svm.epochs == 0) {
    config_error("svm needs c > 0, learning_rate > 0, epochs >= 1");
  }
  if (train.forest.n_trees == 0 || train.forest.min_leaf == 0) config_error("rf needs n_trees >= 1, min_leaf >= 1");
  if (!(train.mlp.learning_rate > 0) || train.mlp.epochs == 0) {
    config_error("mlp needs learning_rate > 0, epochs >= 1");
  }
  for (auto h : train.mlp.hidden_sizes) {
    if (h == 0) config_error("mlp hidden sizes must be positive");
  }
}

RunConfig parse_run_config(std::string_view json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"seed", "paths", "corpus", "split", "width", "bank", "model", "image_export_size", "runs", "eval_split"});
  RunConfig c = std::move(base);
  read_u64(doc, "seed", c.seed);
  read_size(doc, "image_export_size", c.image_export_size);
  read_size(doc, "runs", c.runs);
  if (doc.contains("width")) c.width = as_config([&] { return WidthPolicy::parse(read_string(doc, "width")); });
  if (doc.contains("eval_split")) c.eval_split = as_config([&] { return parse_split(read_string(doc, "eval_split")); });

  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    check_keys(p, "paths", {"corpus", "images", "features", "model", "reports"});
    read_path(p, "corpus", c.paths.corpus);
    read_path(p, "images", c.paths.images);
    read_path(p, "features", c.paths.features);
    read_path(p, "model", c.paths.model);
    read_path(p, "reports", c.paths.reports);
  }
  if (doc.contains("corpus")) {
    const auto& p = doc["corpus"];
    check_keys(p, "corpus", {"code", "text", "mixed", "sparse", "packed_a", "packed_b", "packed_c", "min_size", "max_size"});
    read_size(p, "code", c.corpus.code);
    read_size(p, "text", c.corpus.text);
    read_size(p, "mixed", c.corpus.mixed);
    read_size(p, "sparse", c.corpus.sparse);
    read_size(p, "packed_a", c.corpus.packed_a);
    read_size(p, "packed_b", c.corpus.packed_b);
    read_size(p, "packed_c", c.corpus.packed_c);
    read_size(p, "min_size", c.corpus.min_size);
    read_size(p, "max_size", c.corpus.max_size);
  }
  if (doc.contains("split")) {
    const auto& p = doc["split"];
    check_keys(p, "split", {"train", "val", "test"});
    read_double(p, "train", c.split.train);
    read_double(p, "val", c.split.val);
    read_double(p, "test", c.split.test);
  }
  if (doc.contains("bank")) {
    const auto& p = doc["bank"];
    check_keys(p, "bank", {"frequencies", "orientations", "phase", "sigma", "gamma", "kernel_size", "image_size"});
    if (p.contains("frequencies")) c.bank.frequencies = read_doubles(p["frequencies"], "frequencies");
    if (p.contains("orientations")) c.bank.orientations = read_doubles(p["orientations"], "orientations");
    read_double(p, "phase", c.bank.phase);
    read_double(p, "sigma", c.bank.sigma);
    read_double(p, "gamma", c.bank.gamma);
    read_size(p, "kernel_size", c.bank.kernel_size);
    read_size(p, "image_size", c.bank.image_size);
  }
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    check_keys(m, "model", {"kind", "knn", "logreg", "svm", "rf", "mlp"});
    if (m.contains("kind")) c.train.kind = as_config([&] { return parse_model_kind(read_string(m, "kind")); });
    if (m.contains("knn")) {
      check_keys(m["knn"], "model.knn", {"k"});
      read_size(m["knn"], "k", c.train.knn.k);
    }
    if (m.contains("logreg")) {
      const auto& p = m["logreg"];
      check_keys(p, "model.logreg", {"learning_rate", "epochs", "l2"});
      read_double(p, "learning_rate", c.train.logreg.learning_rate);
      read_size(p, "epochs", c.train.logreg.epochs);
      read_double(p, "l2", c.train.logreg.l2);
    }
    if (m.contains("svm")) {
      const auto& p = m["svm"];
      check_keys(p, "model.svm", {"c", "learning_rate", "epochs"});
      read_double(p, "c", c.train.svm.c);
      read_double(p, "learning_rate", c.train.svm.learning_rate);
      read_size(p, "epochs", c.train.svm.epochs);
    }
    if (m.contains("rf")) {
      const auto& p = m["rf"];
      check_keys(p, "model.rf", {"n_trees", "max_depth", "min_leaf", "features_per_split", "bootstrap"});
      read_size(p, "n_trees", c.train.forest.n_trees);
      read_size(p, "max_depth", c.train.forest.max_depth);
      read_size(p, "min_leaf", c.train.forest.min_leaf);
      read_size(p, "features_per_split", c.train.forest.features_per_split);
      read_bool(p, "bootstrap", c.train.forest.bootstrap);
    }
    if (m.contains("mlp")) {
      const auto& p = m["mlp"];
      check_keys(p, "model.mlp", {"hidden_sizes", "learning_rate", "epochs"});
      if (p.contains("hidden_sizes")) {
        c.train.mlp.hidden_sizes.clear();
        if (!p["hidden_sizes"].is_array()) config_error("hidden_sizes must be an array");
        for (const auto& h : p["hidden_sizes"]) {
          if (!h.is_number_unsigned()) config_error("hidden_sizes must hold positive integers");
          c.train.mlp.hidden_sizes.push_back(h.get<std::size_t>());
        }
      }
      read_double(p, "learning_rate", c.train.mlp.learning_rate);
      read_size(p, "epochs", c.train.mlp.epochs);
    }
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  Bytes bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_run_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t run) noexcept {
  return run == 0 ? seed : derive_seed(seed, "run", run);
}

Manifest cmd_corpus_gen(const RunConfig& config) {
  config.validate();
  CorpusConfig corpus = config.corpus;
  corpus.seed = config.seed;
  const auto built = build_corpus(corpus, config.paths.corpus);
  auto manifest = stratified_split(built, config.split, config.seed);
  write_manifest(manifest, manifest_path(config));
  return manifest;
}

void cmd_image_export(const RunConfig& config) {
  config.validate();
  const auto manifest = read_manifest(manifest_path(config));
  fs::create_directories(config.paths.images);
  const std::size_t size = config.image_export_size;
  parallel_for(manifest.samples.size(), [&](std::size_t i) {
    const auto& sample = manifest.samples[i];
    const auto bytes = read_file(config.paths.corpus / sample.path, kMaxInputBytes);
    auto img = bytes_to_image(bytes, config.width);
    if (size > 0) img = resize_image(img, size, size, ResizeMethod::Bilinear);
    export_png(img, config.paths.images / (sample.id + ".png"));
  });
}

void cmd_features(const RunConfig& config, std::ostream& diag) {
  config.validate();
  const auto manifest = read_manifest(manifest_path(config));
  const auto result = extract_batch(manifest, config.paths.corpus, config.bank, config.width);
  for (const auto& f : result.failures) diag << "packscope: skipped " << f.id << ": " << f.message << '\n';
  ensure_parent(config.paths.features);
  write_feature_archive(result.table, config.paths.features);
  auto csv = config.paths.features;
  write_feature_csv(result.table, csv.replace_extension(".csv"));
}

TrainOutcome cmd_train(const RunConfig& config) {
  config.validate();
  const auto manifest = read_manifest(manifest_path(config));
  const auto table = labelled_features(config, manifest);
  const auto train_idx = rows_in_split(table, manifest, Split::Train);
  if (train_idx.empty()) throw Error(ErrorCode::EmptyTrainingSet, "manifest has no train rows with features");
  const auto train = select_rows(table, train_idx);
  const auto test = select_rows(table, rows_in_split(table, manifest, Split::Test));

  std::optional<TrainedModel> first;
  std::vector<Metrics> per_run;
  for (std::size_t r = 0; r < config.runs; ++r) {
    const auto seed = run_seed(config.seed, r);
    const auto idx = random_oversample(train.labels, seed);
    std::vector<int> labels;
    labels.reserve(idx.size());
    for (auto i : idx) labels.push_back(train.labels[i]);
    TrainConfig tc = config.train;
    tc.seed = seed;
    auto model = train_model(train.features.select_rows(idx), labels, tc);
    if (test.size() > 0) {
      std::vector<LabelPrediction> lp;
      for (const auto& row : score_rows(model, test)) lp.push_back({row.label, row.pred});
      per_run.push_back(compute_metrics(confusion_from_predictions(lp)));
    }
    if (r == 0) first = std::move(model);
  }

  ensure_parent(config.paths.model);
  save_model(*first, config.paths.model);
  TrainOutcome outcome{std::move(*first), std::nullopt};
  if (!per_run.empty()) {
    outcome.report = aggregate_runs(per_run);
    fs::create_directories(config.paths.reports);
    write_file_atomic(config.paths.reports / "train_metrics.csv",
                      format_metrics_report(to_string(config.train.kind), *outcome.report));
  }
  return outcome;
}

Metrics cmd_eval(const RunConfig& config) {
  config.validate();
  const auto manifest = read_manifest(manifest_path(config));
  const auto model = load_model(config.paths.model);
  const auto table = labelled_features(config, manifest);
  const auto subset = select_rows(table, rows_in_split(table, manifest, config.eval_split));
  if (subset.size() == 0) {
    throw Error(ErrorCode::EmptyInput, "no rows in split " + std::string(to_string(config.eval_split)));
  }
  const auto rows = score_rows(model, subset);
  return write_reports(config, rows, to_string(model.kind()), to_string(config.eval_split), true);
}

Metrics cmd_eval_predictions(const RunConfig& config, const fs::path& predictions, std::string_view model_name) {
  const auto bytes = read_file(predictions);
  const auto rows = parse_predictions(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  return write_reports(config, rows, model_name, predictions.stem().string(), false);
}

int cmd_scan(const RunConfig& config, const std::vector<fs::path>& files, std::ostream& out, std::ostream& diag) {
  config.validate();
  const auto model = load_model(config.paths.model);
  bool any_packed = false;
  bool any_error = false;
  for (const auto& file : files) {
    try {
      const auto jet = extract_file_features(file, config.bank, config.width);
      const double score = predict_confidence(model, jet);
      const bool packed = label_for_score(score) == 1;
      any_packed = any_packed || packed;
      out << file.string() << '\t' << (packed ? "packed" : "non-packed") << '\t'
          << fmt("%.4f", verdict_confidence(score)) << '\n';
    } catch (const std::exception& e) {
      any_error = true;
      diag << "packscope: " << file.string() << ": " << e.what() << '\n';
    }
  }
  if (any_error) return 1;
  return any_packed ? 2 : 0;
}

}  // namespace packscope::cli
