#include <json.hpp>

#include "frad/model.hpp"

namespace frad {

namespace {

using json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

json depth_json(int depth) { return depth == kUnboundedDepth ? json(nullptr) : json(depth); }
int depth_from(const json& j) { return j.is_null() ? kUnboundedDepth : j.get<int>(); }

json candidates_json(int k) { return k == std::numeric_limits<int>::max() ? json(nullptr) : json(k); }
int candidates_from(const json& j) { return j.is_null() ? std::numeric_limits<int>::max() : j.get<int>(); }

json params_json(const ForestParams& p) {
  json j;
  j["n_trees"] = p.n_trees;
  j["bootstrap"] = p.bootstrap;
  j["max_depth"] = depth_json(p.tree.max_depth);
  j["min_samples_leaf"] = p.tree.min_samples_leaf;
  j["n_feature_candidates"] = candidates_json(p.tree.n_feature_candidates);
  j["seed"] = p.seed;
  return j;
}

json params_json(const BoostParams& p) {
  json j;
  j["variant"] = p.variant == BoostVariant::FirstOrder ? "first_order" : "second_order";
  j["n_rounds"] = p.n_rounds;
  j["learning_rate"] = p.learning_rate;
  j["max_depth"] = depth_json(p.tree.max_depth);
  j["min_samples_leaf"] = p.tree.min_samples_leaf;
  j["n_feature_candidates"] = candidates_json(p.tree.n_feature_candidates);
  j["lambda"] = p.tree.lambda;
  j["gamma"] = p.tree.gamma;
  j["subsample_rows"] = p.subsample_rows;
  j["subsample_cols"] = p.subsample_cols;
  j["seed"] = p.seed;
  return j;
}

json params_json(const MlpTrainConfig& c) {
  json j;
  j["activation"] = "relu";
  j["n_hidden"] = c.n_hidden;
  j["initial_learning_rate"] = c.initial_learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["l2_weight_decay"] = c.l2_weight_decay;
  j["seed"] = c.seed;
  return j;
}

json tree_json(const Tree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  json j;
  j["n_features"] = t.n_features;
  j["feature"] = feature;
  j["threshold"] = threshold;
  j["left"] = left;
  j["right"] = right;
  j["value"] = value;
  return j;
}

Tree tree_from(const json& j) {
  Tree t;
  t.n_features = j.at("n_features").get<std::size_t>();
  const auto& feature = j.at("feature");
  const std::size_t n = feature.size();
  const auto& threshold = j.at("threshold");
  const auto& left = j.at("left");
  const auto& right = j.at("right");
  const auto& value = j.at("value");
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n || n == 0) {
    throw Error(ErrorCode::SchemaMismatch, "tree arrays have inconsistent lengths");
  }
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = t.nodes[i];
    node.feature = feature[i].get<int>();
    node.threshold = threshold[i].get<double>();
    node.left = left[i].get<int>();
    node.right = right[i].get<int>();
    node.value = value[i].get<std::vector<double>>();
    if (!node.is_leaf()) {
      const auto in_range = [n](int c) { return c > 0 && static_cast<std::size_t>(c) < n; };
      if (!in_range(node.left) || !in_range(node.right) || static_cast<std::size_t>(node.feature) >= t.n_features) {
        throw Error(ErrorCode::SchemaMismatch, "tree node references are out of range");
      }
    } else if (node.value.empty()) {
      throw Error(ErrorCode::SchemaMismatch, "tree leaf without a value");
    }
  }
  return t;
}

json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = data;
  return j;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw Error(ErrorCode::SchemaMismatch, "weight array does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++];
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json model_json(const Model& model) {
  return std::visit(
      overloaded{
          [](const ForestModel& m) {
            json j;
            j["n_features"] = m.n_features;
            json trees = json::array();
            for (const auto& t : m.trees) trees.push_back(tree_json(t));
            j["trees"] = trees;
            return j;
          },
          [](const BoostModel& m) {
            json j;
            j["n_features"] = m.n_features;
            j["base_score"] = m.base_score;
            json stages = json::array();
            for (const auto& stage : m.stages) {
              json s = json::array();
              for (const auto& t : stage) s.push_back(tree_json(t));
              stages.push_back(s);
            }
            j["trees"] = stages;
            j["train_loss"] = m.train_loss;
            return j;
          },
          [](const MlpModel& m) {
            json w;
            w["w1"] = matrix_json(m.w1);
            w["b1"] = vector_json(m.b1);
            w["w2"] = matrix_json(m.w2);
            w["b2"] = vector_json(m.b2);
            json j;
            j["weights"] = w;
            j["loss_trace"] = m.loss_trace;
            return j;
          },
      },
      model);
}

ForestParams forest_params_from(const json& j) {
  ForestParams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.tree.max_depth = depth_from(j.at("max_depth"));
  p.tree.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.tree.n_feature_candidates = candidates_from(j.at("n_feature_candidates"));
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

BoostParams boost_params_from(const json& j) {
  BoostParams p;
  const auto variant = j.at("variant").get<std::string>();
  if (variant != "first_order" && variant != "second_order") {
    throw Error(ErrorCode::SchemaMismatch, "unknown boosting variant '" + variant + "'");
  }
  p.variant = variant == "first_order" ? BoostVariant::FirstOrder : BoostVariant::SecondOrder;
  p.n_rounds = j.at("n_rounds").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.tree.max_depth = depth_from(j.at("max_depth"));
  p.tree.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  p.tree.n_feature_candidates = candidates_from(j.at("n_feature_candidates"));
  p.tree.lambda = j.at("lambda").get<double>();
  p.tree.gamma = j.at("gamma").get<double>();
  p.subsample_rows = j.at("subsample_rows").get<double>();
  p.subsample_cols = j.at("subsample_cols").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

MlpTrainConfig mlp_config_from(const json& j) {
  MlpTrainConfig c;
  c.n_hidden = j.at("n_hidden").get<int>();
  c.initial_learning_rate = j.at("initial_learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.l2_weight_decay = j.at("l2_weight_decay").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

Model model_from(const std::string& type, const json& params, const json& body) {
  if (type == "random_forest") {
    ForestModel m;
    m.params = forest_params_from(params);
    m.n_features = body.at("n_features").get<std::size_t>();
    for (const auto& t : body.at("trees")) m.trees.push_back(tree_from(t));
    if (m.trees.empty()) throw Error(ErrorCode::SchemaMismatch, "forest without trees");
    return m;
  }
  if (type == "gradient_boosting" || type == "xgboost") {
    BoostModel m;
    m.params = boost_params_from(params);
    if ((type == "xgboost") != (m.params.variant == BoostVariant::SecondOrder)) {
      throw Error(ErrorCode::SchemaMismatch, "model_type does not match the boosting variant");
    }
    m.n_features = body.at("n_features").get<std::size_t>();
    m.base_score = body.at("base_score").get<std::array<double, kNumClasses>>();
    for (const auto& s : body.at("trees")) {
      if (s.size() != kNumClasses) throw Error(ErrorCode::SchemaMismatch, "boosting stage must hold 3 trees");
      std::array<Tree, kNumClasses> stage;
      for (std::size_t k = 0; k < kNumClasses; ++k) stage[k] = tree_from(s[k]);
      m.stages.push_back(std::move(stage));
    }
    m.train_loss = body.at("train_loss").get<std::vector<double>>();
    return m;
  }
  if (type == "mlp") {
    MlpModel m;
    m.config = mlp_config_from(params);
    const auto& w = body.at("weights");
    m.w1 = matrix_from(w.at("w1"));
    m.b1 = vector_from(w.at("b1"));
    m.w2 = matrix_from(w.at("w2"));
    m.b2 = vector_from(w.at("b2"));
    m.loss_trace = body.at("loss_trace").get<std::vector<double>>();
    if (m.b1.size() != m.w1.cols() || m.w2.rows() != m.w1.cols() || m.w2.cols() != static_cast<Eigen::Index>(kNumClasses) ||
        m.b2.size() != static_cast<Eigen::Index>(kNumClasses)) {
      throw Error(ErrorCode::SchemaMismatch, "MLP weight shapes are inconsistent");
    }
    return m;
  }
  throw Error(ErrorCode::SchemaMismatch, "unknown model_type '" + type + "'");
}

json params_of(const Model& model) {
  return std::visit(overloaded{[](const ForestModel& m) { return params_json(m.params); },
                               [](const BoostModel& m) { return params_json(m.params); },
                               [](const MlpModel& m) { return params_json(m.config); }},
                    model);
}

std::size_t arity_of(const Model& model) {
  return std::visit(overloaded{[](const ForestModel& m) { return m.n_features; },
                               [](const BoostModel& m) { return m.n_features; },
                               [](const MlpModel& m) { return m.n_features(); }},
                    model);
}

}  // namespace

std::string model_type(const Model& m) {
  return std::visit(overloaded{[](const ForestModel&) { return std::string("random_forest"); },
                               [](const BoostModel& b) {
                                 return std::string(b.params.variant == BoostVariant::FirstOrder ? "gradient_boosting"
                                                                                                  : "xgboost");
                               },
                               [](const MlpModel&) { return std::string("mlp"); }},
                    m);
}

Matrix predict_proba(const Model& m, const Matrix& X) {
  return std::visit([&X](const auto& model) { return predict_proba(model, X); }, m);
}

std::string model_params_json(const Model& m) { return params_of(m).dump(); }

std::string model_file_json(const ModelFile& f) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["model_type"] = model_type(f.model);
  j["feature_names"] = f.feature_names;
  j["seed"] = f.seed;
  j["config_hash"] = f.config_hash;
  j["params"] = params_of(f.model);
  json pre;
  pre["means"] = f.standardizer.means;
  pre["stds"] = f.standardizer.stds;
  j["standardizer"] = pre;
  const json body = model_json(f.model);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j.dump() + "\n";
}

void save_model(const ModelFile& f, const std::filesystem::path& path) {
  if (f.feature_names.size() != arity_of(f.model) || f.standardizer.size() != f.feature_names.size()) {
    throw Error(ErrorCode::ShapeMismatch, "model, standardizer and feature names disagree on arity");
  }
  write_file_atomic(path, model_file_json(f));
}

ModelFile load_model(const std::filesystem::path& path, const std::vector<std::string>& expected_features) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingFile, "no such model file: " + path.string());
  const std::string text = read_file(path);
  try {
    const json j = json::parse(text);
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::SchemaMismatch, "unsupported model format_version");
    }
    ModelFile f;
    f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!expected_features.empty() && expected_features != f.feature_names) {
      throw Error(ErrorCode::SchemaMismatch, "model feature_names do not match the data columns");
    }
    f.seed = j.at("seed").get<std::uint64_t>();
    f.config_hash = j.at("config_hash").get<std::string>();
    f.model = model_from(j.at("model_type").get<std::string>(), j.at("params"), j);
    f.standardizer.means = j.at("standardizer").at("means").get<std::vector<double>>();
    f.standardizer.stds = j.at("standardizer").at("stds").get<std::vector<double>>();
    f.standardizer.feature_names = f.feature_names;
    if (arity_of(f.model) != f.feature_names.size() || f.standardizer.means.size() != f.feature_names.size() ||
        f.standardizer.stds.size() != f.feature_names.size()) {
      throw Error(ErrorCode::SchemaMismatch, "model arity does not match feature_names");
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, "malformed model file " + path.string() + ": " + e.what());
  }
}

Matrix predict_raw(const ModelFile& f, const Matrix& raw) {
  return predict_proba(f.model, apply_standardizer(f.standardizer, raw));
}

}  // namespace frad
