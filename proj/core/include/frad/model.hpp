#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "frad/ensembles.hpp"
#include "frad/features.hpp"
#include "frad/mlp.hpp"

namespace frad {

/// Any of the four classifiers. Gradient boosting and the second-order variant
/// share BoostModel and are told apart by params.variant.
using Model = std::variant<ForestModel, BoostModel, MlpModel>;

/// "random_forest", "gradient_boosting", "xgboost" or "mlp".
std::string model_type(const Model& m);

/// Rows of class probabilities (n x 3), each summing to 1.
Matrix predict_proba(const Model& m, const Matrix& X);

inline constexpr int kModelFormatVersion = 1;

/// On-disk model: the classifier plus the standardizer its inputs pass through.
struct ModelFile {
  Model model;
  Standardizer standardizer;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Hyperparameters of the model as a JSON object (unbounded depth is null).
std::string model_params_json(const Model& m);

std::string model_file_json(const ModelFile& f);
void save_model(const ModelFile& f, const std::filesystem::path& path);
/// Throws MissingFile, SchemaMismatch on malformed documents, and
/// SchemaMismatch if `expected_features` is non-empty and differs from the
/// file's feature names.
ModelFile load_model(const std::filesystem::path& path, const std::vector<std::string>& expected_features = {});

/// Standardizes raw feature rows with the file's standardizer and predicts.
Matrix predict_raw(const ModelFile& f, const Matrix& raw);

}  // namespace frad
