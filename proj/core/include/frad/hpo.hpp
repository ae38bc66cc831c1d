#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frad/error.hpp"

namespace frad {

enum class DimKind : std::uint8_t { Real, LogReal, Integer };

struct Dimension {
  std::string name;
  DimKind kind = DimKind::Real;
  double low = 0.0;
  double high = 1.0;
};

/// Box of hyperparameters searched through the unit cube [0,1]^d.
struct SearchSpace {
  std::vector<Dimension> dims;
  std::size_t size() const noexcept { return dims.size(); }
};

/// Named hyperparameter values in dimension order.
struct ParamSet {
  std::vector<std::pair<std::string, double>> values;

  double at(std::string_view name) const;
  double get_or(std::string_view name, double fallback) const;
  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

void validate(const SearchSpace& space);

/// Unit coordinates -> parameter values. Integer dimensions split [0,1) into
/// equal-width bins, one per integer.
ParamSet decode(const SearchSpace& space, std::span<const double> unit);
/// Parameter values -> unit coordinates (bin centres for integer dimensions).
std::vector<double> encode(const SearchSpace& space, const ParamSet& params);

SearchSpace forest_search_space(std::size_t n_features);
SearchSpace gb_search_space();
SearchSpace xgb_search_space();
SearchSpace mlp_search_space();

struct KernelConfig {
  /// Per-dimension Matern-5/2 length scales; empty means 0.3 for every dimension.
  std::vector<double> length_scales;
  double signal_variance = 1.0;
  double jitter = 1e-6;
};

inline constexpr double kDefaultLengthScale = 0.3;

/// Exact GP regression on standardized targets (mean removed, divided by the
/// sample spread when it is nonzero) with a cached Cholesky factor.
class GpSurrogate {
 public:
  struct Posterior {
    double mean = 0.0;
    double std = 0.0;
  };

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double applied_jitter() const noexcept { return jitter_; }
  double log_marginal_likelihood() const noexcept { return lml_; }
  double kernel(std::span<const double> a, std::span<const double> b) const;

 private:
  friend GpSurrogate gp_fit(const Eigen::MatrixXd&, const Eigen::VectorXd&, const KernelConfig&);
  friend Posterior gp_posterior(const GpSurrogate&, std::span<const double>);

  Eigen::MatrixXd points_;  // n x d, unit-cube coordinates
  Eigen::VectorXd values_;
  Eigen::VectorXd length_scales_;
  double signal_variance_ = 1.0;
  double jitter_ = 1e-6;
  double offset_ = 0.0;
  double scale_ = 1.0;
  Eigen::MatrixXd chol_;  // lower factor of K + jitter*I
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};

/// Points are rows of `points`. A factorization failure is retried with the
/// jitter multiplied by 10, up to three times, before NumericalFailure.
GpSurrogate gp_fit(const Eigen::MatrixXd& points, const Eigen::VectorXd& values, const KernelConfig& kernel = {});
/// Predictive mean and standard deviation (variance clamped at 0). Throws
/// OutOfDomain for x outside the unit cube.
GpSurrogate::Posterior gp_posterior(const GpSurrogate& gp, std::span<const double> x);

/// Expected improvement for maximization.
double expected_improvement(double mean, double std, double best_so_far) noexcept;

struct Trial {
  std::size_t index = 0;
  ParamSet params;
  std::vector<double> unit_point;
  double objective = 0.0;  // validation accuracy in [0, 1]
  double duration_seconds = 0.0;
};

struct BayesOptions {
  int budget = 25;
  int n_init = 8;
  int n_candidates = 1024;
  std::uint64_t seed = 0;
  /// Workers for the initial design; the acquisition loop is sequential.
  unsigned threads = 1;
  KernelConfig kernel;
};

struct HpoResult {
  Trial best;
  std::vector<Trial> trials;
};

using Objective = std::function<double(const ParamSet&)>;

/// Seeded Latin-hypercube initial design, then GP + expected improvement over
/// a seeded candidate set. The best trial is the earliest with the maximal
/// objective. An objective that throws or returns a value outside [0, 1]
/// aborts the search with ObjectiveFailure naming the trial.
HpoResult bayes_optimize(const Objective& objective, const SearchSpace& space, const BayesOptions& options);

/// One JSON object per line: index, params, unit_point, objective, duration_seconds.
std::string trial_log_jsonl(const std::vector<Trial>& trials);
void write_trial_log(const std::vector<Trial>& trials, const std::filesystem::path& path);

}  // namespace frad
