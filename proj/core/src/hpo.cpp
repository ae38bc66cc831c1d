#include "frad/hpo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "frad/data.hpp"
#include "frad/parallel.hpp"
#include "frad/random.hpp"

namespace frad {

double ParamSet::at(std::string_view name) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown hyperparameter '" + std::string(name) + "'");
}

double ParamSet::get_or(std::string_view name, double fallback) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  return fallback;
}

void validate(const SearchSpace& space) {
  if (space.dims.empty()) throw Error(ErrorCode::InvalidArgument, "search space has no dimensions");
  for (const auto& d : space.dims) {
    if (!(d.low < d.high)) throw Error(ErrorCode::InvalidArgument, "dimension '" + d.name + "' needs low < high");
    if (d.kind == DimKind::LogReal && !(d.low > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "log dimension '" + d.name + "' needs a positive lower bound");
    }
  }
}

ParamSet decode(const SearchSpace& space, std::span<const double> unit) {
  if (unit.size() != space.size()) throw Error(ErrorCode::ShapeMismatch, "unit point arity differs from search space");
  ParamSet out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& d = space.dims[i];
    const double u = std::clamp(unit[i], 0.0, 1.0);
    double v = 0.0;
    switch (d.kind) {
      case DimKind::Real: v = d.low + u * (d.high - d.low); break;
      case DimKind::LogReal: v = std::exp(std::log(d.low) + u * (std::log(d.high) - std::log(d.low))); break;
      case DimKind::Integer: {
        const double bins = d.high - d.low + 1.0;
        v = std::min(d.high, d.low + std::floor(u * bins));
        break;
      }
    }
    out.values.emplace_back(d.name, std::clamp(v, d.low, d.high));
  }
  return out;
}

std::vector<double> encode(const SearchSpace& space, const ParamSet& params) {
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& d = space.dims[i];
    const double v = std::clamp(params.at(d.name), d.low, d.high);
    switch (d.kind) {
      case DimKind::Real: out[i] = (v - d.low) / (d.high - d.low); break;
      case DimKind::LogReal: out[i] = (std::log(v) - std::log(d.low)) / (std::log(d.high) - std::log(d.low)); break;
      case DimKind::Integer: out[i] = (std::round(v) - d.low + 0.5) / (d.high - d.low + 1.0); break;
    }
    out[i] = std::clamp(out[i], 0.0, 1.0);
  }
  return out;
}

SearchSpace forest_search_space(std::size_t n_features) {
  return {{{"n_trees", DimKind::Integer, 50, 500},
           {"max_depth", DimKind::Integer, 2, 20},
           {"n_feature_candidates", DimKind::Integer, 1, static_cast<double>(std::max<std::size_t>(n_features, 2))}}};
}

SearchSpace gb_search_space() {
  return {{{"n_rounds", DimKind::Integer, 50, 500},
           {"learning_rate", DimKind::LogReal, 0.01, 0.3},
           {"max_depth", DimKind::Integer, 2, 8},
           {"subsample_rows", DimKind::Real, 0.5, 1.0}}};
}

SearchSpace xgb_search_space() {
  return {{{"n_rounds", DimKind::Integer, 50, 500},
           {"learning_rate", DimKind::LogReal, 0.01, 0.3},
           {"max_depth", DimKind::Integer, 2, 8},
           {"lambda", DimKind::Real, 0.0, 10.0},
           {"subsample_rows", DimKind::Real, 0.5, 1.0},
           {"subsample_cols", DimKind::Real, 0.5, 1.0}}};
}

SearchSpace mlp_search_space() {
  return {{{"n_hidden", DimKind::Integer, 16, 512},
           {"learning_rate", DimKind::LogReal, 1e-4, 1e-2},
           {"batch_size", DimKind::Integer, 16, 256}}};
}

double GpSurrogate::kernel(std::span<const double> a, std::span<const double> b) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / length_scales_[static_cast<Eigen::Index>(i)];
    r2 += d * d;
  }
  const double s5r = std::sqrt(5.0 * r2);
  return signal_variance_ * (1.0 + s5r + 5.0 * r2 / 3.0) * std::exp(-s5r);
}

namespace {

std::span<const double> row_span(const Eigen::MatrixXd& m, Eigen::Index r, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) buf[static_cast<std::size_t>(c)] = m(r, c);
  return buf;
}

constexpr int kJitterEscalations = 3;
constexpr double kUnitCubeSlack = 1e-12;

}  // namespace

GpSurrogate gp_fit(const Eigen::MatrixXd& points, const Eigen::VectorXd& values, const KernelConfig& kernel) {
  const auto n = points.rows();
  const auto d = points.cols();
  if (n < 1) throw Error(ErrorCode::EmptyInput, "GP needs at least one observation");
  if (values.size() != n) throw Error(ErrorCode::ShapeMismatch, "GP points and values differ in length");
  if (!points.allFinite() || !values.allFinite()) throw Error(ErrorCode::NumericalFailure, "non-finite GP input");
  if (points.minCoeff() < -kUnitCubeSlack || points.maxCoeff() > 1.0 + kUnitCubeSlack) {
    throw Error(ErrorCode::OutOfDomain, "GP points must lie in the unit cube");
  }
  if (!(kernel.signal_variance > 0.0) || !(kernel.jitter > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "signal variance and jitter must be positive");
  }

  GpSurrogate gp;
  gp.points_ = points;
  gp.values_ = values;
  gp.signal_variance_ = kernel.signal_variance;
  if (kernel.length_scales.empty()) {
    gp.length_scales_ = Eigen::VectorXd::Constant(d, kDefaultLengthScale);
  } else {
    if (static_cast<Eigen::Index>(kernel.length_scales.size()) != d) {
      throw Error(ErrorCode::ShapeMismatch, "length scale count differs from dimension");
    }
    gp.length_scales_ = Eigen::Map<const Eigen::VectorXd>(kernel.length_scales.data(), d);
    if (gp.length_scales_.minCoeff() <= 0.0) throw Error(ErrorCode::InvalidArgument, "length scales must be positive");
  }

  gp.offset_ = values.mean();
  const double spread = n > 1 ? std::sqrt((values.array() - gp.offset_).square().sum() / static_cast<double>(n - 1)) : 0.0;
  gp.scale_ = spread > 0.0 ? spread : 1.0;
  const Eigen::VectorXd y = (values.array() - gp.offset_) / gp.scale_;

  Eigen::MatrixXd K(n, n);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = gp.kernel(row_span(points, i, a), row_span(points, j, b));
    }
  }

  double jitter = kernel.jitter;
  for (int attempt = 0; attempt <= kJitterEscalations; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() != Eigen::Success) continue;
    gp.chol_ = llt.matrixL();
    gp.alpha_ = llt.solve(y);
    gp.jitter_ = jitter;
    gp.lml_ = -0.5 * y.dot(gp.alpha_) - gp.chol_.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (!std::isfinite(gp.lml_) || !gp.alpha_.allFinite()) continue;
    return gp;
  }
  throw Error(ErrorCode::NumericalFailure, "kernel matrix is not positive definite after jitter escalation");
}

GpSurrogate::Posterior gp_posterior(const GpSurrogate& gp, std::span<const double> x) {
  const auto n = gp.points_.rows();
  if (static_cast<Eigen::Index>(x.size()) != gp.points_.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "query arity differs from GP dimension");
  }
  for (double v : x) {
    if (!(v >= -kUnitCubeSlack && v <= 1.0 + kUnitCubeSlack)) {
      throw Error(ErrorCode::OutOfDomain, "GP query outside the unit cube");
    }
  }
  Eigen::VectorXd k(n);
  std::vector<double> buf;
  for (Eigen::Index i = 0; i < n; ++i) k[i] = gp.kernel(x, row_span(gp.points_, i, buf));
  const double mean = gp.offset_ + gp.scale_ * k.dot(gp.alpha_);
  const Eigen::VectorXd v = gp.chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(0.0, gp.kernel(x, x) - v.squaredNorm());
  return {mean, gp.scale_ * std::sqrt(var)};
}

double expected_improvement(double mean, double std, double best_so_far) noexcept {
  const double improvement = mean - best_so_far;
  if (!(std > 0.0)) return std::max(improvement, 0.0);
  const double z = improvement / std;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::max(0.0, improvement * cdf + std * pdf);
}

namespace {

enum Stream : std::uint64_t { kDesign = 40, kCandidates = 41 };

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  std::vector<std::size_t> strata(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i][j] = (static_cast<double>(strata[i]) + uniform01(rng)) / static_cast<double>(n);
    }
  }
  return pts;
}

Trial evaluate(const Objective& objective, const SearchSpace& space, std::size_t index, std::vector<double> unit) {
  Trial t;
  t.index = index;
  t.params = decode(space, unit);
  t.unit_point = encode(space, t.params);
  const auto start = std::chrono::steady_clock::now();
  try {
    t.objective = objective(t.params);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ObjectiveFailure, "trial " + std::to_string(index) + " failed: " + e.what());
  }
  t.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!(t.objective >= 0.0 && t.objective <= 1.0)) {
    throw Error(ErrorCode::ObjectiveFailure,
                "trial " + std::to_string(index) + " returned objective outside [0,1]: " + format_double(t.objective));
  }
  return t;
}

}  // namespace

HpoResult bayes_optimize(const Objective& objective, const SearchSpace& space, const BayesOptions& options) {
  validate(space);
  if (options.n_init < 1 || options.budget < options.n_init) {
    throw Error(ErrorCode::InvalidArgument, "need budget >= n_init >= 1");
  }
  if (options.n_candidates < 1) throw Error(ErrorCode::InvalidArgument, "n_candidates must be >= 1");
  const std::size_t d = space.size();
  const auto n_init = static_cast<std::size_t>(options.n_init);
  const auto budget = static_cast<std::size_t>(options.budget);

  HpoResult result;
  result.trials.resize(n_init);
  Rng design_rng = derive_rng(options.seed, {kDesign});
  auto design = latin_hypercube(n_init, d, design_rng);
  parallel_for(n_init, options.threads,
               [&](std::size_t i) { result.trials[i] = evaluate(objective, space, i, design[i]); });

  for (std::size_t t = n_init; t < budget; ++t) {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
    Eigen::VectorXd vals(static_cast<Eigen::Index>(t));
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = 0; j < d; ++j) pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = result.trials[i].unit_point[j];
      vals[static_cast<Eigen::Index>(i)] = result.trials[i].objective;
      best = std::max(best, result.trials[i].objective);
    }
    const GpSurrogate gp = gp_fit(pts, vals, options.kernel);

    Rng cand_rng = derive_rng(options.seed, {kCandidates, t});
    std::vector<double> u(d);
    std::vector<double> chosen;
    double best_ei = -1.0;
    for (int c = 0; c < options.n_candidates; ++c) {
      for (auto& v : u) v = uniform01(cand_rng);
      const auto snapped = encode(space, decode(space, u));
      const auto post = gp_posterior(gp, snapped);
      const double ei = expected_improvement(post.mean, post.std, best);
      if (ei > best_ei) {
        best_ei = ei;
        chosen = snapped;
      }
    }
    result.trials.push_back(evaluate(objective, space, t, chosen));
  }

  result.best = result.trials.front();
  for (const auto& trial : result.trials) {
    if (trial.objective > result.best.objective) result.best = trial;
  }
  return result;
}

std::string trial_log_jsonl(const std::vector<Trial>& trials) {
  std::string out;
  for (const auto& t : trials) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.params.values) params[k] = v;
    nlohmann::ordered_json j;
    j["index"] = t.index;
    j["params"] = params;
    j["unit_point"] = t.unit_point;
    j["objective"] = t.objective;
    j["duration_seconds"] = t.duration_seconds;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_trial_log(const std::vector<Trial>& trials, const std::filesystem::path& path) {
  write_file_atomic(path, trial_log_jsonl(trials));
}

}  // namespace frad
