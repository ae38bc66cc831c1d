#include "frad/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frad/features.hpp"

namespace frad {

namespace {

// Class-conditional log-normal parameters: value = median * exp(spread * N(0,1)).
struct LogNormal {
  double median;
  double spread;
};

struct ClassProfile {
  LogNormal gas_price_excess;  // attacker/victim gas price ratio minus 1 (ratio itself for suppression)
  LogNormal victim_gas_price_gwei;
  LogNormal attacker_gas_per_tx;
  LogNormal victim_gas_used;
  LogNormal victim_value_eth;
  LogNormal attacker_value_eth;  // displacement: multiplier on the copied victim value
  LogNormal gas_limit_utilization;
  double same_block_prob;
  double victim_failed_prob;
};

constexpr std::array<ClassProfile, kNumClasses> kProfiles{{
    // Displacement
    {{0.35, 0.6}, {35.0, 0.45}, {200e3, 0.35}, {180e3, 0.4}, {0.8, 1.0}, {1.0, 0.2}, {0.35, 0.4}, 0.8, 0.9},
    // Insertion (attacker gas covers both bracketing txs)
    {{0.12, 0.6}, {30.0, 0.45}, {130e3, 0.35}, {140e3, 0.4}, {2.5, 1.0}, {2.0, 1.0}, {0.45, 0.4}, 1.0, 0.0},
    // Suppression
    {{1.8, 0.4}, {45.0, 0.45}, {400e3, 0.3}, {100e3, 0.5}, {0.3, 1.2}, {0.01, 1.0}, {0.0, 0.0}, 0.15, 0.5},
}};

constexpr double kConfoundingRate = 1.5;
constexpr double kSuppressionMinUtilization = 0.9;
constexpr int kSuppressionMinTxCount = 3;
constexpr double kSuppressionIntervalMean = 3.0;
constexpr double kGweiToEth = 1e-9;

double draw(Rng& rng, LogNormal ln) {
  std::normal_distribution<double> z(0.0, 1.0);
  return ln.median * std::exp(ln.spread * z(rng));
}

bool bernoulli(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

double fee_eth(const AttackInstance& inst) {
  return inst.attacker_gas_used * inst.victim_gas_price_gwei * inst.gas_price_ratio * kGweiToEth;
}

}  // namespace

void validate(const GeneratorConfig& cfg) {
  double sum = 0.0;
  for (double p : cfg.class_proportions) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "class proportions must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "class proportions must sum to 1");
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sigma must be a finite nonnegative value");
  }
  if (!(cfg.suppression_tx_mean > 0.0)) throw Error(ErrorCode::InvalidArgument, "suppression_tx_mean must be positive");
}

AttackInstance generate_instance(AttackClass c, Rng& rng, double suppression_tx_mean) {
  const auto& prof = kProfiles[static_cast<std::size_t>(c)];
  AttackInstance inst;
  inst.label = c;
  inst.victim_gas_price_gwei = draw(rng, prof.victim_gas_price_gwei);
  inst.victim_gas_used = draw(rng, prof.victim_gas_used);
  inst.victim_value_eth = draw(rng, prof.victim_value_eth);

  switch (c) {
    case AttackClass::Displacement: {
      inst.attacker_tx_count = 1;
      inst.gas_price_ratio = 1.0 + draw(rng, prof.gas_price_excess);
      inst.attacker_gas_used = draw(rng, prof.attacker_gas_per_tx);
      // The attacker replays the victim's call, so its value tracks the victim's.
      inst.attacker_value_eth = inst.victim_value_eth * draw(rng, prof.attacker_value_eth);
      inst.same_block = bernoulli(rng, prof.same_block_prob) ? 1 : 0;
      inst.block_position_delta = 1 + std::geometric_distribution<int>(0.5)(rng);
      inst.victim_failed = bernoulli(rng, prof.victim_failed_prob) ? 1 : 0;
      inst.interval_blocks = 1;
      inst.gas_limit_utilization = std::min(1.0, draw(rng, prof.gas_limit_utilization));
      break;
    }
    case AttackClass::Insertion: {
      inst.attacker_tx_count = 2;
      // Ratio of the front transaction; the back transaction bids below the victim.
      inst.gas_price_ratio = 1.0 + draw(rng, prof.gas_price_excess);
      inst.attacker_gas_used = draw(rng, prof.attacker_gas_per_tx) + draw(rng, prof.attacker_gas_per_tx);
      inst.attacker_value_eth = draw(rng, prof.attacker_value_eth);
      inst.same_block = 1;
      inst.block_position_delta = 1 + std::geometric_distribution<int>(0.6)(rng);
      inst.victim_failed = 0;
      inst.interval_blocks = 1;
      inst.gas_limit_utilization = std::min(1.0, draw(rng, prof.gas_limit_utilization));
      break;
    }
    case AttackClass::Suppression: {
      const int drawn = std::poisson_distribution<int>(suppression_tx_mean)(rng);
      inst.attacker_tx_count = std::max(kSuppressionMinTxCount, drawn);
      inst.gas_price_ratio = draw(rng, prof.gas_price_excess);
      double gas = 0.0;
      for (int t = 0; t < inst.attacker_tx_count; ++t) gas += draw(rng, prof.attacker_gas_per_tx);
      inst.attacker_gas_used = gas;
      inst.attacker_value_eth = draw(rng, prof.attacker_value_eth);
      inst.same_block = bernoulli(rng, prof.same_block_prob) ? 1 : 0;
      inst.block_position_delta = inst.same_block ? std::uniform_int_distribution<int>(-5, 5)(rng) : 0;
      inst.victim_failed = bernoulli(rng, prof.victim_failed_prob) ? 1 : 0;
      inst.interval_blocks = 2 + std::poisson_distribution<int>(kSuppressionIntervalMean)(rng);
      inst.gas_limit_utilization =
          kSuppressionMinUtilization + (1.0 - kSuppressionMinUtilization) * uniform01(rng);
      break;
    }
  }
  inst.cumulative_attacker_fee_eth = fee_eth(inst);
  return inst;
}

double confounding_probability(double noise_sigma) noexcept {
  return 1.0 - std::exp(-kConfoundingRate * noise_sigma);
}

AttackInstance observe_instance(const AttackInstance& clean, const GeneratorConfig& cfg, Rng& rng) {
  AttackInstance obs = clean;
  const double sigma = cfg.noise_sigma;

  // Draws happen unconditionally so the stream layout does not depend on sigma.
  const bool confounded = uniform01(rng) < confounding_probability(sigma);
  const auto shift = std::uniform_int_distribution<int>(1, 2)(rng);
  if (confounded) {
    const auto other = static_cast<AttackClass>((static_cast<int>(clean.label) + shift) % kNumClasses);
    const AttackInstance mimic = generate_instance(other, rng, cfg.suppression_tx_mean);
    obs.attacker_tx_count = mimic.attacker_tx_count;
    obs.gas_price_ratio = mimic.gas_price_ratio;
    obs.attacker_gas_used = mimic.attacker_gas_used;
    obs.attacker_value_eth = mimic.attacker_value_eth;
    obs.block_position_delta = mimic.block_position_delta;
    obs.same_block = mimic.same_block;
    obs.interval_blocks = mimic.interval_blocks;
    obs.gas_limit_utilization = mimic.gas_limit_utilization;
  }

  std::normal_distribution<double> z(0.0, 1.0);
  auto jitter = [&] { return std::exp(sigma * z(rng)); };
  // Outbidding ratios keep their side of 1.
  if (obs.gas_price_ratio > 1.0) {
    obs.gas_price_ratio = 1.0 + (obs.gas_price_ratio - 1.0) * jitter();
  } else {
    obs.gas_price_ratio *= jitter();
  }
  obs.victim_gas_price_gwei *= jitter();
  obs.attacker_gas_used *= jitter();
  obs.victim_gas_used *= jitter();
  obs.victim_value_eth *= jitter();
  obs.attacker_value_eth *= jitter();
  obs.gas_limit_utilization = std::min(1.0, obs.gas_limit_utilization * jitter());
  obs.cumulative_attacker_fee_eth = fee_eth(obs);
  return obs;
}

std::array<std::size_t, kNumClasses> class_counts(const GeneratorConfig& cfg) {
  const auto n = cfg.n_total;
  auto rounded = [n](double p) { return static_cast<std::size_t>(std::llround(static_cast<double>(n) * p)); };
  std::array<std::size_t, kNumClasses> counts{};
  counts[1] = std::min(n, rounded(cfg.class_proportions[1]));
  counts[2] = std::min(n - counts[1], rounded(cfg.class_proportions[2]));
  counts[0] = n - counts[1] - counts[2];
  return counts;
}

Dataset generate_dataset(const GeneratorConfig& cfg) {
  validate(cfg);
  const auto counts = class_counts(cfg);

  std::vector<AttackClass> order;
  order.reserve(cfg.n_total);
  for (std::size_t k = 0; k < kNumClasses; ++k) order.insert(order.end(), counts[k], kAllClasses[k]);
  Rng shuffle_rng = derive_rng(cfg.seed, {1});
  std::shuffle(order.begin(), order.end(), shuffle_rng);

  Dataset d;
  d.feature_names = feature_names();
  d.provenance = std::string(kProvenanceSynthetic);
  d.features = Matrix(cfg.n_total, kNumFeatures);
  d.labels.resize(cfg.n_total);
  for (std::size_t i = 0; i < cfg.n_total; ++i) {
    Rng rng = derive_rng(cfg.seed, {0, i});
    const AttackInstance clean = generate_instance(order[i], rng, cfg.suppression_tx_mean);
    const AttackInstance obs = observe_instance(clean, cfg, rng);
    const auto row = featurize(obs);
    std::copy(row.begin(), row.end(), d.features.row(i).begin());
    d.labels[i] = encode_label(obs.label);
  }
  return d;
}

}  // namespace frad
