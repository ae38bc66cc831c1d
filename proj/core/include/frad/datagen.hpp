#pragma once

#include <array>
#include <cstdint>

#include "frad/data.hpp"
#include "frad/random.hpp"

namespace frad {

struct GeneratorConfig {
  std::size_t n_total = 9798;
  std::array<double, kNumClasses> class_proportions{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double noise_sigma = 0.25;
  std::uint64_t seed = 42;
  double suppression_tx_mean = 20.0;
};

/// Throws Error(InvalidArgument) if proportions do not sum to 1 (within 1e-9),
/// any proportion is negative, noise_sigma < 0 or suppression_tx_mean <= 0.
void validate(const GeneratorConfig& cfg);

/// Draws one clean scenario of class `c`. Structural constraints:
///  - Displacement: one attacker tx outbidding the victim, victim fails with p=0.9,
///    single-block interval.
///  - Insertion: a front tx above and a back tx below the victim's gas price,
///    all in the victim's block; the victim succeeds.
///  - Suppression: many gas-hungry attacker txs (Poisson, at least 3) filling
///    blocks over an interval of two or more blocks.
AttackInstance generate_instance(AttackClass c, Rng& rng, double suppression_tx_mean = 20.0);

/// Probability that an observed row carries the attacker-side footprint of a
/// different attack pattern. Zero when sigma is zero.
double confounding_probability(double noise_sigma) noexcept;

/// Observation model applied to a clean instance: with probability
/// confounding_probability(sigma) the attacker-side fields are replaced by those
/// of a scenario of another class, then continuous fields receive multiplicative
/// log-normal jitter exp(sigma * N(0,1)) and the cumulative fee is recomputed.
/// With sigma == 0 the instance is returned unchanged.
AttackInstance observe_instance(const AttackInstance& clean, const GeneratorConfig& cfg, Rng& rng);

/// Per-class row counts: round(n * p_k) for classes 1 and 2, remainder to class 0.
std::array<std::size_t, kNumClasses> class_counts(const GeneratorConfig& cfg);

/// Rows are shuffled across classes; row i draws from its own generator derived
/// from (seed, i), so output depends only on the configuration.
Dataset generate_dataset(const GeneratorConfig& cfg);

}  // namespace frad
