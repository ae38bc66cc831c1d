#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "frad/datagen.hpp"
#include "frad/features.hpp"
#include "frad/matrix.hpp"

namespace testing_support {

/// Fresh per-test scratch directory under $FRAD_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* env = std::getenv("FRAD_TEST_TMP");
  std::filesystem::path base = env != nullptr ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "frad_tests";
  auto dir = base / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Small generated dataset, standardized, with integer labels.
struct Standardized {
  frad::Dataset raw;
  frad::Matrix X;
  std::vector<int> y;
};

inline Standardized synthetic(std::size_t n, double noise, std::uint64_t seed) {
  frad::GeneratorConfig cfg;
  cfg.n_total = n;
  cfg.noise_sigma = noise;
  cfg.seed = seed;
  Standardized s;
  s.raw = frad::generate_dataset(cfg);
  s.X = frad::apply_standardizer(frad::fit_standardizer(s.raw.features), s.raw.features);
  s.y = frad::label_codes(s.raw);
  return s;
}

}  // namespace testing_support
