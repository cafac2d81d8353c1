#pragma once

#include <random>
#include <vector>

#include "temp_dir.hpp"
#include "tivm/tensor.hpp"

namespace tivm::test {

inline FeatureCube gaussian_cube(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<float> v(shape.size());
  for (auto& x : v) x = static_cast<float>(normal(rng));
  return FeatureCube(shape, std::move(v));
}

inline FeatureCube filled(Shape shape, float value) {
  return FeatureCube(shape, std::vector<float>(shape.size(), value));
}

inline FeatureCube scaled(const FeatureCube& a, float alpha) {
  std::vector<float> v(a.values().begin(), a.values().end());
  for (auto& x : v) x *= alpha;
  return FeatureCube(a.shape(), std::move(v));
}

}  // namespace tivm::test
