#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pcf/definition.hpp"

namespace testing {

inline pcf::FractalDefinition preset(const char* name) { return pcf::load_preset(name); }

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline Eigen::Map<const Eigen::VectorXd> vec(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// Euclidean position of F_w(p): interval maps x -> (x + i)/2, gasket maps
// x -> (x + c_i)/2 with c_i the corners. Boundary point p is the fixed point of map p.
inline Eigen::Vector2d position(const pcf::SelfSimilarStructure& s, std::int64_t word, int m, int label) {
  std::vector<Eigen::Vector2d> corners;
  if (s.N == 2) {
    corners = {{0.0, 0.0}, {1.0, 0.0}};
  } else {
    corners = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  }
  Eigen::Vector2d x = corners[label];
  const auto letters = pcf::word_letters(word, s.N, m);
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) x = 0.5 * (x + corners[*it]);
  return x;
}

}  // namespace testing
