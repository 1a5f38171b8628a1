#pragma once

// A unit circle lying in a tilted 2-plane of R^4, with helpers for sampling
// on and off it.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace fixture {

// The plane is spanned by the orthonormal pair (1,1,1,1)/2 and (1,-1,1,-1)/2.
inline std::vector<double> curve(double t) {
  const double u = std::cos(t) / 2, v = std::sin(t) / 2;
  return {u + v, u - v, u + v, u - v};
}

inline std::vector<std::vector<double>> on_manifold(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> t(0.0, 2 * std::numbers::pi);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(curve(t(rng)));
  return out;
}

inline std::vector<double> add_noise(std::mt19937_64& rng, std::vector<double> x, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  for (auto& v : x) v += g(rng);
  return x;
}

/// Points displaced from the curve by `distance` in a uniformly random direction.
inline std::vector<std::vector<double>> off_manifold(std::mt19937_64& rng, std::size_t n,
                                                     double distance) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto base = on_manifold(rng, n);
  for (auto& x : base) {
    std::vector<double> dir(x.size());
    double norm = 0.0;
    for (auto& d : dir) {
      d = g(rng);
      norm += d * d;
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += distance * dir[i] / norm;
  }
  return base;
}

inline double mse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace fixture
