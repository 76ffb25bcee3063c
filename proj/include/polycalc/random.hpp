#pragma once

#include <cstdint>
#include <random>

#include "polycalc/numerics.hpp"

namespace polycalc {

/// SplitMix64 step; used to derive independent child seeds from a master seed
/// so that every trial's randomness depends only on (seed, stream index).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }
  Complex complex_normal() { return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)}; }
  Complex unimodular() { return std::polar(1.0, uniform(0.0, 2.0 * kPi)); }

  CMatrix gaussian(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = complex_normal();
    return m;
  }

  /// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
  CMatrix unitary(int n) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian(n, n));
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
      const double mag = std::abs(r(i, i));
      if (mag > 0.0) q.col(i) *= r(i, i) / mag;
    }
    return q;
  }

  CVector unit_vector(int n) {
    CVector v = gaussian(n, 1);
    return v / v.norm();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace polycalc
