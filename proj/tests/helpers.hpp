#pragma once

#include <initializer_list>
#include <vector>

#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"
#include "polycalc/random.hpp"

namespace polycalc::test {

inline CMatrix diag(std::initializer_list<Complex> entries) {
  CVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (Complex z : entries) v(i++) = z;
  return v.asDiagonal();
}

inline CMatrix diag(const std::vector<Complex>& entries) {
  CVector v(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = entries[i];
  return v.asDiagonal();
}

inline CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline double dist(const CMatrix& a, const CMatrix& b) { return opnorm(a - b); }

/// Random point set with n points at least `sep` apart in angle.
inline PointSetE random_e(int n, Rng& rng, double sep = 0.2) {
  for (;;) {
    std::vector<double> ang;
    for (int i = 0; i < n; ++i) ang.push_back(rng.uniform(0.0, 2.0 * kPi));
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < i && ok; ++j) ok = std::abs(std::polar(1.0, ang[i]) - std::polar(1.0, ang[j])) > sep;
    if (!ok) continue;
    std::vector<Complex> pts;
    for (double a : ang) pts.push_back(std::polar(1.0, a));
    return PointSetE(pts);
  }
}

}  // namespace polycalc::test
