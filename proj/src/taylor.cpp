#include "polycalc/taylor.hpp"

#include <algorithm>
#include <cmath>

namespace polycalc {

namespace {
using LComplex = std::complex<long double>;
}  // namespace

double TaylorCoeffs::beta_l1() const {
  double s = 0.0;
  for (Complex b : beta) s += std::abs(b);
  return s;
}

std::vector<Complex> c_coeffs(const PointSetE& e) {
  std::vector<Complex> c{1.0};
  for (Complex xi : e.points()) {
    const Complex f = -std::conj(xi);
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] += f * c[i];
    }
    c = std::move(next);
  }
  return c;
}

// Run in long double: the characteristic roots lie on the circle, so rounding error grows with m.
std::vector<Complex> a_coeffs_recursive(const PointSetE& e, int m_max) {
  if (m_max < 0) throw Error(ErrorKind::InvalidInput, "m_max must be nonnegative");
  std::vector<LComplex> c{1.0L};
  for (Complex xi : e.points()) {
    const LComplex f = -std::conj(LComplex(xi));
    std::vector<LComplex> next(c.size() + 1, 0.0L);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] += f * c[i];
    }
    c = std::move(next);
  }
  const int n = static_cast<int>(e.size());
  std::vector<LComplex> la(static_cast<std::size_t>(m_max) + 1);
  la[0] = 1.0L;
  for (int r = 1; r <= m_max; ++r) {
    LComplex s = 0.0L;
    for (int i = 1; i <= std::min(r, n); ++i) s += c[static_cast<std::size_t>(i)] * la[static_cast<std::size_t>(r - i)];
    la[static_cast<std::size_t>(r)] = -s;
  }
  std::vector<Complex> a(la.size());
  for (std::size_t m = 0; m < la.size(); ++m) a[m] = Complex(static_cast<double>(la[m].real()), static_cast<double>(la[m].imag()));
  return a;
}

std::vector<Complex> beta_weights(const PointSetE& e, double min_separation) {
  if (e.size() > 1 && e.min_separation() < min_separation) {
    throw Error(ErrorKind::IllConditioned, "points of E too close for partial fractions");
  }
  const auto& xi = e.points();
  std::vector<Complex> beta(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    Complex prod = 1.0;
    for (std::size_t j = 0; j < xi.size(); ++j)
      if (j != i) prod *= 1.0 - std::conj(xi[j]) * xi[i];
    beta[i] = 1.0 / prod;
  }
  return beta;
}

std::vector<Complex> a_coeffs_partial_fractions(const PointSetE& e, const std::vector<Complex>& beta, int m_max) {
  std::vector<LComplex> la(static_cast<std::size_t>(m_max) + 1, 0.0L);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const long double theta = -std::arg(LComplex(e[i]));
    const LComplex b(beta[i]);
    for (int m = 0; m <= m_max; ++m) la[static_cast<std::size_t>(m)] += b * std::polar(1.0L, theta * m);
  }
  std::vector<Complex> a(la.size());
  for (std::size_t m = 0; m < la.size(); ++m) a[m] = Complex(static_cast<double>(la[m].real()), static_cast<double>(la[m].imag()));
  return a;
}

TaylorCoeffs taylor_coeffs(const PointSetE& e, int m_max) {
  return {e, a_coeffs_recursive(e, m_max), beta_weights(e), c_coeffs(e)};
}

std::vector<Complex> gamma_coeffs(const TaylorCoeffs& tc, int k) {
  const int n = static_cast<int>(tc.e.size());
  if (static_cast<int>(tc.a.size()) <= k) throw Error(ErrorKind::InvalidInput, "a coefficients shorter than k");
  std::vector<Complex> g;
  for (int r = k + 1; r <= k + n; ++r) {
    Complex s = 0.0;
    for (int m = r - n; m <= k; ++m) s += tc.c[static_cast<std::size_t>(r - m)] * tc.a[static_cast<std::size_t>(m)];
    g.push_back(s);
  }
  return g;
}

namespace {

std::vector<Complex> a_upto(const TaylorCoeffs& tc, int k) {
  if (static_cast<int>(tc.a.size()) > k) return tc.a;
  return a_coeffs_recursive(tc.e, k);
}

CVector apply_product(const CMatrix& t, const PointSetE& e, const CVector& x) {
  CVector y = x;
  for (Complex xi : e.points()) y = y - std::conj(xi) * (t * y);
  return y;
}

}  // namespace

CVector sk_apply(const CMatrix& t, const TaylorCoeffs& tc, int k, const CVector& x) {
  const std::vector<Complex> a = a_upto(tc, k);
  CVector v = apply_product(t, tc.e, x);
  CVector acc = a[0] * v;
  for (int m = 1; m <= k; ++m) {
    v = t * v;
    acc += a[static_cast<std::size_t>(m)] * v;
  }
  return acc;
}

CVector sk_apply_gamma(const CMatrix& t, const TaylorCoeffs& tc, int k, const CVector& x) {
  TaylorCoeffs ext = tc;
  ext.a = a_upto(tc, k);
  const std::vector<Complex> g = gamma_coeffs(ext, k);
  CVector v = x;
  for (int r = 1; r <= k; ++r) v = t * v;
  CVector acc = x;
  for (std::size_t i = 0; i < g.size(); ++i) {
    v = t * v;
    acc += g[i] * v;
  }
  return acc;
}

double sk_residual(const CMatrix& t, const PointSetE& e, const CVector& x, int k) {
  const TaylorCoeffs tc{e, a_coeffs_recursive(e, k), {}, c_coeffs(e)};
  return (sk_apply(t, tc, k, x) - x).norm();
}

ResidualTrace sk_residual_trace(const CMatrix& t, const PointSetE& e, const CVector& x, double tol, int k_cap) {
  ResidualTrace trace;
  const int n = static_cast<int>(e.size());
  const std::vector<Complex> a = a_coeffs_recursive(e, k_cap);
  CVector v = apply_product(t, e, x);
  CVector acc = a[0] * v;
  int next = std::max(n, 1);
  for (int m = 1; m <= k_cap; ++m) {
    v = t * v;
    acc += a[static_cast<std::size_t>(m)] * v;
    if (m == next) {
      const double res = (acc - x).norm();
      trace.k.push_back(m);
      trace.residual.push_back(res);
      if (res < tol) {
        trace.converged = true;
        break;
      }
      next *= 2;
    }
  }
  return trace;
}

}  // namespace polycalc
