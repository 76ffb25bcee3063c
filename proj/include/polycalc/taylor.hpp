#pragma once

#include <vector>

#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

/// Power-series data of 1 / prod_j (1 - conj(xi_j) z).
struct TaylorCoeffs {
  PointSetE e;
  std::vector<Complex> a;     // a_0 .. a_{m_max}
  std::vector<Complex> beta;  // one weight per point of E
  std::vector<Complex> c;     // c_0 .. c_N of prod_j (1 - conj(xi_j) z)

  /// sum_i |beta_i|, the uniform bound on |a_m|.
  double beta_l1() const;
};

/// Coefficients of prod_j (1 - conj(xi_j) z), lowest degree first.
std::vector<Complex> c_coeffs(const PointSetE& e);

/// a_0 .. a_{m_max} from c_0 a_0 = 1 and sum_i c_i a_{r-i} = 0 for r >= 1.
std::vector<Complex> a_coeffs_recursive(const PointSetE& e, int m_max);

/// beta_i = 1 / prod_{j != i} (1 - conj(xi_j) xi_i).
/// Throws IllConditioned when two points are closer than min_separation.
std::vector<Complex> beta_weights(const PointSetE& e, double min_separation = 1e-6);

/// sum_i beta_i conj(xi_i)^m.
std::vector<Complex> a_coeffs_partial_fractions(const PointSetE& e, const std::vector<Complex>& beta, int m_max);

TaylorCoeffs taylor_coeffs(const PointSetE& e, int m_max);

/// gamma_{r,k} for r = k+1 .. k+N.
std::vector<Complex> gamma_coeffs(const TaylorCoeffs& tc, int k);

/// S_k(T) x = sum_{m<=k} a_m T^m prod_j (I - conj(xi_j) T) x.
CVector sk_apply(const CMatrix& t, const TaylorCoeffs& tc, int k, const CVector& x);

/// The same vector via x + sum_{r=k+1}^{k+N} gamma_{r,k} T^r x.
CVector sk_apply_gamma(const CMatrix& t, const TaylorCoeffs& tc, int k, const CVector& x);

/// ||S_k(T) x - x||.
double sk_residual(const CMatrix& t, const PointSetE& e, const CVector& x, int k);

struct ResidualTrace {
  std::vector<int> k;
  std::vector<double> residual;
  bool converged = false;
};

/// Residuals at k = N, 2N, 4N, ... until below tol or past k_cap. One pass of
/// running powers, so the cost is O(k_final * n^2).
ResidualTrace sk_residual_trace(const CMatrix& t, const PointSetE& e, const CVector& x, double tol,
                            int k_cap = 1 << 16);

}  // namespace polycalc
