#pragma once

#include <cstdint>

#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

/// prod_j (I - conj(xi_j) T)^{1/2}, factors multiplied in index order.
/// Throws NotSectorial if some I - conj(xi_j) T fails the sector test.
CMatrix sectorial_factor(const CMatrix& t, const PointSetE& e);

struct SquareFunctionOptions {
  double tol = 1e-14;
  int patience = 16;
  int k_cap = 100000;
};

struct SquareFunctionReport {
  double value = 0.0;
  int truncation = 0;  // K; the value sums k = 0..K
  double tail_bound = 0.0;
  double decay_rate = 0.0;
  CMatrix factor_a;
};

/// (sum_{k <= K} ||T^k A x||^2)^{1/2} with K picked by decay detection.
SquareFunctionReport square_function(const CMatrix& t, const PointSetE& e, const CVector& x,
                                     const SquareFunctionOptions& opts = {});

/// Same with a precomputed factor A.
SquareFunctionReport square_function_with_factor(const CMatrix& t, const CMatrix& a, const CVector& x,
                                                 const SquareFunctionOptions& opts = {});

/// Max of the square function over the standard basis and `trials` random
/// unit vectors (trial i seeded by derive_seed(seed, i)).
double square_constant_estimate(const CMatrix& t, const PointSetE& e, int trials, std::uint64_t seed,
                                const SquareFunctionOptions& opts = {});

}  // namespace polycalc
