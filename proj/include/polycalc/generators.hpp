#pragma once

#include <cstdint>
#include <vector>

#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

class Rng;

/// Modulus cap for generated non-peripheral eigenvalues.
constexpr double kInteriorModulusCap = 0.95;

/// Invertible S = U diag(sigma) W with cond(S) <= cond_cap.
CMatrix random_similarity(int dim, double cond_cap, Rng& rng);

/// Uniform point of the closed region E_{0.95 r} of modulus <= 0.95.
Complex random_interior_point(const PointSetE& e, double r, Rng& rng);

struct RittGenOptions {
  /// Reject and redraw until classify_ritt passes.
  bool verify = true;
  int max_attempts = 20;
};

/// T = S diag(lambda) S^{-1}: peripheral_count distinct points of E and the
/// rest drawn from E_{0.95 r}.
CMatrix gen_ritt_matrix(const PointSetE& e, double r, int dim, int peripheral_count, double cond_cap,
                        std::uint64_t seed, const RittGenOptions& opts = {});

enum class TupleKind {
  Diagonal,          // diagonal factors, S = I
  SharedSimilarity,  // S D_k S^{-1}
  Polynomial,        // S p_k(A) S^{-1}, A strictly upper triangular
};

struct TupleSpec {
  TupleKind kind = TupleKind::SharedSimilarity;
  double cond_cap = 4.0;
  /// Eigenvalue moduli are drawn from [0, eig_radius].
  double eig_radius = 0.9;
  /// Norm of the nilpotent part (Polynomial kind).
  double nilpotent_norm = 0.3;
};

std::vector<CMatrix> gen_commuting_tuple(int d, int dim, const TupleSpec& spec, std::uint64_t seed);

/// Commuting tuple S D_k S^{-1} whose factors are each Ritt for E: every
/// diagonal carries peripheral_count points of E (in shuffled positions) and
/// interior points of E_{0.95 r}.
std::vector<CMatrix> gen_ritt_tuple(int d, const PointSetE& e, double r, int dim, int peripheral_count,
                                    double cond_cap, std::uint64_t seed);

/// [[1, 1], [0, 1]]: power-unbounded, never similar to a contraction.
CMatrix jordan_fixture();

}  // namespace polycalc
