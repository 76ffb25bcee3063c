#pragma once

#include <cstddef>
#include <vector>

#include "polycalc/ergodic.hpp"
#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

/// Unitary D + C^2 on C^{N+P}: multiplication by the points of E on the
/// first N coordinates, and (C^2 x)_p = x_{(p+2) mod P} on the remaining P.
struct PhaseShift {
  std::vector<Complex> phases;
  int period = 0;

  int dim() const { return static_cast<int>(phases.size()) + period; }
  /// (V^power (x) I_inner) applied to every outer slice of x, where x has
  /// outer * dim() * inner rows.
  CMatrix apply(const CMatrix& x, int power, long long outer, long long inner) const;
  CMatrix dense() const;
};

struct SpecificDilationOptions {
  int n_max = 20;
  double tol = 1e-8;
  /// Fixed series truncation; negative means choose adaptively.
  int k_max = -1;
  int k_cap = 4000;
  bool verify_ritt = true;
  RittGrid grid{};
  PowerBoundOptions gate{};
};

/// Finite realization of T^n = Q V^n J on K (x) H with K = C^{N+P}.
/// Rows of J are ordered with the K index outermost.
struct TruncatedDilation {
  int inner_dim = 0;
  int n_points = 0;
  int period = 0;
  int k_max = 0;
  int n_max = 0;
  CMatrix j;        // (N+P) n x n
  CMatrix j_tilde;  // (N+P) n x n, Q = j_tilde*
  CMatrix q;        // n x (N+P) n
  PhaseShift v;
  double tail_estimate = 0.0;  // predicted series truncation error
  double certified_error = 0.0;

  int space_dim() const { return v.dim() * inner_dim; }
  /// (V (x) I_H)^power x.
  CMatrix apply_v(const CMatrix& x, int power) const;
  /// Q V^n J.
  CMatrix compress(int n) const;
  /// Block p of J as an operator on H (p indexes K).
  CMatrix j_block(int p) const;
};

TruncatedDilation specific_dilation(const CMatrix& t, const PointSetE& e, const SpecificDilationOptions& opts = {});

/// max_{0 <= n <= n_max} ||T^n - Q V^n J||.
double dilation_check(const TruncatedDilation& dil, const CMatrix& t, int n_max);

/// Unitary dilation of a contraction on 2w+1 copies of H with circulant
/// wrap; J0 embeds H as slot 0. J0* V^n J0 = T^n for 0 <= n <= 2w.
struct ContractionDilation {
  CMatrix v;
  CMatrix j0;
  int window = 0;
  int valid_power = 0;
};

ContractionDilation schaffer_dilation(const CMatrix& t, int window);

/// max_{0 <= n <= budget} ||T^n - J0* V^n J0||.
double schaffer_check(const ContractionDilation& dil, const CMatrix& t, int budget);

struct AndoDilation {
  CMatrix v1;
  CMatrix v2;
  CMatrix j0;
  int budget = 0;
  /// Built as a product of two Schaffer dilations (T1 T2* = T2* T1 holds);
  /// V1, V2 are then commuting unitaries.
  bool doubly_commuting = false;
  /// False for the general route, whose truncated operators are isometric
  /// and commuting only on vectors reached within the budget.
  bool unitary = false;
};

struct AndoOptions {
  double commute_tol = 1e-12;
  double doubly_tol = 1e-12;
  bool allow_general = true;
};

AndoDilation ando_dilation(const CMatrix& t1, const CMatrix& t2, int budget, const AndoOptions& opts = {});

/// max_{m+n <= budget} ||T1^m T2^n - J0* V1^m V2^n J0||.
double ando_check(const AndoDilation& dil, const CMatrix& t1, const CMatrix& t2, int budget);

/// Dilation data (b) of the combinator: J: H -> L, Q: L -> H and commuting
/// unitaries on L for the coordinates after the first m.
struct TailBundle {
  CMatrix j;
  CMatrix q;
  std::vector<CMatrix> unitaries;
  int budget = 0;  // total exponent budget on the tail coordinates
  bool unitary = true;
};

/// Tail from an Ando dilation of S^{-1} T S: J = J0 S^{-1}, Q = S J0*.
TailBundle tail_from_ando(const AndoDilation& dil, const CMatrix& s);
TailBundle tail_from_schaffer(const ContractionDilation& dil, const CMatrix& s);
/// L = H with no tail coordinates.
TailBundle tail_identity(int n);

struct JointOptions {
  double intertwine_tol = 1e-8;
  double commute_tol = 1e-12;
  std::size_t dim_cap = std::size_t{1} << 18;
};

struct JointDilation {
  int d = 0;
  int m = 0;
  int inner_dim = 0;
  std::vector<int> factor_dims;  // K_1 .. K_m, then dim L
  std::size_t total_dim = 0;
  std::vector<PhaseShift> heads;
  std::vector<CMatrix> tail_unitaries;
  CMatrix j;  // total_dim x n
  CMatrix q;  // n x total_dim
  std::vector<int> coordinate_budget;  // per coordinate for heads
  int tail_budget = 0;
  bool tail_unitary = true;
  double intertwine_error = 0.0;

  /// U_k^power x for coordinate k (0-based).
  CMatrix apply_u(int k, const CMatrix& x, int power = 1) const;
  double norm_j() const;
  double norm_q() const;
};

JointDilation joint_dilation(const std::vector<CMatrix>& ts, int m, const std::vector<TruncatedDilation>& heads,
                             const TailBundle& tail, const JointOptions& opts = {});

struct JointCheck {
  double max_error = 0.0;
  std::size_t tuples = 0;
};

/// Max over exponent tuples with sum <= total of ||prod T_k^{n_k} - Q prod U_k^{n_k} J||.
JointCheck joint_check(const JointDilation& dil, const std::vector<CMatrix>& ts, int total);

/// max ||U_i U_j - U_j U_i|| and max ||U_k* U_k - I||, computed on random
/// probe vectors for large spaces.
struct UnitaryReport {
  double commutator = 0.0;
  double unitarity = 0.0;
};
UnitaryReport joint_unitary_report(const JointDilation& dil, int probes = 4, std::uint64_t seed = 7);

}  // namespace polycalc
