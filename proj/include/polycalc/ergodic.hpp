#pragma once

#include <vector>

#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

struct PowerBoundOptions {
  int horizon = 2048;
  double cap = 100.0;
};

/// max_{n <= horizon} ||T^n||; stops early once the cap is exceeded.
double power_bound(const CMatrix& t, const PowerBoundOptions& opts = {});

/// Throws NotPowerBounded when the sampled powers exceed the cap.
void require_power_bounded(const CMatrix& t, const PowerBoundOptions& opts = {});

struct CesaroOptions {
  /// Largest averaging length; lengths double, so this is reached after
  /// log2(n_max) squarings.
  long long n_max = 1LL << 26;
  double tol = 1e-8;
  PowerBoundOptions gate{};
};

struct CesaroResult {
  CMatrix projection;
  long long n_used = 0;
  double achieved = 0.0;  // norm of the last change
  bool converged = false;
};

/// Limit of the averages (1/n) sum_{k<n} (conj(xi) T)^k, evaluated at
/// n = 1, 2, 4, ... and Richardson-extrapolated (2 A_{2n} - A_n), which
/// cancels the O(1/n) bias from the non-peripheral spectrum.
/// Throws NotConverged when successive values never differ by less than tol.
CesaroResult cesaro_projection(const CMatrix& t, Complex xi, const CesaroOptions& opts = {});

/// Same iteration without throwing; check `converged`.
CesaroResult try_cesaro_projection(const CMatrix& t, Complex xi, const CesaroOptions& opts = {});

struct RieszOptions {
  double null_tol = 1e-10;       // relative to max(1, ||T||)
  double cluster_tol = 1e-6;     // eigenvalues this close to xi count toward its multiplicity
  double semisimple_tol = 1e-8;  // smallest singular value of L* N, relative
};

/// Spectral projection at xi built from right and left eigenvectors:
/// P = N (L* N)^{-1} L*. Zero when xi is not an eigenvalue.
/// Throws NotSemisimple for a nontrivial Jordan block at xi.
CMatrix eigen_projection(const CMatrix& t, Complex xi, const RieszOptions& opts = {});

/// Orthonormal (Frobenius) basis of {X : TX = XT}.
std::vector<CMatrix> commutant_basis(const CMatrix& t, double rel_tol = 1e-10);

enum class ProjectionRoute { Riesz, Cesaro };

struct DecompositionOptions {
  ProjectionRoute route = ProjectionRoute::Riesz;
  CesaroOptions cesaro{};
  RieszOptions riesz{};
  PowerBoundOptions gate{};
  bool with_commutant = true;
};

struct ErgodicDecomposition {
  PointSetE e;
  std::vector<CMatrix> projections;  // onto Ker(I - conj(xi_j) T)
  CMatrix range_projection;          // onto Ran prod_j (I - conj(xi_j) T)
  std::vector<CMatrix> commutant;
  ProjectionRoute route = ProjectionRoute::Riesz;
  std::vector<long long> cesaro_lengths;  // per point, Cesaro route only
  double power_bound = 0.0;
};

ErgodicDecomposition full_decomposition(const CMatrix& t, const PointSetE& e, const DecompositionOptions& opts = {});

/// P_1 x, ..., P_N x, P_range x.
std::vector<CVector> decompose_vector(const ErgodicDecomposition& dec, const CVector& x);

struct ProjectionAlgebraReport {
  double idempotence = 0.0;    // max ||P^2 - P||
  double annihilation = 0.0;   // max_{i != j} ||P_i P_j||
  double partition = 0.0;      // ||sum P - I||
  double bicommutant = 0.0;    // max ||P X - X P|| over the commutant basis
  double invariance = 0.0;     // max_j ||T P_j - xi_j P_j||
};

ProjectionAlgebraReport check_projection_algebra(const CMatrix& t, const ErgodicDecomposition& dec);

}  // namespace polycalc
