#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

class Rng;

/// Polynomial in d commuting variables: exponent tuple -> coefficient.
class MultiPoly {
 public:
  using Exponent = std::vector<int>;

  explicit MultiPoly(int d = 1) : d_(d) {}

  static MultiPoly constant(int d, Complex c);
  static MultiPoly monomial(const Exponent& e, Complex c = 1.0);
  /// Univariate sum_i coeffs[i] z^i.
  static MultiPoly univariate(const std::vector<Complex>& coeffs);
  /// All monomials of total degree <= degree with complex Gaussian coefficients.
  static MultiPoly random(int d, int degree, Rng& rng);

  int d() const { return d_; }
  int degree() const;
  const std::map<Exponent, Complex>& terms() const { return terms_; }

  /// Adds c to the coefficient of z^e; drops the term when it cancels to 0.
  void add(const Exponent& e, Complex c);
  MultiPoly scaled(Complex c) const;
  MultiPoly operator*(const MultiPoly& other) const;

  Complex eval(const std::vector<Complex>& z) const;
  /// Univariate coefficient vector (d must be 1).
  std::vector<Complex> coefficients_1d() const;

 private:
  int d_;
  std::map<Exponent, Complex> terms_;
};

/// phi(T_1, ..., T_d) with cached powers. Throws NotCommuting.
CMatrix eval_multipoly(const MultiPoly& phi, const std::vector<CMatrix>& ts, double commute_tol = 1e-12);

struct SupNorm {
  double value = 0.0;
  double spacing = 0.0;  // grid spacing in angle (torus) or boundary samples
  std::vector<Complex> argmax;
};

/// max |phi| on the torus: uniform angle grid then cyclic golden-section
/// refinement around the best grid point.
SupNorm supnorm_on_torus(const MultiPoly& phi, int grid_per_dim);

/// max |phi| over d-tuples of boundary samples of the region.
SupNorm supnorm_on_region_power(const MultiPoly& phi, const ContourRegion& region, int samples_per_piece);

struct TorusDomain {
  int grid_per_dim = 64;
};
struct RegionDomain {
  ContourRegion region;
  int samples_per_piece = 64;
};
using SupDomain = std::variant<TorusDomain, RegionDomain>;

SupNorm supnorm(const MultiPoly& phi, const SupDomain& domain);

/// ||phi(T)|| / sup |phi| over the domain. Throws DegeneratePoly when the
/// sup-norm is below 1e-14.
double vn_ratio(const std::vector<CMatrix>& ts, const MultiPoly& phi, const SupDomain& domain);

struct SimilarityOptions {
  double epsilon = 1.0;  // P >= epsilon I
  int max_iter = 5000;
  int word_length = 6;
  double margin_tol = 1e-8;
  double cond_cap = 1e12;
  /// Try the block candidate built from peripheral eigenprojections before
  /// the iterative search.
  bool spectral_start = true;
};

struct SimilarityResult {
  CMatrix p;
  CMatrix s;  // P^{1/2}
  std::vector<double> margins;  // ||S T_k S^{-1}||
  int iterations = 0;
  bool feasible = false;
  double condition = 0.0;
};

/// Searches P >= epsilon I with T_k* P T_k <= P for all k. Throws Infeasible.
SimilarityResult joint_similarity(const std::vector<CMatrix>& ts, const SimilarityOptions& opts = {});
/// Same search; reports feasible = false instead of throwing.
SimilarityResult try_joint_similarity(const std::vector<CMatrix>& ts, const SimilarityOptions& opts = {});

/// P = sum over joint peripheral blocks Pi of the Stein sums
/// sum_n (T^n Pi)* (T^n Pi) taken over the coordinates that are strict on the
/// block. Empty when some eigenvalue lies outside the disc, a peripheral
/// eigenvalue is defective, or the sums exceed the condition cap.
std::optional<CMatrix> spectral_candidate(const std::vector<CMatrix>& ts, double cond_cap = 1e12);

/// max_k ||P^{1/2} T_k P^{-1/2}||.
std::vector<double> similarity_margins(const CMatrix& p, const std::vector<CMatrix>& ts);

}  // namespace polycalc
