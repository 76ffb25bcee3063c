#pragma once

#include <cstdint>
#include <vector>

#include "polycalc/multivar.hpp"
#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Nodes z_i and weights w_i with sum w_i f(z_i) ~ contour integral of f dz
/// over the positively oriented boundary.
struct ContourQuadrature {
  ContourRegion region;
  int nodes_per_piece = 64;
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  int panels = 0;

  /// Gauss-Legendre on every piece. Panels are bisected while a panel is
  /// longer than twice its distance to one of the `avoid` points.
  static ContourQuadrature build(const ContourRegion& region, int nodes_per_piece = 64,
                                 const std::vector<Complex>& avoid = {});
  /// Same region and order, panels refined for `avoid`.
  ContourQuadrature refined(const std::vector<Complex>& avoid) const;
};

/// (1/2 pi i) * contour integral of dz / (z - z0).
Complex winding(const ContourQuadrature& quad, Complex z0);

/// Minimum boundary distance of the spectrum accepted by the contour routines.
constexpr double kContourClearance = 1e-6;

/// Cauchy integral (1/2 pi i) sum w phi(z) R(z, T). Throws SpectrumOnContour
/// unless the spectrum lies inside the region with clearance 1e-6.
CMatrix contour_eval_1d(const MultiPoly& phi, const CMatrix& t, const ContourQuadrature& quad);

/// sum_j phi(xi_j) P_j plus the contour integral over the boundary of E_r for
/// the compression of T to the range component.
CMatrix polygonal_calculus(const MultiPoly& phi, const CMatrix& t, const PointSetE& e, double r,
                           int nodes_per_piece = 64);

struct MultiContourOptions {
  double commute_tol = 1e-12;
  /// Cap on the number of tensor-product nodes.
  double node_budget = 1e9;
};

/// d-fold Cauchy integral with the same contour in every coordinate, d <= 3.
/// Throws SpectrumOnContour, NotCommuting and BudgetExceeded.
CMatrix contour_eval_multi(const MultiPoly& phi, const std::vector<CMatrix>& ts, const ContourQuadrature& quad,
                           const MultiContourOptions& opts = {});

struct CertificateOptions {
  int deg_max = 8;
  int samples_per_degree = 25;
  int samples_per_piece = 16;
  double significance = 0.05;
  bool check_ritt = true;
  bool check_similarity = true;
  int peripheral_nodes = 2048;
};

struct DegreeRatios {
  int degree = 0;
  double max_ratio = 0.0;
  double mean_log_ratio = 0.0;
};

struct BoundedRatioCertificate {
  ContourRegion polygon;
  std::vector<DegreeRatios> per_degree;
  double max_ratio = 0.0;
  double slope = 0.0;  // OLS slope of log ratio against degree
  double slope_stderr = 0.0;
  double p_value = 1.0;  // one-sided, H1: slope > 0
  std::size_t samples = 0;
  std::vector<double> peripheral_bounds;  // measured M per operator
  bool similarity_feasible = false;
  bool passed = false;
};

/// Ratios ||phi(T)|| / sup over the polygon^d of |phi| for random phi of every
/// degree up to deg_max; passes when the log ratio shows no positive trend in
/// degree at the given significance.
BoundedRatioCertificate bounded_ratio_certificate(const std::vector<CMatrix>& ts, const PointSetE& e, double r,
                                              std::uint64_t seed, const CertificateOptions& opts = {});

}  // namespace polycalc
