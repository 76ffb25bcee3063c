#pragma once

#include <string>
#include <variant>
#include <vector>

#include "polycalc/numerics.hpp"

namespace polycalc {

/// Finite set of distinct unimodular points. Points are stored normalized to
/// modulus one and sorted by argument in [0, 2pi).
class PointSetE {
 public:
  PointSetE() = default;
  /// Validates and normalizes. Throws InvalidInput if a point is off the
  /// circle by more than unit_tol, if two points are closer than
  /// distinct_tol, or if the list is empty.
  explicit PointSetE(std::vector<Complex> points, double unit_tol = 1e-12,
                     double distinct_tol = 1e-9);

  static PointSetE roots_of_unity(int n, double rotation = 0.0);

  const std::vector<Complex>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  Complex operator[](std::size_t i) const { return points_[i]; }

  /// {conj(xi_j)}; the point set attached to T*.
  PointSetE conjugate() const;
  /// {u * xi_j}.
  PointSetE rotated(Complex u) const;

  double min_separation() const;
  /// min_j |z - xi_j|.
  double distance(Complex z) const;
  /// prod_j |xi_j - z|.
  double product_distance(Complex z) const;

 private:
  std::vector<Complex> points_;
};

struct Segment {
  Complex a;
  Complex b;
};

/// Circular arc traversed counter-clockwise from theta_start to theta_end
/// (theta_end > theta_start).
struct Arc {
  Complex center;
  double radius;
  double theta_start;
  double theta_end;
};

using Piece = std::variant<Segment, Arc>;

Complex piece_point(const Piece& p, double t);       // t in [0, 1]
Complex piece_derivative(const Piece& p, double t);  // d/dt
double piece_length(const Piece& p);
/// Distance from z to the piece.
double piece_distance(const Piece& p, Complex z);
/// Sub-piece on parameter interval [t0, t1].
Piece piece_slice(const Piece& p, double t0, double t1);

/// Closed, convex, positively oriented boundary made of segments and arcs.
/// The origin must lie in the interior.
struct ContourRegion {
  std::vector<Piece> pieces;
  bool positive = true;

  /// Largest rho with rho * e^{i theta} on the boundary.
  double radial_extent(double theta) const;
  /// Strict interior test with slack: |z| < radial_extent(arg z) - slack.
  bool contains(Complex z, double slack = 0.0) const;
  /// Closed test: |z| <= radial_extent(arg z) + slack.
  bool contains_closed(Complex z, double slack = 1e-12) const;
  double boundary_distance(Complex z) const;
  /// Max chaining gap between consecutive piece endpoints.
  double closure_gap() const;
  /// Area by the shoelace formula applied to a fine boundary sampling.
  double area(int samples_per_piece = 512) const;
  /// `per_piece` points on each piece (t = (i + 0.5) / per_piece).
  std::vector<Complex> sample_boundary(int per_piece) const;
  std::vector<Complex> vertices() const;  // start point of each piece
  bool all_segments() const;
};

/// Boundary of the convex hull of E and the closed disc of radius r.
ContourRegion build_Er(const PointSetE& e, double r);

/// Convex polygon containing E_r whose closure meets the circle exactly in E.
/// Arcs of E_r are replaced by circumscribed chains whose vertices sit at
/// modulus at most max_vertex_modulus.
ContourRegion enclosing_polygon(const PointSetE& e, double r, double max_vertex_modulus = -1.0);

/// Smallest r (to bisection tolerance) such that every point of `pts` lies in
/// the closure of E_r or within peripheral_tol of E. Returns 0 when the points
/// already lie in the origin's neighbourhood.
double minimal_r(const PointSetE& e, const std::vector<Complex>& pts, double peripheral_tol = 1e-8);

struct RittGrid {
  int radii = 64;
  int angles = 256;
  int approach = 32;
  double approach_min = 1e-6;
  double outer_radius = 2.0;
  /// Each refinement doubles the approach points and divides approach_min
  /// by 10; the radial grid follows the new approach_min.
  int refinements = 2;
  /// Eigenvalues at least this large in modulus also receive radial approach points.
  double eigen_approach_threshold = 0.5;
  double growth_pass = 0.05;
  double growth_fail = 1.5;
  double spectrum_tol = 1e-10;
};

struct RittSample {
  Complex z;
  double resolvent_norm;
  double distance_to_e;
  double weighted() const { return resolvent_norm * distance_to_e; }
};

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct RittCertificate {
  PointSetE e;
  double m_estimate = 0.0;
  double r = 0.5;
  std::vector<RittSample> samples;  // finest level
  std::vector<double> level_estimates;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  double approach_min = 0.0;
};

RittCertificate classify_ritt(const CMatrix& t, const PointSetE& e, const RittGrid& grid = {});

struct PeripheralBoundOptions {
  double exclusion = 1e-6;
  double peripheral_tol = 1e-8;
};

/// sup over sampled z on the boundary of E_r (away from E) of
/// prod_j |xi_j - z| * ||R(z, T)||.
double verify_peripheral_bound(const CMatrix& t, const PointSetE& e, double r, int nodes,
                               const PeripheralBoundOptions& opts = {});

struct SectorEstimate {
  double angle = 0.0;         // max |arg lambda|
  double extremal_arg = 0.0;  // signed argument attaining it
  bool sectorial = true;      // angle < pi/2
};

/// Numerical sector angle of I - conj(xi) T from its eigenvalues.
SectorEstimate check_sectorial(const CMatrix& t, Complex xi, double zero_tol = 1e-12);

}  // namespace polycalc
