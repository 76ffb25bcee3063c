#include "polycalc/polygonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polycalc/kernels.hpp"

namespace polycalc {

namespace {

// Gaps whose arc would be shorter than this (in radians) close with a chord.
constexpr double kArcCollapse = 1e-12;

constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

// Im(conj(p) q): z-component of the planar cross product.
double cross(Complex p, Complex q) { return p.real() * q.imag() - p.imag() * q.real(); }

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = hi;
    return out;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  return out;
}

}  // namespace

PointSetE::PointSetE(std::vector<Complex> points, double unit_tol, double distinct_tol) {
  if (points.empty()) throw Error(ErrorKind::InvalidInput, "E must contain at least one point");
  for (Complex& p : points) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()) || std::abs(std::abs(p) - 1.0) > unit_tol) {
      throw Error(ErrorKind::InvalidInput, "E point is not unimodular");
    }
    p /= std::abs(p);
  }
  std::sort(points.begin(), points.end(),
            [](Complex a, Complex b) { return wrap_angle(std::arg(a)) < wrap_angle(std::arg(b)); });
  points_ = std::move(points);
  if (points_.size() > 1 && min_separation() <= distinct_tol) {
    throw Error(ErrorKind::InvalidInput, "E points are not distinct");
  }
}

PointSetE PointSetE::roots_of_unity(int n, double rotation) {
  std::vector<Complex> pts;
  for (int k = 0; k < n; ++k) pts.push_back(std::polar(1.0, rotation + kTwoPi * k / n));
  return PointSetE(std::move(pts));
}

PointSetE PointSetE::conjugate() const {
  std::vector<Complex> pts;
  for (Complex p : points_) pts.push_back(std::conj(p));
  return PointSetE(std::move(pts));
}

PointSetE PointSetE::rotated(Complex u) const {
  std::vector<Complex> pts;
  for (Complex p : points_) pts.push_back(u * p);
  return PointSetE(std::move(pts));
}

double PointSetE::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j) best = std::min(best, std::abs(points_[i] - points_[j]));
  return best;
}

double PointSetE::distance(Complex z) const {
  double best = std::numeric_limits<double>::infinity();
  for (Complex p : points_) best = std::min(best, std::abs(z - p));
  return best;
}

double PointSetE::product_distance(Complex z) const {
  double prod = 1.0;
  for (Complex p : points_) prod *= std::abs(p - z);
  return prod;
}

Complex piece_point(const Piece& p, double t) {
  if (const auto* s = std::get_if<Segment>(&p)) return s->a + t * (s->b - s->a);
  const auto& a = std::get<Arc>(p);
  return a.center + std::polar(a.radius, a.theta_start + t * (a.theta_end - a.theta_start));
}

Complex piece_derivative(const Piece& p, double t) {
  if (const auto* s = std::get_if<Segment>(&p)) return s->b - s->a;
  const auto& a = std::get<Arc>(p);
  const double span = a.theta_end - a.theta_start;
  return kI * span * std::polar(a.radius, a.theta_start + t * span);
}

double piece_length(const Piece& p) {
  if (const auto* s = std::get_if<Segment>(&p)) return std::abs(s->b - s->a);
  const auto& a = std::get<Arc>(p);
  return a.radius * (a.theta_end - a.theta_start);
}

double piece_distance(const Piece& p, Complex z) {
  if (const auto* s = std::get_if<Segment>(&p)) {
    const Complex d = s->b - s->a;
    const double len2 = std::norm(d);
    double t = len2 > 0.0 ? std::real(std::conj(d) * (z - s->a)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (s->a + t * d));
  }
  const auto& a = std::get<Arc>(p);
  const double phi = a.theta_start + wrap_angle(std::arg(z - a.center) - a.theta_start);
  if (phi <= a.theta_end) return std::abs(std::abs(z - a.center) - a.radius);
  return std::min(std::abs(z - piece_point(p, 0.0)), std::abs(z - piece_point(p, 1.0)));
}

Piece piece_slice(const Piece& p, double t0, double t1) {
  if (std::holds_alternative<Segment>(p)) return Segment{piece_point(p, t0), piece_point(p, t1)};
  const auto& a = std::get<Arc>(p);
  const double span = a.theta_end - a.theta_start;
  return Arc{a.center, a.radius, a.theta_start + t0 * span, a.theta_start + t1 * span};
}

double ContourRegion::radial_extent(double theta) const {
  const Complex u = std::polar(1.0, theta);
  double best = 0.0;
  for (const Piece& p : pieces) {
    if (const auto* s = std::get_if<Segment>(&p)) {
      const Complex d = s->b - s->a;
      const double den = cross(u, d);
      if (std::abs(den) < 1e-300) continue;
      const double t = cross(s->a, d) / den;
      const double sp = cross(s->a, u) / den;
      if (sp >= -1e-12 && sp <= 1.0 + 1e-12 && t > 0.0) best = std::max(best, t);
    } else {
      const auto& a = std::get<Arc>(p);
      const double b = std::real(std::conj(u) * a.center);
      const double disc = b * b - std::norm(a.center) + a.radius * a.radius;
      if (disc < 0.0) continue;
      for (double t : {b + std::sqrt(disc), b - std::sqrt(disc)}) {
        if (t <= 0.0) continue;
        const double off = wrap_angle(std::arg(t * u - a.center) - a.theta_start);
        if (off <= a.theta_end - a.theta_start + 1e-12 || off > kTwoPi - 1e-12) best = std::max(best, t);
      }
    }
  }
  return best;
}

bool ContourRegion::contains(Complex z, double slack) const {
  if (std::abs(z) == 0.0) return true;
  return std::abs(z) < radial_extent(std::arg(z)) - slack;
}

bool ContourRegion::contains_closed(Complex z, double slack) const {
  if (std::abs(z) == 0.0) return true;
  return std::abs(z) <= radial_extent(std::arg(z)) + slack;
}

double ContourRegion::boundary_distance(Complex z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Piece& p : pieces) best = std::min(best, piece_distance(p, z));
  return best;
}

double ContourRegion::closure_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& next = pieces[(i + 1) % pieces.size()];
    gap = std::max(gap, std::abs(piece_point(pieces[i], 1.0) - piece_point(next, 0.0)));
  }
  return gap;
}

double ContourRegion::area(int samples_per_piece) const {
  std::vector<Complex> pts;
  for (const Piece& p : pieces) {
    const int m = std::holds_alternative<Segment>(p) ? 1 : samples_per_piece;
    for (int i = 0; i < m; ++i) pts.push_back(piece_point(p, static_cast<double>(i) / m));
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) twice += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * twice;
}

std::vector<Complex> ContourRegion::sample_boundary(int per_piece) const {
  std::vector<Complex> out;
  out.reserve(pieces.size() * static_cast<std::size_t>(per_piece));
  for (const Piece& p : pieces)
    for (int i = 0; i < per_piece; ++i) out.push_back(piece_point(p, (i + 0.5) / per_piece));
  return out;
}

std::vector<Complex> ContourRegion::vertices() const {
  std::vector<Complex> out;
  for (const Piece& p : pieces) out.push_back(piece_point(p, 0.0));
  return out;
}

bool ContourRegion::all_segments() const {
  return std::all_of(pieces.begin(), pieces.end(), [](const Piece& p) { return std::holds_alternative<Segment>(p); });
}

namespace {

struct Gap {
  double theta0;  // angle of xi_j
  double span;    // angular distance to the next point, in (0, 2pi]
};

std::vector<Gap> gaps_of(const PointSetE& e) {
  std::vector<Gap> out;
  const auto& pts = e.points();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double a = wrap_angle(std::arg(pts[j]));
    double span = kTwoPi;
    if (pts.size() > 1) {
      span = wrap_angle(std::arg(pts[(j + 1) % pts.size()]) - a);
      if (span == 0.0) span = kTwoPi;
    }
    out.push_back({a, span});
  }
  return out;
}

void check_radius(const PointSetE& e, double r) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidInput, "r must lie in (0, 1)");
  if (e.size() == 1 && r < 1e-8) throw Error(ErrorKind::DegenerateRegion, "r too small for a tangent construction");
}

}  // namespace

ContourRegion build_Er(const PointSetE& e, double r) {
  check_radius(e, r);
  const double alpha = std::acos(r);
  ContourRegion region;
  for (const Gap& g : gaps_of(e)) {
    const Complex xi = std::polar(1.0, g.theta0);
    const Complex next = std::polar(1.0, g.theta0 + g.span);
    if (g.span <= 2.0 * alpha + kArcCollapse) {
      region.pieces.emplace_back(Segment{xi, next});
      continue;
    }
    const double t0 = g.theta0 + alpha;
    const double t1 = g.theta0 + g.span - alpha;
    region.pieces.emplace_back(Segment{xi, std::polar(r, t0)});
    region.pieces.emplace_back(Arc{0.0, r, t0, t1});
    region.pieces.emplace_back(Segment{std::polar(r, t1), next});
  }
  return region;
}

ContourRegion enclosing_polygon(const PointSetE& e, double r, double max_vertex_modulus) {
  check_radius(e, r);
  double rho = max_vertex_modulus > 0.0 ? max_vertex_modulus : 0.5 * (1.0 + r);
  rho = std::min(rho, 1.0 - 1e-6);
  if (rho <= r) throw Error(ErrorKind::InvalidInput, "vertex modulus must exceed r");
  const double h_max = 2.0 * std::acos(r / rho);
  const double alpha = std::acos(r);

  ContourRegion poly;
  for (const Gap& g : gaps_of(e)) {
    const Complex xi = std::polar(1.0, g.theta0);
    const Complex next = std::polar(1.0, g.theta0 + g.span);
    if (g.span <= 2.0 * alpha + kArcCollapse) {
      poly.pieces.emplace_back(Segment{xi, next});
      continue;
    }
    const double t0 = g.theta0 + alpha;
    const double arc = g.span - 2.0 * alpha;
    const int m = std::max(1, static_cast<int>(std::ceil(arc / h_max)));
    const double h = arc / m;
    const double vr = r / std::cos(0.5 * h);
    Complex prev = xi;
    for (int i = 0; i < m; ++i) {
      const Complex v = std::polar(vr, t0 + (i + 0.5) * h);
      poly.pieces.emplace_back(Segment{prev, v});
      prev = v;
    }
    poly.pieces.emplace_back(Segment{prev, next});
  }
  return poly;
}

double minimal_r(const PointSetE& e, const std::vector<Complex>& pts, double peripheral_tol) {
  std::vector<Complex> inner;
  for (Complex p : pts)
    if (e.distance(p) > peripheral_tol) inner.push_back(p);
  if (inner.empty()) return 0.0;
  auto fits = [&](double r) {
    const ContourRegion reg = build_Er(e, r);
    return std::all_of(inner.begin(), inner.end(), [&](Complex p) { return reg.contains_closed(p, 1e-14); });
  };
  double lo = 1e-7, hi = 1.0 - 1e-12;
  if (fits(lo)) return lo;
  if (!fits(hi)) return 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

std::vector<Complex> ritt_points(const PointSetE& e, const std::vector<Complex>& eig, const RittGrid& g, int level,
                                 double delta) {
  const int angles = g.angles;
  const int approach = g.approach << level;
  std::vector<Complex> pts;
  pts.reserve(static_cast<std::size_t>(g.radii * angles + approach * (e.size() + eig.size())));
  for (double s : log_spaced(delta, g.outer_radius - 1.0, g.radii)) {
    for (int k = 0; k < angles; ++k) pts.push_back(std::polar(1.0 + s, kTwoPi * k / angles));
  }
  std::vector<Complex> anchors = e.points();
  for (Complex l : eig)
    if (std::abs(l) >= g.eigen_approach_threshold) anchors.push_back(l / std::abs(l));
  for (Complex a : anchors)
    for (double s : log_spaced(delta, 1.0, approach)) pts.push_back(a * (1.0 + s));
  return pts;
}

}  // namespace

RittCertificate classify_ritt(const CMatrix& t, const PointSetE& e, const RittGrid& grid) {
  RittCertificate cert;
  cert.e = e;
  const std::vector<Complex> eig = spectrum(t);

  for (Complex l : eig) {
    if (std::abs(l) > 1.0 + grid.spectrum_tol) {
      cert.verdict = Verdict::Fail;
      cert.reason = "eigenvalue outside the closed unit disc";
    } else if (std::abs(l) >= 1.0 - grid.spectrum_tol && e.distance(l) > 1e-8) {
      cert.verdict = Verdict::Fail;
      cert.reason = "unimodular eigenvalue outside E";
    }
  }

  const auto schur = kernels::SchurForm::of(t);
  for (int level = 0; level <= grid.refinements; ++level) {
    const double delta = grid.approach_min * std::pow(10.0, -level);
    const std::vector<Complex> pts = ritt_points(e, eig, grid, level, delta);
    const std::vector<double> norms = kernels::resolvent_norms(schur, pts);
    double m = 0.0;
    std::vector<RittSample> samples(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      samples[i] = {pts[i], norms[i], e.distance(pts[i])};
      m = std::max(m, samples[i].weighted());
    }
    cert.level_estimates.push_back(m);
    if (level == grid.refinements) {
      cert.samples = std::move(samples);
      cert.m_estimate = m;
      cert.approach_min = delta;
    }
  }

  std::vector<double> growth;
  for (std::size_t i = 1; i < cert.level_estimates.size(); ++i) {
    growth.push_back(cert.level_estimates[i] / cert.level_estimates[i - 1]);
  }
  const bool finite = std::isfinite(cert.m_estimate);
  if (cert.verdict != Verdict::Fail) {
    const bool stable = std::any_of(growth.begin(), growth.end(), [&](double g) { return g < 1.0 + grid.growth_pass; });
    const bool diverging =
        !finite || (!growth.empty() &&
                    std::all_of(growth.begin(), growth.end(), [&](double g) { return g >= grid.growth_fail; }));
    if (diverging) {
      cert.verdict = Verdict::Fail;
      cert.reason = "weighted resolvent grows under refinement";
    } else if (stable || growth.empty()) {
      cert.verdict = Verdict::Pass;
      cert.reason = "weighted resolvent stable under refinement";
    } else {
      cert.verdict = Verdict::Inconclusive;
      cert.reason = "weighted resolvent neither stable nor diverging";
    }
  }

  if (cert.verdict == Verdict::Pass) {
    const double rmin = minimal_r(e, eig);
    cert.r = std::clamp(rmin + 0.1 * (1.0 - rmin), 0.05, 1.0 - 1e-6);
  }
  return cert;
}

double verify_peripheral_bound(const CMatrix& t, const PointSetE& e, double r, int nodes,
                               const PeripheralBoundOptions& opts) {
  const ContourRegion reg = build_Er(e, r);
  for (Complex l : spectrum(t)) {
    if (e.distance(l) <= opts.peripheral_tol) continue;
    if (!reg.contains_closed(l, 1e-12)) throw Error(ErrorKind::SpectrumOutside, "spectrum not inside E_r or E");
  }
  std::vector<Complex> pts;
  for (const Piece& p : reg.pieces) {
    for (int i = 0; i < nodes; ++i) {
      const Complex z = piece_point(p, (i + 0.5) / nodes);
      if (e.distance(z) > opts.exclusion) pts.push_back(z);
    }
  }
  const auto norms = kernels::resolvent_norms(kernels::SchurForm::of(t), pts);
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) best = std::max(best, e.product_distance(pts[i]) * norms[i]);
  return best;
}

SectorEstimate check_sectorial(const CMatrix& t, Complex xi, double zero_tol) {
  const auto n = static_cast<int>(t.rows());
  const CMatrix b = identity(n) - std::conj(xi) * t;
  const double scale = std::max(1.0, opnorm(t));
  SectorEstimate est;
  for (Complex l : spectrum(b)) {
    if (std::abs(l) < zero_tol * scale) continue;
    const double a = std::arg(l);
    if (std::abs(a) > est.angle) {
      est.angle = std::abs(a);
      est.extremal_arg = a;
    }
  }
  est.sectorial = est.angle < 0.5 * kPi;
  return est;
}

}  // namespace polycalc
