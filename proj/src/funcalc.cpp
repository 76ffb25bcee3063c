#include "polycalc/funcalc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/distributions/students_t.hpp>

#include "polycalc/ergodic.hpp"
#include "polycalc/kernels.hpp"
#include "polycalc/random.hpp"

namespace polycalc {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "Gauss-Legendre order must be positive");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

namespace {

void split_panels(const Piece& piece, double t0, double t1, const std::vector<Complex>& avoid, int depth,
                  std::vector<std::pair<double, double>>& out) {
  const Piece slice = piece_slice(piece, t0, t1);
  double dist = std::numeric_limits<double>::infinity();
  for (Complex z : avoid) dist = std::min(dist, piece_distance(slice, z));
  if (depth < 60 && piece_length(slice) > 2.0 * dist) {
    const double mid = 0.5 * (t0 + t1);
    split_panels(piece, t0, mid, avoid, depth + 1, out);
    split_panels(piece, mid, t1, avoid, depth + 1, out);
    return;
  }
  out.emplace_back(t0, t1);
}

std::vector<Complex> check_inside(const CMatrix& t, const ContourRegion& region) {
  std::vector<Complex> spec = spectrum(t);
  for (Complex z : spec) {
    if (!region.contains(z) || region.boundary_distance(z) <= kContourClearance) {
      throw Error(ErrorKind::SpectrumOnContour, "eigenvalue within 1e-6 of the contour or outside the region");
    }
  }
  return spec;
}

// (1/2 pi i) sum_i w_i z_i^k R(z_i, T) for k = 0..max_power.
std::vector<CMatrix> contour_moments(const CMatrix& t, const ContourQuadrature& quad, int max_power) {
  const std::vector<CMatrix> rs = kernels::resolvents(t, quad.nodes);
  std::vector<CMatrix> moments;
  const Complex scale = 1.0 / (2.0 * kPi * kI);
  std::vector<Complex> zk(quad.weights.size());
  for (std::size_t i = 0; i < zk.size(); ++i) zk[i] = quad.weights[i] * scale;
  for (int k = 0; k <= max_power; ++k) {
    CMatrix acc = zero(static_cast<int>(t.rows()));
    for (std::size_t i = 0; i < rs.size(); ++i) acc += zk[i] * rs[i];
    moments.push_back(std::move(acc));
    for (std::size_t i = 0; i < zk.size(); ++i) zk[i] *= quad.nodes[i];
  }
  return moments;
}

}  // namespace

ContourQuadrature ContourQuadrature::build(const ContourRegion& region, int nodes_per_piece,
                                           const std::vector<Complex>& avoid) {
  ContourQuadrature q;
  q.region = region;
  q.nodes_per_piece = nodes_per_piece;
  const GaussRule rule = gauss_legendre(nodes_per_piece);
  const double orient = region.positive ? 1.0 : -1.0;
  for (const Piece& piece : region.pieces) {
    std::vector<std::pair<double, double>> panels;
    split_panels(piece, 0.0, 1.0, avoid, 0, panels);
    for (const auto& [t0, t1] : panels) {
      const double len = t1 - t0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = t0 + len * rule.nodes[i];
        q.nodes.push_back(piece_point(piece, t));
        q.weights.push_back(orient * len * rule.weights[i] * piece_derivative(piece, t));
      }
      ++q.panels;
    }
  }
  return q;
}

ContourQuadrature ContourQuadrature::refined(const std::vector<Complex>& avoid) const {
  return build(region, nodes_per_piece, avoid);
}

Complex winding(const ContourQuadrature& quad, Complex z0) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) acc += quad.weights[i] / (quad.nodes[i] - z0);
  return acc / (2.0 * kPi * kI);
}

CMatrix contour_eval_1d(const MultiPoly& phi, const CMatrix& t, const ContourQuadrature& quad) {
  if (phi.d() != 1) throw Error(ErrorKind::InvalidInput, "contour_eval_1d needs a univariate polynomial");
  const std::vector<Complex> spec = check_inside(t, quad.region);
  const ContourQuadrature q = quad.refined(spec);
  const std::vector<Complex> coeffs = phi.coefficients_1d();
  std::vector<Complex> w(q.nodes.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = q.weights[i] * horner(coeffs, q.nodes[i]) / (2.0 * kPi * kI);
  return kernels::weighted_resolvent_sum(t, q.nodes, w);
}

CMatrix polygonal_calculus(const MultiPoly& phi, const CMatrix& t, const PointSetE& e, double r,
                           int nodes_per_piece) {
  if (phi.d() != 1) throw Error(ErrorKind::InvalidInput, "polygonal_calculus needs a univariate polynomial");
  DecompositionOptions dopts;
  dopts.with_commutant = false;
  const ErgodicDecomposition dec = full_decomposition(t, e, dopts);
  const auto n = static_cast<int>(t.rows());
  CMatrix out = zero(n);
  for (std::size_t j = 0; j < e.size(); ++j) out += phi.eval({e[j]}) * dec.projections[j];

  const CMatrix qr = range_basis(dec.range_projection, 1e-8);
  if (qr.cols() == 0) return out;
  const CMatrix tc = qr.adjoint() * t * qr;
  const ContourQuadrature quad = ContourQuadrature::build(build_Er(e, r), nodes_per_piece);
  out += qr * contour_eval_1d(phi, tc, quad) * qr.adjoint() * dec.range_projection;
  return out;
}

CMatrix contour_eval_multi(const MultiPoly& phi, const std::vector<CMatrix>& ts, const ContourQuadrature& quad,
                           const MultiContourOptions& opts) {
  const int d = phi.d();
  if (static_cast<int>(ts.size()) != d) throw Error(ErrorKind::InvalidInput, "tuple length differs from d");
  if (d > 3) throw Error(ErrorKind::BudgetExceeded, "multivariate contour evaluation supports d <= 3");
  double scale = 1.0;
  for (const CMatrix& t : ts) scale = std::max(scale, opnorm(t));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t k = i + 1; k < ts.size(); ++k)
      if (commutator_norm(ts[i], ts[k]) > opts.commute_tol * scale) throw Error(ErrorKind::NotCommuting, "tuple does not commute");

  std::vector<int> max_exp(static_cast<std::size_t>(d), 0);
  for (const auto& [ex, c] : phi.terms())
    for (int i = 0; i < d; ++i) max_exp[static_cast<std::size_t>(i)] = std::max(max_exp[static_cast<std::size_t>(i)], ex[static_cast<std::size_t>(i)]);

  // The integrand of every monomial factorizes over coordinates, so the
  // tensor-product rule reduces to products of one-dimensional moments.
  std::vector<std::vector<CMatrix>> moments;
  double tensor_nodes = 1.0;
  for (int k = 0; k < d; ++k) {
    const std::vector<Complex> spec = check_inside(ts[static_cast<std::size_t>(k)], quad.region);
    const ContourQuadrature q = quad.refined(spec);
    tensor_nodes *= static_cast<double>(q.nodes.size());
    if (tensor_nodes > opts.node_budget) throw Error(ErrorKind::BudgetExceeded, "tensor-product node count over budget");
    moments.push_back(contour_moments(ts[static_cast<std::size_t>(k)], q, max_exp[static_cast<std::size_t>(k)]));
  }
  const auto n = static_cast<int>(ts.at(0).rows());
  CMatrix out = zero(n);
  for (const auto& [ex, c] : phi.terms()) {
    CMatrix m = moments[0][static_cast<std::size_t>(ex[0])];
    for (int k = 1; k < d; ++k) m = m * moments[static_cast<std::size_t>(k)][static_cast<std::size_t>(ex[static_cast<std::size_t>(k)])];
    out += c * m;
  }
  return out;
}

BoundedRatioCertificate bounded_ratio_certificate(const std::vector<CMatrix>& ts, const PointSetE& e, double r,
                                              std::uint64_t seed, const CertificateOptions& opts) {
  if (ts.empty()) throw Error(ErrorKind::InvalidInput, "empty tuple");
  if (opts.deg_max < 2) throw Error(ErrorKind::InvalidInput, "deg_max must be at least 2 for a slope test");
  BoundedRatioCertificate cert;
  for (const CMatrix& t : ts) {
    if (opts.check_ritt) {
      const RittCertificate rc = classify_ritt(t, e);
      if (rc.verdict != Verdict::Pass) throw Error(ErrorKind::InvalidInput, "operator does not pass classify_ritt: " + rc.reason);
    }
    cert.peripheral_bounds.push_back(verify_peripheral_bound(t, e, r, opts.peripheral_nodes));
  }
  if (opts.check_similarity) cert.similarity_feasible = try_joint_similarity(ts).feasible;

  cert.polygon = enclosing_polygon(e, r);
  const int d = static_cast<int>(ts.size());
  std::vector<double> xs, ys;
  std::uint64_t stream = 0;
  for (int deg = 1; deg <= opts.deg_max; ++deg) {
    DegreeRatios row;
    row.degree = deg;
    double sum_log = 0.0;
    for (int s = 0; s < opts.samples_per_degree; ++s) {
      Rng rng(derive_seed(seed, stream++));
      const MultiPoly phi = MultiPoly::random(d, deg, rng);
      const double sup = supnorm_on_region_power(phi, cert.polygon, opts.samples_per_piece).value;
      if (!(sup >= 1e-14)) throw Error(ErrorKind::DegeneratePoly, "polynomial sup-norm below 1e-14");
      const double ratio = opnorm(eval_multipoly(phi, ts)) / sup;
      row.max_ratio = std::max(row.max_ratio, ratio);
      sum_log += std::log(ratio);
      xs.push_back(deg);
      ys.push_back(std::log(ratio));
    }
    row.mean_log_ratio = sum_log / opts.samples_per_degree;
    cert.max_ratio = std::max(cert.max_ratio, row.max_ratio);
    cert.per_degree.push_back(row);
  }

  const auto m = static_cast<double>(xs.size());
  cert.samples = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  cert.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - my - cert.slope * (xs[i] - mx);
    rss += res * res;
  }
  cert.slope_stderr = std::sqrt(rss / (m - 2.0) / sxx);
  if (cert.slope_stderr > 0.0) {
    const boost::math::students_t dist(m - 2.0);
    cert.p_value = boost::math::cdf(boost::math::complement(dist, cert.slope / cert.slope_stderr));
  } else {
    cert.p_value = cert.slope > 0.0 ? 0.0 : 1.0;
  }
  cert.passed = cert.p_value >= opts.significance && (!opts.check_similarity || cert.similarity_feasible);
  return cert;
}

}  // namespace polycalc
