#include "polycalc/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace polycalc {

namespace {

// Spectral norm through the Gram matrix; adequate for the power gate, where
// only a cap of order 100 is tested.
double gram_norm(const CMatrix& m) {
  const CMatrix g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

double power_bound(const CMatrix& t, const PowerBoundOptions& opts) {
  const auto n = static_cast<int>(t.rows());
  CMatrix p = identity(n);
  double best = n > 0 ? 1.0 : 0.0;
  for (int k = 1; k <= opts.horizon; ++k) {
    p = t * p;
    const double fro = p.norm();
    if (fro <= best) continue;
    best = std::max(best, gram_norm(p));
    if (best > opts.cap || !std::isfinite(best)) break;
  }
  return best;
}

void require_power_bounded(const CMatrix& t, const PowerBoundOptions& opts) {
  const double b = power_bound(t, opts);
  if (!(b <= opts.cap)) {
    throw Error(ErrorKind::NotPowerBounded, "sup ||T^n|| exceeds " + std::to_string(opts.cap));
  }
}

CesaroResult try_cesaro_projection(const CMatrix& t, Complex xi, const CesaroOptions& opts) {
  require_power_bounded(t, opts.gate);
  const auto n = static_cast<int>(t.rows());
  const CMatrix w = std::conj(xi) * t;
  CMatrix wn = w;           // W^len
  CMatrix sum = identity(n);  // sum_{k < len} W^k
  long long len = 1;
  CMatrix prev_avg = sum;
  CMatrix prev_ext;
  bool have_ext = false;
  CesaroResult res;
  while (len < opts.n_max) {
    sum = sum + wn * sum;
    wn = wn * wn;
    len *= 2;
    const CMatrix avg = sum / static_cast<double>(len);
    const CMatrix ext = 2.0 * avg - prev_avg;
    prev_avg = avg;
    if (have_ext) {
      res.achieved = opnorm(ext - prev_ext);
      res.projection = ext;
      res.n_used = len;
      if (res.achieved < opts.tol) {
        res.converged = true;
        return res;
      }
    }
    prev_ext = ext;
    have_ext = true;
  }
  if (!have_ext) {
    res.projection = prev_avg;
    res.n_used = len;
  }
  return res;
}

CesaroResult cesaro_projection(const CMatrix& t, Complex xi, const CesaroOptions& opts) {
  CesaroResult res = try_cesaro_projection(t, xi, opts);
  if (!res.converged) {
    throw Error(ErrorKind::NotConverged,
                "Cesaro averages changed by " + std::to_string(res.achieved) + " at n = " + std::to_string(res.n_used));
  }
  return res;
}

CMatrix eigen_projection(const CMatrix& t, Complex xi, const RieszOptions& opts) {
  const auto n = static_cast<int>(t.rows());
  const double scale = std::max(1.0, opnorm(t));
  CMatrix shifted = t;
  shifted.diagonal().array() -= xi;
  const CMatrix right = null_space(shifted, opts.null_tol * scale);
  if (right.cols() == 0) return zero(n);
  const CMatrix left = null_space(shifted.adjoint(), opts.null_tol * scale);
  if (left.cols() != right.cols()) throw Error(ErrorKind::NotSemisimple, "left and right eigenspaces differ in dimension");

  int cluster = 0;
  for (Complex l : spectrum(t))
    if (std::abs(l - xi) <= opts.cluster_tol * scale) ++cluster;
  if (cluster > right.cols()) throw Error(ErrorKind::NotSemisimple, "algebraic multiplicity exceeds geometric");

  const CMatrix pairing = left.adjoint() * right;
  Eigen::JacobiSVD<CMatrix> svd(pairing);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < opts.semisimple_tol) throw Error(ErrorKind::NotSemisimple, "eigenvalue has a Jordan block");
  return right * pairing.partialPivLu().solve(left.adjoint());
}

std::vector<CMatrix> commutant_basis(const CMatrix& t, double rel_tol) {
  const auto n = t.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  // vec(TX - XT) = (I (x) T - T^T (x) I) vec(X), column-major vec.
  const CMatrix sylvester = kron(id, t, static_cast<std::size_t>(n * n)) -
                            kron(t.transpose(), id, static_cast<std::size_t>(n * n));
  const double thr = rel_tol * std::max(1.0, opnorm(t));
  Eigen::BDCSVD<CMatrix> svd(sylvester, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > thr) ++rank;
  std::vector<CMatrix> out;
  for (Eigen::Index k = rank; k < n * n; ++k) {
    const CVector v = svd.matrixV().col(k);
    out.emplace_back(Eigen::Map<const CMatrix>(v.data(), n, n));
  }
  return out;
}

ErgodicDecomposition full_decomposition(const CMatrix& t, const PointSetE& e, const DecompositionOptions& opts) {
  ErgodicDecomposition dec;
  dec.e = e;
  dec.route = opts.route;
  dec.power_bound = power_bound(t, opts.gate);
  if (!(dec.power_bound <= opts.gate.cap)) throw Error(ErrorKind::NotPowerBounded, "power-bound gate failed");
  const auto n = static_cast<int>(t.rows());
  CMatrix rest = identity(n);
  for (Complex xi : e.points()) {
    CMatrix p;
    if (opts.route == ProjectionRoute::Riesz) {
      p = eigen_projection(t, xi, opts.riesz);
    } else {
      CesaroResult c = cesaro_projection(t, xi, opts.cesaro);
      p = std::move(c.projection);
      dec.cesaro_lengths.push_back(c.n_used);
    }
    rest -= p;
    dec.projections.push_back(std::move(p));
  }
  dec.range_projection = rest;
  if (opts.with_commutant) dec.commutant = commutant_basis(t);
  return dec;
}

std::vector<CVector> decompose_vector(const ErgodicDecomposition& dec, const CVector& x) {
  std::vector<CVector> out;
  for (const CMatrix& p : dec.projections) out.push_back(p * x);
  out.push_back(dec.range_projection * x);
  return out;
}

ProjectionAlgebraReport check_projection_algebra(const CMatrix& t, const ErgodicDecomposition& dec) {
  ProjectionAlgebraReport rep;
  std::vector<const CMatrix*> all;
  for (const CMatrix& p : dec.projections) all.push_back(&p);
  all.push_back(&dec.range_projection);
  const auto n = static_cast<int>(t.rows());
  CMatrix sum = zero(n);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const CMatrix& p = *all[i];
    sum += p;
    rep.idempotence = std::max(rep.idempotence, opnorm(p * p - p));
    for (std::size_t j = 0; j < all.size(); ++j)
      if (i != j) rep.annihilation = std::max(rep.annihilation, opnorm(p * *all[j]));
    for (const CMatrix& x : dec.commutant) rep.bicommutant = std::max(rep.bicommutant, opnorm(p * x - x * p));
  }
  rep.partition = opnorm(sum - identity(n));
  for (std::size_t j = 0; j < dec.projections.size(); ++j) {
    const CMatrix& p = dec.projections[j];
    rep.invariance = std::max(rep.invariance, opnorm(t * p - dec.e[j] * p));
  }
  return rep;
}

}  // namespace polycalc
