#include "polycalc/dilation.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "polycalc/random.hpp"
#include "polycalc/squarefn.hpp"
#include "polycalc/taylor.hpp"

namespace polycalc {

namespace {

// Spectral norm of a tall matrix through its n x n Gram matrix.
double tall_norm(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  if (x.cols() > x.rows()) return tall_norm(x.adjoint());
  const CMatrix g = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// (I_outer (x) B) X for X with outer * B.cols() rows.
CMatrix expand(const CMatrix& x, const CMatrix& b, long long outer) {
  const auto in = b.cols();
  const auto out_rows = b.rows();
  CMatrix out(outer * out_rows, x.cols());
  for (long long o = 0; o < outer; ++o) out.middleRows(o * out_rows, out_rows).noalias() = b * x.middleRows(o * in, in);
  return out;
}

constexpr std::size_t kDenseCap = std::size_t{1} << 16;

}  // namespace

CMatrix PhaseShift::apply(const CMatrix& x, int power, long long outer, long long inner) const {
  const long long dim = this->dim();
  const long long n_pts = static_cast<long long>(phases.size());
  if (x.rows() != outer * dim * inner) throw Error(ErrorKind::InvalidInput, "PhaseShift::apply shape mismatch");
  CMatrix out(x.rows(), x.cols());
  std::vector<Complex> ph(phases.size());
  for (std::size_t j = 0; j < phases.size(); ++j) ph[j] = std::pow(phases[j], power);
  const long long shift = period > 0 ? ((2LL * power) % period + period) % period : 0;
  for (long long o = 0; o < outer; ++o) {
    const long long base = o * dim * inner;
    for (long long f = 0; f < n_pts; ++f) {
      out.middleRows(base + f * inner, inner) = ph[static_cast<std::size_t>(f)] * x.middleRows(base + f * inner, inner);
    }
    for (long long p = 0; p < period; ++p) {
      const long long src = (p + shift) % period;
      out.middleRows(base + (n_pts + p) * inner, inner) = x.middleRows(base + (n_pts + src) * inner, inner);
    }
  }
  return out;
}

CMatrix PhaseShift::dense() const {
  const int n = dim();
  CMatrix v = CMatrix::Zero(n, n);
  const int n_pts = static_cast<int>(phases.size());
  for (int j = 0; j < n_pts; ++j) v(j, j) = phases[static_cast<std::size_t>(j)];
  for (int p = 0; p < period; ++p) v(n_pts + p, n_pts + (p + 2) % period) = 1.0;
  return v;
}

CMatrix TruncatedDilation::apply_v(const CMatrix& x, int power) const { return v.apply(x, power, 1, inner_dim); }

CMatrix TruncatedDilation::compress(int n) const { return q * apply_v(j, n); }

CMatrix TruncatedDilation::j_block(int p) const { return j.middleRows(static_cast<Eigen::Index>(p) * inner_dim, inner_dim); }

namespace {

struct TailChoice {
  int k_max = 0;
  double estimate = 0.0;
};

// Pick K so that the Q-side truncation error, bounded by
// ||P~_range|| * sum|beta| * sum_{m >= 2K+2} ||T^m A^2 P_range||_F, stays below tol / 10.
TailChoice choose_truncation(const CMatrix& t, const CMatrix& b, double factor, const SpecificDilationOptions& opts) {
  std::vector<double> c;
  CMatrix m = b;
  const int m_cap = 2 * opts.k_cap + 2;
  const double target = opts.tol / 10.0;
  double q = 0.0;
  bool settled = false;
  for (int k = 0; k <= m_cap; ++k) {
    c.push_back(m.norm());
    if (c.back() == 0.0) {
      settled = true;
      q = 0.0;
      break;
    }
    if (k >= 16 && c.back() <= 1e-14 * c.front()) {
      // Rounding floor: what remains is noise on the peripheral part, which
      // powers of T do not damp.
      settled = true;
      q = 0.0;
      break;
    }
    if (k >= 16) {
      const double ratio = c[static_cast<std::size_t>(k)] / c[static_cast<std::size_t>(k - 8)];
      q = std::pow(ratio, 1.0 / 8.0);
      if (q < 1.0 && factor * c.back() / (1.0 - q) < 1e-3 * target) {
        settled = true;
        break;
      }
    }
    m = t * m;
  }
  const double remainder = settled && q < 1.0 ? c.back() * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  std::vector<double> suffix(c.size() + 1, 0.0);
  suffix[c.size()] = remainder;
  for (std::size_t i = c.size(); i-- > 0;) suffix[i] = suffix[i + 1] + c[i];
  auto tail_from = [&](int start) {
    return start >= static_cast<int>(c.size()) ? factor * remainder : factor * suffix[static_cast<std::size_t>(start)];
  };

  TailChoice out;
  if (opts.k_max >= 0) {
    out.k_max = opts.k_max;
    out.estimate = tail_from(2 * opts.k_max + 2);
    return out;
  }
  for (int k = 0; k <= opts.k_cap; ++k) {
    const double est = tail_from(2 * k + 2);
    if (est < target) {
      out.k_max = k;
      out.estimate = est;
      return out;
    }
  }
  throw Error(ErrorKind::NotConverged, "series tail does not reach tolerance within k_cap");
}

}  // namespace

TruncatedDilation specific_dilation(const CMatrix& t, const PointSetE& e, const SpecificDilationOptions& opts) {
  const auto n = static_cast<int>(t.rows());
  if (opts.verify_ritt) {
    const RittCertificate cert = classify_ritt(t, e, opts.grid);
    if (cert.verdict != Verdict::Pass) {
      throw Error(ErrorKind::InvalidInput, "T is not certified as a Ritt_E operator: " + cert.reason);
    }
  }
  require_power_bounded(t, opts.gate);

  DecompositionOptions dopts;
  dopts.with_commutant = false;
  dopts.gate = opts.gate;
  const ErgodicDecomposition dec = full_decomposition(t, e, dopts);
  const CMatrix ts = t.adjoint();
  std::vector<CMatrix> adj_proj;
  CMatrix adj_range = identity(n);
  for (Complex xi : e.points()) {
    adj_proj.push_back(eigen_projection(ts, std::conj(xi)));
    adj_range -= adj_proj.back();
  }

  const CMatrix a = sectorial_factor(t, e);
  const CMatrix as = a.adjoint();
  const double factor = opnorm(adj_range) * std::max(1.0, TaylorCoeffs{e, {}, beta_weights(e), {}}.beta_l1());
  const TailChoice tail = choose_truncation(t, a * a * dec.range_projection, factor, opts);

  TruncatedDilation dil;
  dil.inner_dim = n;
  dil.n_points = static_cast<int>(e.size());
  dil.k_max = tail.k_max;
  dil.n_max = opts.n_max;
  dil.tail_estimate = tail.estimate;
  dil.period = 2 * (opts.n_max + tail.k_max) + 4;
  dil.v.phases = e.points();
  dil.v.period = dil.period;

  const int blocks = dil.n_points + dil.period;
  dil.j = CMatrix::Zero(static_cast<Eigen::Index>(blocks) * n, n);
  dil.j_tilde = CMatrix::Zero(static_cast<Eigen::Index>(blocks) * n, n);
  for (int k = 0; k < dil.n_points; ++k) {
    dil.j.middleRows(k * n, n) = dec.projections[static_cast<std::size_t>(k)];
    dil.j_tilde.middleRows(k * n, n) = adj_proj[static_cast<std::size_t>(k)];
  }

  // T^k A x_{N+1} sits at positions 2k and 2k-1.
  const int j_last = 2 * (tail.k_max + opts.n_max) + 1;
  CMatrix pw = a * dec.range_projection;
  std::vector<CMatrix> j_powers{pw};
  for (int k = 1; k <= (j_last + 1) / 2; ++k) {
    pw = t * pw;
    j_powers.push_back(pw);
  }
  for (int p = 0; p <= j_last; ++p) {
    dil.j.middleRows((dil.n_points + p) * n, n) = j_powers[static_cast<std::size_t>((p + 1) / 2)];
  }

  // conj(a_p) T*^{floor(p/2)} A* y_{N+1} sits at position p.
  const int q_last = 2 * tail.k_max + 1;
  const std::vector<Complex> coeff = a_coeffs_recursive(e, q_last);
  CMatrix qp = as * adj_range;
  for (int p = 0; p <= q_last; ++p) {
    if (p > 0 && p % 2 == 0) qp = ts * qp;
    dil.j_tilde.middleRows((dil.n_points + p) * n, n) = std::conj(coeff[static_cast<std::size_t>(p)]) * qp;
  }
  dil.q = dil.j_tilde.adjoint();
  dil.certified_error = dilation_check(dil, t, opts.n_max);
  return dil;
}

double dilation_check(const TruncatedDilation& dil, const CMatrix& t, int n_max) {
  CMatrix tn = identity(static_cast<int>(t.rows()));
  CMatrix x = dil.j;
  double err = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      tn = t * tn;
      x = dil.apply_v(x, 1);
    }
    err = std::max(err, opnorm(tn - dil.q * x));
  }
  return err;
}

namespace {

// D_T and D_{T*} from one SVD, so that T D_T = D_{T*} T holds to rounding.
std::pair<CMatrix, CMatrix> defect_pair(const CMatrix& t) {
  Eigen::JacobiSVD<CMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sigma = std::min(s(i), 1.0);
    s(i) = std::sqrt((1.0 - sigma) * (1.0 + sigma));
  }
  const CMatrix root = s.cast<Complex>().asDiagonal();
  return {svd.matrixV() * root * svd.matrixV().adjoint(), svd.matrixU() * root * svd.matrixU().adjoint()};
}

}  // namespace

ContractionDilation schaffer_dilation(const CMatrix& t, int window) {
  if (window < 1) throw Error(ErrorKind::InvalidInput, "window must be at least 1");
  if (opnorm(t) > 1.0 + 1e-12) throw Error(ErrorKind::NotContraction, "||T|| exceeds 1");
  const auto n = static_cast<int>(t.rows());
  const int slots = 2 * window + 1;
  const auto [d, ds] = defect_pair(t);
  auto at = [&](int slot) { return (slot + window) * n; };

  ContractionDilation dil;
  dil.window = window;
  dil.valid_power = 2 * window;
  dil.v = CMatrix::Zero(slots * n, slots * n);
  for (int k = -window; k <= window; ++k) {
    if (k == 0) {
      dil.v.block(at(0), at(0), n, n) = t;
      dil.v.block(at(1), at(0), n, n) = d;
    } else if (k == -1) {
      dil.v.block(at(0), at(-1), n, n) = ds;
      dil.v.block(at(1), at(-1), n, n) = -t.adjoint();
    } else {
      const int dest = k == window ? -window : k + 1;
      dil.v.block(at(dest), at(k), n, n) = identity(n);
    }
  }
  dil.j0 = CMatrix::Zero(slots * n, n);
  dil.j0.middleRows(at(0), n) = identity(n);
  return dil;
}

double schaffer_check(const ContractionDilation& dil, const CMatrix& t, int budget) {
  CMatrix tn = identity(static_cast<int>(t.rows()));
  CMatrix x = dil.j0;
  double err = 0.0;
  for (int n = 0; n <= budget; ++n) {
    if (n > 0) {
      tn = t * tn;
      x = dil.v * x;
    }
    err = std::max(err, opnorm(tn - dil.j0.adjoint() * x));
  }
  return err;
}

AndoDilation ando_dilation(const CMatrix& t1, const CMatrix& t2, int budget, const AndoOptions& opts) {
  if (t1.rows() != t2.rows()) throw Error(ErrorKind::InvalidInput, "dimension mismatch");
  if (opnorm(t1) > 1.0 + 1e-12 || opnorm(t2) > 1.0 + 1e-12) throw Error(ErrorKind::NotContraction, "||T_i|| exceeds 1");
  if (commutator_norm(t1, t2) > opts.commute_tol) throw Error(ErrorKind::NotCommuting, "T1 and T2 do not commute");
  const auto n = static_cast<int>(t1.rows());
  AndoDilation dil;
  dil.budget = budget;

  if (opnorm(t1 * t2.adjoint() - t2.adjoint() * t1) <= opts.doubly_tol) {
    const int w = std::max(1, (budget + 1) / 2);
    const int slots = 2 * w + 1;
    const ContractionDilation w1 = schaffer_dilation(t1, w);
    const CMatrix t2_hat = kron(identity(slots), t2, kDenseCap);
    const ContractionDilation w2 = schaffer_dilation(t2_hat, w);
    dil.v1 = kron(identity(slots), w1.v, kDenseCap);
    dil.v2 = w2.v;
    dil.j0 = w2.j0 * w1.j0;
    dil.doubly_commuting = true;
    dil.unitary = true;
    return dil;
  }
  if (!opts.allow_general) throw Error(ErrorKind::NotCommuting, "pair is not doubly commuting");

  // Isometric route on H + H^{4B}: W_i inserts (D_i h_0, 0) and shifts the
  // tail by two positions; G fixes the order of the defect entries.
  const int blocks = budget / 2 + 1;
  const int dim = n * (1 + 4 * blocks);
  const CMatrix d1 = defect_pair(t1).first;
  const CMatrix d2 = defect_pair(t2).first;
  auto shift_op = [&](const CMatrix& t, const CMatrix& d) {
    CMatrix w = CMatrix::Zero(dim, dim);
    w.block(0, 0, n, n) = t;
    w.block(n, 0, n, n) = d;
    for (int k = 1; k + 2 <= 4 * blocks; ++k) w.block((k + 2) * n, k * n, n, n) = identity(n);
    return w;
  };
  CMatrix x = CMatrix::Zero(4 * n, n), y = CMatrix::Zero(4 * n, n);
  x.middleRows(0, n) = d1 * t2;
  x.middleRows(2 * n, n) = d2;
  y.middleRows(0, n) = d2 * t1;
  y.middleRows(2 * n, n) = d1;
  Eigen::JacobiSVD<CMatrix> svd(y * x.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix g = svd.matrixU() * svd.matrixV().adjoint();
  if ((g * x - y).norm() > 1e-8 * std::max(1.0, y.norm())) {
    throw Error(ErrorKind::NotConverged, "defect alignment unitary not found");
  }
  CMatrix g_hat = CMatrix::Identity(dim, dim);
  for (int b = 0; b < blocks; ++b) g_hat.block(n + 4 * b * n, n + 4 * b * n, 4 * n, 4 * n) = g;
  dil.v1 = g_hat * shift_op(t1, d1);
  dil.v2 = shift_op(t2, d2) * g_hat.adjoint();
  dil.j0 = CMatrix::Zero(dim, n);
  dil.j0.topRows(n) = identity(n);
  dil.unitary = false;
  return dil;
}

double ando_check(const AndoDilation& dil, const CMatrix& t1, const CMatrix& t2, int budget) {
  const auto n = static_cast<int>(t1.rows());
  std::vector<CMatrix> x2{dil.j0};
  std::vector<CMatrix> p2{identity(n)};
  for (int k = 1; k <= budget; ++k) {
    x2.push_back(dil.v2 * x2.back());
    p2.push_back(t2 * p2.back());
  }
  double err = 0.0;
  for (int b = 0; b <= budget; ++b) {
    CMatrix x = x2[static_cast<std::size_t>(b)];
    CMatrix p = p2[static_cast<std::size_t>(b)];
    for (int a = 0; a + b <= budget; ++a) {
      if (a > 0) {
        x = dil.v1 * x;
        p = t1 * p;
      }
      err = std::max(err, opnorm(p - dil.j0.adjoint() * x));
    }
  }
  return err;
}

TailBundle tail_from_ando(const AndoDilation& dil, const CMatrix& s) {
  const CMatrix s_inv = s.partialPivLu().inverse();
  return {dil.j0 * s_inv, s * dil.j0.adjoint(), {dil.v1, dil.v2}, dil.budget, dil.unitary};
}

TailBundle tail_from_schaffer(const ContractionDilation& dil, const CMatrix& s) {
  const CMatrix s_inv = s.partialPivLu().inverse();
  return {dil.j0 * s_inv, s * dil.j0.adjoint(), {dil.v}, dil.valid_power, true};
}

TailBundle tail_identity(int n) { return {identity(n), identity(n), {}, INT_MAX, true}; }

CMatrix JointDilation::apply_u(int k, const CMatrix& x, int power) const {
  if (k < m) {
    long long outer = 1, inner = factor_dims.back();
    for (int i = 0; i < k; ++i) outer *= factor_dims[static_cast<std::size_t>(i)];
    for (int i = k + 1; i < m; ++i) inner *= factor_dims[static_cast<std::size_t>(i)];
    return heads[static_cast<std::size_t>(k)].apply(x, power, outer, inner);
  }
  const CMatrix& u = tail_unitaries[static_cast<std::size_t>(k - m)];
  const long long l = u.rows();
  const long long outer = static_cast<long long>(x.rows()) / l;
  CMatrix out = x;
  for (int p = 0; p < power; ++p) {
    CMatrix next(out.rows(), out.cols());
    for (long long o = 0; o < outer; ++o) next.middleRows(o * l, l).noalias() = u * out.middleRows(o * l, l);
    out.swap(next);
  }
  return out;
}

double JointDilation::norm_j() const { return tall_norm(j); }

double JointDilation::norm_q() const { return tall_norm(q); }

JointDilation joint_dilation(const std::vector<CMatrix>& ts, int m, const std::vector<TruncatedDilation>& heads,
                             const TailBundle& tail, const JointOptions& opts) {
  const int d = static_cast<int>(ts.size());
  if (d < 1 || m < 0 || m > d) throw Error(ErrorKind::InvalidInput, "need 0 <= m <= d and d >= 1");
  if (static_cast<int>(heads.size()) != m) throw Error(ErrorKind::InvalidInput, "one specific dilation per head operator");
  if (static_cast<int>(tail.unitaries.size()) != d - m) throw Error(ErrorKind::InvalidInput, "tail must carry d - m unitaries");
  const auto n = static_cast<int>(ts[0].rows());
  double scale = 1.0;
  for (const CMatrix& t : ts) scale = std::max(scale, opnorm(t));
  for (int i = 0; i < d; ++i)
    for (int k = i + 1; k < d; ++k)
      if (commutator_norm(ts[static_cast<std::size_t>(i)], ts[static_cast<std::size_t>(k)]) > opts.commute_tol * scale) {
        throw Error(ErrorKind::NotCommuting, "operators do not commute");
      }

  JointDilation jd;
  jd.d = d;
  jd.m = m;
  jd.inner_dim = n;
  std::size_t total = 1;
  for (const TruncatedDilation& h : heads) {
    jd.factor_dims.push_back(h.v.dim());
    total *= static_cast<std::size_t>(h.v.dim());
  }
  jd.factor_dims.push_back(static_cast<int>(tail.j.rows()));
  total *= static_cast<std::size_t>(tail.j.rows());
  if (total > opts.dim_cap) {
    throw Error(ErrorKind::DimensionOverflow, "joint space of dimension " + std::to_string(total) + " exceeds cap");
  }
  jd.total_dim = total;

  for (int i = 0; i < m; ++i) {
    const TruncatedDilation& h = heads[static_cast<std::size_t>(i)];
    const int blocks = h.v.dim();
    for (const CMatrix& t : ts) {
      CMatrix diff(h.j.rows(), n);
      for (int p = 0; p < blocks; ++p) diff.middleRows(p * n, n) = h.j_block(p) * t - t * h.j_block(p);
      jd.intertwine_error = std::max(jd.intertwine_error, tall_norm(diff));
    }
  }
  if (jd.intertwine_error > opts.intertwine_tol) {
    throw Error(ErrorKind::IntertwineFailed, "J_i T_j differs from (I (x) T_j) J_i");
  }

  auto assemble = [&](bool adjoint_side) {
    CMatrix x = identity(n);
    long long outer = 1;
    for (int i = 0; i < m; ++i) {
      const TruncatedDilation& h = heads[static_cast<std::size_t>(i)];
      x = expand(x, adjoint_side ? h.j_tilde : h.j, outer);
      outer *= h.v.dim();
    }
    return expand(x, adjoint_side ? CMatrix(tail.q.adjoint()) : tail.j, outer);
  };
  jd.j = assemble(false);
  jd.q = assemble(true).adjoint();
  for (const TruncatedDilation& h : heads) {
    jd.heads.push_back(h.v);
    jd.coordinate_budget.push_back(h.n_max);
  }
  jd.tail_unitaries = tail.unitaries;
  jd.tail_budget = tail.budget;
  jd.tail_unitary = tail.unitary;
  return jd;
}

JointCheck joint_check(const JointDilation& dil, const std::vector<CMatrix>& ts, int total) {
  JointCheck out;
  const int d = dil.d;
  std::function<void(int, int, const CMatrix&, const CMatrix&)> rec = [&](int k, int remaining, const CMatrix& x,
                                                                          const CMatrix& p) {
    if (k == d) {
      out.max_error = std::max(out.max_error, opnorm(p - dil.q * x));
      ++out.tuples;
      return;
    }
    CMatrix xk = x, pk = p;
    for (int e = 0; e <= remaining; ++e) {
      if (e > 0) {
        xk = dil.apply_u(k, xk);
        pk = ts[static_cast<std::size_t>(k)] * pk;
      }
      rec(k + 1, remaining - e, xk, pk);
    }
  };
  rec(0, total, dil.j, identity(dil.inner_dim));
  return out;
}

UnitaryReport joint_unitary_report(const JointDilation& dil, int probes, std::uint64_t seed) {
  UnitaryReport rep;
  for (const PhaseShift& h : dil.heads)
    for (Complex ph : h.phases) rep.unitarity = std::max(rep.unitarity, std::abs(std::abs(ph) - 1.0));
  for (const CMatrix& u : dil.tail_unitaries) {
    rep.unitarity = std::max(rep.unitarity, opnorm(u.adjoint() * u - identity(static_cast<int>(u.rows()))));
  }
  Rng rng(seed);
  for (int p = 0; p < probes; ++p) {
    CMatrix x = rng.gaussian(static_cast<int>(dil.total_dim), 1);
    x /= x.norm();
    for (int i = 0; i < dil.d; ++i)
      for (int k = i + 1; k < dil.d; ++k) {
        const CMatrix a = dil.apply_u(i, dil.apply_u(k, x));
        const CMatrix b = dil.apply_u(k, dil.apply_u(i, x));
        rep.commutator = std::max(rep.commutator, (a - b).norm());
      }
  }
  return rep;
}

}  // namespace polycalc
