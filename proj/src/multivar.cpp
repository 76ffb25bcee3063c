#include "polycalc/multivar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "polycalc/ergodic.hpp"
#include "polycalc/kernels.hpp"
#include "polycalc/random.hpp"

namespace polycalc {

MultiPoly MultiPoly::constant(int d, Complex c) {
  MultiPoly p(d);
  p.add(Exponent(static_cast<std::size_t>(d), 0), c);
  return p;
}

MultiPoly MultiPoly::monomial(const Exponent& e, Complex c) {
  MultiPoly p(static_cast<int>(e.size()));
  p.add(e, c);
  return p;
}

MultiPoly MultiPoly::univariate(const std::vector<Complex>& coeffs) {
  MultiPoly p(1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) p.add({static_cast<int>(i)}, coeffs[i]);
  return p;
}

MultiPoly MultiPoly::random(int d, int degree, Rng& rng) {
  MultiPoly p(d);
  Exponent e(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == d) {
      p.add(e, rng.complex_normal());
      return;
    }
    for (int i = 0; i <= left; ++i) {
      e[static_cast<std::size_t>(k)] = i;
      rec(k + 1, left - i);
    }
    e[static_cast<std::size_t>(k)] = 0;
  };
  rec(0, degree);
  return p;
}

int MultiPoly::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
  return deg;
}

void MultiPoly::add(const Exponent& e, Complex c) {
  if (static_cast<int>(e.size()) != d_) throw Error(ErrorKind::InvalidInput, "exponent arity differs from d");
  if (std::any_of(e.begin(), e.end(), [](int k) { return k < 0; })) {
    throw Error(ErrorKind::InvalidInput, "negative exponent");
  }
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (c != Complex{0.0}) terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == Complex{0.0}) terms_.erase(it);
}

MultiPoly MultiPoly::scaled(Complex c) const {
  MultiPoly out(d_);
  for (const auto& [e, v] : terms_) out.add(e, c * v);
  return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& other) const {
  if (other.d_ != d_) throw Error(ErrorKind::InvalidInput, "arity mismatch");
  MultiPoly out(d_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      Exponent e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out.add(e, ca * cb);
    }
  }
  return out;
}

Complex MultiPoly::eval(const std::vector<Complex>& z) const {
  Complex acc = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex m = c;
    for (std::size_t i = 0; i < e.size(); ++i) m *= std::pow(z[i], e[i]);
    acc += m;
  }
  return acc;
}

std::vector<Complex> MultiPoly::coefficients_1d() const {
  if (d_ != 1) throw Error(ErrorKind::InvalidInput, "coefficients_1d needs d = 1");
  std::vector<Complex> c(static_cast<std::size_t>(degree()) + 1, 0.0);
  for (const auto& [e, v] : terms_) c[static_cast<std::size_t>(e[0])] = v;
  return c;
}

CMatrix eval_multipoly(const MultiPoly& phi, const std::vector<CMatrix>& ts, double commute_tol) {
  if (static_cast<int>(ts.size()) != phi.d()) throw Error(ErrorKind::InvalidInput, "tuple length differs from d");
  const auto n = static_cast<int>(ts.at(0).rows());
  double scale = 1.0;
  for (const CMatrix& t : ts) scale = std::max(scale, opnorm(t));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t k = i + 1; k < ts.size(); ++k)
      if (commutator_norm(ts[i], ts[k]) > commute_tol * scale) throw Error(ErrorKind::NotCommuting, "tuple does not commute");

  std::vector<int> max_exp(ts.size(), 0);
  for (const auto& [e, c] : phi.terms())
    for (std::size_t i = 0; i < e.size(); ++i) max_exp[i] = std::max(max_exp[i], e[i]);
  std::vector<std::vector<CMatrix>> powers(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    powers[i].push_back(identity(n));
    for (int k = 1; k <= max_exp[i]; ++k) powers[i].push_back(ts[i] * powers[i].back());
  }
  CMatrix acc = zero(n);
  for (const auto& [e, c] : phi.terms()) {
    CMatrix m = powers[0][static_cast<std::size_t>(e[0])];
    for (std::size_t i = 1; i < e.size(); ++i) m = m * powers[i][static_cast<std::size_t>(e[i])];
    acc += c * m;
  }
  return acc;
}

namespace {

// Terms flattened for fast repeated evaluation.
struct FlatPoly {
  int d;
  std::vector<Complex> coeff;
  std::vector<int> exps;  // coeff.size() * d

  explicit FlatPoly(const MultiPoly& p) : d(p.d()) {
    for (const auto& [e, c] : p.terms()) {
      coeff.push_back(c);
      exps.insert(exps.end(), e.begin(), e.end());
    }
  }

  Complex eval_angles(const std::vector<double>& theta) const {
    Complex acc = 0.0;
    for (std::size_t t = 0; t < coeff.size(); ++t) {
      double phase = 0.0;
      for (int i = 0; i < d; ++i) phase += exps[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(i)];
      acc += coeff[t] * std::polar(1.0, phase);
    }
    return acc;
  }
};

}  // namespace

SupNorm supnorm_on_torus(const MultiPoly& phi, int grid_per_dim) {
  const int d = phi.d();
  const int g = std::max(1, grid_per_dim);
  const FlatPoly flat(phi);
  const double h = 2.0 * kPi / g;
  std::vector<Complex> roots(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) roots[static_cast<std::size_t>(k)] = std::polar(1.0, h * k);

  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(g);
  auto at = [&](std::size_t idx) {
    std::vector<int> k(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      k[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(g));
      idx /= static_cast<std::size_t>(g);
    }
    Complex acc = 0.0;
    for (std::size_t t = 0; t < flat.coeff.size(); ++t) {
      long long s = 0;
      for (int i = 0; i < d; ++i) s += static_cast<long long>(flat.exps[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)]) * k[static_cast<std::size_t>(i)];
      acc += flat.coeff[t] * roots[static_cast<std::size_t>(s % g)];
    }
    return std::abs(acc);
  };
  std::vector<double> values(total);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) values[static_cast<std::size_t>(i)] = at(static_cast<std::size_t>(i));
  const double grid_best = *std::max_element(values.begin(), values.end());

  auto angles_of = [&](std::size_t idx) {
    std::vector<double> th(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      th[static_cast<std::size_t>(i)] = h * static_cast<double>(idx % static_cast<std::size_t>(g));
      idx /= static_cast<std::size_t>(g);
    }
    return th;
  };
  // Grid local maxima within 10% of the best value, strongest first.
  std::vector<std::size_t> candidates;
  std::size_t stride = 1;
  std::vector<std::size_t> strides(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] = stride;
    stride *= static_cast<std::size_t>(g);
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (values[idx] < 0.9 * grid_best) continue;
    bool peak = true;
    for (int i = 0; i < d && peak; ++i) {
      const std::size_t st = strides[static_cast<std::size_t>(i)];
      const std::size_t k = (idx / st) % static_cast<std::size_t>(g);
      const std::size_t up = idx - k * st + ((k + 1) % static_cast<std::size_t>(g)) * st;
      const std::size_t dn = idx - k * st + ((k + static_cast<std::size_t>(g) - 1) % static_cast<std::size_t>(g)) * st;
      peak = values[idx] >= values[up] && values[idx] >= values[dn];
    }
    if (peak) candidates.push_back(idx);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (candidates.size() > 16) candidates.resize(16);

  double value = grid_best;
  std::vector<double> best_theta = angles_of(candidates.empty() ? 0 : candidates.front());
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t cand : candidates) {
    std::vector<double> theta = angles_of(cand);
    double local = values[cand];
    for (int sweep = 0; sweep < 4; ++sweep) {
      for (int i = 0; i < d; ++i) {
        auto f = [&](double x) {
          std::vector<double> th = theta;
          th[static_cast<std::size_t>(i)] = x;
          return std::abs(flat.eval_angles(th));
        };
        double a = theta[static_cast<std::size_t>(i)] - h, b = theta[static_cast<std::size_t>(i)] + h;
        double c = b - invphi * (b - a), e = a + invphi * (b - a);
        double fc = f(c), fe = f(e);
        for (int it = 0; it < 40; ++it) {
          if (fc > fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - invphi * (b - a);
            fc = f(c);
          } else {
            a = c;
            c = e;
            fc = fe;
            e = a + invphi * (b - a);
            fe = f(e);
          }
        }
        const double x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx > local) {
          local = fx;
          theta[static_cast<std::size_t>(i)] = x;
        }
      }
    }
    if (local > value) {
      value = local;
      best_theta = theta;
    }
  }
  SupNorm out;
  out.value = value;
  out.spacing = h;
  for (double t : best_theta) out.argmax.push_back(std::polar(1.0, t));
  return out;
}

SupNorm supnorm_on_region_power(const MultiPoly& phi, const ContourRegion& region, int samples_per_piece) {
  const int d = phi.d();
  std::vector<Complex> pts = region.sample_boundary(samples_per_piece);
  const std::vector<Complex> verts = region.vertices();
  pts.insert(pts.end(), verts.begin(), verts.end());
  const std::size_t m = pts.size();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= m;

  const FlatPoly flat(phi);
  int max_exp = 0;
  for (int e : flat.exps) max_exp = std::max(max_exp, e);
  // powers[j * (max_exp + 1) + k] = pts[j]^k
  std::vector<Complex> powers(m * static_cast<std::size_t>(max_exp + 1));
  for (std::size_t j = 0; j < m; ++j) {
    Complex z = 1.0;
    for (int k = 0; k <= max_exp; ++k) {
      powers[j * static_cast<std::size_t>(max_exp + 1) + static_cast<std::size_t>(k)] = z;
      z *= pts[j];
    }
  }
  auto at = [&](std::size_t idx) {
    std::vector<std::size_t> k(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      k[static_cast<std::size_t>(i)] = idx % m;
      idx /= m;
    }
    Complex acc = 0.0;
    for (std::size_t t = 0; t < flat.coeff.size(); ++t) {
      Complex term = flat.coeff[t];
      for (int i = 0; i < d; ++i) {
        const int e = flat.exps[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
        term *= powers[k[static_cast<std::size_t>(i)] * static_cast<std::size_t>(max_exp + 1) + static_cast<std::size_t>(e)];
      }
      acc += term;
    }
    return std::abs(acc);
  };
  const kernels::ArgMax best = kernels::parallel_argmax(total, at);
  SupNorm out;
  out.value = best.value;
  out.spacing = static_cast<double>(samples_per_piece);
  std::size_t idx = best.index;
  out.argmax.resize(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    out.argmax[static_cast<std::size_t>(i)] = pts[idx % m];
    idx /= m;
  }
  return out;
}

SupNorm supnorm(const MultiPoly& phi, const SupDomain& domain) {
  if (const auto* t = std::get_if<TorusDomain>(&domain)) return supnorm_on_torus(phi, t->grid_per_dim);
  const auto& r = std::get<RegionDomain>(domain);
  return supnorm_on_region_power(phi, r.region, r.samples_per_piece);
}

double vn_ratio(const std::vector<CMatrix>& ts, const MultiPoly& phi, const SupDomain& domain) {
  const double sup = supnorm(phi, domain).value;
  if (!(sup >= 1e-14)) throw Error(ErrorKind::DegeneratePoly, "polynomial sup-norm below 1e-14");
  return opnorm(eval_multipoly(phi, ts)) / sup;
}

namespace {

CMatrix hermitian_part(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

// Projection onto {X : X >= floor I} for Hermitian X.
CMatrix clip_below(const CMatrix& x, double floor) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double condition_number(const CMatrix& p) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(p), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo > 0.0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

std::optional<CMatrix> spectral_candidate(const std::vector<CMatrix>& ts, double cond_cap) {
  const auto n = static_cast<int>(ts.at(0).rows());
  // Per operator: projections at each peripheral eigenvalue, then the rest.
  std::vector<std::vector<CMatrix>> parts(ts.size());
  std::vector<std::size_t> n_peripheral(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<Complex> xis;
    for (Complex l : spectrum(ts[k])) {
      if (std::abs(l) > 1.0 + 1e-9) return std::nullopt;
      if (std::abs(l) < 1.0 - 1e-9) continue;
      const Complex xi = l / std::abs(l);
      if (std::none_of(xis.begin(), xis.end(), [&](Complex y) { return std::abs(y - xi) < 1e-6; })) xis.push_back(xi);
    }
    CMatrix rest = identity(n);
    for (Complex xi : xis) {
      try {
        parts[k].push_back(eigen_projection(ts[k], xi));
      } catch (const Error&) {
        return std::nullopt;
      }
      rest -= parts[k].back();
    }
    n_peripheral[k] = parts[k].size();
    parts[k].push_back(rest);
  }

  CMatrix p = zero(n);
  std::vector<std::size_t> choice(ts.size(), 0);
  for (;;) {
    CMatrix pi = identity(n);
    for (std::size_t k = 0; k < ts.size(); ++k) pi = pi * parts[k][choice[k]];
    if (pi.norm() > 1e-10) {
      CMatrix y = pi.adjoint() * pi;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        if (choice[k] < n_peripheral[k]) continue;
        // pi carries the interior factor of T_k, so T_k may be replaced by
        // its interior part, whose powers decay.
        CMatrix a = ts[k] * parts[k].back();
        for (int it = 0; it < 64; ++it) {
          const CMatrix step = a.adjoint() * y * a;
          y += step;
          if (!all_finite(y) || y.norm() > cond_cap) return std::nullopt;
          if (step.norm() <= 1e-16 * y.norm()) break;
          a = a * a;
        }
      }
      p += y;
    }
    std::size_t k = 0;
    while (k < ts.size() && ++choice[k] == parts[k].size()) choice[k++] = 0;
    if (k == ts.size()) break;
  }
  p = hermitian_part(p);
  if (!(condition_number(p) <= cond_cap)) return std::nullopt;
  return p;
}

std::vector<double> similarity_margins(const CMatrix& p, const std::vector<CMatrix>& ts) {
  const CMatrix s = hermitian_sqrt(p);
  const CMatrix s_inv = s.partialPivLu().inverse();
  std::vector<double> out;
  for (const CMatrix& t : ts) out.push_back(opnorm(s * t * s_inv));
  return out;
}

SimilarityResult try_joint_similarity(const std::vector<CMatrix>& ts, const SimilarityOptions& opts) {
  if (ts.empty()) throw Error(ErrorKind::InvalidInput, "empty tuple");
  const auto n = static_cast<int>(ts[0].rows());
  const double eps = opts.epsilon;
  SimilarityResult res;
  auto accept = [&](const CMatrix& p, int iter) {
    const std::vector<double> margins = similarity_margins(p, ts);
    if (*std::max_element(margins.begin(), margins.end()) > 1.0 + opts.margin_tol) return false;
    res.p = hermitian_part(p);
    res.s = hermitian_sqrt(res.p);
    res.margins = margins;
    res.iterations = iter;
    res.feasible = true;
    res.condition = condition_number(res.p);
    return true;
  };

  if (accept(eps * identity(n), 0)) return res;

  auto normalized = [&](CMatrix q) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(q), Eigen::EigenvaluesOnly);
    return CMatrix(q * (eps / es.eigenvalues().minCoeff()));
  };
  std::optional<CMatrix> spectral;
  if (opts.spectral_start) {
    spectral = spectral_candidate(ts, opts.cond_cap);
    if (spectral && accept(normalized(*spectral), 0)) return res;
  }

  // Word-length average of T_w* T_w as the starting point.
  CMatrix level = identity(n);
  CMatrix sum = level;
  double count = 1.0, words = 1.0;
  for (int l = 1; l <= opts.word_length; ++l) {
    CMatrix next = zero(n);
    for (const CMatrix& t : ts) next += t.adjoint() * level * t;
    level = next;
    sum += level;
    words *= static_cast<double>(ts.size());
    count += words;
  }
  CMatrix p = normalized(hermitian_part(sum / count));
  if (accept(p, 0)) return res;
  if (spectral) {
    const std::vector<double> a = similarity_margins(p, ts);
    const std::vector<double> b = similarity_margins(normalized(*spectral), ts);
    if (*std::max_element(b.begin(), b.end()) < *std::max_element(a.begin(), a.end())) p = normalized(*spectral);
  }

  // Affine step: minimize ||P - P^||^2 + sum_k ||L_k(P) - Z^_k||^2 with
  // L_k(P) = P - T_k* P T_k, solved once in vec form.
  const int nn = n * n;
  CMatrix normal = CMatrix::Identity(nn, nn);
  for (const CMatrix& t : ts) {
    const CMatrix lk = CMatrix::Identity(nn, nn) - kron(t.transpose(), t.adjoint(), static_cast<std::size_t>(nn));
    normal += lk.adjoint() * lk;
  }
  const Eigen::PartialPivLU<CMatrix> lu(normal);

  std::vector<CMatrix> z(ts.size());
  double best_margin = std::numeric_limits<double>::infinity();
  int since_improved = 0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const CMatrix p_hat = clip_below(p, eps);
    CMatrix rhs = p_hat;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const CMatrix lp = p - ts[k].adjoint() * p * ts[k];
      const CMatrix z_hat = clip_below(iter == 1 ? lp : z[k], 0.0);
      rhs += z_hat - ts[k] * z_hat * ts[k].adjoint();
    }
    const CVector sol = lu.solve(Eigen::Map<const CVector>(rhs.data(), nn));
    p = hermitian_part(Eigen::Map<const CMatrix>(sol.data(), n, n));
    for (std::size_t k = 0; k < ts.size(); ++k) z[k] = p - ts[k].adjoint() * p * ts[k];

    Eigen::SelfAdjointEigenSolver<CMatrix> es(p, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    res.condition = lo > 0.0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
    if (!(res.condition <= opts.cond_cap)) {
      res.iterations = iter;
      return res;
    }
    if (accept(p, iter)) return res;
    const std::vector<double> m = similarity_margins(p, ts);
    const double worst = *std::max_element(m.begin(), m.end());
    if (worst < best_margin * (1.0 - 1e-12)) {
      best_margin = worst;
      since_improved = 0;
    } else if (++since_improved > 500) {
      res.iterations = iter;
      break;
    }
    res.iterations = iter;
  }
  res.p = p;
  res.margins = similarity_margins(p, ts);
  return res;
}

SimilarityResult joint_similarity(const std::vector<CMatrix>& ts, const SimilarityOptions& opts) {
  SimilarityResult res = try_joint_similarity(ts, opts);
  if (!res.feasible) {
    double worst = 0.0;
    for (double m : res.margins) worst = std::max(worst, m);
    throw Error(ErrorKind::Infeasible, "no contraction similarity found; best margin " + std::to_string(worst));
  }
  return res;
}

}  // namespace polycalc
