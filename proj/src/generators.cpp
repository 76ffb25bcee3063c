#include "polycalc/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polycalc/random.hpp"

namespace polycalc {

CMatrix random_similarity(int dim, double cond_cap, Rng& rng) {
  if (!(cond_cap >= 1.0)) throw Error(ErrorKind::InvalidInput, "cond_cap must be at least 1");
  const CMatrix u = rng.unitary(dim);
  const CMatrix w = rng.unitary(dim);
  Eigen::VectorXd sigma(dim);
  for (int i = 0; i < dim; ++i) sigma(i) = std::pow(cond_cap, rng.uniform());
  return u * sigma.cast<Complex>().asDiagonal() * w;
}

Complex random_interior_point(const PointSetE& e, double r, Rng& rng) {
  const ContourRegion region = build_Er(e, kInteriorModulusCap * r);
  for (;;) {
    const Complex z = std::polar(std::sqrt(rng.uniform()), rng.uniform(0.0, 2.0 * kPi));
    if (std::abs(z) <= kInteriorModulusCap && region.contains_closed(z, 0.0)) return z;
  }
}

namespace {

std::vector<Complex> ritt_diagonal(const PointSetE& e, double r, int dim, int peripheral_count, Rng& rng) {
  std::vector<std::size_t> order(e.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<Complex> lambda;
  for (int i = 0; i < peripheral_count; ++i) lambda.push_back(e[order[static_cast<std::size_t>(i)]]);
  while (static_cast<int>(lambda.size()) < dim) lambda.push_back(random_interior_point(e, r, rng));
  std::shuffle(lambda.begin(), lambda.end(), rng.engine());
  return lambda;
}

CMatrix conjugate_diagonal(const CMatrix& s, const std::vector<Complex>& lambda) {
  const Eigen::Map<const CVector> l(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
  return s * l.asDiagonal() * s.partialPivLu().inverse();
}

void check_counts(const PointSetE& e, int dim, int peripheral_count) {
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "dim must be positive");
  if (peripheral_count < 0 || peripheral_count > std::min<int>(dim, static_cast<int>(e.size()))) {
    throw Error(ErrorKind::InvalidInput, "peripheral_count must lie in [0, min(dim, N)]");
  }
}

}  // namespace

CMatrix gen_ritt_matrix(const PointSetE& e, double r, int dim, int peripheral_count, double cond_cap,
                        std::uint64_t seed, const RittGenOptions& opts) {
  check_counts(e, dim, peripheral_count);
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    const std::vector<Complex> lambda = ritt_diagonal(e, r, dim, peripheral_count, rng);
    const CMatrix s = cond_cap == 1.0 ? rng.unitary(dim) : random_similarity(dim, cond_cap, rng);
    const CMatrix t = conjugate_diagonal(s, lambda);
    if (!opts.verify || classify_ritt(t, e).verdict == Verdict::Pass) return t;
  }
  throw Error(ErrorKind::NotConverged, "no generated matrix passed classify_ritt");
}

std::vector<CMatrix> gen_commuting_tuple(int d, int dim, const TupleSpec& spec, std::uint64_t seed) {
  if (d < 1 || dim < 1) throw Error(ErrorKind::InvalidInput, "d and dim must be positive");
  Rng rng(seed);
  const CMatrix s = spec.kind == TupleKind::Diagonal ? identity(dim) : random_similarity(dim, spec.cond_cap, rng);
  const CMatrix s_inv = s.partialPivLu().inverse();
  auto eig = [&] { return std::polar(spec.eig_radius * std::sqrt(rng.uniform()), rng.uniform(0.0, 2.0 * kPi)); };

  std::vector<CMatrix> out;
  if (spec.kind == TupleKind::Polynomial) {
    CMatrix a = rng.gaussian(dim, dim).triangularView<Eigen::StrictlyUpper>();
    const double na = opnorm(a);
    if (na > 0.0) a *= spec.nilpotent_norm / na;
    for (int k = 0; k < d; ++k) {
      const Complex c0 = 0.5 * eig();
      const Complex c1 = rng.complex_normal() * 0.5;
      const Complex c2 = rng.complex_normal() * 0.25;
      out.push_back(s * (c0 * identity(dim) + c1 * a + c2 * a * a) * s_inv);
    }
    return out;
  }
  for (int k = 0; k < d; ++k) {
    CVector l(dim);
    for (int i = 0; i < dim; ++i) l(i) = eig();
    out.push_back(s * l.asDiagonal() * s_inv);
  }
  return out;
}

std::vector<CMatrix> gen_ritt_tuple(int d, const PointSetE& e, double r, int dim, int peripheral_count,
                                    double cond_cap, std::uint64_t seed) {
  check_counts(e, dim, peripheral_count);
  Rng rng(seed);
  const CMatrix s = random_similarity(dim, cond_cap, rng);
  std::vector<CMatrix> out;
  for (int k = 0; k < d; ++k) out.push_back(conjugate_diagonal(s, ritt_diagonal(e, r, dim, peripheral_count, rng)));
  return out;
}

CMatrix jordan_fixture() {
  CMatrix j(2, 2);
  j << 1.0, 1.0, 0.0, 1.0;
  return j;
}

}  // namespace polycalc
