#include "polycalc/squarefn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polycalc/kernels.hpp"
#include "polycalc/random.hpp"

namespace polycalc {

CMatrix sectorial_factor(const CMatrix& t, const PointSetE& e) {
  const auto n = static_cast<int>(t.rows());
  CMatrix a = identity(n);
  for (Complex xi : e.points()) {
    const SectorEstimate s = check_sectorial(t, xi);
    if (!s.sectorial) throw Error(ErrorKind::NotSectorial, "I - conj(xi) T is not sectorial of type < pi/2");
    a = a * principal_sqrt(identity(n) - std::conj(xi) * t);
  }
  return a;
}

SquareFunctionReport square_function_with_factor(const CMatrix& t, const CMatrix& a, const CVector& x,
                                                 const SquareFunctionOptions& opts) {
  SquareFunctionReport rep;
  rep.factor_a = a;
  CVector v = a * x;
  double sum = v.squaredNorm();
  if (sum == 0.0) return rep;
  int quiet = 0;
  std::vector<double> terms{sum};
  int k = 0;
  while (quiet < opts.patience) {
    if (k >= opts.k_cap) {
      throw Error(ErrorKind::NotConverged, "square function did not decay within " + std::to_string(opts.k_cap) + " terms");
    }
    v = t * v;
    ++k;
    const double term = v.squaredNorm();
    terms.push_back(term);
    sum += term;
    quiet = term < opts.tol * sum / (k + 1) ? quiet + 1 : 0;
  }
  rep.truncation = k;
  rep.value = std::sqrt(sum);
  const int span = std::min(opts.patience - 1, k);
  const double last = terms[static_cast<std::size_t>(k)];
  const double earlier = terms[static_cast<std::size_t>(k - span)];
  double q = (earlier > 0.0 && span > 0) ? std::pow(last / earlier, 1.0 / span) : 0.0;
  if (!std::isfinite(q)) q = 0.0;
  rep.decay_rate = q;
  rep.tail_bound = q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  return rep;
}

SquareFunctionReport square_function(const CMatrix& t, const PointSetE& e, const CVector& x,
                                     const SquareFunctionOptions& opts) {
  return square_function_with_factor(t, sectorial_factor(t, e), x, opts);
}

double square_constant_estimate(const CMatrix& t, const PointSetE& e, int trials, std::uint64_t seed,
                                const SquareFunctionOptions& opts) {
  const CMatrix a = sectorial_factor(t, e);
  const auto n = static_cast<int>(t.rows());
  const std::size_t total = static_cast<std::size_t>(n + std::max(trials, 0));
  auto value_at = [&](std::size_t i) {
    CVector x;
    if (i < static_cast<std::size_t>(n)) {
      x = CVector::Unit(n, static_cast<Eigen::Index>(i));
    } else {
      Rng rng(derive_seed(seed, i - static_cast<std::size_t>(n)));
      x = rng.unit_vector(n);
    }
    return square_function_with_factor(t, a, x, opts).value;
  };
  return kernels::parallel_argmax(total, value_at).value;
}

}  // namespace polycalc
