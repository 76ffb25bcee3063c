#include "polycalc/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace polycalc::kernels {

SchurForm SchurForm::of(const CMatrix& a) {
  Eigen::ComplexSchur<CMatrix> schur(a);
  return {schur.matrixU(), schur.matrixT()};
}

double resolvent_norm(const SchurForm& schur, Complex z) {
  const auto n = schur.triangular.rows();
  CMatrix shifted = -schur.triangular;
  shifted.diagonal().array() += z;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (shifted(i, i) == Complex{0.0}) return std::numeric_limits<double>::infinity();
  }
  CMatrix inv = CMatrix::Identity(n, n);
  shifted.triangularView<Eigen::Upper>().solveInPlace(inv);
  if (n == 1) return std::abs(inv(0, 0));
  const CMatrix gram = inv.adjoint() * inv;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(n - 1);
  return std::isfinite(top) ? std::sqrt(std::max(top, 0.0)) : std::numeric_limits<double>::infinity();
}

std::vector<double> resolvent_norms(const SchurForm& schur, std::span<const Complex> points,
                                    Exec exec) {
  std::vector<double> out(points.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 32)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.size()); ++i) {
      out[static_cast<std::size_t>(i)] = resolvent_norm(schur, points[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = resolvent_norm(schur, points[i]);
  }
  return out;
}

std::vector<double> resolvent_norms_reference(const CMatrix& a, std::span<const Complex> points) {
  const auto n = a.rows();
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CMatrix shifted = points[i] * CMatrix::Identity(n, n) - a;
    Eigen::FullPivLU<CMatrix> lu(shifted);
    if (!lu.isInvertible()) {
      out[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    Eigen::JacobiSVD<CMatrix> svd(lu.inverse());
    out[i] = svd.singularValues()(0);
  }
  return out;
}

std::vector<CMatrix> resolvents(const CMatrix& a, std::span<const Complex> nodes, Exec exec) {
  const auto n = a.rows();
  std::vector<CMatrix> out(nodes.size());
  auto one = [&](std::size_t i) {
    CMatrix shifted = nodes[i] * CMatrix::Identity(n, n) - a;
    out[i] = shifted.partialPivLu().solve(CMatrix::Identity(n, n));
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes.size()); ++i) {
      one(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < nodes.size(); ++i) one(i);
  }
  return out;
}

CMatrix weighted_resolvent_sum(const CMatrix& a, std::span<const Complex> nodes,
                               std::span<const Complex> weights, Exec exec) {
  if (nodes.size() != weights.size()) {
    throw Error(ErrorKind::InvalidInput, "node and weight counts differ");
  }
  const std::vector<CMatrix> rs = resolvents(a, nodes, exec);
  CMatrix acc = CMatrix::Zero(a.rows(), a.cols());
  for (std::size_t i = 0; i < rs.size(); ++i) acc += weights[i] * rs[i];
  return acc;
}

int thread_count() { return omp_get_max_threads(); }

int configure_threads_from_env() {
  if (const char* env = std::getenv("POLYCALC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

}  // namespace polycalc::kernels
