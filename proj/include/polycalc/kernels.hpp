#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP path and a serial
// reference; parallel paths write per-item results into preallocated slots
// and reduce in index order, so both paths return bit-identical values.

#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <vector>

#include <omp.h>

#include "polycalc/numerics.hpp"

namespace polycalc::kernels {

enum class Exec { Serial, Parallel };

/// Complex Schur factorization A = U T U*, computed once and reused for many
/// resolvent evaluations.
struct SchurForm {
  CMatrix unitary;
  CMatrix triangular;

  static SchurForm of(const CMatrix& a);
};

/// ||(z - A)^{-1}|| from the triangular factor; +inf when z - T is singular.
double resolvent_norm(const SchurForm& schur, Complex z);

/// ||R(z_i, A)|| for every point. Parallel over points.
std::vector<double> resolvent_norms(const SchurForm& schur, std::span<const Complex> points,
                                    Exec exec = Exec::Parallel);

/// Reference route: dense LU inverse of zI - A followed by a full SVD.
std::vector<double> resolvent_norms_reference(const CMatrix& a, std::span<const Complex> points);

/// R(z_i, A) for every node.
std::vector<CMatrix> resolvents(const CMatrix& a, std::span<const Complex> nodes,
                                Exec exec = Exec::Parallel);

/// sum_i weights[i] * R(nodes[i], A), summed in index order.
CMatrix weighted_resolvent_sum(const CMatrix& a, std::span<const Complex> nodes,
                               std::span<const Complex> weights, Exec exec = Exec::Parallel);

struct ArgMax {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

/// max_i f(i) over [0, count); ties resolve to the smallest index.
template <class F>
ArgMax parallel_argmax(std::size_t count, F&& f, Exec exec = Exec::Parallel) {
  std::vector<double> values(count);
  std::vector<std::exception_ptr> errors(count);
  auto one = [&](std::size_t i) {
    try {
      values[i] = f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) one(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  ArgMax best;
  for (std::size_t i = 0; i < count; ++i) {
    if (values[i] > best.value) best = {values[i], i};
  }
  return best;
}

/// Thread count used by the parallel paths (honours POLYCALC_THREADS when the
/// CLI has applied it).
int thread_count();

/// Reads POLYCALC_THREADS and applies it to the OpenMP runtime; returns the
/// resulting thread count.
int configure_threads_from_env();

}  // namespace polycalc::kernels
