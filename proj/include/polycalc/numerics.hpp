#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "polycalc/errors.hpp"

namespace polycalc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

struct SqrtOptions {
  /// Relative threshold for the rank(A) == rank(A^2) semisimplicity test at 0.
  double rank_tol = 1e-10;
  /// Eigenvalues within this (relative) distance of the negative axis count as on it.
  double axis_tol = 1e-12;
  /// Schur diagonal entries below this (relative) modulus are treated as exact zeros.
  double zero_snap = 1e-13;
};

struct ResolventOptions {
  /// z must stay farther than tol * max(1, ||A||) from the spectrum.
  double spectrum_tol = 1e-13;
};

inline constexpr std::size_t kDefaultKronCap = 4096;

CMatrix identity(int n);
CMatrix zero(int n);

/// Largest singular value.
double opnorm(const CMatrix& a);

/// Eigenvalues with algebraic multiplicity (complex Schur diagonal).
std::vector<Complex> spectrum(const CMatrix& a);

double spectral_radius(const CMatrix& a);

/// (zI - A)^{-1}. Throws SingularResolvent when z is numerically in the spectrum.
CMatrix resolvent(Complex z, const CMatrix& a, const ResolventOptions& opts = {});

/// Principal square root via complex Schur form and the triangular square-root
/// recurrence. Throws NotSectorial for eigenvalues on the open negative axis or
/// a non-semisimple eigenvalue at zero.
CMatrix principal_sqrt(const CMatrix& a, const SqrtOptions& opts = {});

/// Positive semidefinite square root of a Hermitian matrix (negative
/// eigenvalues from rounding are clipped to zero).
CMatrix hermitian_sqrt(const CMatrix& h);

/// Kronecker product A (x) B; the row index of A is the outer (slow) index.
CMatrix kron(const CMatrix& a, const CMatrix& b, std::size_t dim_cap = kDefaultKronCap);

/// Numerical rank: number of singular values above `threshold`.
int numerical_rank(const CMatrix& a, double threshold);

/// Orthonormal basis of the null space (singular values <= threshold).
CMatrix null_space(const CMatrix& a, double threshold);

/// Orthonormal basis of the column space (singular values > threshold).
CMatrix range_basis(const CMatrix& a, double threshold);

double commutator_norm(const CMatrix& a, const CMatrix& b);

CMatrix matrix_power(const CMatrix& a, int n);

bool all_finite(const CMatrix& a);

/// Horner evaluation of sum_i coeffs[i] * A^i.
CMatrix horner(const std::vector<Complex>& coeffs, const CMatrix& a);

/// Scalar Horner evaluation.
Complex horner(const std::vector<Complex>& coeffs, Complex z);

}  // namespace polycalc
