#include "polycalc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace polycalc {

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

CMatrix zero(int n) { return CMatrix::Zero(n, n); }

double opnorm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

std::vector<Complex> spectrum(const CMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "spectrum of a non-square matrix");
  if (a.rows() == 0) return {};
  Eigen::ComplexSchur<CMatrix> schur(a, /*computeU=*/false);
  const auto& t = schur.matrixT();
  std::vector<Complex> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = t(i, i);
  return out;
}

double spectral_radius(const CMatrix& a) {
  double rho = 0.0;
  for (Complex l : spectrum(a)) rho = std::max(rho, std::abs(l));
  return rho;
}

CMatrix resolvent(Complex z, const CMatrix& a, const ResolventOptions& opts) {
  const auto n = static_cast<int>(a.rows());
  double dist = std::numeric_limits<double>::infinity();
  for (Complex l : spectrum(a)) dist = std::min(dist, std::abs(z - l));
  const double scale = std::max(1.0, opnorm(a));
  if (!(dist > opts.spectrum_tol * scale)) {
    throw Error(ErrorKind::SingularResolvent,
                "z is within " + std::to_string(dist) + " of the spectrum");
  }
  CMatrix shifted = z * identity(n) - a;
  return shifted.partialPivLu().solve(identity(n));
}

CMatrix principal_sqrt(const CMatrix& a, const SqrtOptions& opts) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "principal_sqrt of a non-square matrix");
  const auto n = a.rows();
  if (n == 0) return a;
  if (!all_finite(a)) throw Error(ErrorKind::InvalidInput, "non-finite entries");

  const double norm_a = opnorm(a);
  const double scale = std::max(1.0, norm_a);

  Eigen::ComplexSchur<CMatrix> schur(a);
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();

  bool has_zero = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex l = t(i, i);
    if (std::abs(l.imag()) <= opts.axis_tol * scale && l.real() < -opts.axis_tol * scale) {
      throw Error(ErrorKind::NotSectorial, "eigenvalue on the negative real axis");
    }
    if (std::abs(l) <= opts.zero_snap * scale) has_zero = true;
  }
  if (has_zero && norm_a > 0.0) {
    const CMatrix a2 = a * a;
    const int r1 = numerical_rank(a, opts.rank_tol * norm_a);
    const int r2 = numerical_rank(a2, opts.rank_tol * norm_a * norm_a);
    if (r1 != r2) throw Error(ErrorKind::NotSectorial, "non-semisimple eigenvalue at zero");
  }

  CMatrix r = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex l = t(i, i);
    r(i, i) = std::abs(l) <= opts.zero_snap * scale ? Complex{0.0} : std::sqrt(l);
  }
  const double zero_denominator = std::sqrt(opts.zero_snap * scale);
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      Complex s = t(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      const Complex denom = r(i, i) + r(j, j);
      if (std::abs(denom) <= zero_denominator) {
        // Two zero eigenvalues: semisimplicity forces s = 0 and any value works.
        if (std::abs(s) > 1e-8 * scale) {
          throw Error(ErrorKind::NotSectorial, "non-semisimple eigenvalue at zero");
        }
        r(i, j) = 0.0;
      } else {
        r(i, j) = s / denom;
      }
    }
  }
  return u * r * u.adjoint();
}

CMatrix hermitian_sqrt(const CMatrix& h) {
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b, std::size_t dim_cap) {
  const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
  const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
  if (rows > dim_cap || cols > dim_cap) {
    throw Error(ErrorKind::DimensionOverflow,
                "Kronecker product of size " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds cap " + std::to_string(dim_cap));
  }
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

int numerical_rank(const CMatrix& a, double threshold) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > threshold) ++rank;
  }
  return rank;
}

CMatrix null_space(const CMatrix& a, double threshold) {
  const auto n = a.cols();
  if (n == 0) return CMatrix(0, 0);
  // Pad short matrices so that V carries the full set of right singular vectors.
  CMatrix padded = a;
  if (a.rows() < n) {
    padded = CMatrix::Zero(n, n);
    padded.topRows(a.rows()) = a;
  }
  Eigen::JacobiSVD<CMatrix> svd(padded, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

CMatrix range_basis(const CMatrix& a, double threshold) {
  if (a.size() == 0) return CMatrix(a.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixU().leftCols(rank);
}

double commutator_norm(const CMatrix& a, const CMatrix& b) { return opnorm(a * b - b * a); }

CMatrix matrix_power(const CMatrix& a, int n) {
  CMatrix out = identity(static_cast<int>(a.rows()));
  for (int k = 0; k < n; ++k) out = a * out;
  return out;
}

bool all_finite(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

CMatrix horner(const std::vector<Complex>& coeffs, const CMatrix& a) {
  const auto n = static_cast<int>(a.rows());
  CMatrix acc = CMatrix::Zero(n, n);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = a * acc;
    acc.diagonal().array() += *it;
  }
  return acc;
}

Complex horner(const std::vector<Complex>& coeffs, Complex z) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace polycalc
