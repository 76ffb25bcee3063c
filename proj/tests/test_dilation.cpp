#include "doctest.h"

#include "helpers.hpp"
#include "polycalc/dilation.hpp"
#include "polycalc/ergodic.hpp"
#include "polycalc/generators.hpp"
#include "polycalc/squarefn.hpp"
#include "polycalc/taylor.hpp"

using namespace polycalc;
using test::diag;
using test::dist;

namespace {

double unitarity(const CMatrix& v) { return opnorm(v.adjoint() * v - identity(static_cast<int>(v.cols()))); }

SpecificDilationOptions quick(int n_max = 20) {
  SpecificDilationOptions o;
  o.n_max = n_max;
  o.verify_ritt = false;
  return o;
}

}  // namespace

TEST_CASE("specific dilation: pure peripheral operator") {
  const Complex xi = std::polar(1.0, 2 * kPi / 3);
  const PointSetE e = PointSetE::roots_of_unity(3);
  const CMatrix t = xi * identity(3);
  const TruncatedDilation dil = specific_dilation(t, e);
  for (int n = 0; n <= 20; ++n) CHECK(dist(dil.compress(n), std::pow(xi, n) * identity(3)) < 1e-13);
}

TEST_CASE("specific dilation: interior scalar") {
  const TruncatedDilation dil = specific_dilation(0.5 * identity(2), PointSetE({1.0}));
  CHECK(dilation_check(dil, 0.5 * identity(2), 20) <= 1e-8);
  CHECK(unitarity(dil.v.dense()) <= 1e-12);
}

TEST_CASE("specific dilation: zero operator") {
  const CMatrix t = CMatrix::Zero(3, 3);
  const TruncatedDilation dil = specific_dilation(t, PointSetE::roots_of_unity(2));
  CHECK(dist(dil.compress(0), identity(3)) <= 1e-10);
  for (int n = 1; n <= 20; ++n) CHECK(opnorm(dil.compress(n)) <= 1e-10);
}

TEST_CASE("specific dilation refuses an operator that is not Ritt") {
  try {
    specific_dilation(std::polar(1.0, 0.5) * identity(2), PointSetE({1.0}));
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
}

TEST_CASE("property: dilation identity, unitarity and bicommutant on generated operators") {
  const PointSetE e = PointSetE::roots_of_unity(3);
  for (int trial = 0; trial < 6; ++trial) {
    const CMatrix t = gen_ritt_matrix(e, 0.5, 5, trial % 3, 5.0, 700 + trial);
    const TruncatedDilation dil = specific_dilation(t, e, quick());
    CHECK(dilation_check(dil, t, 20) <= 1e-8);
    CHECK(unitarity(dil.v.dense()) <= 1e-12);
    CHECK(dist(dil.q, dil.j_tilde.adjoint()) == 0.0);
    const auto basis = commutant_basis(t);
    double worst = 0.0;
    for (int p = 0; p < dil.v.dim(); ++p) {
      const CMatrix b = dil.j_block(p);
      for (const CMatrix& x : basis) worst = std::max(worst, opnorm(b * x - x * b));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("property: error decays geometrically as the window doubles") {
  const PointSetE e = PointSetE::roots_of_unity(2);
  for (int trial = 0; trial < 3; ++trial) {
    const CMatrix t = gen_ritt_matrix(e, 0.5, 4, trial % 3, 3.0, 710 + trial, {false, 1});
    double prev = -1.0;
    for (int k : {2, 4, 8, 16}) {
      SpecificDilationOptions o = quick(10);
      o.k_max = k;
      const TruncatedDilation dil = specific_dilation(t, e, o);
      const double err = dilation_check(dil, t, 10);
      if (prev > 1e-12) CHECK(err <= 0.5 * prev);
      prev = err;
    }
  }
}

TEST_CASE("property: inner-product identity of the construction") {
  Rng rng(72);
  const PointSetE e = PointSetE::roots_of_unity(2);
  const CMatrix t = gen_ritt_matrix(e, 0.5, 4, 2, 3.0, 72, {false, 1});
  const TruncatedDilation dil = specific_dilation(t, e, quick(6));
  const ErgodicDecomposition dx = full_decomposition(t, e);
  const PointSetE ce = e.conjugate();
  const ErgodicDecomposition dy = full_decomposition(t.adjoint(), ce);
  const CMatrix a = sectorial_factor(t, e);
  const std::vector<Complex> coeff = a_coeffs_recursive(e, 3000);
  const CVector x = rng.unit_vector(4), y = rng.unit_vector(4);
  const CVector xr = dx.range_projection * x, yr = dy.range_projection * y;
  for (int n = 0; n <= 6; ++n) {
    const Complex lhs = y.dot(dil.compress(n) * x);
    Complex rhs = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) {
      for (std::size_t i = 0; i < ce.size(); ++i) {
        if (std::abs(ce[i] - std::conj(e[j])) < 1e-12) {
          rhs += std::pow(e[j], n) * (dy.projections[i] * y).dot(dx.projections[j] * x);
        }
      }
    }
    CVector v = matrix_power(t, n) * a * a * xr;
    for (std::size_t m = 0; m < coeff.size(); ++m) {
      rhs += coeff[m] * yr.dot(v);
      v = t * v;
    }
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("Schaffer dilation") {
  Rng rng(73);
  const CMatrix u = rng.unitary(3);
  ContractionDilation d = schaffer_dilation(u, 6);
  CHECK(schaffer_check(d, u, 12) <= 1e-12);
  CHECK(unitarity(d.v) <= 1e-12);
  CHECK(dist(d.v * d.j0, d.j0 * u) <= 1e-12);

  d = schaffer_dilation(CMatrix::Zero(2, 2), 6);
  for (int n = 1; n <= 12; ++n) CHECK(opnorm(d.j0.adjoint() * matrix_power(d.v, n) * d.j0) <= 1e-14);

  for (int trial = 0; trial < 5; ++trial) {
    CMatrix c = rng.gaussian(4, 4);
    c /= opnorm(c);
    d = schaffer_dilation(c, 6);
    CHECK(schaffer_check(d, c, 12) <= 1e-10);
    CHECK(unitarity(d.v) <= 1e-12);
  }
  try {
    schaffer_dilation(1.1 * identity(2), 3);
    FAIL("expected NotContraction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotContraction);
  }
}

TEST_CASE("Ando dilation examples") {
  AndoDilation d = ando_dilation(identity(2), identity(2), 8);
  CHECK(dist(d.v1 * d.j0, d.j0) < 1e-14);
  CHECK(dist(d.v2 * d.j0, d.j0) < 1e-14);

  const CMatrix u1 = diag({std::polar(1.0, 0.3), std::polar(1.0, -1.2)});
  const CMatrix u2 = diag({std::polar(1.0, 2.0), std::polar(1.0, 0.1)});
  d = ando_dilation(u1, u2, 8);
  CHECK(ando_check(d, u1, u2, 8) <= 1e-12);

  const CMatrix t1 = diag({0.5, 0.3}), t2 = diag({0.2, 0.7});
  d = ando_dilation(t1, t2, 8);
  CHECK(d.doubly_commuting);
  CHECK(ando_check(d, t1, t2, 8) <= 1e-8);
  CHECK(opnorm(d.v1 * d.v2 - d.v2 * d.v1) <= 1e-10);
  CHECK(unitarity(d.v1) <= 1e-12);
  CHECK(unitarity(d.v2) <= 1e-12);
}

TEST_CASE("Ando dilation of a pair that is not doubly commuting") {
  std::vector<CMatrix> pair = gen_commuting_tuple(2, 4, {TupleKind::Polynomial, 1.0, 0.9, 0.3}, 74);
  for (CMatrix& p : pair) p /= std::max(1.0, opnorm(p));
  const AndoDilation d = ando_dilation(pair[0], pair[1], 8);
  CHECK_FALSE(d.doubly_commuting);
  CHECK(ando_check(d, pair[0], pair[1], 8) <= 1e-8);
  CHECK_FALSE(d.unitary);
  CHECK(unitarity(d.v1 * d.j0) <= 1e-12);  // isometric on the embedded copy of H
  CHECK(unitarity(d.v2 * d.j0) <= 1e-12);
  AndoOptions strict;
  strict.allow_general = false;
  CHECK_THROWS_AS(ando_dilation(pair[0], pair[1], 8, strict), Error);
}

TEST_CASE("Ando dilation input checks") {
  try {
    ando_dilation(diag({0.5, 0.2}), test::mat2(0, 0.5, 0, 0), 4);
    FAIL("expected NotCommuting");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCommuting);
  }
  try {
    ando_dilation(diag({1.5, 0.2}), diag({0.5, 0.2}), 4);
    FAIL("expected NotContraction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotContraction);
  }
}

TEST_CASE("joint dilation with d = 1 reduces to the specific dilation") {
  const PointSetE e = PointSetE::roots_of_unity(2);
  const CMatrix t = gen_ritt_matrix(e, 0.5, 4, 1, 3.0, 75, {false, 1});
  const TruncatedDilation h = specific_dilation(t, e, quick(8));
  const JointDilation jd = joint_dilation({t}, 1, {h}, tail_identity(4));
  CHECK(joint_check(jd, {t}, 8).max_error <= 1e-8);
  CHECK(dist(jd.j, h.j) == 0.0);
}

TEST_CASE("joint dilation with identity tail operators") {
  const PointSetE e = PointSetE::roots_of_unity(3);
  const CMatrix t1 = gen_ritt_matrix(e, 0.5, 3, 1, 3.0, 76, {false, 1});
  const std::vector<CMatrix> ts = {t1, identity(3), identity(3)};
  const TruncatedDilation h = specific_dilation(t1, e, quick(5));
  const AndoDilation ad = ando_dilation(identity(3), identity(3), 5);
  const JointDilation jd = joint_dilation(ts, 1, {h}, tail_from_ando(ad, identity(3)));
  CHECK(joint_check(jd, ts, 5).max_error <= 1e-8);
}

TEST_CASE("joint dilation for a Ritt operator and two diagonal contractions") {
  const PointSetE e = PointSetE::roots_of_unity(2);
  const CMatrix t1 = diag({1.0, -1.0, 0.3, Complex(0.1, 0.2)});
  const CMatrix t2 = diag({0.5, Complex(0, 0.9), -0.2, 0.7});
  const CMatrix t3 = diag({0.1, 0.4, Complex(0.3, -0.6), -0.9});
  const std::vector<CMatrix> ts = {t1, t2, t3};
  const TruncatedDilation h = specific_dilation(t1, e, quick(6));
  const AndoDilation ad = ando_dilation(t2, t3, 6);
  const JointDilation jd = joint_dilation(ts, 1, {h}, tail_from_ando(ad, identity(4)));
  CHECK(joint_check(jd, ts, 6).max_error <= 1e-7);
  const UnitaryReport u = joint_unitary_report(jd);
  CHECK(u.commutator <= 1e-10);
  CHECK(u.unitarity <= 1e-10);
  // norm bookkeeping: ||J|| ||Q|| <= prod ||J_k|| prod ||Q_k||
  const double bound = opnorm(h.j) * opnorm(h.q) * opnorm(ad.j0) * opnorm(ad.j0);
  CHECK(jd.norm_j() * jd.norm_q() <= bound + 1e-9);
}

TEST_CASE("joint dilation errors") {
  const PointSetE e = PointSetE::roots_of_unity(2);
  const CMatrix t1 = gen_ritt_matrix(e, 0.5, 3, 1, 3.0, 77, {false, 1});
  const CMatrix other = gen_ritt_matrix(e, 0.5, 3, 1, 3.0, 78, {false, 1});
  const TruncatedDilation h_other = specific_dilation(other, e, quick(4));
  try {
    joint_dilation({t1}, 1, {h_other}, tail_identity(3));
    FAIL("expected IntertwineFailed");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::IntertwineFailed);
  }
  const TruncatedDilation h = specific_dilation(t1, e, quick(4));
  JointOptions tight;
  tight.dim_cap = 16;
  try {
    joint_dilation({t1}, 1, {h}, tail_identity(3), tight);
    FAIL("expected DimensionOverflow");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::DimensionOverflow);
  }
}
