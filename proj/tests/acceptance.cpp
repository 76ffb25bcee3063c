// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "polycalc/dilation.hpp"
#include "polycalc/ergodic.hpp"
#include "polycalc/experiment.hpp"
#include "polycalc/funcalc.hpp"
#include "polycalc/generators.hpp"
#include "polycalc/multivar.hpp"
#include "polycalc/random.hpp"
#include "polycalc/taylor.hpp"

using namespace polycalc;

namespace {

// Tolerances and budgets, fixed here and nowhere else.
constexpr double kCoeffTol = 1e-12;
constexpr int kCoeffM = 200;
constexpr int kCoeffSets = 50;
constexpr double kCoeffSeconds = 1.0;

constexpr int kSkMatrices = 25;
constexpr double kSkTol = 1e-8;
constexpr int kGammaK = 500;

constexpr int kErgodicInstances = 100;
constexpr double kAlgebraTol = 1e-10;
constexpr double kBicommutantTol = 1e-9;

constexpr int kDilationMatrices = 25;
constexpr int kDilationN = 20;
constexpr double kDilationTol = 1e-8;
constexpr double kUnitaryTol = 1e-12;
constexpr double kDoublingFloor = 1e-12;

constexpr int kSchafferBudget = 12;
constexpr double kSchafferTol = 1e-10;
constexpr int kAndoBudget = 8;
constexpr double kAndoTol = 1e-8;
constexpr double kAndoCommuteTol = 1e-10;

constexpr int kJointTotal = 6;
constexpr double kJointTol = 1e-7;

constexpr int kVnPolys = 200;
constexpr int kVnDegree = 8;
constexpr double kVnTol = 1e-6;
constexpr double kVonNeumannTol = 1e-9;

constexpr int kSimilarityTuples = 25;
constexpr double kMarginTol = 1e-8;
constexpr double kSimilaritySeconds = 30.0;

constexpr double kContour1dTol = 1e-8;
constexpr int kContour1dDegree = 20;
constexpr double kContour2dTol = 1e-6;
constexpr int kContour2dDegree = 8;
constexpr double kWindingTol = 1e-10;
constexpr int kCertificateTuples = 10;

constexpr double kSuiteSeconds = 300.0;

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  Outcome() { detail << std::boolalpha; }

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t seed_for(int criterion, int item) {
  return derive_seed(kSeed, static_cast<std::uint64_t>(criterion) * 100000ULL + static_cast<std::uint64_t>(item));
}

PointSetE random_e(Rng& rng, int n) {
  for (;;) {
    std::vector<Complex> pts;
    for (int i = 0; i < n; ++i) pts.push_back(rng.unimodular());
    bool ok = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) ok = ok && std::abs(pts[i] - pts[j]) > 0.2;
    if (ok) return PointSetE(pts);
  }
}

double rel_err(const CMatrix& got, const CMatrix& want) { return opnorm(got - want) / (1.0 + opnorm(want)); }

double unitarity(const CMatrix& v) { return opnorm(v.adjoint() * v - identity(static_cast<int>(v.cols()))); }

// 1. Coefficient consistency.
void coefficients(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed_for(1, 0));
  double worst = 0.0;
  for (int s = 0; s < kCoeffSets; ++s) {
    const PointSetE e = random_e(rng, rng.uniform_int(1, 5));
    const auto rec = a_coeffs_recursive(e, kCoeffM);
    const auto pf = a_coeffs_partial_fractions(e, beta_weights(e), kCoeffM);
    for (int m = 0; m <= kCoeffM; ++m) worst = std::max(worst, std::abs(rec[m] - pf[m]));
  }
  out.require(worst <= kCoeffTol, "recursion vs partial fractions");
  bool exact = true;
  const auto ones = a_coeffs_recursive(PointSetE({1.0}), kCoeffM);
  const auto alt = a_coeffs_recursive(PointSetE({1.0, -1.0}), kCoeffM);
  for (int m = 0; m <= kCoeffM; ++m) {
    exact = exact && ones[m] == Complex(1.0) && alt[m] == Complex(m % 2 == 0 ? 1.0 : 0.0);
  }
  out.require(exact, "closed forms");
  const double secs = seconds_since(t0);
  out.require(secs < kCoeffSeconds, "runtime");
  out.detail << "max |rec - pf| = " << worst << ", closed forms exact = " << exact << ", " << secs << " s";
}

// 2. S_k convergence on range components and gamma boundedness.
void sk_convergence(Outcome& out) {
  const PointSetE e = PointSetE::roots_of_unity(3);
  double worst_final = 0.0;
  int worst_k = 0;
  for (int i = 0; i < kSkMatrices; ++i) {
    const int dim = 2 + i % 9;
    const CMatrix t = gen_ritt_matrix(e, 0.5, dim, std::min(i % 3, dim), 10.0, seed_for(2, i));
    const ErgodicDecomposition dec = full_decomposition(t, e);
    Rng rng(seed_for(2, 1000 + i));
    const CVector x = dec.range_projection * rng.unit_vector(dim);
    const ResidualTrace tr = sk_residual_trace(t, e, x, kSkTol);
    out.require(tr.converged && tr.residual.back() < kSkTol, "residual below tolerance");
    // downward trend: least-squares slope of log residual against step index
    std::vector<double> ys;
    for (double r : tr.residual) ys.push_back(std::log(std::max(r, 1e-300)));
    if (ys.size() >= 2) {
      const double n = static_cast<double>(ys.size());
      double mx = (n - 1) / 2, sxy = 0, sxx = 0, my = 0;
      for (double y : ys) my += y / n;
      for (std::size_t k = 0; k < ys.size(); ++k) {
        sxy += (k - mx) * (ys[k] - my);
        sxx += (k - mx) * (k - mx);
      }
      out.require(sxy / sxx < 0.0, "downward trend");
      out.require(tr.residual.back() <= tr.residual.front(), "final below first");
    }
    worst_final = std::max(worst_final, tr.residual.back());
    worst_k = std::max(worst_k, tr.k.back());
  }
  double gamma_ratio = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const PointSetE en = PointSetE::roots_of_unity(n, 0.3 * n);
    const TaylorCoeffs tc = taylor_coeffs(en, kGammaK + n);
    double max_c = 0, max_a = 0, worst = 0;
    for (Complex c : tc.c) max_c = std::max(max_c, std::abs(c));
    for (Complex a : tc.a) max_a = std::max(max_a, std::abs(a));
    for (int k = n; k <= kGammaK; ++k)
      for (Complex g : gamma_coeffs(tc, k)) worst = std::max(worst, std::abs(g));
    const double bound = (n + 1) * max_c * max_a;
    gamma_ratio = std::max(gamma_ratio, worst / bound);
    out.require(worst <= bound, "gamma bound");
  }
  out.detail << "worst final residual " << worst_final << " at k <= " << worst_k
             << ", max |gamma| / bound = " << gamma_ratio;
}

// 3. Ergodic decomposition identities.
void ergodic(Outcome& out) {
  Rng rng(seed_for(3, 0));
  ProjectionAlgebraReport worst;
  for (int i = 0; i < kErgodicInstances; ++i) {
    const PointSetE e = random_e(rng, rng.uniform_int(1, 4));
    const int dim = rng.uniform_int(1, 10);
    const int pc = rng.uniform_int(0, std::min<int>(dim, static_cast<int>(e.size())));
    // diagonalizable with spectrum in E_{0.95 r} and on E: Ritt by construction
    const CMatrix t = gen_ritt_matrix(e, 0.5, dim, pc, 10.0, seed_for(3, i + 1), {false, 1});
    const ProjectionAlgebraReport r = check_projection_algebra(t, full_decomposition(t, e));
    worst.idempotence = std::max(worst.idempotence, r.idempotence);
    worst.annihilation = std::max(worst.annihilation, r.annihilation);
    worst.partition = std::max(worst.partition, r.partition);
    worst.bicommutant = std::max(worst.bicommutant, r.bicommutant);
  }
  out.require(worst.idempotence <= kAlgebraTol, "idempotence");
  out.require(worst.annihilation <= kAlgebraTol, "annihilation");
  out.require(worst.partition <= kAlgebraTol, "partition");
  out.require(worst.bicommutant <= kBicommutantTol, "bicommutant");
  out.detail << "idempotence " << worst.idempotence << ", annihilation " << worst.annihilation << ", partition "
             << worst.partition << ", bicommutant " << worst.bicommutant;
}

// 4. Specific dilation.
void specific(Outcome& out) {
  const PointSetE e = PointSetE::roots_of_unity(3);
  double worst = 0.0, worst_unitary = 0.0, slowest_ratio = 0.0;
  int with_one = 0, with_two = 0;
  for (int i = 0; i < kDilationMatrices; ++i) {
    const int pc = i % 3;
    const int dim = 3 + i % 6;
    const CMatrix t = gen_ritt_matrix(e, 0.5, dim, pc, 10.0, seed_for(4, i));
    with_one += pc == 1;
    with_two += pc == 2;
    SpecificDilationOptions opts;
    opts.n_max = kDilationN;
    opts.tol = kDilationTol;
    opts.verify_ritt = false;  // the generator has already certified T
    const TruncatedDilation dil = specific_dilation(t, e, opts);
    worst = std::max(worst, dilation_check(dil, t, kDilationN));
    worst_unitary = std::max(worst_unitary, unitarity(dil.v.dense()));

    if (i < 6) {
      double prev = -1.0;
      for (int k : {2, 4, 8, 16}) {
        SpecificDilationOptions w = opts;
        w.k_max = k;
        const double err = dilation_check(specific_dilation(t, e, w), t, kDilationN);
        if (prev > kDoublingFloor) {
          slowest_ratio = std::max(slowest_ratio, err / prev);
          out.require(err <= 0.5 * prev, "window doubling");
        }
        prev = err;
      }
    }
  }
  out.require(worst <= kDilationTol, "dilation error");
  out.require(worst_unitary <= kUnitaryTol, "V unitary");
  out.require(with_one > 0 && with_two > 0, "peripheral coverage");
  out.detail << "max error " << worst << ", V unitarity " << worst_unitary << ", slowest doubling ratio "
             << slowest_ratio << " (" << with_one << " with 1, " << with_two << " with 2 peripheral)";
}

// 5. Schaffer and Ando dilations.
void classical(Outcome& out) {
  double sch = 0.0, ando = 0.0, comm = 0.0, general = 0.0;
  for (int i = 0; i < 10; ++i) {
    Rng rng(seed_for(5, i));
    const int dim = 2 + i % 5;
    CMatrix c = rng.gaussian(dim, dim);
    c /= opnorm(c);
    const ContractionDilation d = schaffer_dilation(c, kSchafferBudget / 2);
    sch = std::max(sch, schaffer_check(d, c, kSchafferBudget));
    out.require(unitarity(d.v) <= kUnitaryTol, "Schaffer unitary");

    const std::vector<CMatrix> normal =
        gen_commuting_tuple(2, dim, {TupleKind::SharedSimilarity, 1.0, 1.0, 0.0}, seed_for(5, 100 + i));
    const AndoDilation ad = ando_dilation(normal[0], normal[1], kAndoBudget);
    ando = std::max(ando, ando_check(ad, normal[0], normal[1], kAndoBudget));
    comm = std::max(comm, opnorm(ad.v1 * ad.v2 - ad.v2 * ad.v1));
    out.require(ad.unitary && unitarity(ad.v1) <= kUnitaryTol && unitarity(ad.v2) <= kUnitaryTol, "Ando unitary");

    std::vector<CMatrix> pair =
        gen_commuting_tuple(2, dim, {TupleKind::Polynomial, 1.0, 0.9, 0.3}, seed_for(5, 200 + i));
    for (CMatrix& p : pair) p /= std::max(1.0, opnorm(p));
    const AndoDilation ag = ando_dilation(pair[0], pair[1], kAndoBudget);
    general = std::max(general, ando_check(ag, pair[0], pair[1], kAndoBudget));
  }
  out.require(sch <= kSchafferTol, "Schaffer identity");
  out.require(ando <= kAndoTol, "Ando identity");
  out.require(general <= kAndoTol, "Ando identity (general pair)");
  out.require(comm <= kAndoCommuteTol, "Ando commutation");
  out.detail << "Schaffer " << sch << ", Ando " << ando << " (general pairs " << general << "), commutator " << comm;
}

// 6. Three-variable joint dilation.
void joint(Outcome& out) {
  const PointSetE e = PointSetE::roots_of_unity(3);
  std::vector<std::vector<CMatrix>> tuples;
  for (int i = 0; i < 3; ++i) tuples.push_back(gen_ritt_tuple(3, e, 0.5, 3 + i % 2, 1, 4.0, seed_for(6, i)));
  CVector d1(4), d2(4), d3(4);
  d1 << 1.0, e[1], 0.3, Complex(0.1, 0.2);
  d2 << 0.5, Complex(0, 0.9), -0.2, 0.7;
  d3 << 0.1, 0.4, Complex(0.3, -0.6), -0.9;
  tuples.push_back({d1.asDiagonal(), d2.asDiagonal(), d3.asDiagonal()});
  double worst = 0.0;
  out.detail << "||J|| ||Q|| =";
  for (const auto& ts : tuples) {
    const JointDilation jd = dilate_tuple(ts, e, kJointTotal);
    const JointCheck c = joint_check(jd, ts, kJointTotal);
    worst = std::max(worst, c.max_error);
    out.detail << ' ' << jd.norm_j() * jd.norm_q();
  }
  out.require(worst <= kJointTol, "joint identity");
  out.detail << "; max error " << worst;
}

// 7. Generalized von Neumann inequality.
void von_neumann(Outcome& out) {
  const PointSetE e = PointSetE::roots_of_unity(3);
  out.detail << "max ratio / bound:";
  for (int i = 0; i < 4; ++i) {
    const int d = i < 3 ? 2 : 3;
    const std::vector<CMatrix> ts = gen_ritt_tuple(d, e, 0.5, 4, 1, 10.0, seed_for(7, i));
    const JointDilation jd = dilate_tuple(ts, e, kVnDegree);
    const double bound = jd.norm_j() * jd.norm_q();
    std::vector<double> ratios(kVnPolys);
#pragma omp parallel for schedule(dynamic, 1)
    for (int p = 0; p < kVnPolys; ++p) {
      Rng rng(seed_for(7, 1000 * (i + 1) + p));
      const MultiPoly phi = MultiPoly::random(d, rng.uniform_int(1, kVnDegree), rng);
      ratios[p] = vn_ratio(ts, phi, TorusDomain{d == 2 ? 64 : 24});
    }
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    out.require(worst <= bound + kVnTol, "ratio bound");
    out.detail << ' ' << worst << '/' << bound;
  }
  double one = 0.0;
  for (int i = 0; i < 3; ++i) {
    Rng rng(seed_for(7, 50 + i));
    CMatrix t = rng.gaussian(5, 5);
    t /= opnorm(t);
    std::vector<double> ratios(kVnPolys);
#pragma omp parallel for schedule(dynamic, 1)
    for (int p = 0; p < kVnPolys; ++p) {
      Rng prng(seed_for(7, 5000 + 1000 * i + p));
      ratios[p] = vn_ratio({t}, MultiPoly::random(1, prng.uniform_int(1, kVnDegree), prng), TorusDomain{4096});
    }
    one = std::max(one, *std::max_element(ratios.begin(), ratios.end()));
  }
  out.require(one <= 1.0 + kVonNeumannTol, "d = 1 contraction");
  out.detail << "; d = 1 contractions " << one;
}

// 8. Joint similarity.
void similarity(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const PointSetE e = PointSetE::roots_of_unity(3);
  double worst = 0.0;
  int feasible = 0;
  for (int i = 0; i < kSimilarityTuples; ++i) {
    std::vector<CMatrix> ts;
    switch (i % 3) {
      case 0: ts = gen_commuting_tuple(2, 6, {TupleKind::SharedSimilarity, 10.0, 1.0, 0.0}, seed_for(8, i)); break;
      case 1: ts = gen_commuting_tuple(3, 5, {TupleKind::Polynomial, 4.0, 0.9, 0.3}, seed_for(8, i)); break;
      default: ts = gen_ritt_tuple(2, e, 0.5, 6, 1, 10.0, seed_for(8, i)); break;
    }
    const SimilarityResult r = try_joint_similarity(ts);
    if (!r.feasible) continue;
    ++feasible;
    const CMatrix s_inv = r.s.inverse();
    for (const CMatrix& t : ts) worst = std::max(worst, opnorm(r.s * t * s_inv));
  }
  out.require(feasible == kSimilarityTuples, "all feasible");
  out.require(worst <= 1.0 + kMarginTol, "margins");
  const bool jordan_infeasible = !try_joint_similarity({jordan_fixture()}).feasible;
  out.require(jordan_infeasible, "Jordan fixture");
  const double secs = seconds_since(t0);
  out.require(secs < kSimilaritySeconds, "runtime");
  out.detail << feasible << "/" << kSimilarityTuples << " feasible, max margin " << worst << ", Jordan infeasible "
             << jordan_infeasible << ", " << secs << " s";
}

// 9. Functional calculus.
void functional_calculus(Outcome& out) {
  const PointSetE e = PointSetE::roots_of_unity(3);
  double winding_err = 0.0;
  Rng erng(seed_for(9, 0));
  for (int i = 0; i < 5; ++i) {
    const PointSetE ei = i == 0 ? e : random_e(erng, erng.uniform_int(1, 5));
    for (const ContourRegion& reg : {build_Er(ei, 0.5), enclosing_polygon(ei, 0.5)}) {
      const ContourQuadrature q = ContourQuadrature::build(reg, 64);
      winding_err = std::max(winding_err, std::abs(winding(q, 0.0) - 1.0));
      winding_err = std::max(winding_err, std::abs(winding(q, Complex(0.2, -0.25)) - 1.0));
      winding_err = std::max(winding_err, std::abs(winding(q, Complex(-1.3, 0.4))));
    }
  }
  out.require(winding_err <= kWindingTol, "winding");

  const ContourRegion er = build_Er(e, 0.5);
  const ContourQuadrature q1 = ContourQuadrature::build(er, 64), q2 = ContourQuadrature::build(er, 48);
  double err1 = 0.0, err2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    Rng rng(seed_for(9, 10 + i));
    const CMatrix t = gen_ritt_matrix(e, 0.5, 6, 0, 10.0, seed_for(9, 20 + i));
    const MultiPoly phi = MultiPoly::random(1, kContour1dDegree - 3 * i, rng);
    err1 = std::max(err1, rel_err(contour_eval_1d(phi, t, q1), horner(phi.coefficients_1d(), t)));
    const std::vector<CMatrix> ts = gen_ritt_tuple(2, e, 0.5, 5, 0, 10.0, seed_for(9, 30 + i));
    const MultiPoly phi2 = MultiPoly::random(2, kContour2dDegree - i % 3, rng);
    err2 = std::max(err2, rel_err(contour_eval_multi(phi2, ts, q2), eval_multipoly(phi2, ts)));
  }
  out.require(err1 <= kContour1dTol, "1D contour");
  out.require(err2 <= kContour2dTol, "2D contour");

  int passed = 0;
  double worst_p = 1.0;
  for (int i = 0; i < kCertificateTuples; ++i) {
    const std::vector<CMatrix> ts = gen_ritt_tuple(2, e, 0.5, 4, 1 + i % 2, 10.0, seed_for(9, 40 + i));
    const BoundedRatioCertificate c = bounded_ratio_certificate(ts, e, 0.5, seed_for(9, 60 + i));
    passed += c.passed;
    worst_p = std::min(worst_p, c.p_value);
  }
  out.require(passed == kCertificateTuples, "certificates");
  out.detail << "winding " << winding_err << ", 1D " << err1 << ", 2D " << err2 << ", certificates " << passed << "/"
             << kCertificateTuples << " (min p = " << worst_p << ")";
}

// 10. Full suite: runtime and reproducibility.
void full_suite(Outcome& out) {
  const ExperimentConfig cfg = load_config(std::filesystem::path(POLYCALC_CONFIG_DIR) / "default.json");
  const int threads = omp_get_max_threads();
  auto t0 = std::chrono::steady_clock::now();
  const Report a = run_experiment("full-suite", cfg);
  const double first = seconds_since(t0);
  omp_set_num_threads(threads + 2);
  t0 = std::chrono::steady_clock::now();
  const Report b = run_experiment("full-suite", cfg);
  const double second = seconds_since(t0);
  omp_set_num_threads(threads);
  out.require(a.passed && b.passed, "suite thresholds");
  out.require(a.summary.dump() == b.summary.dump() && a.tables == b.tables, "bit-identical reports");
  out.require(first < kSuiteSeconds && second < kSuiteSeconds, "runtime");
  out.detail << "runs of " << first << " s and " << second << " s (threads " << threads << " and " << threads + 2
             << "), reports identical = " << (a.summary.dump() == b.summary.dump() && a.tables == b.tables);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"coefficient consistency", coefficients},
      {"S_k convergence", sk_convergence},
      {"ergodic decomposition", ergodic},
      {"specific dilation", specific},
      {"Schaffer and Ando dilations", classical},
      {"three-variable joint dilation", joint},
      {"generalized von Neumann", von_neumann},
      {"joint similarity", similarity},
      {"functional calculus", functional_calculus},
      {"full suite", full_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(out);
    } catch (const std::exception& err) {
      out.pass = false;
      out.detail << "exception: " << err.what();
    }
    failures += !out.pass;
    std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                out.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
