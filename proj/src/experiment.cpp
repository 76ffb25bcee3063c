#include "polycalc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "polycalc/ergodic.hpp"
#include "polycalc/funcalc.hpp"
#include "polycalc/generators.hpp"
#include "polycalc/multivar.hpp"
#include "polycalc/random.hpp"
#include "polycalc/squarefn.hpp"
#include "polycalc/taylor.hpp"

namespace polycalc {

namespace {

const std::vector<std::string> kSections = {"classify", "coeffs", "dilate", "vn", "similarity", "funcalc", "squarefn"};

// Reads typed, range-checked fields from one JSON object and rejects keys
// that were never asked for.
class Fields {
 public:
  Fields(const Json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "<document>" : prefix_, "must be a JSON object");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  int integer(const std::string& key, int def, int lo, int hi) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) {
      throw ConfigError(path(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(x);
  }

  double real(const std::string& key, double def, double lo, double hi, bool open_lo = false, bool open_hi = false) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "must be a number");
    const double x = v.get<double>();
    const bool below = open_lo ? !(x > lo) : !(x >= lo);
    const bool above = open_hi ? !(x < hi) : !(x <= hi);
    if (below || above) {
      throw ConfigError(path(key), std::string("must lie in ") + (open_lo ? "(" : "[") + format_double(lo) + ", " +
                                       format_double(hi) + (open_hi ? ")" : "]"));
    }
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    known_.insert(key);
    if (!j_.contains(key)) return def;
    if (!j_.at(key).is_boolean()) throw ConfigError(path(key), "must be true or false");
    return j_.at(key).get<bool>();
  }

  const Json* raw(const std::string& key) {
    known_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.count(key)) throw ConfigError(path(key), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string prefix_;
  std::set<std::string> known_;
};

PointSetE parse_e(const Json& j) {
  Fields f(j, "e");
  const Json* roots = f.raw("roots");
  const Json* points = f.raw("points");
  const Json* angles = f.raw("angles");
  const int given = (roots != nullptr) + (points != nullptr) + (angles != nullptr);
  if (given != 1) throw ConfigError("e", "give exactly one of \"roots\", \"points\", \"angles\"");
  std::vector<Complex> pts;
  if (roots) {
    const int n = f.integer("roots", 1, 1, 64);
    const double rot = f.real("rotation", 0.0, -1e6, 1e6);
    f.finish();
    return PointSetE::roots_of_unity(n, rot);
  }
  if (points) {
    if (!points->is_array() || points->empty()) throw ConfigError("e.points", "must be a non-empty array");
    for (std::size_t i = 0; i < points->size(); ++i) {
      const std::string field = "e.points[" + std::to_string(i) + "]";
      Complex z;
      try {
        z = complex_from_json((*points)[i]);
      } catch (const Error&) {
        throw ConfigError(field, "must be [re, im]");
      }
      if (std::abs(std::abs(z) - 1.0) > 1e-12) throw ConfigError(field, "point is not unimodular");
      pts.push_back(z);
    }
  } else {
    if (!angles->is_array() || angles->empty()) throw ConfigError("e.angles", "must be a non-empty array");
    for (std::size_t i = 0; i < angles->size(); ++i) {
      if (!(*angles)[i].is_number()) throw ConfigError("e.angles[" + std::to_string(i) + "]", "must be a number");
      pts.push_back(std::polar(1.0, (*angles)[i].get<double>()));
    }
  }
  f.finish();
  try {
    return PointSetE(pts);
  } catch (const Error& err) {
    throw ConfigError(points ? "e.points" : "e.angles", err.what());
  }
}

template <class F>
std::vector<Json> run_trials(int count, F&& f) {
  std::vector<Json> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int section, int trial) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(section) * 1000003ULL + static_cast<std::uint64_t>(trial));
}

const Json& section_json(const ExperimentConfig& cfg, const std::string& name) {
  static const Json empty = Json::object();
  return cfg.sections.contains(name) ? cfg.sections.at(name) : empty;
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  for (const std::string& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

std::string num(double x) { return format_double(x); }

int max_peripheral(const ExperimentConfig& cfg) {
  return std::min<int>(cfg.dim, static_cast<int>(cfg.e.size()));
}

struct Section {
  Json summary = Json::object();
  std::vector<std::pair<std::string, std::string>> tables;
  bool passed = true;
};

Section run_classify(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "classify"), "classify");
  const int count = f.integer("count", cfg.count, 1, 1000);
  const bool samples = f.boolean("samples_csv", true);
  const Json* matrices = f.raw("matrices");
  f.finish();
  std::vector<CMatrix> explicit_ms;
  if (matrices) {
    if (!matrices->is_array()) throw ConfigError("classify.matrices", "must be an array");
    for (std::size_t i = 0; i < matrices->size(); ++i) {
      try {
        explicit_ms.push_back(matrix_from_json((*matrices)[i]));
      } catch (const std::exception& err) {
        throw ConfigError("classify.matrices[" + std::to_string(i) + "]", err.what());
      }
      if (explicit_ms.back().rows() != explicit_ms.back().cols() || explicit_ms.back().rows() > 16) {
        throw ConfigError("classify.matrices[" + std::to_string(i) + "]", "must be square with dim <= 16");
      }
    }
  }

  const int total = count + static_cast<int>(explicit_ms.size());
  std::vector<RittCertificate> certs(static_cast<std::size_t>(total));
  const std::vector<Json> rows = run_trials(total, [&](int i) {
    const bool generated = i < count;
    const CMatrix t = generated ? gen_ritt_matrix(cfg.e, cfg.r, cfg.dim, cfg.peripheral_count, cfg.cond_cap,
                                                  trial_seed(cfg, 1, i), {false, 1})
                                : explicit_ms[static_cast<std::size_t>(i - count)];
    certs[static_cast<std::size_t>(i)] = classify_ritt(t, cfg.e);
    Json row = certificate_to_json(certs[static_cast<std::size_t>(i)]);
    row["trial"] = i;
    row["generated"] = generated;
    return row;
  });

  Section s;
  std::string table = csv_line({"trial", "generated", "verdict", "m_estimate", "r"});
  int passes = 0;
  for (int i = 0; i < total; ++i) {
    const RittCertificate& c = certs[static_cast<std::size_t>(i)];
    table += csv_line({std::to_string(i), i < count ? "1" : "0", to_string(c.verdict), num(c.m_estimate), num(c.r)});
    if (i < count && c.verdict == Verdict::Pass) ++passes;
    if (samples) s.tables.emplace_back("classify_samples_" + std::to_string(i) + ".csv", certificate_csv(c));
  }
  s.tables.insert(s.tables.begin(), {"classify.csv", table});
  s.summary["certificates"] = rows;
  s.summary["generated_pass"] = passes;
  s.summary["generated"] = count;
  s.passed = passes == count;
  return s;
}

Section run_coeffs(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "coeffs"), "coeffs");
  const int m_max = f.integer("m_max", 200, 0, 100000);
  const double tol = f.real("tol", 1e-12, 0.0, 1.0);
  f.finish();
  const TaylorCoeffs tc = taylor_coeffs(cfg.e, m_max);
  const std::vector<Complex> rec = a_coeffs_recursive(cfg.e, m_max);
  double diff = 0.0, top = 0.0;
  std::string table = csv_line({"m", "re_a", "im_a"});
  for (int m = 0; m <= m_max; ++m) {
    const auto k = static_cast<std::size_t>(m);
    diff = std::max(diff, std::abs(rec[k] - tc.a[k]));
    top = std::max(top, std::abs(tc.a[k]));
    table += csv_line({std::to_string(m), num(tc.a[k].real()), num(tc.a[k].imag())});
  }
  Section s;
  Json beta = Json::array();
  for (Complex b : tc.beta) beta.push_back(complex_to_json(b));
  s.summary = {{"m_max", m_max},
               {"recursion_vs_partial_fractions", diff},
               {"beta", beta},
               {"beta_l1", tc.beta_l1()},
               {"max_abs_a", top}};
  s.tables.emplace_back("coeffs.csv", table);
  s.passed = diff <= tol && top <= tc.beta_l1() * (1.0 + 1e-12);
  return s;
}

double dense_unitarity(const CMatrix& v) { return opnorm(v.adjoint() * v - identity(static_cast<int>(v.rows()))); }

Section run_dilate(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "dilate"), "dilate");
  const int count = f.integer("count", cfg.count, 1, 1000);
  const int n_max = f.integer("n_max", 20, 0, 200);
  const double tol = f.real("tol", 1e-8, 0.0, 1.0, true);
  const int schaffer_budget = f.integer("schaffer_budget", 12, 1, 200);
  const int ando_budget = f.integer("ando_budget", 8, 1, 64);
  const double schaffer_tol = f.real("schaffer_tol", 1e-10, 0.0, 1.0, true);
  const double ando_tol = f.real("ando_tol", 1e-8, 0.0, 1.0, true);
  const double unitary_tol = f.real("unitary_tol", 1e-12, 0.0, 1.0, true);
  const double commute_tol = f.real("commute_tol", 1e-10, 0.0, 1.0, true);
  f.finish();

  const int kinds = std::min(max_peripheral(cfg), 2) + 1;
  const std::vector<Json> rows = run_trials(count, [&](int i) {
    const std::uint64_t seed = trial_seed(cfg, 3, i);
    Rng rng(seed);
    const int peripheral = i % kinds;
    const CMatrix t = gen_ritt_matrix(cfg.e, cfg.r, cfg.dim, peripheral, cfg.cond_cap, derive_seed(seed, 1));
    SpecificDilationOptions opts;
    opts.n_max = n_max;
    opts.tol = tol;
    opts.verify_ritt = false;
    const TruncatedDilation dil = specific_dilation(t, cfg.e, opts);
    const double err = dilation_check(dil, t, n_max);
    const double v_unitary = dense_unitarity(dil.v.dense());

    CMatrix c = rng.gaussian(cfg.dim, cfg.dim);
    c /= opnorm(c);
    const ContractionDilation sch = schaffer_dilation(c, (schaffer_budget + 1) / 2);
    const double sch_err = schaffer_check(sch, c, schaffer_budget);

    const std::vector<CMatrix> normal_pair =
        gen_commuting_tuple(2, cfg.dim, {TupleKind::SharedSimilarity, 1.0, 1.0, 0.0}, derive_seed(seed, 2));
    const AndoDilation ad = ando_dilation(normal_pair[0], normal_pair[1], ando_budget);
    const double ando_err = ando_check(ad, normal_pair[0], normal_pair[1], ando_budget);
    const double ando_comm = opnorm(ad.v1 * ad.v2 - ad.v2 * ad.v1);
    const double ando_unitary = std::max(dense_unitarity(ad.v1), dense_unitarity(ad.v2));

    std::vector<CMatrix> poly_pair =
        gen_commuting_tuple(2, cfg.dim, {TupleKind::Polynomial, 1.0, 0.9, 0.3}, derive_seed(seed, 3));
    for (CMatrix& p : poly_pair) p /= std::max(1.0, opnorm(p));
    const AndoDilation ag = ando_dilation(poly_pair[0], poly_pair[1], ando_budget);
    const double general_err = ando_check(ag, poly_pair[0], poly_pair[1], ando_budget);

    return Json{{"trial", i},
                {"peripheral", peripheral},
                {"error", err},
                {"certified_error", dil.certified_error},
                {"k_max", dil.k_max},
                {"space_dim", dil.space_dim()},
                {"norm_j", opnorm(dil.j)},
                {"norm_q", opnorm(dil.q)},
                {"v_unitarity", v_unitary},
                {"schaffer_error", sch_err},
                {"ando_error", ando_err},
                {"ando_doubly_commuting", ad.doubly_commuting},
                {"ando_commutator", ando_comm},
                {"ando_unitarity", ando_unitary},
                {"ando_general_error", general_err},
                {"ando_general_doubly_commuting", ag.doubly_commuting}};
  });

  Section s;
  std::string table = csv_line({"trial", "peripheral", "error", "k_max", "norm_j", "norm_q", "schaffer_error",
                                "ando_error", "ando_commutator", "ando_general_error"});
  for (const Json& r : rows) {
    table += csv_line({std::to_string(r["trial"].get<int>()), std::to_string(r["peripheral"].get<int>()),
                       num(r["error"]), std::to_string(r["k_max"].get<int>()), num(r["norm_j"]), num(r["norm_q"]),
                       num(r["schaffer_error"]), num(r["ando_error"]), num(r["ando_commutator"]),
                       num(r["ando_general_error"])});
    s.passed = s.passed && r["error"].get<double>() <= tol && r["v_unitarity"].get<double>() <= unitary_tol &&
               r["schaffer_error"].get<double>() <= schaffer_tol && r["ando_error"].get<double>() <= ando_tol &&
               r["ando_general_error"].get<double>() <= ando_tol && r["ando_commutator"].get<double>() <= commute_tol &&
               r["ando_unitarity"].get<double>() <= unitary_tol;
  }
  s.summary["trials"] = rows;
  s.tables.emplace_back("dilate.csv", table);
  return s;
}

Section run_vn(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "vn"), "vn");
  const int count = f.integer("count", std::min(cfg.count, 3), 1, 100);
  const int d = f.integer("d", 2, 1, 3);
  const int degree = f.integer("degree", 8, 1, 20);
  const int polys = f.integer("polys", 200, 1, 100000);
  const int grid = f.integer("grid", d <= 2 ? 64 : 24, 4, 4096);
  const int contraction_trials = f.integer("contraction_trials", count, 0, 1000);
  const double tol = f.real("tol", 1e-6, 0.0, 1.0);
  const double vn_tol = f.real("von_neumann_tol", 1e-9, 0.0, 1.0);
  f.finish();

  Section s;
  std::string table = csv_line({"kind", "trial", "poly", "ratio"});
  Json tuples = Json::array();
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = trial_seed(cfg, 4, i);
    const std::vector<CMatrix> ts =
        gen_ritt_tuple(d, cfg.e, cfg.r, cfg.dim, std::min(cfg.peripheral_count, max_peripheral(cfg)), cfg.cond_cap, seed);
    const JointDilation jd = dilate_tuple(ts, cfg.e, degree);
    const double bound = jd.norm_j() * jd.norm_q();
    const std::vector<Json> ratios = run_trials(polys, [&](int p) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p) + 1));
      const MultiPoly phi = MultiPoly::random(d, rng.uniform_int(1, degree), rng);
      return Json(vn_ratio(ts, phi, TorusDomain{grid}));
    });
    double worst = 0.0;
    for (int p = 0; p < polys; ++p) {
      const double r = ratios[static_cast<std::size_t>(p)].get<double>();
      worst = std::max(worst, r);
      table += csv_line({"tuple", std::to_string(i), std::to_string(p), num(r)});
    }
    tuples.push_back({{"trial", i}, {"max_ratio", worst}, {"norm_j_norm_q", bound}, {"total_dim", jd.total_dim}});
    s.passed = s.passed && worst <= bound + tol;
  }

  Json contractions = Json::array();
  for (int i = 0; i < contraction_trials; ++i) {
    const std::uint64_t seed = trial_seed(cfg, 5, i);
    Rng rng(seed);
    CMatrix t = rng.gaussian(cfg.dim, cfg.dim);
    t /= opnorm(t);
    const std::vector<Json> ratios = run_trials(polys, [&](int p) {
      Rng prng(derive_seed(seed, static_cast<std::uint64_t>(p) + 1));
      const MultiPoly phi = MultiPoly::random(1, prng.uniform_int(1, degree), prng);
      return Json(vn_ratio({t}, phi, TorusDomain{4096}));
    });
    double worst = 0.0;
    for (int p = 0; p < polys; ++p) {
      const double r = ratios[static_cast<std::size_t>(p)].get<double>();
      worst = std::max(worst, r);
      table += csv_line({"contraction", std::to_string(i), std::to_string(p), num(r)});
    }
    contractions.push_back({{"trial", i}, {"max_ratio", worst}});
    s.passed = s.passed && worst <= 1.0 + vn_tol;
  }
  s.summary = {{"d", d}, {"degree", degree}, {"polys", polys}, {"tuples", tuples}, {"contractions", contractions}};
  s.tables.emplace_back("vn.csv", table);
  return s;
}

Section run_similarity(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "similarity"), "similarity");
  const int count = f.integer("count", cfg.count, 1, 1000);
  const int d = f.integer("d", 2, 1, 3);
  SimilarityOptions opts;
  opts.max_iter = f.integer("max_iter", opts.max_iter, 1, 1000000);
  opts.margin_tol = f.real("margin_tol", opts.margin_tol, 0.0, 1.0, true);
  f.finish();

  const std::vector<Json> rows = run_trials(count + 1, [&](int i) {
    std::vector<CMatrix> ts;
    std::string kind;
    if (i == count) {
      ts = {jordan_fixture()};
      kind = "jordan";
    } else if (i % 2 == 0) {
      ts = gen_commuting_tuple(d, cfg.dim, {TupleKind::SharedSimilarity, cfg.cond_cap, 1.0, 0.0}, trial_seed(cfg, 6, i));
      kind = "diagonalizable";
    } else {
      ts = gen_ritt_tuple(d, cfg.e, cfg.r, cfg.dim, std::min(cfg.peripheral_count, max_peripheral(cfg)), cfg.cond_cap,
                          trial_seed(cfg, 6, i));
      kind = "peripheral";
    }
    const SimilarityResult res = try_joint_similarity(ts, opts);
    double margin = 0.0;
    for (double m : res.margins) margin = std::max(margin, m);
    if (!res.feasible) {
      for (double m : similarity_margins(res.p.size() ? res.p : identity(static_cast<int>(ts[0].rows())), ts)) {
        margin = std::max(margin, m);
      }
    }
    return Json{{"trial", i},
                {"kind", kind},
                {"feasible", res.feasible},
                {"iterations", res.iterations},
                {"max_margin", margin},
                {"condition", res.condition}};
  });

  Section s;
  std::string table = csv_line({"trial", "kind", "feasible", "iterations", "max_margin", "condition"});
  for (const Json& r : rows) {
    table += csv_line({std::to_string(r["trial"].get<int>()), r["kind"].get<std::string>(),
                       r["feasible"].get<bool>() ? "1" : "0", std::to_string(r["iterations"].get<int>()),
                       num(r["max_margin"]), num(r["condition"])});
    if (r["kind"] == "jordan") {
      s.passed = s.passed && !r["feasible"].get<bool>();
    } else {
      s.passed = s.passed && r["feasible"].get<bool>() && r["max_margin"].get<double>() <= 1.0 + opts.margin_tol;
    }
  }
  s.summary["trials"] = rows;
  s.tables.emplace_back("similarity.csv", table);
  return s;
}

Section run_funcalc(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "funcalc"), "funcalc");
  const int count = f.integer("count", std::min(cfg.count, 3), 1, 100);
  const int degree_1d = f.integer("degree_1d", 20, 1, 60);
  const int degree_2d = f.integer("degree_2d", 8, 1, 20);
  const int nodes_1d = f.integer("nodes_1d", 64, 4, 1024);
  const int nodes_2d = f.integer("nodes_2d", 48, 4, 1024);
  const double tol_1d = f.real("tol_1d", 1e-8, 0.0, 1.0);
  const double tol_2d = f.real("tol_2d", 1e-6, 0.0, 1.0);
  const double tol_poly = f.real("tol_polygonal", 1e-7, 0.0, 1.0);
  const double winding_tol = f.real("winding_tol", 1e-10, 0.0, 1.0);
  const int cert_tuples = f.integer("cert_tuples", count, 0, 100);
  const int cert_d = f.integer("cert_d", 2, 1, 3);
  CertificateOptions copts;
  copts.deg_max = f.integer("cert_deg_max", copts.deg_max, 2, 20);
  copts.samples_per_degree = f.integer("cert_samples", copts.samples_per_degree, 3, 10000);
  copts.samples_per_piece = f.integer("cert_samples_per_piece", cert_d == 3 ? 6 : copts.samples_per_piece, 2, 1024);
  f.finish();

  Section s;
  const ContourRegion er = build_Er(cfg.e, cfg.r);
  const ContourRegion poly = enclosing_polygon(cfg.e, cfg.r);
  double winding_err = 0.0;
  for (const ContourRegion* reg : {&er, &poly}) {
    const ContourQuadrature q = ContourQuadrature::build(*reg, nodes_1d);
    winding_err = std::max(winding_err, std::abs(winding(q, 0.0) - 1.0));
    winding_err = std::max(winding_err, std::abs(winding(q, 0.5 * cfg.r * cfg.e[0]) - 1.0));
    winding_err = std::max(winding_err, std::abs(winding(q, 1.5)));
  }
  s.passed = winding_err <= winding_tol;

  const ContourQuadrature q1 = ContourQuadrature::build(er, nodes_1d);
  const ContourQuadrature q2 = ContourQuadrature::build(er, nodes_2d);
  const std::vector<Json> rows = run_trials(count, [&](int i) {
    const std::uint64_t seed = trial_seed(cfg, 7, i);
    Rng rng(seed);
    const CMatrix t = gen_ritt_matrix(cfg.e, cfg.r, cfg.dim, 0, cfg.cond_cap, derive_seed(seed, 1));
    const MultiPoly phi1 = MultiPoly::random(1, degree_1d, rng);
    const CMatrix direct1 = eval_multipoly(phi1, {t});
    const double err1 = opnorm(contour_eval_1d(phi1, t, q1) - direct1) / (1.0 + opnorm(direct1));

    const std::vector<CMatrix> ts = gen_ritt_tuple(2, cfg.e, cfg.r, cfg.dim, 0, cfg.cond_cap, derive_seed(seed, 2));
    const MultiPoly phi2 = MultiPoly::random(2, degree_2d, rng);
    const CMatrix direct2 = eval_multipoly(phi2, ts);
    const double err2 = opnorm(contour_eval_multi(phi2, ts, q2) - direct2) / (1.0 + opnorm(direct2));

    const CMatrix tp = gen_ritt_matrix(cfg.e, cfg.r, cfg.dim, std::min(cfg.peripheral_count, max_peripheral(cfg)),
                                       cfg.cond_cap, derive_seed(seed, 3));
    const CMatrix directp = eval_multipoly(phi1, {tp});
    const double errp = opnorm(polygonal_calculus(phi1, tp, cfg.e, cfg.r, nodes_1d) - directp) / (1.0 + opnorm(directp));
    return Json{{"trial", i}, {"error_1d", err1}, {"error_2d", err2}, {"error_polygonal", errp}};
  });
  std::string table = csv_line({"trial", "error_1d", "error_2d", "error_polygonal"});
  for (const Json& r : rows) {
    table += csv_line({std::to_string(r["trial"].get<int>()), num(r["error_1d"]), num(r["error_2d"]),
                       num(r["error_polygonal"])});
    s.passed = s.passed && r["error_1d"].get<double>() <= tol_1d && r["error_2d"].get<double>() <= tol_2d &&
               r["error_polygonal"].get<double>() <= tol_poly;
  }

  Json certs = Json::array();
  std::string degree_table = csv_line({"tuple", "degree", "max_ratio", "mean_log_ratio"});
  for (int i = 0; i < cert_tuples; ++i) {
    const std::uint64_t seed = trial_seed(cfg, 8, i);
    const std::vector<CMatrix> ts = gen_ritt_tuple(cert_d, cfg.e, cfg.r, cfg.dim,
                                                   std::min(cfg.peripheral_count, max_peripheral(cfg)), cfg.cond_cap, seed);
    const BoundedRatioCertificate c = bounded_ratio_certificate(ts, cfg.e, cfg.r, derive_seed(seed, 1), copts);
    for (const DegreeRatios& dr : c.per_degree) {
      degree_table += csv_line({std::to_string(i), std::to_string(dr.degree), num(dr.max_ratio), num(dr.mean_log_ratio)});
    }
    certs.push_back({{"tuple", i},
                     {"passed", c.passed},
                     {"slope", c.slope},
                     {"p_value", c.p_value},
                     {"max_ratio", c.max_ratio},
                     {"samples", c.samples},
                     {"peripheral_bounds", c.peripheral_bounds},
                     {"similarity_feasible", c.similarity_feasible}});
    s.passed = s.passed && c.passed;
  }
  s.summary = {{"winding_error", winding_err},
               {"trials", rows},
               {"certificates", certs},
               {"certificate_method", "bounded-ratio slope test on sampled polynomials"}};
  s.tables.emplace_back("funcalc.csv", table);
  s.tables.emplace_back("funcalc_degree.csv", degree_table);
  return s;
}

Section run_squarefn(const ExperimentConfig& cfg) {
  Fields f(section_json(cfg, "squarefn"), "squarefn");
  const int count = f.integer("count", std::min(cfg.count, 3), 1, 1000);
  const int trials = f.integer("trials", 8, 0, 10000);
  f.finish();
  const std::vector<Json> rows = run_trials(count, [&](int i) {
    const std::uint64_t seed = trial_seed(cfg, 9, i);
    const CMatrix t = gen_ritt_matrix(cfg.e, cfg.r, cfg.dim, std::min(cfg.peripheral_count, max_peripheral(cfg)),
                                      cfg.cond_cap, seed);
    return Json{{"trial", i}, {"constant", square_constant_estimate(t, cfg.e, trials, derive_seed(seed, 1))}};
  });
  Section s;
  std::string table = csv_line({"trial", "constant"});
  for (const Json& r : rows) {
    table += csv_line({std::to_string(r["trial"].get<int>()), num(r["constant"])});
    s.passed = s.passed && std::isfinite(r["constant"].get<double>());
  }
  s.summary["trials"] = rows;
  s.tables.emplace_back("squarefn.csv", table);
  return s;
}

Section run_section(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "classify") return run_classify(cfg);
  if (name == "coeffs") return run_coeffs(cfg);
  if (name == "dilate") return run_dilate(cfg);
  if (name == "vn") return run_vn(cfg);
  if (name == "similarity") return run_similarity(cfg);
  if (name == "funcalc") return run_funcalc(cfg);
  if (name == "squarefn") return run_squarefn(cfg);
  throw Error(ErrorKind::InvalidInput, "unknown subcommand \"" + name + "\"");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("<document>", "JSON syntax error at line " + std::to_string(line) + ", column " +
                                        std::to_string(col));
  }
  Fields f(doc, "");
  ExperimentConfig cfg;
  if (const Json* seed = f.raw("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
      throw ConfigError("seed", "must be a non-negative integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }
  if (const Json* e = f.raw("e")) cfg.e = parse_e(*e);
  cfg.r = f.real("r", cfg.r, 0.0, 1.0, true, true);
  cfg.dim = f.integer("dim", cfg.dim, 1, 16);
  cfg.count = f.integer("count", cfg.count, 1, 1000);
  cfg.peripheral_count = f.integer("peripheral_count", cfg.peripheral_count, 0, 16);
  if (cfg.peripheral_count > max_peripheral(cfg)) {
    throw ConfigError("peripheral_count", "must not exceed min(dim, number of points in e)");
  }
  cfg.cond_cap = f.real("cond_cap", cfg.cond_cap, 1.0, 1e6);
  for (const std::string& name : kSections) {
    if (const Json* sec = f.raw(name)) {
      if (!sec->is_object()) throw ConfigError(name, "must be a JSON object");
      cfg.sections[name] = *sec;
    }
  }
  f.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<document>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kSections;
    v.emplace_back("full-suite");
    return v;
  }();
  return all;
}

Report run_experiment(const std::string& subcommand, const ExperimentConfig& cfg) {
  Report report;
  report.subcommand = subcommand;
  const std::vector<std::string> names = subcommand == "full-suite" ? kSections : std::vector<std::string>{subcommand};
  if (subcommand != "full-suite" && std::find(kSections.begin(), kSections.end(), subcommand) == kSections.end()) {
    throw Error(ErrorKind::InvalidInput, "unknown subcommand \"" + subcommand + "\"");
  }
  Json sections = Json::object();
  report.passed = true;
  const auto start = std::chrono::steady_clock::now();
  for (const std::string& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    Section s = run_section(name, cfg);
    report.timing[name + "_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    s.summary["passed"] = s.passed;
    sections[name] = std::move(s.summary);
    for (auto& t : s.tables) report.tables.push_back(std::move(t));
    report.passed = report.passed && s.passed;
  }
  report.timing["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.summary = {{"subcommand", subcommand}, {"seed", cfg.seed}, {"passed", report.passed}, {"sections", sections}};
  return report;
}

void write_report(const Report& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Json doc = report.summary;
  doc["timing"] = report.timing;
  std::ofstream(out_dir / "summary.json") << doc.dump(2) << '\n';
  for (const auto& [name, text] : report.tables) std::ofstream(out_dir / name) << text;
}

JointDilation dilate_tuple(const std::vector<CMatrix>& ts, const PointSetE& e, int n_max, double tol) {
  const int d = static_cast<int>(ts.size());
  if (d < 1 || d > 3) throw Error(ErrorKind::InvalidInput, "dilate_tuple supports 1 <= d <= 3");
  SpecificDilationOptions opts;
  opts.n_max = n_max;
  opts.tol = tol;
  const int m = d == 3 ? 1 : d;
  std::vector<TruncatedDilation> heads;
  for (int k = 0; k < m; ++k) heads.push_back(specific_dilation(ts[static_cast<std::size_t>(k)], e, opts));
  if (d < 3) return joint_dilation(ts, m, heads, tail_identity(static_cast<int>(ts[0].rows())));

  const SimilarityResult sim = joint_similarity({ts[1], ts[2]});
  const CMatrix s_inv = sim.s.partialPivLu().inverse();
  const CMatrix c1 = sim.s * ts[1] * s_inv;
  const CMatrix c2 = sim.s * ts[2] * s_inv;
  const AndoDilation ad = ando_dilation(c1, c2, n_max);
  return joint_dilation(ts, m, heads, tail_from_ando(ad, s_inv));
}

}  // namespace polycalc
