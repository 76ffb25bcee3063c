#include "polycalc/serialize.hpp"

#include <charconv>
#include <sstream>

namespace polycalc {

namespace {

Json point(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

Json matrix_to_json(const CMatrix& a) {
  Json out = Json::object();
  if (a.rows() == a.cols()) {
    out["dim"] = a.rows();
  } else {
    out["rows"] = a.rows();
    out["cols"] = a.cols();
  }
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      rr.push_back(a(i, k).real());
      ri.push_back(a(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re")) throw Error(ErrorKind::InvalidInput, "matrix needs a \"re\" array");
  const Json& re = j.at("re");
  if (!re.is_array() || re.empty()) throw Error(ErrorKind::InvalidInput, "matrix \"re\" must be a non-empty array");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re.at(0).size());
  if (j.contains("dim") && (j.at("dim").get<Eigen::Index>() != rows || rows != cols)) {
    throw Error(ErrorKind::InvalidInput, "matrix \"dim\" disagrees with the data");
  }
  CMatrix a = CMatrix::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = re.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::InvalidInput, "matrix rows must have equal length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) a(i, k).real(row.at(static_cast<std::size_t>(k)).get<double>());
  }
  if (j.contains("im")) {
    const Json& im = j.at("im");
    if (!im.is_array() || static_cast<Eigen::Index>(im.size()) != rows) {
      throw Error(ErrorKind::InvalidInput, "matrix \"im\" shape differs from \"re\"");
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Json& row = im.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw Error(ErrorKind::InvalidInput, "matrix \"im\" shape differs from \"re\"");
      }
      for (Eigen::Index k = 0; k < cols; ++k) a(i, k).imag(row.at(static_cast<std::size_t>(k)).get<double>());
    }
  }
  return a;
}

Json complex_to_json(Complex z) { return point(z); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::InvalidInput, "complex number must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json region_to_json(const ContourRegion& region) {
  Json pieces = Json::array();
  for (const Piece& p : region.pieces) {
    if (const auto* s = std::get_if<Segment>(&p)) {
      pieces.push_back({{"type", "segment"}, {"a", point(s->a)}, {"b", point(s->b)}});
    } else {
      const auto& a = std::get<Arc>(p);
      pieces.push_back({{"type", "arc"},
                        {"center", point(a.center)},
                        {"radius", a.radius},
                        {"theta_start", a.theta_start},
                        {"theta_end", a.theta_end}});
    }
  }
  return {{"pieces", std::move(pieces)}};
}

ContourRegion region_from_json(const Json& j) {
  ContourRegion region;
  for (const Json& p : j.at("pieces")) {
    const std::string type = p.at("type").get<std::string>();
    if (type == "segment") {
      region.pieces.emplace_back(Segment{complex_from_json(p.at("a")), complex_from_json(p.at("b"))});
    } else if (type == "arc") {
      region.pieces.emplace_back(Arc{complex_from_json(p.at("center")), p.at("radius").get<double>(),
                                     p.at("theta_start").get<double>(), p.at("theta_end").get<double>()});
    } else {
      throw Error(ErrorKind::InvalidInput, "unknown piece type \"" + type + "\"");
    }
  }
  return region;
}

Json certificate_to_json(const RittCertificate& cert) {
  Json e = Json::array();
  for (Complex xi : cert.e.points()) e.push_back(point(xi));
  return {{"e", std::move(e)},
          {"verdict", to_string(cert.verdict)},
          {"reason", cert.reason},
          {"m_estimate", cert.m_estimate},
          {"level_estimates", cert.level_estimates},
          {"r", cert.r},
          {"approach_min", cert.approach_min},
          {"samples", cert.samples.size()}};
}

std::string certificate_csv(const RittCertificate& cert) {
  std::ostringstream out;
  out << "re_z,im_z,resolvent_norm,weighted_value\n";
  for (const RittSample& s : cert.samples) {
    out << format_double(s.z.real()) << ',' << format_double(s.z.imag()) << ',' << format_double(s.resolvent_norm)
        << ',' << format_double(s.weighted()) << '\n';
  }
  return out.str();
}

Json decomposition_to_json(const ErgodicDecomposition& dec) {
  Json projections = Json::array();
  for (std::size_t j = 0; j < dec.projections.size(); ++j) {
    projections.push_back({{"xi", point(dec.e[j])}, {"projection", matrix_to_json(dec.projections[j])}});
  }
  return {{"route", dec.route == ProjectionRoute::Riesz ? "riesz" : "cesaro"},
          {"power_bound", dec.power_bound},
          {"projections", std::move(projections)},
          {"range_projection", matrix_to_json(dec.range_projection)},
          {"cesaro_lengths", dec.cesaro_lengths},
          {"commutant_dim", dec.commutant.size()}};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace polycalc
