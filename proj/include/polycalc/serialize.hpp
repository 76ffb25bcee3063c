#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "polycalc/ergodic.hpp"
#include "polycalc/numerics.hpp"
#include "polycalc/polygonal.hpp"

namespace polycalc {

using Json = nlohmann::ordered_json;

/// {"dim": n, "re": [[...]], "im": [[...]]}, row-major. Non-square matrices
/// carry "rows" and "cols" instead of "dim".
Json matrix_to_json(const CMatrix& a);
/// Inverse of matrix_to_json. Throws InvalidInput on malformed input.
CMatrix matrix_from_json(const Json& j);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

/// {"pieces": [{"type": "segment", "a": [re, im], "b": [re, im]} |
///             {"type": "arc", "center": [re, im], "radius": r, "theta_start": t0, "theta_end": t1}]}
Json region_to_json(const ContourRegion& region);
ContourRegion region_from_json(const Json& j);

Json certificate_to_json(const RittCertificate& cert);
/// Header "re_z,im_z,resolvent_norm,weighted_value" and one row per sample.
std::string certificate_csv(const RittCertificate& cert);

Json decomposition_to_json(const ErgodicDecomposition& dec);

/// Shortest round-trip text for a double.
std::string format_double(double x);

}  // namespace polycalc
