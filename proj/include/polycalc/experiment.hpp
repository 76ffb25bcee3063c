#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "polycalc/dilation.hpp"
#include "polycalc/polygonal.hpp"
#include "polycalc/serialize.hpp"

namespace polycalc {

/// Validation failure that names the offending config field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorKind::InvalidInput, "config field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  PointSetE e = PointSetE::roots_of_unity(3);
  double r = 0.5;
  int dim = 6;
  int count = 5;
  int peripheral_count = 1;
  double cond_cap = 10.0;
  /// Per-subcommand sections, validated when the subcommand runs.
  Json sections = Json::object();
};

/// Parses and validates a JSON config document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

const std::vector<std::string>& subcommands();

struct Report {
  std::string subcommand;
  Json summary;  // deterministic content
  std::vector<std::pair<std::string, std::string>> tables;  // file name, CSV text
  Json timing = Json::object();
  bool passed = false;
};

/// Runs classify | coeffs | dilate | vn | similarity | funcalc | squarefn |
/// full-suite.
Report run_experiment(const std::string& subcommand, const ExperimentConfig& cfg);

/// summary.json (summary plus a "timing" object) and one file per table.
void write_report(const Report& report, const std::filesystem::path& out_dir);

/// Joint dilation of a commuting tuple whose operators are Ritt for E:
/// specific dilations as heads (one head when d = 3, with an Ando tail of the
/// remaining pair after joint similarity), valid for exponents up to n_max.
JointDilation dilate_tuple(const std::vector<CMatrix>& ts, const PointSetE& e, int n_max, double tol = 1e-9);

}  // namespace polycalc
