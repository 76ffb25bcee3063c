#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polycalc {

enum class ErrorKind {
  InvalidInput,
  SingularResolvent,
  NotSectorial,
  DimensionOverflow,
  DegenerateRegion,
  SpectrumOutside,
  IllConditioned,
  NotConverged,
  NotSemisimple,
  NotPowerBounded,
  NotContraction,
  NotCommuting,
  IntertwineFailed,
  DegeneratePoly,
  Infeasible,
  SpectrumOnContour,
  BudgetExceeded,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::NotSectorial: return "NotSectorial";
    case ErrorKind::DimensionOverflow: return "DimensionOverflow";
    case ErrorKind::DegenerateRegion: return "DegenerateRegion";
    case ErrorKind::SpectrumOutside: return "SpectrumOutside";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NotSemisimple: return "NotSemisimple";
    case ErrorKind::NotPowerBounded: return "NotPowerBounded";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::IntertwineFailed: return "IntertwineFailed";
    case ErrorKind::DegeneratePoly: return "DegeneratePoly";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::SpectrumOnContour: return "SpectrumOnContour";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

}  // namespace polycalc
