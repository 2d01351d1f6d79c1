#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cotrap {

// One code per contract-level failure mode. The C API maps these onto its
// status enum one to one; keep the numbering in sync with cotrap/cotrap.h.
enum class ErrorCode {
  ok = 0,
  invalid_argument = 1,
  non_positive_mass = 2,
  zero_charge = 3,
  constraint_violation = 4,
  no_stable_root = 5,
  perturbation_out_of_range = 6,
  regime_violation = 7,
  negative_discriminant = 8,
  sideband_too_large = 9,
  integration_diverged = 10,
  coincident_particles = 11,
  no_stable_equilibrium = 12,
  not_converged = 13,
  imaginary_frequency = 14,
  off_axis_layout = 15,
  not_positive_definite = 16,
  non_positive_temperature = 17,
  not_hurwitz = 18,
  division_by_zero = 19,
  non_physical_covariance = 20,
  parse_error = 21,
  schema_error = 22,
  unit_error = 23,
  io_error = 24,
  unknown_preset = 25,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Message building without <format> (not in this toolchain's libstdc++).
template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << parts);
  return os.str();
}

}  // namespace cotrap
