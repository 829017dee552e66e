#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace quasispec {

using cd = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cd kI{0.0, 1.0};

/// Square root with arg in (-pi/2, pi/2]; the negative real axis maps to the
/// positive imaginary axis regardless of the sign of a zero imaginary part.
cd principal_sqrt(cd lambda);

/// sin(z)/z, entire.
cd sinc(cd z);

enum class ErrorKind {
  Domain,
  Argument,
  Parse,
  IntegrationFailure,
  SingularArgument,
  Refusal,
  Convergence,
  ContourTooClose,
  Localization,
  MultiplicityUndetermined,
  DegenerateTrace,
  InconsistentMultiplicity,
  DegeneratePairing,
  ContourConflict,
  IllConditionedResolvent,
};

const char* to_string(ErrorKind kind);

/// Library error. `location` carries the x at which an integration failed;
/// `center`/`radius` describe the offending disk of a localization failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

  std::optional<double> location;
  std::optional<cd> center;
  std::optional<double> radius;

 private:
  ErrorKind kind_;
};

/// Number of worker threads: QUASISPEC_THREADS if set, hardware concurrency otherwise.
unsigned worker_threads();

}  // namespace quasispec
