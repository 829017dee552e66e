#include "quasispec/common.hpp"

#include <cstdlib>
#include <thread>

namespace quasispec {

cd principal_sqrt(cd lambda) {
  if (lambda.imag() == 0.0) {
    if (lambda.real() >= 0.0) return {std::sqrt(lambda.real()), 0.0};
    return {0.0, std::sqrt(-lambda.real())};
  }
  return std::sqrt(lambda);
}

cd sinc(cd z) {
  if (std::abs(z) < 1e-3) {
    const cd z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
  }
  return std::sin(z) / z;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::IntegrationFailure: return "integration_failure";
    case ErrorKind::SingularArgument: return "singular_argument";
    case ErrorKind::Refusal: return "refusal";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::ContourTooClose: return "contour_too_close";
    case ErrorKind::Localization: return "localization";
    case ErrorKind::MultiplicityUndetermined: return "multiplicity_undetermined";
    case ErrorKind::DegenerateTrace: return "degenerate_trace";
    case ErrorKind::InconsistentMultiplicity: return "inconsistent_multiplicity";
    case ErrorKind::DegeneratePairing: return "degenerate_pairing";
    case ErrorKind::ContourConflict: return "contour_conflict";
    case ErrorKind::IllConditionedResolvent: return "ill_conditioned_resolvent";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

unsigned worker_threads() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("QUASISPEC_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = static_cast<unsigned>(cap);
  }
  return n;
}

}  // namespace quasispec
