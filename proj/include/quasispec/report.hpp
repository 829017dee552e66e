#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "quasispec/potential.hpp"

namespace quasispec {

inline constexpr const char* kVersion = "quasispec 1.0.0";

/// Serializes j with every floating-point number printed as %.17g and keys
/// sorted; non-finite numbers become null. Byte-stable across runs.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// FNV-1a 64 of the canonical JSON of p, as 16 hex digits.
std::string potential_hash(const Potential& p);

/// Version, norm convention and the given tolerances; potential hash when p is set.
nlohmann::json report_metadata(const Potential* p, const nlohmann::json& tolerances);

/// Error payload: kind, message and the optional location/center/radius.
nlohmann::json error_json(const Error& e);

}  // namespace quasispec
