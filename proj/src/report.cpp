#include "quasispec/report.hpp"

#include <cmath>
#include <cstdio>

namespace quasispec {
namespace {

void emit(std::string& out, const nlohmann::json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(key).dump();
        out += indent < 0 ? ":" : ": ";
        emit(out, value, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        emit(out, j[i], indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  emit(out, j, indent, 0);
  out += '\n';
  return out;
}

std::string potential_hash(const Potential& p) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump_json(potential_to_json(p), -1)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json report_metadata(const Potential* p, const nlohmann::json& tolerances) {
  nlohmann::json m = {{"version", kVersion},
                      {"norm_convention", kNormConvention},
                      {"tolerances", tolerances}};
  if (p) m["potential_hash"] = potential_hash(*p);
  return m;
}

nlohmann::json error_json(const Error& e) {
  nlohmann::json j = {{"kind", to_string(e.kind())}, {"message", e.what()}};
  if (e.location) j["location"] = *e.location;
  if (e.center) j["center"] = {e.center->real(), e.center->imag()};
  if (e.radius) j["radius"] = *e.radius;
  return {{"error", j}};
}

}  // namespace quasispec
