/**
 * @brief Calibration table of empirical constants, one per inequality name.
 *
 * A calibration run stores the largest lhs/rhs seen per name. Later runs
 * fail a record when lhs > (1 + tolerance) c rhs. The table version is the
 * FNV-1a hash of the file bytes.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2lab/error.hpp"
#include "s2lab/harness.hpp"

namespace s2lab {

inline constexpr double kRegressionTolerance = 0.05;

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct CalibrationTable {
  double tolerance = kRegressionTolerance;
  std::map<std::string, double> constants;
  /// Hash of the serialized form this table was read from or written as.
  std::string version;

  double constant(const std::string& name) const {
    const auto it = constants.find(name);
    if (it == constants.end()) throw DomainError("calibration: no constant for " + name);
    return it->second;
  }
};

/// Deterministic text form: sorted keys, %.17g values.
inline std::string serialize(const CalibrationTable& t) {
  std::ostringstream os;
  os << "{\n  \"format\": \"s2lab-calibration-1\",\n  \"tolerance\": "
     << format_double(t.tolerance) << ",\n  \"constants\": {";
  bool first = true;
  for (const auto& [name, c] : t.constants) {
    os << (first ? "\n" : ",\n") << "    " << nlohmann::json(name).dump() << ": "
       << format_double(c);
    first = false;
  }
  os << (first ? "}\n}\n" : "\n  }\n}\n");
  return os.str();
}

inline CalibrationTable parse_calibration(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("calibration: ") + e.what());
  }
  if (!j.is_object() || !j.contains("constants") || !j["constants"].is_object())
    throw DomainError("calibration: missing constants object");
  CalibrationTable t;
  if (j.contains("tolerance")) t.tolerance = j["tolerance"].get<double>();
  for (const auto& [name, v] : j["constants"].items()) {
    if (!v.is_number()) throw DomainError("calibration: non-numeric constant " + name);
    t.constants[name] = v.get<double>();
  }
  t.version = hex64(fnv1a64(text));
  return t;
}

inline CalibrationTable load_calibration(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("calibration: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_calibration(ss.str());
}

inline void save_calibration(const std::string& path, CalibrationTable& t) {
  const std::string text = serialize(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("calibration: cannot write " + path);
  out << text;
  t.version = hex64(fnv1a64(text));
}

/// Largest empirical constant per name over the calibrated, non-skipped
/// records.
inline CalibrationTable calibrate(const std::vector<InequalityRecord>& records) {
  CalibrationTable t;
  for (const auto& r : records) {
    if (!r.calibrated || r.skipped) continue;
    auto [it, fresh] = t.constants.emplace(r.name, r.empirical_constant);
    if (!fresh) it->second = std::max(it->second, r.empirical_constant);
  }
  t.version = hex64(fnv1a64(serialize(t)));
  return t;
}

struct Regression {
  InequalityRecord record;
  /// c from the table; NaN when the name is missing.
  double constant;
};

/// lhs > (1 + tolerance) c rhs, or no table entry for the name.
inline bool regressed(const InequalityRecord& r, const CalibrationTable& t) {
  if (!r.calibrated || r.skipped) return false;
  const auto it = t.constants.find(r.name);
  if (it == t.constants.end()) return true;
  return !(r.lhs <= (1.0 + t.tolerance) * it->second * r.rhs);
}

inline std::vector<Regression> check_calibration(const std::vector<InequalityRecord>& records,
                                                 const CalibrationTable& t) {
  std::vector<Regression> bad;
  for (const auto& r : records) {
    if (!regressed(r, t)) continue;
    const auto it = t.constants.find(r.name);
    bad.push_back({r, it == t.constants.end() ? kNaN : it->second});
  }
  return bad;
}

}  // namespace s2lab
