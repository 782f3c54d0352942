#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace bardina {

using Json = nlohmann::ordered_json;

enum class Verdict { pass, fail, skipped };

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CertificateSample {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  /// Extra per-sample diagnostics, serialized alongside the fixed fields.
  Json extras = Json::object();

  friend bool operator==(const CertificateSample&, const CertificateSample&) = default;
};

/// Outcome of one inequality check over a set of time samples.
/// The verdict is pass iff slack >= -tolerance on every sample.
struct CertificateReport {
  std::string name;
  Json params = Json::object();
  std::vector<CertificateSample> samples;
  /// Description of how per-sample tolerances were built.
  Json tolerance = Json::object();
  Verdict verdict = Verdict::skipped;
  std::vector<std::string> warnings;

  /// Appends a sample with slack = rhs - lhs.
  void add(double t, double lhs, double rhs, double tol, Json extras = Json::object());
  /// Sets the verdict from the samples (no samples: skipped).
  void finalize();
  /// Smallest slack + tolerance over the samples (+inf when empty).
  double margin() const;
  bool passed() const { return verdict == Verdict::pass; }

  friend bool operator==(const CertificateReport&, const CertificateReport&) = default;
};

Json to_json(const CertificateReport& r);
CertificateReport report_from_json(const Json& j);

}  // namespace bardina
