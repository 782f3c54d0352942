#include "bardina/report.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace bardina {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::skipped:
      return "skipped";
  }
  return "skipped";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "skipped") return Verdict::skipped;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

void CertificateReport::add(double t, double lhs, double rhs, double tol, Json extras) {
  samples.push_back({t, lhs, rhs, rhs - lhs, tol, std::move(extras)});
}

void CertificateReport::finalize() {
  if (samples.empty()) {
    verdict = Verdict::skipped;
    return;
  }
  const bool ok = std::all_of(samples.begin(), samples.end(),
                              [](const CertificateSample& s) { return s.slack >= -s.tolerance; });
  verdict = ok ? Verdict::pass : Verdict::fail;
}

double CertificateReport::margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    m = std::min(m, s.slack + s.tolerance);
  }
  return m;
}

Json to_json(const CertificateReport& r) {
  Json j;
  j["name"] = r.name;
  j["params"] = r.params;
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    Json e;
    e["t"] = s.t;
    e["lhs"] = s.lhs;
    e["rhs"] = s.rhs;
    e["slack"] = s.slack;
    e["tolerance"] = s.tolerance;
    for (const auto& [k, v] : s.extras.items()) {
      e[k] = v;
    }
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  j["tolerance"] = r.tolerance;
  j["verdict"] = to_string(r.verdict);
  j["warnings"] = r.warnings;
  return j;
}

CertificateReport report_from_json(const Json& j) {
  CertificateReport r;
  r.name = j.at("name").get<std::string>();
  r.params = j.at("params");
  for (const auto& e : j.at("samples")) {
    CertificateSample s;
    s.t = e.at("t").get<double>();
    s.lhs = e.at("lhs").get<double>();
    s.rhs = e.at("rhs").get<double>();
    s.slack = e.at("slack").get<double>();
    s.tolerance = e.value("tolerance", 0.0);
    for (const auto& [k, v] : e.items()) {
      if (k != "t" && k != "lhs" && k != "rhs" && k != "slack" && k != "tolerance") {
        s.extras[k] = v;
      }
    }
    r.samples.push_back(std::move(s));
  }
  r.tolerance = j.at("tolerance");
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace bardina
