#include "bardina/emit.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace bardina {

namespace {

std::string extra(const Json& extras, const char* key) {
  if (extras.is_object() && extras.contains(key) && extras[key].is_number()) {
    return format_double(extras[key].get<double>());
  }
  return {};
}

}  // namespace

std::string aggregate_csv(const std::vector<CertificateReport>& reports) {
  std::string out = "certificate,time,energy_L2,energy_Halpha,bound,slack\n";
  for (const auto& r : reports) {
    for (const auto& s : r.samples) {
      out += r.name + "," + format_double(s.t) + "," + extra(s.extras, "energy_L2") + "," +
             extra(s.extras, "energy_Halpha") + "," + format_double(s.rhs) + "," + format_double(s.slack) + "\n";
    }
  }
  return out;
}

std::string energy_csv(const Trajectory& traj) {
  std::string out = "time,energy_L2,energy_Halpha,bound,slack\n";
  if (traj.samples.empty()) {
    return out;
  }
  const double alpha = traj.params.alpha;
  const double gamma = traj.params.gamma;
  const double floor = std::pow(norm(traj.forcing, NormKind::l2()) / gamma, 2);
  const double e0 = std::pow(norm(traj.samples.front().state, NormKind::h_alpha(alpha)), 2);
  for (const auto& s : traj.samples) {
    const double l2 = std::pow(norm(s.state, NormKind::l2()), 2);
    const double ha = std::pow(norm(s.state, NormKind::h_alpha(alpha)), 2);
    const double bound = e0 * std::exp(-gamma * s.t) + floor;
    out += format_double(s.t) + "," + format_double(l2) + "," + format_double(ha) + "," + format_double(bound) + "," +
           format_double(bound - ha) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

EmittedFiles emit_reports(const std::vector<CertificateReport>& reports, const std::filesystem::path& dir,
                          const std::string& aggregate_name) {
  EmittedFiles files;
  std::map<std::string, int> seen;
  for (const auto& r : reports) {
    const int count = ++seen[r.name];
    const std::string stem = count == 1 ? r.name : r.name + "_" + std::to_string(count);
    const auto path = dir / (stem + ".json");
    write_text(path, to_json(r).dump(2) + "\n");
    files.reports.push_back(path);
  }
  files.aggregate = dir / aggregate_name;
  write_text(files.aggregate, aggregate_csv(reports));
  return files;
}

}  // namespace bardina
