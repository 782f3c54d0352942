#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bardina/dynamics.hpp"
#include "bardina/report.hpp"

namespace bardina {

/// Columns: certificate, time, energy_L2, energy_Halpha, bound, slack.
/// Energy columns are filled from sample extras when present, empty otherwise.
std::string aggregate_csv(const std::vector<CertificateReport>& reports);

/// Columns: time, energy_L2, energy_Halpha, bound, slack; bound is the dissipative envelope.
std::string energy_csv(const Trajectory& traj);

struct EmittedFiles {
  std::vector<std::filesystem::path> reports;
  std::filesystem::path aggregate;
};

/// One <name>.json per report (duplicate names get a numeric suffix) and one aggregate CSV.
/// IO failures throw std::runtime_error naming the path.
EmittedFiles emit_reports(const std::vector<CertificateReport>& reports, const std::filesystem::path& dir,
                          const std::string& aggregate_name = "certificates.csv");

/// Writes text to path, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bardina
