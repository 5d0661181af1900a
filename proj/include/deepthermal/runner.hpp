#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deepthermal/config.hpp"

namespace deepthermal::runner {

struct RunReport {
  std::string run_id;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> summary;  // human-readable lines
};

/// Output directory: DEEPTHERMAL_OUT when set, otherwise the config's out.dir.
std::filesystem::path resolve_out_dir(const config::RunConfig& cfg);

/// Runs the experiment and writes <stem>.csv, <stem>.manifest and any
/// experiment-specific sidecar CSVs into `out_dir`.
RunReport run(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace deepthermal::runner
