#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deepthermal/config.hpp"
#include "deepthermal/experiments.hpp"

namespace deepthermal::output {

/// Shortest text that keeps 17 significant digits ("%.17g").
std::string format_double(double v);

/// Stable identifier of a run: FNV-1a of the canonical config text, in hex.
std::string run_id(const config::RunConfig& cfg);

inline constexpr const char* kRecordHeader =
    "run_id,model,N,N_A,NB_eff,bc,rule,state,seed,x_kind,x,k,delta,reference,dropped_weight";
inline constexpr const char* kBlochHeader = "run_id,model,N,state,t,zB,p,x,y,z,alpha_zB";

std::string records_csv(const std::vector<experiments::ResultRecord>& records);
std::string bloch_csv(const std::vector<experiments::BlochRecord>& points);

/// Config echo followed by provenance lines under the "manifest." prefix,
/// which the config parser skips.
std::string manifest_text(const config::RunConfig& cfg, const std::map<std::string, std::string>& provenance);

/// Collects output files and publishes them together: each is written to a
/// temporary name and renamed only when commit() runs, so a failed run
/// leaves no partial CSV behind.
class FileSet {
 public:
  explicit FileSet(std::filesystem::path dir);
  ~FileSet();
  FileSet(const FileSet&) = delete;
  FileSet& operator=(const FileSet&) = delete;

  void add(const std::string& name, const std::string& contents);
  std::vector<std::filesystem::path> commit();

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;  // temp, final
  bool committed_ = false;
};

}  // namespace deepthermal::output
