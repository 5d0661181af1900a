#include "deepthermal/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "deepthermal/error.hpp"
#include "deepthermal/rng.hpp"

namespace deepthermal::output {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string run_id(const config::RunConfig& cfg) {
  // The output location does not change the physics, so it is left out.
  config::RunConfig c = cfg;
  c.out_dir.clear();
  c.out_name.clear();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config::to_text(c))));
  return buf;
}

namespace {

// State labels may contain commas in principle; quote them when they do.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string records_csv(const std::vector<experiments::ResultRecord>& records) {
  std::ostringstream os;
  os << kRecordHeader << "\n";
  for (const auto& r : records) {
    os << field(r.run_id) << ',' << field(r.model) << ',' << r.n << ',' << r.n_a << ',' << format_double(r.nb_eff) << ','
       << field(r.bc) << ',' << field(r.rule) << ',' << field(r.state) << ',' << r.seed << ',' << field(r.x_kind) << ','
       << format_double(r.x) << ',' << r.k << ',' << format_double(r.delta) << ',' << field(r.reference) << ','
       << format_double(r.dropped_weight) << "\n";
  }
  return os.str();
}

std::string bloch_csv(const std::vector<experiments::BlochRecord>& points) {
  std::ostringstream os;
  os << kBlochHeader << "\n";
  for (const auto& b : points) {
    os << field(b.run_id) << ',' << field(b.model) << ',' << b.n << ',' << field(b.state) << ',' << format_double(b.t)
       << ',' << hilbert::config_to_string(b.zb, b.n_b) << ',' << format_double(b.p) << ',' << format_double(b.x) << ','
       << format_double(b.y) << ',' << format_double(b.z) << ',' << b.alpha_zb << "\n";
  }
  return os.str();
}

std::string manifest_text(const config::RunConfig& cfg, const std::map<std::string, std::string>& provenance) {
  std::ostringstream os;
  os << "# deepthermal run manifest; re-parses as a run config\n";
  os << config::to_text(cfg);
  for (const auto& [key, value] : provenance) os << "manifest." << key << "=" << value << "\n";
  return os.str();
}

FileSet::FileSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

FileSet::~FileSet() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& [tmp, final_path] : staged_) std::filesystem::remove(tmp, ec);
}

void FileSet::add(const std::string& name, const std::string& contents) {
  const auto final_path = dir_ / name;
  const auto tmp = dir_ / ("." + name + ".partial");
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + tmp.string());
  out << contents;
  out.close();
  if (!out) throw ValidationError("failed writing " + tmp.string());
  staged_.emplace_back(tmp, final_path);
}

std::vector<std::filesystem::path> FileSet::commit() {
  std::vector<std::filesystem::path> out;
  for (const auto& [tmp, final_path] : staged_) {
    std::filesystem::rename(tmp, final_path);
    out.push_back(final_path);
  }
  committed_ = true;
  return out;
}

}  // namespace deepthermal::output
