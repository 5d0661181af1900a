#include "deepthermal/runner.hpp"

#include <cstdlib>
#include <sstream>

#include "deepthermal/error.hpp"
#include "deepthermal/output.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace deepthermal::runner {

using config::ExperimentKind;
using output::format_double;

std::filesystem::path resolve_out_dir(const config::RunConfig& cfg) {
  if (const char* env = std::getenv("DEEPTHERMAL_OUT"); env && *env) return env;
  return cfg.out_dir;
}

namespace {

void stamp(std::vector<experiments::ResultRecord>& records, const std::string& id) {
  for (auto& r : records) r.run_id = id;
}

std::string late_csv(const std::string& id, const experiments::Window& w,
                     const std::vector<experiments::LateTimeAverage>& avgs) {
  std::ostringstream os;
  os << "run_id,k,window_lo,window_hi,mean,stderr,count\n";
  for (const auto& a : avgs)
    os << id << ',' << a.k << ',' << format_double(w.t_lo) << ',' << format_double(w.t_hi) << ','
       << format_double(a.mean) << ',' << format_double(a.stderr_) << ',' << a.count << "\n";
  return os.str();
}

}  // namespace

RunReport run(const config::RunConfig& cfg, const std::filesystem::path& out_dir) {
  config::validate(cfg);
  RunReport report;
  report.run_id = output::run_id(cfg);
  const std::string stem = config::output_stem(cfg);
  const auto& e = cfg.exp;

  std::map<std::string, std::string> prov;
  prov["run_id"] = report.run_id;
  prov["simd"] = std::string(simd::active().name);
  std::vector<experiments::ResultRecord> records;
  output::FileSet files(out_dir);

  switch (cfg.kind) {
    case ExperimentKind::Quench: {
      auto q = experiments::quench_sweep(e);
      records = std::move(q.records);
      for (const auto& [k, v] : q.hashes) prov["hash." + k] = v;
      stamp(records, report.run_id);
      try {
        const auto avgs = experiments::late_time_average(records, e.window);
        files.add(stem + ".late.csv", late_csv(report.run_id, e.window, avgs));
        for (const auto& a : avgs)
          report.summary.push_back("late-time Delta^(" + std::to_string(a.k) + ") = " + format_double(a.mean) +
                                   " +/- " + format_double(a.stderr_) + " (" + std::to_string(a.count) + " points)");
      } catch (const ValidationError&) {
        report.summary.push_back("late-time window holds fewer than 5 grid points; no average written");
      }
      break;
    }
    case ExperimentKind::Scaling: {
      auto s = experiments::scaling_sweep(e);
      records = std::move(s.records);
      for (const auto& [k, v] : s.hashes) prov["hash." + k] = v;
      stamp(records, report.run_id);
      std::ostringstream pts;
      pts << "run_id,model,N,NB_eff,k,mean,stderr,count\n";
      for (const auto& p : s.points)
        pts << report.run_id << ',' << models::to_string(e.model.name) << ',' << p.n << ',' << format_double(p.nb_eff)
            << ',' << p.k << ',' << format_double(p.mean) << ',' << format_double(p.stderr_) << ',' << p.count << "\n";
      files.add(stem + ".scaling.csv", pts.str());
      std::ostringstream fits;
      fits << "run_id,k,slope,intercept,r2\n";
      for (const auto& [k, f] : s.fits) {
        fits << report.run_id << ',' << k << ',' << format_double(f.slope) << ',' << format_double(f.intercept) << ','
             << format_double(f.r2) << "\n";
        report.summary.push_back("k=" + std::to_string(k) + ": slope " + format_double(f.slope) + ", R^2 " +
                                 format_double(f.r2));
      }
      files.add(stem + ".fit.csv", fits.str());
      break;
    }
    case ExperimentKind::Eigenstates: {
      auto r = experiments::eigenstate_sweep(e);
      records = std::move(r.records);
      for (const auto& [k, v] : r.hashes) prov["hash." + k] = v;
      prov["degenerate_groups"] = std::to_string(r.degenerate_groups);
      stamp(records, report.run_id);
      report.summary.push_back(std::to_string(records.size()) + " rows, " + std::to_string(r.degenerate_groups) +
                               " degenerate groups");
      break;
    }
    case ExperimentKind::Benchmark: {
      auto b = experiments::typical_benchmark(e);
      records = std::move(b.records);
      stamp(records, report.run_id);
      std::ostringstream os;
      os << "run_id,model,N,N_A,NB_eff,flavor,reference,k,mean,stderr,samples\n";
      const double nb = records.empty() ? 0.0 : records.front().nb_eff;
      for (const auto& s : b.stats) {
        os << report.run_id << ',' << models::to_string(e.model.name) << ',' << e.model.n << ',' << e.n_a << ','
           << format_double(nb) << ',' << ensemble::to_string(e.bench_flavor) << ','
           << ensemble::to_string(e.reference.kind) << ',' << s.k << ',' << format_double(s.mean) << ','
           << format_double(s.stderr_) << ',' << s.samples << "\n";
        report.summary.push_back("Delta^(" + std::to_string(s.k) + ") = " + format_double(s.mean) + " +/- " +
                                 format_double(s.stderr_));
      }
      files.add(stem + ".benchmark.csv", os.str());
      break;
    }
    case ExperimentKind::Bloch: {
      auto b = experiments::bloch_sweep(e);
      records = std::move(b.records);
      for (const auto& [k, v] : b.hashes) prov["hash." + k] = v;
      stamp(records, report.run_id);
      for (auto& p : b.points) p.run_id = report.run_id;
      files.add(stem + ".bloch.csv", output::bloch_csv(b.points));
      break;
    }
  }
  files.add(stem + ".csv", output::records_csv(records));
  files.add(stem + ".manifest", output::manifest_text(cfg, prov));
  report.files = files.commit();
  return report;
}

}  // namespace deepthermal::runner
