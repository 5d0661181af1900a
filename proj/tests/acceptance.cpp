// Acceptance checks. Each criterion prints one line:
//   criterion <n> PASS|FAIL <measured values> (<seconds> s)
// The same lines go to <work>/report.txt. The process exits non-zero when a
// criterion fails that was not named in --expect-fail.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deepthermal/config.hpp"
#include "deepthermal/ensemble.hpp"
#include "deepthermal/evolve.hpp"
#include "deepthermal/experiments.hpp"
#include "deepthermal/hilbert.hpp"
#include "deepthermal/models.hpp"
#include "deepthermal/output.hpp"
#include "deepthermal/parallel.hpp"
#include "deepthermal/runner.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace deepthermal;

namespace {

struct Outcome {
  int id = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of a CSV file as column -> text maps (no quoting in these files).
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  if (std::getline(in, line)) header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double field(const std::map<std::string, std::string>& row, const std::string& key) { return std::stod(row.at(key)); }

std::vector<experiments::ResultRecord> read_records(const fs::path& p) {
  std::vector<experiments::ResultRecord> out;
  for (const auto& row : read_csv(p)) {
    experiments::ResultRecord r;
    r.n = std::stoi(row.at("N"));
    r.state = row.at("state");
    r.x_kind = row.at("x_kind");
    r.x = field(row, "x");
    r.k = std::stoi(row.at("k"));
    r.delta = field(row, "delta");
    out.push_back(r);
  }
  return out;
}

// Value of column `value` in the row of a sidecar CSV where k matches.
double at_k(const fs::path& p, int k, const std::string& value) {
  for (const auto& row : read_csv(p))
    if (std::stoi(row.at("k")) == k) return field(row, value);
  throw std::runtime_error("no k=" + std::to_string(k) + " row in " + p.string());
}

class Suite {
 public:
  Suite(fs::path configs, fs::path work) : configs_(std::move(configs)), work_(std::move(work)) {
    fs::remove_all(work_);
    fs::create_directories(work_ / "first");
    fs::create_directories(work_ / "second");
  }

  // Runs a config into the first output directory and returns the stem.
  std::string run(const std::string& name) {
    const auto cfg = config::load_config(configs_ / (name + ".cfg"));
    runner::run(cfg, work_ / "first");
    ran_.push_back(name);
    return config::output_stem(cfg);
  }

  fs::path out(const std::string& file) const { return work_ / "first" / file; }
  fs::path config_path(const std::string& name) const { return configs_ / (name + ".cfg"); }

  // Records of every main CSV, for the monotonicity check.
  void collect(const std::string& stem) { record_files_.push_back(out(stem + ".csv")); }
  const std::vector<fs::path>& record_files() const { return record_files_; }

  void note_violation(double v) { extra_violation_ = std::max(extra_violation_, v); }
  double extra_violation() const { return extra_violation_; }
  std::size_t extra_ensembles() const { return extra_ensembles_; }
  void count_ensemble() { ++extra_ensembles_; }

  const std::vector<std::string>& ran() const { return ran_; }
  const fs::path& work() const { return work_; }

 private:
  fs::path configs_;
  fs::path work_;
  std::vector<std::string> ran_;
  std::vector<fs::path> record_files_;
  double extra_violation_ = -1.0;
  std::size_t extra_ensembles_ = 0;
};

double monotone_violation(const std::vector<double>& d) {
  double worst = -1.0;
  for (std::size_t k = 1; k < d.size(); ++k) worst = std::max(worst, d[k - 1] - d[k]);
  return worst;
}

Outcome criterion1(Suite& suite) {
  double worst = 0.0;
  std::size_t count = 0;
  std::mt19937_64 gen(20240601);
  for (int n : {6, 8}) {
    const auto space = hilbert::build_space(n, hilbert::SpaceKind::Full, hilbert::Boundary::Open);
    for (int na : {1, 2, 3}) {
      const auto bp = hilbert::bipartition(space, na, {});
      const ensemble::ReferenceSet refs(1 << na, 3, {});
      for (int s = 0; s < 50; ++s) {
        const CVector psi = oracle::random_state(Eigen::Index{1} << n, gen);
        const auto ens = ensemble::project({psi, space, "random"}, bp);
        const auto m1 = ensemble::moment(ens, 1, ensemble::MomentBasis::Product);
        worst = std::max(worst, ensemble::trace_distance(m1.matrix, oracle::partial_trace(psi, n, na)));
        suite.note_violation(monotone_violation(ensemble::delta_all(ens, refs)));
        suite.count_ensemble();
        ++count;
      }
    }
  }
  return {1, worst < 1e-10, "states=" + std::to_string(count) + " max_trace_distance=" + num(worst) + " (< 1e-10)"};
}

Outcome criterion2() {
  const double d2 = ensemble::trace_distance(ensemble::haar_moment(4, 2, ensemble::MomentBasis::Product).matrix,
                                             oracle::haar_monte_carlo(4, 2, 100000, 11));
  const double d3 = ensemble::trace_distance(ensemble::haar_moment(4, 3, ensemble::MomentBasis::Product).matrix,
                                             oracle::haar_monte_carlo(4, 3, 100000, 12));
  const CMatrix h82 = ensemble::haar_moment(8, 2, ensemble::MomentBasis::Product).matrix;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h82);
  int at_value = 0, at_zero = 0;
  for (double e : es.eigenvalues()) {
    if (std::abs(e - 1.0 / 36.0) < 1e-12) ++at_value;
    else if (std::abs(e) < 1e-12) ++at_zero;
  }
  const bool pass = d2 < 5e-3 && d3 < 5e-3 && at_value == 36 && at_zero == 28;
  return {2, pass,
          "mc_distance(k=2)=" + num(d2) + " mc_distance(k=3)=" + num(d3) + " (< 5e-3); spectrum(8,2): " +
              std::to_string(at_value) + " x 1/36, " + std::to_string(at_zero) + " x 0"};
}

Outcome criterion4(Suite& suite) {
  const std::string name = "bloch_east_n12";
  const auto stem = suite.run(name);
  suite.collect(stem);
  double max_x = 0.0;
  std::size_t points = 0;
  for (const auto& row : read_csv(suite.out(stem + ".bloch.csv")))
    if (field(row, "p") > 1e-12) {
      max_x = std::max(max_x, std::abs(field(row, "x")));
      ++points;
    }

  // Residuals of the single-entry and global relations, recomputed from the config.
  const auto cfg = config::load_config(suite.config_path(name));
  const auto& e = cfg.exp;
  const auto space = experiments::model_space(e);
  const auto eig = experiments::model_eigensystem(e.model, space);
  const auto psi0 = evolve::build_initial_state(space, e.state);
  const int alpha = hilbert::parity_of(e.state.config, e.model.n);
  const auto bp = hilbert::bipartition(space, e.n_a, e.rule);
  const auto za = models::build_string_operator(models::pauli_pattern("Z"), bp.a_space());
  double local = 0.0, global = 0.0;
  for (double t : e.grid.times()) {
    const auto psi = evolve::evolve_state(eig, psi0, t);
    CVector kz(psi.amplitudes.size());
    for (std::size_t i = 0; i < space.dim(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      kz[ii] = double(hilbert::parity_of(space.config(i), e.model.n)) * std::conj(psi.amplitudes[ii]);
    }
    global = std::max(global, (kz - double(alpha) * psi.amplitudes).norm());
    const auto ens = ensemble::project(psi, bp, e.p_floor);
    for (double r : ensemble::symmetry_residuals(ens, za, alpha)) local = std::max(local, r);
  }
  const bool pass = max_x < 1e-8 && local < 1e-9 && global < 1e-10 && points > 0;
  return {4, pass,
          "entries=" + std::to_string(points) + " max|x|=" + num(max_x) + " (< 1e-8) local=" + num(local) +
              " (< 1e-9) global=" + num(global) + " (< 1e-10)"};
}

Outcome criterion5(Suite& suite) {
  std::map<std::string, std::vector<experiments::ResultRecord>> rec;
  for (const std::string v : {"identity", "S", "phi0", "phi_half", "XY"}) {
    const auto stem = suite.run("eigen_ising_n12_" + v);
    suite.collect(stem);
    rec[v] = read_records(suite.out(stem + ".csv"));
  }
  const auto& id = rec["identity"];
  for (const auto& [v, r] : rec)
    if (r.size() != id.size()) return {5, false, "row count differs between basis changes"};
  double s_diff = 0.0, phi_diff = 0.0, xy1_diff = 0.0;
  double mean_id2 = 0.0, mean_xy2 = 0.0, mean_id1 = 0.0;
  std::size_t states = 0;
  for (std::size_t i = 0; i < id.size(); ++i) {
    if (rec["S"][i].x != id[i].x || rec["XY"][i].x != id[i].x || rec["S"][i].k != id[i].k)
      return {5, false, "eigenvalue order differs between basis changes"};
    s_diff = std::max(s_diff, std::abs(id[i].delta - rec["S"][i].delta));
    phi_diff = std::max(phi_diff, std::abs(rec["phi0"][i].delta - rec["phi_half"][i].delta));
    if (id[i].k == 1) {
      xy1_diff = std::max(xy1_diff, std::abs(id[i].delta - rec["XY"][i].delta));
      mean_id1 += id[i].delta;
      ++states;
    }
    if (id[i].k == 2) {
      mean_id2 += id[i].delta;
      mean_xy2 += rec["XY"][i].delta;
    }
  }
  mean_id1 /= double(states);
  mean_id2 /= double(states);
  mean_xy2 /= double(states);
  const bool pass = s_diff < 1e-9 && phi_diff < 1e-9 && xy1_diff < 1e-9 && mean_xy2 < 0.5 * mean_id2;
  return {5, pass,
          "states=" + std::to_string(states) + " |V1-VS|=" + num(s_diff) + " |phi0-phi_pi/2|=" + num(phi_diff) +
              " (< 1e-9) k=1 |V1-VXY|=" + num(xy1_diff) + " (< 1e-9) mean Delta2: VXY=" + num(mean_xy2) +
              " V1=" + num(mean_id2) + " ratio=" + num(mean_xy2 / mean_id2) + " (< 0.5) mean Delta1=" + num(mean_id1)};
}

Outcome criterion6(Suite& suite) {
  double v[4];
  int i = 0;
  for (const std::string name : {"quench_syk_n12_full", "bench_syk_n12_full", "quench_syk_n12_sector",
                                 "bench_syk_n12_sector"}) {
    const auto stem = suite.run(name);
    suite.collect(stem);
    const bool quench = name.rfind("quench", 0) == 0;
    v[i++] = quench ? at_k(suite.out(stem + ".late.csv"), 2, "mean") : at_k(suite.out(stem + ".benchmark.csv"), 2, "mean");
  }
  const double ratio_a = v[0] / v[1];
  const double rel_b = std::abs(v[2] - v[3]) / v[3];
  return {6, ratio_a >= 2.0 && rel_b <= 0.25,
          "(a) late Delta2=" + num(v[0]) + " typical=" + num(v[1]) + " ratio=" + num(ratio_a) +
              " (>= 2) (b) late Delta2=" + num(v[2]) + " typical=" + num(v[3]) + " rel_diff=" + num(rel_b) +
              " (<= 0.25)"};
}

Outcome criterion7(Suite& suite) {
  const auto stem = suite.run("scaling_syk");
  suite.collect(stem);
  const double slope = at_k(suite.out(stem + ".fit.csv"), 1, "slope");
  const double r2 = at_k(suite.out(stem + ".fit.csv"), 1, "r2");
  std::string pts;
  for (const auto& row : read_csv(suite.out(stem + ".scaling.csv")))
    pts += " N=" + row.at("N") + ":" + num(field(row, "mean"));
  return {7, slope < 0.0 && r2 > 0.9, "slope=" + num(slope) + " (< 0) R2=" + num(r2) + " (> 0.9)" + pts};
}

Outcome criterion8(Suite& suite) {
  const auto s0 = suite.run("quench_pxp_n16_mu0");
  const auto s5 = suite.run("quench_pxp_n16_mu0p05");
  const auto sb = suite.run("bench_pxp_n16_real");
  for (const auto& s : {s0, s5, sb}) suite.collect(s);
  const double d0 = at_k(suite.out(s0 + ".late.csv"), 2, "mean");
  const double d5 = at_k(suite.out(s5 + ".late.csv"), 2, "mean");
  const double ref = at_k(suite.out(sb + ".benchmark.csv"), 2, "mean");
  const double rel = std::abs(d0 - ref) / ref;
  return {8, rel <= 0.25 && d5 <= 0.7 * d0,
          "late Delta2(mu=0)=" + num(d0) + " real_typical=" + num(ref) + " rel_diff=" + num(rel) +
              " (<= 0.25) late Delta2(mu=0.05)=" + num(d5) + " ratio=" + num(d5 / d0) + " (<= 0.7)"};
}

Outcome criterion9() {
  bool ok = true;
  std::string detail;
  std::vector<std::size_t> fib{1, 1};
  for (int i = 2; i < 20; ++i) fib.push_back(fib[i - 1] + fib[i - 2]);
  for (int n = 2; n <= 14; ++n) {
    std::size_t brute = 0;
    for (Bits c = 0; c < (Bits{1} << n); ++c) brute += (c & (c >> 1)) == 0;
    const auto dim = hilbert::build_space(n, hilbert::SpaceKind::Blockaded, hilbert::Boundary::Open).dim();
    // F_1 = F_2 = 1, so F_{N+2} is fib[N+1].
    if (dim != brute || dim != fib[static_cast<std::size_t>(n) + 1]) {
      ok = false;
      detail += " N=" + std::to_string(n) + " dim=" + std::to_string(dim);
    }
  }
  std::size_t checked = 0;
  for (int n = 3; n <= 12; ++n) {
    const auto blockaded = hilbert::build_space(n, hilbert::SpaceKind::Blockaded, hilbert::Boundary::Open);
    const auto full = hilbert::build_space(n, hilbert::SpaceKind::Full, hilbert::Boundary::Open);
    for (int na = 1; na <= std::min(4, n - 2); ++na) {
      struct Case {
        hilbert::BasisSpace space;
        hilbert::PostselectRule rule;
      };
      std::vector<Case> cases{{blockaded, {hilbert::Postselect::BoundaryDown, 1}},
                              {full, {}},
                              {hilbert::filter_parity(full, 1), {hilbert::Postselect::ParityB, 1}},
                              {hilbert::filter_parity(full, -1), {hilbert::Postselect::ParityB, -1}}};
      for (const auto& c : cases) {
        const auto bp = hilbert::bipartition(c.space, na, c.rule);
        std::set<std::int64_t> hit;
        for (std::size_t b = 0; b < bp.admissible_zb().size(); ++b) {
          const auto row = bp.row(b);
          for (std::size_t a = 0; a < row.size(); ++a) {
            const Bits joined = bp.join(bp.a_space().config(a), bp.admissible_zb()[b]);
            if (row[a] < 0 || c.space.config(static_cast<std::size_t>(row[a])) != joined || !hit.insert(row[a]).second)
              ok = false;
          }
        }
        // Every parent configuration passing the rule arises exactly once.
        std::size_t expected = 0;
        for (std::size_t i = 0; i < c.space.dim(); ++i) {
          const Bits zb = c.space.config(i) >> na;
          const auto& adm = bp.admissible_zb();
          expected += std::find(adm.begin(), adm.end(), zb) != adm.end();
        }
        if (hit.size() != expected) ok = false;
        if (std::abs(bp.n_b_eff() - std::log2(double(bp.admissible_zb().size()))) > 1e-12) ok = false;
        ++checked;
      }
    }
  }
  return {9, ok, "fibonacci dims N<=14 match brute force; bipartitions checked=" + std::to_string(checked) + detail};
}

Outcome criterion3(const Suite& suite) {
  double worst = suite.extra_violation();
  std::size_t rows = 0;
  for (const auto& f : suite.record_files()) {
    const auto r = read_records(f);
    rows += r.size();
    worst = std::max(worst, experiments::monotonicity_violation(r));
  }
  return {3, worst <= 1e-10,
          "record_files=" + std::to_string(suite.record_files().size()) + " rows=" + std::to_string(rows) +
              " extra_ensembles=" + std::to_string(suite.extra_ensembles()) + " max_violation=" + num(worst) +
              " (<= 1e-10)"};
}

Outcome criterion10(const Suite& suite, const fs::path& configs) {
  // Second pass with a different thread count; every CSV must match byte for byte.
  const int before = thread_count();
  set_thread_count(before == 1 ? 2 : 1);
  for (const auto& name : suite.ran()) runner::run(config::load_config(configs / (name + ".cfg")), suite.work() / "second");
  set_thread_count(0);
  std::size_t files = 0, differing = 0;
  std::string which;
  for (const auto& entry : fs::directory_iterator(suite.work() / "first")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const auto other = suite.work() / "second" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      ++differing;
      which += " " + entry.path().filename().string();
    }
  }
  return {10, files > 0 && differing == 0,
          "configs=" + std::to_string(suite.ran().size()) + " csv_files=" + std::to_string(files) +
              " differing=" + std::to_string(differing) + which};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepthermal acceptance checks"};
  std::string configs = "configs";
  std::string work = "acceptance_out";
  std::vector<int> expect_fail;
  std::vector<int> only;
  app.add_option("--configs", configs, "directory with the criterion configs")->check(CLI::ExistingDirectory);
  app.add_option("--work", work, "scratch output directory");
  app.add_option("--expect-fail", expect_fail, "criteria known to be unattainable at this scale");
  app.add_option("--only", only, "run a subset of criteria (criterion 10 needs 4 to 8)");
  CLI11_PARSE(app, argc, argv);

  Suite suite(configs, work);
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](int id) { return selected.empty() || selected.count(id); };

  std::vector<Outcome> results;
  std::ofstream report(fs::path(work) / "report.txt");
  auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    report << line << "\n" << std::flush;
  };
  auto timed = [&](int id, const std::function<Outcome()>& fn) {
    if (!wanted(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {id, false, std::string("error: ") + e.what()};
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", o.seconds);
    emit("criterion " + std::to_string(o.id) + (o.pass ? " PASS " : " FAIL ") + o.detail + " (" + secs + " s)");
    results.push_back(o);
  };

  timed(1, [&] { return criterion1(suite); });
  timed(2, [&] { return criterion2(); });
  timed(4, [&] { return criterion4(suite); });
  timed(5, [&] { return criterion5(suite); });
  timed(6, [&] { return criterion6(suite); });
  timed(7, [&] { return criterion7(suite); });
  timed(8, [&] { return criterion8(suite); });
  timed(9, [&] { return criterion9(); });
  timed(3, [&] { return criterion3(suite); });
  timed(10, [&] { return criterion10(suite, configs); });

  int unexpected = 0;
  for (const auto& o : results) {
    if (!o.pass && !expected.count(o.id)) ++unexpected;
    if (!o.pass && expected.count(o.id)) emit("criterion " + std::to_string(o.id) + " failed as expected");
    if (o.pass && expected.count(o.id))
      emit("criterion " + std::to_string(o.id) + " passed although listed in --expect-fail");
  }
  emit("summary: " + std::to_string(results.size()) + " checked, " + std::to_string(unexpected) +
       " unexpected failures");
  return unexpected == 0 ? 0 : 1;
}
