#include "deepthermal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <tuple>

#include "deepthermal/chebyshev.hpp"
#include "deepthermal/error.hpp"
#include "deepthermal/flip_operator.hpp"
#include "deepthermal/parallel.hpp"
#include "deepthermal/rng.hpp"

namespace deepthermal::experiments {

using ensemble::ProjectedEnsemble;
using evolve::StateVector;
using hilbert::BasisSpace;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t terms_hash(const models::PauliSum& sum) {
  std::uint64_t h = fnv1a64("pauli-sum");
  for (const auto& t : sum.terms()) {
    h = fnv1a64(&t.coeff, sizeof(t.coeff), h);
    h = fnv1a64(&t.x, sizeof(t.x), h);
    h = fnv1a64(&t.z, sizeof(t.z), h);
  }
  return h;
}

// Seeds in an experiment all derive from the one run seed; the named
// streams keep the draws for each purpose independent.
ExperimentConfig seeded(ExperimentConfig cfg) {
  cfg.model.seed = cfg.seed;
  cfg.state.seed = cfg.seed;
  cfg.reference.seed = cfg.seed;
  return cfg;
}

ResultRecord base_record(const ExperimentConfig& cfg, const hilbert::Bipartition& bp, const std::string& state) {
  ResultRecord r;
  r.model = models::to_string(cfg.model.name);
  r.n = cfg.model.n;
  r.n_a = cfg.n_a;
  r.nb_eff = bp.n_b_eff();
  r.bc = hilbert::to_string(cfg.model.bc);
  r.rule = hilbert::to_string(cfg.rule);
  r.state = state;
  r.seed = cfg.seed;
  r.reference = ensemble::to_string(cfg.reference.kind);
  return r;
}

struct Analysis {
  std::vector<double> deltas;
  double dropped = 0.0;
};

Analysis analyze(const StateVector& psi, const hilbert::Bipartition& bp, const ensemble::ReferenceSet& refs,
                 double p_floor) {
  const ProjectedEnsemble ens = ensemble::project(psi, bp, p_floor);
  return {ensemble::delta_all(ens, refs), ens.dropped_weight};
}

void append_rows(std::vector<ResultRecord>& out, const ResultRecord& base, const std::string& x_kind, double x,
                 const Analysis& a) {
  for (std::size_t k = 0; k < a.deltas.size(); ++k) {
    ResultRecord r = base;
    r.x_kind = x_kind;
    r.x = x;
    r.k = static_cast<int>(k) + 1;
    r.delta = a.deltas[k];
    r.dropped_weight = a.dropped;
    out.push_back(std::move(r));
  }
}

void check_k_max(int k_max) {
  if (k_max < 1 || k_max > 4) throw ValidationError("k_max must be in 1..4");
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  if (!explicit_times.empty()) {
    for (std::size_t i = 0; i < explicit_times.size(); ++i)
      if (explicit_times[i] < 0.0 || (i > 0 && explicit_times[i] <= explicit_times[i - 1]))
        throw ValidationError("grid: explicit times must be non-negative and strictly ascending");
    return explicit_times;
  }
  if (points < 1) throw ValidationError("grid: need at least one point");
  if (!(t_hi >= t_lo) || t_lo < 0.0) throw ValidationError("grid: need 0 <= t_lo <= t_hi");
  if (spacing == Spacing::Log && t_lo <= 0.0) throw ValidationError("grid: log spacing needs t_lo > 0");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    t[static_cast<std::size_t>(i)] =
        spacing == Spacing::Log ? t_lo * std::pow(t_hi / t_lo, f) : t_lo + (t_hi - t_lo) * f;
  }
  t.front() = t_lo;
  t.back() = t_hi;
  return t;
}

std::string to_string(EvolveMethod m) {
  switch (m) {
    case EvolveMethod::Auto:
      return "auto";
    case EvolveMethod::Dense:
      return "dense";
    case EvolveMethod::Chebyshev:
      return "chebyshev";
  }
  return "?";
}

EvolveMethod evolve_method_from_string(const std::string& text) {
  if (text == "auto") return EvolveMethod::Auto;
  if (text == "dense") return EvolveMethod::Dense;
  if (text == "chebyshev") return EvolveMethod::Chebyshev;
  throw ValidationError("unknown evolve method: " + text);
}

TimeGrid default_grid(models::ModelName name) {
  TimeGrid g;
  g.t_hi = name == models::ModelName::Pxp ? 1e4 : 1e3;
  return g;
}

Window default_window(models::ModelName name) {
  return name == models::ModelName::Pxp ? Window{1e3, 1e4} : Window{1e2, 1e3};
}

BasisSpace model_space(const ExperimentConfig& cfg) {
  const auto kind = cfg.model.name == models::ModelName::Pxp ? hilbert::SpaceKind::Blockaded : hilbert::SpaceKind::Full;
  BasisSpace space = hilbert::build_space(cfg.model.n, kind, cfg.model.bc);
  if (cfg.sector) space = hilbert::filter_parity(space, *cfg.sector);
  return space;
}

EvolveMethod resolved_method(const ExperimentConfig& cfg, std::size_t dim) {
  if (cfg.method != EvolveMethod::Auto) return cfg.method;
  return dim > kAutoDenseLimit ? EvolveMethod::Chebyshev : EvolveMethod::Dense;
}

evolve::EigenSystem model_eigensystem(const models::ModelSpec& spec, const BasisSpace& space) {
  if (spec.name == models::ModelName::Syk && space.identity_indexed()) {
    // The SYK Hamiltonian conserves Z_P, so each parity sector is an
    // independent block.
    std::vector<std::pair<models::OperatorMatrix, std::vector<std::int64_t>>> blocks;
    for (int target : {+1, -1}) {
      const BasisSpace sub = hilbert::filter_parity(space, target);
      std::vector<std::int64_t> embed(sub.configs().begin(), sub.configs().end());
      blocks.emplace_back(models::build_hamiltonian(spec, sub), std::move(embed));
    }
    return evolve::diagonalize_blocks(space, std::move(blocks));
  }
  return evolve::diagonalize(models::build_hamiltonian(spec, space));
}

void evolve_on_grid(const ExperimentConfig& cfg, const StateVector& psi0, const std::vector<double>& times,
                    const std::function<void(std::size_t, const StateVector&)>& visit) {
  const auto method = resolved_method(cfg, psi0.dim());
  if (method == EvolveMethod::Chebyshev) {
    const models::FlipOperator h(models::hamiltonian_terms(cfg.model), psi0.space);
    const evolve::ChebyshevPropagator prop(h);
    prop.evolve_grid(psi0, times, visit);
    return;
  }
  const auto eig = model_eigensystem(cfg.model, psi0.space);
  const evolve::SpectralPropagator prop(eig, psi0);
  for (std::size_t i = 0; i < times.size(); ++i) visit(i, prop.at(times[i]));
}

QuenchResult quench_sweep(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = seeded(raw);
  check_k_max(cfg.k_max);
  const BasisSpace space = model_space(cfg);
  const auto bp = hilbert::bipartition(space, cfg.n_a, cfg.rule);
  const ensemble::ReferenceSet refs(static_cast<int>(bp.a_space().dim()), cfg.k_max, cfg.reference);
  const StateVector psi0 = evolve::build_initial_state(space, cfg.state);

  QuenchResult out;
  out.times = cfg.grid.times();
  out.hashes["space"] = hex(space.hash());
  out.hashes["hamiltonian_terms"] = hex(terms_hash(models::hamiltonian_terms(cfg.model)));
  std::vector<Analysis> rows(out.times.size());

  if (resolved_method(cfg, space.dim()) == EvolveMethod::Chebyshev) {
    out.hashes["propagator"] = "chebyshev";
    evolve_on_grid(cfg, psi0, out.times,
                   [&](std::size_t i, const StateVector& psi) { rows[i] = analyze(psi, bp, refs, cfg.p_floor); });
  } else {
    const auto eig = model_eigensystem(cfg.model, space);
    out.hashes["propagator"] = "dense";
    const evolve::SpectralPropagator prop(eig, psi0);
    parallel_for(out.times.size(),
                 [&](std::size_t i) { rows[i] = analyze(prop.at(out.times[i]), bp, refs, cfg.p_floor); });
  }
  const ResultRecord base = base_record(cfg, bp, psi0.label);
  for (std::size_t i = 0; i < rows.size(); ++i) append_rows(out.records, base, "t", out.times[i], rows[i]);
  return out;
}

std::vector<LateTimeAverage> late_time_average(const std::vector<ResultRecord>& records, const Window& window) {
  if (!(window.t_hi >= window.t_lo)) throw ValidationError("late_time_average: empty window");
  std::map<int, std::vector<double>> by_k;
  for (const auto& r : records)
    if (r.x_kind == "t" && r.x >= window.t_lo && r.x <= window.t_hi) by_k[r.k].push_back(r.delta);
  if (by_k.empty()) throw ValidationError("late_time_average: no grid points inside the window");
  std::vector<LateTimeAverage> out;
  for (const auto& [k, v] : by_k) {
    if (v.size() < 5) throw ValidationError("late_time_average: fewer than 5 grid points inside the window");
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double d : v) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    out.push_back({k, mean, sd / std::sqrt(static_cast<double>(v.size())), v.size()});
  }
  return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw ValidationError("linear_fit: need at least two (x, y) pairs");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw NumericError("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

ScalingResult scaling_sweep(const ExperimentConfig& cfg) {
  if (cfg.scaling_n.size() < 3) throw ValidationError("scaling: need at least three system sizes");
  ScalingResult out;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> series;
  for (int n : cfg.scaling_n) {
    ExperimentConfig c = cfg;
    c.model.n = n;
    const QuenchResult q = quench_sweep(c);
    for (const auto& [key, value] : q.hashes) out.hashes["N" + std::to_string(n) + "." + key] = value;
    const double nb_eff = q.records.empty() ? 0.0 : q.records.front().nb_eff;
    for (const auto& avg : late_time_average(q.records, cfg.window)) {
      out.points.push_back({n, nb_eff, avg.k, avg.mean, avg.stderr_, avg.count});
      if (avg.mean <= 0.0) throw NumericError("scaling: non-positive late-time average");
      series[avg.k].first.push_back(nb_eff);
      series[avg.k].second.push_back(std::log(avg.mean));
    }
    out.records.insert(out.records.end(), q.records.begin(), q.records.end());
  }
  for (const auto& [k, xy] : series) out.fits[k] = linear_fit(xy.first, xy.second);
  return out;
}

EigenResult eigenstate_sweep(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = seeded(raw);
  check_k_max(cfg.k_max);
  const BasisSpace space = model_space(cfg);
  const auto bp = hilbert::bipartition(space, cfg.n_a, cfg.rule);
  const ensemble::ReferenceSet refs(static_cast<int>(bp.a_space().dim()), cfg.k_max, cfg.reference);
  EigenResult out;
  out.hashes["space"] = hex(space.hash());
  const std::string vtag = cfg.basis == models::BasisChange::Identity ? "" : ":V_" + models::to_string(cfg.basis);

  auto transform = [&](CVector v) {
    if (cfg.basis != models::BasisChange::Identity) v = models::apply_basis_change(cfg.basis, cfg.phi, space, v);
    return StateVector{std::move(v), space, ""};
  };

  if (cfg.momentum) {
    // Momentum-resolved sweep; the frozen all-up East configuration is
    // removed before the sector projection.
    if (cfg.basis != models::BasisChange::Identity)
      throw ValidationError("eigenstates: basis changes are not combined with momentum sectors");
    std::vector<Bits> excluded;
    if (cfg.model.name == models::ModelName::East) excluded.push_back((Bits{1} << cfg.model.n) - 1);
    const models::FlipOperator h(models::hamiltonian_terms(cfg.model), space);
    out.hashes["hamiltonian_terms"] = hex(terms_hash(models::hamiltonian_terms(cfg.model)));
    for (int m = 0; m < cfg.model.n; ++m) {
      const auto sector = hilbert::momentum_project(space, m, excluded);
      const auto& b = sector.basis;
      if (b.cols() == 0) continue;
      CMatrix hb(b.rows(), b.cols());
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const CVector col = b.col(c);
        hb.col(c) = h.apply(col);
      }
      models::OperatorMatrix hk;
      hk.matrix = b.adjoint() * hb;
      hk.matrix = 0.5 * (hk.matrix + hk.matrix.adjoint()).eval();
      hk.space = space;
      hk.name = "H_K";
      const auto eig = evolve::diagonalize(hk);
      const auto refs_sorted = eig.ordered();
      std::vector<Analysis> rows(refs_sorted.size());
      parallel_for(rows.size(), [&](std::size_t i) {
        const CVector v = b * eig.vector(refs_sorted[i]);
        rows[i] = analyze(transform(v), bp, refs, cfg.p_floor);
      });
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const ResultRecord base = base_record(cfg, bp, "eig:m=" + std::to_string(m) + ":" + std::to_string(i));
        append_rows(out.records, base, "K+E", refs_sorted[i].energy, rows[i]);
      }
    }
    return out;
  }

  const auto eig = model_eigensystem(cfg.model, space);
  out.hashes["hamiltonian_terms"] = hex(terms_hash(models::hamiltonian_terms(cfg.model)));
  auto refs_sorted = eig.ordered();
  const RVector e = eig.eigenvalues();
  const double scale = std::max(1.0, eig.operator_norm_estimate);
  for (Eigen::Index i = 0; i < e.size();) {
    Eigen::Index j = i + 1;
    while (j < e.size() && e[j] - e[j - 1] < 1e-10 * scale) ++j;
    if (j - i > 1) ++out.degenerate_groups;
    i = j;
  }
  std::vector<std::size_t> keep;
  const double mean_e = e.size() ? e.mean() : 0.0;
  const double width = e.size() ? e.maxCoeff() - e.minCoeff() : 0.0;
  for (std::size_t i = 0; i < refs_sorted.size(); ++i)
    if (!cfg.mid_window || std::abs(refs_sorted[i].energy - mean_e) < 0.1 * width) keep.push_back(i);

  std::vector<Analysis> rows(keep.size());
  parallel_for(keep.size(), [&](std::size_t q) {
    rows[q] = analyze(transform(eig.vector(refs_sorted[keep[q]])), bp, refs, cfg.p_floor);
  });
  for (std::size_t q = 0; q < keep.size(); ++q) {
    const ResultRecord base = base_record(cfg, bp, "eig:" + std::to_string(keep[q]) + vtag);
    append_rows(out.records, base, "E", refs_sorted[keep[q]].energy, rows[q]);
  }
  return out;
}

PowerLawFit powerlaw_fit(const std::vector<double>& t, const std::vector<double>& delta) {
  if (t.size() != delta.size()) throw ValidationError("powerlaw_fit: size mismatch");
  if (t.size() < 18) throw ValidationError("powerlaw_fit: no decaying regime (series too short)");
  double mean = 0.0, var = 0.0;
  for (std::size_t i = t.size() - 10; i < t.size(); ++i) mean += delta[i] / 10.0;
  for (std::size_t i = t.size() - 10; i < t.size(); ++i) var += (delta[i] - mean) * (delta[i] - mean) / 9.0;
  const double plateau = mean + 2.0 * std::sqrt(var);
  std::size_t first = 0;
  while (first < t.size() && delta[first] > plateau) ++first;
  std::vector<double> lx, ly;
  if (first < t.size() && t[first] > 0.0) {
    const double lo = t[first] / 10.0;
    for (std::size_t i = 0; i < first; ++i)
      if (t[i] >= lo && t[i] > 0.0 && delta[i] > 0.0) {
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(delta[i]));
      }
  }
  if (lx.size() < 8) throw ValidationError("powerlaw_fit: no decaying regime");
  const LinearFit f = linear_fit(lx, ly);
  if (f.slope >= 0.0) throw ValidationError("powerlaw_fit: no decaying regime");
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  return {f.slope, std::exp(lx.front()), std::exp(lx.back()), std::sqrt(ss / static_cast<double>(lx.size())), lx.size()};
}

BenchmarkResult typical_benchmark(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = seeded(raw);
  check_k_max(cfg.k_max);
  if (cfg.bench_samples < 5) throw ValidationError("benchmark: need at least 5 samples");
  const BasisSpace space = model_space(cfg);
  const auto bp = hilbert::bipartition(space, cfg.n_a, cfg.rule);
  const ensemble::ReferenceSet refs(static_cast<int>(bp.a_space().dim()), cfg.k_max, cfg.reference);
  std::vector<Analysis> rows(cfg.bench_samples);
  parallel_for(rows.size(), [&](std::size_t i) {
    evolve::InitialStateSpec spec;
    spec.kind = evolve::InitialStateSpec::Kind::Typical;
    spec.complex = cfg.bench_flavor == ensemble::Flavor::Complex;
    spec.seed = cfg.seed;
    spec.stream = i;
    rows[i] = analyze(evolve::build_initial_state(space, spec), bp, refs, cfg.p_floor);
  });
  BenchmarkResult out;
  const ResultRecord base = base_record(cfg, bp, "typical_" + ensemble::to_string(cfg.bench_flavor));
  for (std::size_t i = 0; i < rows.size(); ++i) append_rows(out.records, base, "sample", static_cast<double>(i), rows[i]);
  for (int k = 1; k <= cfg.k_max; ++k) {
    double sum = 0.0, ss = 0.0;
    for (const auto& r : rows) sum += r.deltas[static_cast<std::size_t>(k) - 1];
    const double n = static_cast<double>(rows.size());
    const double mean = sum / n;
    for (const auto& r : rows) ss += std::pow(r.deltas[static_cast<std::size_t>(k) - 1] - mean, 2);
    out.stats.push_back({k, mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n), rows.size()});
  }
  return out;
}

BlochResult bloch_sweep(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = seeded(raw);
  check_k_max(cfg.k_max);
  const BasisSpace space = model_space(cfg);
  const auto bp = hilbert::bipartition(space, cfg.n_a, cfg.rule);
  if (bp.a_space().dim() != 2) throw ValidationError("bloch: the A space must have dimension 2");
  const ensemble::ReferenceSet refs(2, cfg.k_max, cfg.reference);
  const StateVector psi0 = evolve::build_initial_state(space, cfg.state);
  BlochResult out;
  out.hashes["space"] = hex(space.hash());
  out.hashes["hamiltonian_terms"] = hex(terms_hash(models::hamiltonian_terms(cfg.model)));
  const auto times = cfg.grid.times();
  const ResultRecord base = base_record(cfg, bp, psi0.label);
  evolve_on_grid(cfg, psi0, times, [&](std::size_t i, const StateVector& psi) {
    const ProjectedEnsemble ens = ensemble::project(psi, bp, cfg.p_floor);
    append_rows(out.records, base, "t", times[i], {ensemble::delta_all(ens, refs), ens.dropped_weight});
    for (const auto& pt : ensemble::bloch_coordinates(ens)) {
      BlochRecord b;
      b.model = base.model;
      b.n = base.n;
      b.state = base.state;
      b.t = times[i];
      b.zb = pt.zb;
      b.n_b = bp.n_b();
      b.p = pt.p;
      b.x = pt.x;
      b.y = pt.y;
      b.z = pt.z;
      b.alpha_zb = ensemble::alpha_zb(ens, pt.zb);
      out.points.push_back(b);
    }
  });
  return out;
}

double monotonicity_violation(const std::vector<ResultRecord>& records) {
  std::map<std::tuple<std::string, std::string, double, int>, std::map<int, double>> groups;
  for (const auto& r : records) groups[{r.state, r.x_kind, r.x, r.n}][r.k] = r.delta;
  double worst = -1.0;
  for (const auto& [key, by_k] : groups) {
    double prev = -1.0;
    for (const auto& [k, d] : by_k) {
      worst = std::max(worst, prev - d);
      prev = d;
    }
  }
  return worst;
}

}  // namespace deepthermal::experiments
