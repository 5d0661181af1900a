#include "deepthermal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "deepthermal/error.hpp"

namespace deepthermal::config {

using experiments::ExperimentConfig;
using Kind = evolve::InitialStateSpec::Kind;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Quench:
      return "quench";
    case ExperimentKind::Scaling:
      return "scaling";
    case ExperimentKind::Eigenstates:
      return "eigenstates";
    case ExperimentKind::Benchmark:
      return "benchmark";
    case ExperimentKind::Bloch:
      return "bloch";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& text) {
  if (text == "quench") return ExperimentKind::Quench;
  if (text == "scaling") return ExperimentKind::Scaling;
  if (text == "eigenstates") return ExperimentKind::Eigenstates;
  if (text == "benchmark") return ExperimentKind::Benchmark;
  if (text == "bloch") return ExperimentKind::Bloch;
  throw ValidationError("unknown experiment: " + text);
}

const std::map<std::string, std::string>& known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"experiment", "quench | scaling | eigenstates | benchmark | bloch"},
      {"seed", "64-bit run seed; every random stream derives from it"},
      {"model.name", "syk | ising | east | pxp"},
      {"model.N", "number of sites"},
      {"model.bc", "open | periodic"},
      {"model.h", "Ising longitudinal field"},
      {"model.g", "Ising transverse field"},
      {"model.mu", "PXP chemical potential"},
      {"model.perturbation", "none | pxpz | pxpxp (PXP only)"},
      {"model.pxpz_h", "strength of the PXPZ term"},
      {"model.pxpxp_lambda", "strength of the PXPXP term"},
      {"space.sector", "none | +1 | -1 (Z_P eigenvalue filter, full spaces only)"},
      {"bipartition.N_A", "sites in subsystem A (sites 1..N_A)"},
      {"bipartition.rule", "none | boundary_down | parity_B"},
      {"bipartition.target", "+1 | -1, Z_P eigenvalue of B kept by parity_B"},
      {"state.kind", "basis | random_angles | zn | typical | alpha_superposition"},
      {"state.config", "site-ordered bit string, character j is site j+1 ('1' = up)"},
      {"state.config_b", "second configuration for alpha_superposition"},
      {"state.n", "n of the Z_n pattern (0, 2, 3, 4)"},
      {"state.flavor", "complex | real (typical states)"},
      {"state.stream", "index i of the typical:<i> stream"},
      {"state.fix_last_phi", "true | false (random_angles)"},
      {"k_max", "largest moment order (1..4)"},
      {"grid.t_lo", "first time"},
      {"grid.t_hi", "last time"},
      {"grid.points", "number of grid points"},
      {"grid.spacing", "log | linear"},
      {"grid.times", "explicit comma-separated times (overrides the generated grid)"},
      {"window.t_lo", "start of the late-time window"},
      {"window.t_hi", "end of the late-time window"},
      {"reference.kind", "haar | sampled_real | sampled_complex"},
      {"reference.samples", "samples for sampled references"},
      {"evolve.method", "auto | dense | chebyshev"},
      {"basis.kind", "identity | S | P | XY | phi (eigenstate sweeps)"},
      {"basis.phi", "angle for basis.kind=phi"},
      {"eigen.momentum", "true | false: resolve eigenstates by lattice momentum"},
      {"eigen.mid_window", "true | false: keep eigenstates with |E - mean| < 0.1 width"},
      {"benchmark.flavor", "complex | real"},
      {"benchmark.samples", "number of typical states"},
      {"scaling.N", "comma-separated system sizes"},
      {"p_floor", "branches with smaller Born weight are dropped"},
      {"out.dir", "output directory (DEEPTHERMAL_OUT overrides)"},
      {"out.name", "output file stem"},
  };
  return keys;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Values {
 public:
  explicit Values(std::map<std::string, std::pair<std::string, int>> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second.first;
  }

  std::string required(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ValidationError("missing required key: " + key);
    return it->second.first;
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return to_double(key, kv_.at(key).first);
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return to_integer(key, kv_.at(key).first);
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = kv_.at(key).first;
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key, "expected an unsigned 64-bit integer");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = kv_.at(key).first;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true or false");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    for (const auto& item : split(kv_.at(key).first)) out.push_back(to_double(key, item));
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    if (!has(key)) return out;
    for (const auto& item : split(kv_.at(key).first)) out.push_back(static_cast<int>(to_integer(key, item)));
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const auto it = kv_.find(key);
    const int line = it == kv_.end() ? 0 : it->second.second;
    throw ParseError("line " + std::to_string(line) + ": " + key + ": " + why);
  }

  double to_double(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) fail(key, "expected a finite number");
    return out;
  }

  long long to_integer(const std::string& key, const std::string& v) const {
    long long out = 0;
    const char* begin = v.data() + (v.size() > 1 && v[0] == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(begin, v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key, "expected an integer");
    return out;
  }

  static std::vector<std::string> split(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
  }

  std::map<std::string, std::pair<std::string, int>> kv_;
};

int sign_value(const std::string& key, const std::string& v) {
  if (v == "+1" || v == "1") return 1;
  if (v == "-1") return -1;
  throw ValidationError(key + ": expected +1 or -1");
}

std::string sign_text(int s) { return s > 0 ? "+1" : "-1"; }

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

Bits site_config(const Values& v, const std::string& key, int n) {
  const std::string text = v.required(key);
  if (static_cast<int>(text.size()) != n)
    throw ValidationError(key + ": expected " + std::to_string(n) + " characters, got " + std::to_string(text.size()));
  return hilbert::config_from_string(text);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    if (!std::all_of(key.begin(), key.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_'; }))
      throw ParseError("line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    if (key.rfind("manifest.", 0) == 0) continue;
    if (!known_keys().count(key)) throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty value for " + key);
    if (!kv.emplace(key, std::make_pair(value, line_no)).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  const Values v(std::move(kv));

  RunConfig cfg;
  cfg.kind = experiment_from_string(v.required("experiment"));
  ExperimentConfig& e = cfg.exp;
  e.seed = v.unsigned64("seed", 0);

  auto& m = e.model;
  m.name = models::model_from_string(v.required("model.name"));
  const long long n = v.integer("model.N", -1);
  if (!v.has("model.N") && cfg.kind != ExperimentKind::Scaling) throw ValidationError("missing required key: model.N");
  e.scaling_n = v.integers("scaling.N");
  m.n = static_cast<int>(v.has("model.N") ? n : (e.scaling_n.empty() ? 0 : e.scaling_n.front()));
  if (m.n < 2 || m.n > kMaxSites) throw ValidationError("model.N must be in 2.." + std::to_string(kMaxSites));
  const std::string bc = v.str("model.bc", "open");
  if (bc != "open" && bc != "periodic") throw ValidationError("model.bc must be open or periodic");
  m.bc = bc == "open" ? hilbert::Boundary::Open : hilbert::Boundary::Periodic;
  m.h = v.real("model.h", models::kIsingH);
  m.g = v.real("model.g", models::kIsingG);
  m.mu = v.real("model.mu", models::kPxpMu);
  m.perturbation = models::perturbation_from_string(v.str("model.perturbation", "none"));
  m.pxpz_h = v.real("model.pxpz_h", models::kPxpzH);
  m.pxpxp_lambda = v.real("model.pxpxp_lambda", models::kPxpxpLambda);
  m.seed = e.seed;

  const std::string sector = v.str("space.sector", "none");
  if (sector != "none") e.sector = sign_value("space.sector", sector);

  e.n_a = static_cast<int>(v.integer("bipartition.N_A", 1));
  const std::string rule = v.str("bipartition.rule", "none");
  if (rule == "none")
    e.rule.tag = hilbert::Postselect::None;
  else if (rule == "boundary_down")
    e.rule.tag = hilbert::Postselect::BoundaryDown;
  else if (rule == "parity_B")
    e.rule.tag = hilbert::Postselect::ParityB;
  else
    throw ValidationError("bipartition.rule must be none, boundary_down or parity_B");
  e.rule.target = sign_value("bipartition.target", v.str("bipartition.target", "+1"));

  auto& s = e.state;
  s.kind = evolve::state_kind_from_string(v.str("state.kind", "basis"));
  s.seed = e.seed;
  const bool needs_state = cfg.kind == ExperimentKind::Quench || cfg.kind == ExperimentKind::Bloch ||
                           cfg.kind == ExperimentKind::Scaling;
  switch (s.kind) {
    case Kind::Basis:
      if (needs_state) s.config = site_config(v, "state.config", m.n);
      break;
    case Kind::AlphaSuperposition:
      s.config = site_config(v, "state.config", m.n);
      s.config_b = site_config(v, "state.config_b", m.n);
      break;
    case Kind::Zn:
      s.zn = static_cast<int>(v.integer("state.n", 2));
      if (s.zn != 0 && s.zn != 2 && s.zn != 3 && s.zn != 4) throw ValidationError("state.n must be 0, 2, 3 or 4");
      break;
    case Kind::Typical:
      s.complex = ensemble::flavor_from_string(v.str("state.flavor", "complex")) == ensemble::Flavor::Complex;
      s.stream = static_cast<std::size_t>(v.integer("state.stream", 0));
      break;
    case Kind::RandomAngles:
      s.fix_last_phi = v.boolean("state.fix_last_phi", false);
      break;
  }
  if (cfg.kind == ExperimentKind::Scaling && s.kind == Kind::Basis)
    throw ValidationError("scaling runs need a size-independent state (random_angles, zn or typical)");

  e.k_max = static_cast<int>(v.integer("k_max", 3));
  if (e.k_max < 1 || e.k_max > 4) throw ValidationError("k_max must be in 1..4");

  e.grid = experiments::default_grid(m.name);
  e.grid.t_lo = v.real("grid.t_lo", e.grid.t_lo);
  e.grid.t_hi = v.real("grid.t_hi", e.grid.t_hi);
  e.grid.points = static_cast<int>(v.integer("grid.points", e.grid.points));
  const std::string spacing = v.str("grid.spacing", "log");
  if (spacing != "log" && spacing != "linear") throw ValidationError("grid.spacing must be log or linear");
  e.grid.spacing = spacing == "log" ? experiments::Spacing::Log : experiments::Spacing::Linear;
  e.grid.explicit_times = v.reals("grid.times");
  e.grid.times();  // validates

  e.window = experiments::default_window(m.name);
  e.window.t_lo = v.real("window.t_lo", e.window.t_lo);
  e.window.t_hi = v.real("window.t_hi", e.window.t_hi);
  if (!(e.window.t_hi >= e.window.t_lo)) throw ValidationError("window: need t_lo <= t_hi");

  e.reference.kind = ensemble::reference_from_string(v.str("reference.kind", "haar"));
  e.reference.samples = static_cast<std::size_t>(v.integer("reference.samples", 200));
  if (e.reference.samples < 1) throw ValidationError("reference.samples must be positive");
  e.reference.seed = e.seed;
  e.method = experiments::evolve_method_from_string(v.str("evolve.method", "auto"));

  e.basis = models::basis_change_from_string(v.str("basis.kind", "identity"));
  e.phi = v.real("basis.phi", 0.0);
  e.momentum = v.boolean("eigen.momentum", false);
  e.mid_window = v.boolean("eigen.mid_window", false);

  e.bench_flavor = ensemble::flavor_from_string(v.str("benchmark.flavor", "complex"));
  const long long samples = v.integer("benchmark.samples", 20);
  if (samples < 1) throw ValidationError("benchmark.samples must be positive");
  e.bench_samples = static_cast<std::size_t>(samples);

  e.p_floor = v.real("p_floor", ensemble::kDefaultPFloor);
  if (e.p_floor < 0.0) throw ValidationError("p_floor must be non-negative");

  cfg.out_dir = v.str("out.dir", "out");
  cfg.out_name = v.str("out.name", "");
  if (cfg.out_name.find('/') != std::string::npos) throw ValidationError("out.name must not contain '/'");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& cfg) {
  const ExperimentConfig& e = cfg.exp;
  const auto& m = e.model;
  const auto& s = e.state;
  std::ostringstream os;
  auto put = [&](const std::string& key, const std::string& value) { os << key << "=" << value << "\n"; };
  put("experiment", to_string(cfg.kind));
  put("seed", std::to_string(e.seed));
  put("model.name", models::to_string(m.name));
  put("model.N", std::to_string(m.n));
  put("model.bc", hilbert::to_string(m.bc));
  put("model.h", format_double(m.h));
  put("model.g", format_double(m.g));
  put("model.mu", format_double(m.mu));
  put("model.perturbation", models::to_string(m.perturbation));
  put("model.pxpz_h", format_double(m.pxpz_h));
  put("model.pxpxp_lambda", format_double(m.pxpxp_lambda));
  put("space.sector", e.sector ? sign_text(*e.sector) : "none");
  put("bipartition.N_A", std::to_string(e.n_a));
  put("bipartition.rule", e.rule.tag == hilbert::Postselect::None           ? "none"
                          : e.rule.tag == hilbert::Postselect::BoundaryDown ? "boundary_down"
                                                                            : "parity_B");
  put("bipartition.target", sign_text(e.rule.target));
  put("state.kind", evolve::to_string(s.kind));
  switch (s.kind) {
    case Kind::Basis:
      if (cfg.kind == ExperimentKind::Quench || cfg.kind == ExperimentKind::Bloch)
        put("state.config", hilbert::config_to_string(s.config, m.n));
      break;
    case Kind::AlphaSuperposition:
      put("state.config", hilbert::config_to_string(s.config, m.n));
      put("state.config_b", hilbert::config_to_string(s.config_b, m.n));
      break;
    case Kind::Zn:
      put("state.n", std::to_string(s.zn));
      break;
    case Kind::Typical:
      put("state.flavor", s.complex ? "complex" : "real");
      put("state.stream", std::to_string(s.stream));
      break;
    case Kind::RandomAngles:
      put("state.fix_last_phi", s.fix_last_phi ? "true" : "false");
      break;
  }
  put("k_max", std::to_string(e.k_max));
  put("grid.t_lo", format_double(e.grid.t_lo));
  put("grid.t_hi", format_double(e.grid.t_hi));
  put("grid.points", std::to_string(e.grid.points));
  put("grid.spacing", e.grid.spacing == experiments::Spacing::Log ? "log" : "linear");
  if (!e.grid.explicit_times.empty()) put("grid.times", join(e.grid.explicit_times));
  put("window.t_lo", format_double(e.window.t_lo));
  put("window.t_hi", format_double(e.window.t_hi));
  put("reference.kind", ensemble::to_string(e.reference.kind));
  put("reference.samples", std::to_string(e.reference.samples));
  put("evolve.method", experiments::to_string(e.method));
  put("basis.kind", models::to_string(e.basis));
  put("basis.phi", format_double(e.phi));
  put("eigen.momentum", e.momentum ? "true" : "false");
  put("eigen.mid_window", e.mid_window ? "true" : "false");
  put("benchmark.flavor", ensemble::to_string(e.bench_flavor));
  put("benchmark.samples", std::to_string(e.bench_samples));
  if (!e.scaling_n.empty()) put("scaling.N", join(e.scaling_n));
  put("p_floor", format_double(e.p_floor));
  put("out.dir", cfg.out_dir);
  if (!cfg.out_name.empty()) put("out.name", cfg.out_name);
  return os.str();
}

void validate(const RunConfig& cfg) {
  const ExperimentConfig& e = cfg.exp;
  std::vector<int> sizes = cfg.kind == ExperimentKind::Scaling ? e.scaling_n : std::vector<int>{e.model.n};
  if (cfg.kind == ExperimentKind::Scaling && sizes.size() < 3) throw ValidationError("scaling.N needs at least three sizes");
  for (int n : sizes) {
    ExperimentConfig c = e;
    c.model.n = n;
    const auto space = experiments::model_space(c);
    const auto bp = hilbert::bipartition(space, c.n_a, c.rule);
    if (cfg.kind == ExperimentKind::Bloch && bp.a_space().dim() != 2)
      throw ValidationError("bloch runs need an A space of dimension 2");
    if (cfg.kind == ExperimentKind::Quench || cfg.kind == ExperimentKind::Bloch || cfg.kind == ExperimentKind::Scaling)
      (void)evolve::build_initial_state(space, c.state);
    (void)models::hamiltonian_terms(c.model);
    if (e.basis != models::BasisChange::Identity && space.kind() != hilbert::SpaceKind::Full)
      throw ValidationError("basis changes need a full space");
  }
  if (e.model.perturbation != models::Perturbation::None && e.model.name != models::ModelName::Pxp)
    throw ValidationError("model.perturbation applies to pxp only");
  if (e.momentum && e.model.bc != hilbert::Boundary::Periodic)
    throw ValidationError("eigen.momentum needs periodic boundaries");
  if (cfg.kind == ExperimentKind::Scaling) {
    const auto times = e.grid.times();
    const auto inside = std::count_if(times.begin(), times.end(),
                                      [&](double t) { return t >= e.window.t_lo && t <= e.window.t_hi; });
    if (inside < 5) throw ValidationError("the late-time window holds fewer than 5 grid points");
  }
  if (e.bench_samples < 5 && cfg.kind == ExperimentKind::Benchmark)
    throw ValidationError("benchmark.samples must be at least 5");
}

std::string output_stem(const RunConfig& cfg) {
  if (!cfg.out_name.empty()) return cfg.out_name;
  std::string stem = to_string(cfg.kind) + "_" + models::to_string(cfg.exp.model.name);
  if (cfg.kind != ExperimentKind::Scaling) stem += "_n" + std::to_string(cfg.exp.model.n);
  return stem;
}

}  // namespace deepthermal::config
