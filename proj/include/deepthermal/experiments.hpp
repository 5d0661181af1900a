#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deepthermal/ensemble.hpp"
#include "deepthermal/evolve.hpp"
#include "deepthermal/hilbert.hpp"
#include "deepthermal/models.hpp"

namespace deepthermal::experiments {

enum class Spacing { Log, Linear };

struct TimeGrid {
  double t_lo = 0.1;
  double t_hi = 1e3;
  int points = 60;
  Spacing spacing = Spacing::Log;
  std::vector<double> explicit_times;  // overrides the generated grid when non-empty

  std::vector<double> times() const;
  bool operator==(const TimeGrid&) const = default;
};

struct Window {
  double t_lo = 1e2;
  double t_hi = 1e3;
  bool operator==(const Window&) const = default;
};

enum class EvolveMethod { Auto, Dense, Chebyshev };
std::string to_string(EvolveMethod m);
EvolveMethod evolve_method_from_string(const std::string& text);

/// Above this dimension the auto method switches to Chebyshev propagation.
inline constexpr std::size_t kAutoDenseLimit = 8192;

struct ExperimentConfig {
  models::ModelSpec model;
  std::optional<int> sector;  // Z_P eigenvalue filter on the parent space
  int n_a = 1;
  hilbert::PostselectRule rule;
  evolve::InitialStateSpec state;
  int k_max = 3;
  TimeGrid grid;
  Window window;
  ensemble::ReferenceSpec reference;
  EvolveMethod method = EvolveMethod::Auto;
  double p_floor = ensemble::kDefaultPFloor;
  std::uint64_t seed = 0;

  // Eigenstate sweeps.
  models::BasisChange basis = models::BasisChange::Identity;
  double phi = 0.0;
  bool momentum = false;
  bool mid_window = false;

  // Typical-state benchmarks.
  ensemble::Flavor bench_flavor = ensemble::Flavor::Complex;
  std::size_t bench_samples = 20;

  // Scaling sweeps.
  std::vector<int> scaling_n;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Default grid and late-time window for a model.
TimeGrid default_grid(models::ModelName name);
Window default_window(models::ModelName name);

struct ResultRecord {
  std::string run_id;
  std::string model;
  int n = 0;
  int n_a = 0;
  double nb_eff = 0.0;
  std::string bc;
  std::string rule;
  std::string state;
  std::uint64_t seed = 0;
  std::string x_kind;  // t, E, K+E or sample
  double x = 0.0;
  int k = 1;
  double delta = 0.0;
  std::string reference;
  double dropped_weight = 0.0;
};

/// Parent space of a config: blockaded for PXP, full otherwise, then the
/// optional parity sector.
hilbert::BasisSpace model_space(const ExperimentConfig& cfg);

/// Evolution backend chosen for a config.
EvolveMethod resolved_method(const ExperimentConfig& cfg, std::size_t dim);

/// Exact eigensystem; SYK on the full space is split by parity.
evolve::EigenSystem model_eigensystem(const models::ModelSpec& spec, const hilbert::BasisSpace& space);

/// Time-evolved states on the grid, delivered in grid order.
void evolve_on_grid(const ExperimentConfig& cfg, const evolve::StateVector& psi0, const std::vector<double>& times,
                    const std::function<void(std::size_t, const evolve::StateVector&)>& visit);

struct QuenchResult {
  std::vector<ResultRecord> records;
  std::vector<double> times;
  std::map<std::string, std::string> hashes;
};

QuenchResult quench_sweep(const ExperimentConfig& cfg);

struct LateTimeAverage {
  int k = 1;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

/// Mean of Delta^(k) over the time records inside the window, per k.
std::vector<LateTimeAverage> late_time_average(const std::vector<ResultRecord>& records, const Window& window);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPoint {
  int n = 0;
  double nb_eff = 0.0;
  int k = 1;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

struct ScalingResult {
  std::vector<ResultRecord> records;
  std::vector<ScalingPoint> points;
  std::map<int, LinearFit> fits;  // per k: log(Delta) against N_B_eff
  std::map<std::string, std::string> hashes;
};

ScalingResult scaling_sweep(const ExperimentConfig& cfg);

struct EigenResult {
  std::vector<ResultRecord> records;
  std::map<std::string, std::string> hashes;
  std::size_t degenerate_groups = 0;
};

EigenResult eigenstate_sweep(const ExperimentConfig& cfg);

struct PowerLawFit {
  double exponent = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
};

/// Slope of log Delta against log t over the decade before the series first
/// drops below its plateau level (mean plus two standard deviations of the
/// last 10 points).
PowerLawFit powerlaw_fit(const std::vector<double>& t, const std::vector<double>& delta);

struct BenchmarkStat {
  int k = 1;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

struct BenchmarkResult {
  std::vector<ResultRecord> records;
  std::vector<BenchmarkStat> stats;
};

/// Typical states on the parent space, projected and compared with the
/// configured reference. Sample i uses the stream typical:<i>.
BenchmarkResult typical_benchmark(const ExperimentConfig& cfg);

struct BlochRecord {
  std::string run_id;
  std::string model;
  int n = 0;
  std::string state;
  double t = 0.0;
  Bits zb = 0;
  int n_b = 0;
  double p = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  int alpha_zb = 1;
};

struct BlochResult {
  std::vector<ResultRecord> records;
  std::vector<BlochRecord> points;
  std::map<std::string, std::string> hashes;
};

/// Quench that also exports the Bloch vector of every entry (N_A = 1 or any
/// A space of dimension 2).
BlochResult bloch_sweep(const ExperimentConfig& cfg);

/// Largest violation of Delta^(1) <= Delta^(2) <= ... within each row group
/// (same state and x); negative or zero when monotone.
double monotonicity_violation(const std::vector<ResultRecord>& records);

}  // namespace deepthermal::experiments
