// Command-line entry point: run, list-models, validate, bench.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deepthermal/config.hpp"
#include "deepthermal/error.hpp"
#include "deepthermal/evolve.hpp"
#include "deepthermal/models.hpp"
#include "deepthermal/output.hpp"
#include "deepthermal/parallel.hpp"
#include "deepthermal/runner.hpp"
#include "deepthermal/simd/kernels.hpp"

namespace dt = deepthermal;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitInternal = 1;

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

int report_error(const char* kind, int code, const std::string& message) {
  std::cerr << "error: kind=" << kind << " code=" << code << " message=" << quoted(message) << "\n";
  return code;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void list_models() {
  auto row = [](const std::string& model, const std::string& defaults, const std::string& notes) {
    std::printf("%-6s %-29s %s\n", model.c_str(), defaults.c_str(), notes.c_str());
  };
  row("model", "defaults", "notes");
  row("syk", "seed=0", "J_abcd ~ N(0, 6/(2N)^3), one draw per a<b<c<d from stream \"syk\"");
  row("ising", "h=" + short_double(dt::models::kIsingH) + " g=" + short_double(dt::models::kIsingG),
      "h=(1+sqrt5)/4, g=(sqrt5+5)/8");
  row("east", "(none)", "open: X_1 + sum P_{j-1} X_j; periodic: P_N X_1 replaces X_1");
  row("pxp", "mu=" + short_double(dt::models::kPxpMu), "blockaded space; chemical potential mu sum n_j");
  row("pxpz", "h=" + short_double(dt::models::kPxpzH), "pxp perturbation -h sum PXP (Z_{j-2} + Z_{j+2})");
  row("pxpxp", "lambda=" + short_double(dt::models::kPxpxpLambda), "pxp perturbation +lambda sum PXPXP");
}

void bench(std::size_t log2n, int repeat) {
  const std::size_t n = std::size_t{1} << log2n;
  dt::CVector x = dt::CVector::Random(static_cast<Eigen::Index>(n));
  dt::CVector y = dt::CVector::Zero(static_cast<Eigen::Index>(n));
  dt::CVector w = dt::CVector::Random(static_cast<Eigen::Index>(n));
  const std::size_t m = 256;
  dt::CVector v = dt::CVector::Random(static_cast<Eigen::Index>(m));
  dt::CMatrix mat = dt::CMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  using clock = std::chrono::steady_clock;
  auto time_ms = [&](auto&& fn) {
    const auto t0 = clock::now();
    for (int r = 0; r < repeat; ++r) fn();
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count() / repeat;
  };
  std::printf("kernel        isa      ms/call   (n=%zu, her_rank1 m=%zu)\n", n, m);
  for (auto isa : {dt::simd::Isa::Scalar, dt::simd::Isa::Avx2}) {
    if (!dt::simd::cpu_supports(isa)) continue;
    const auto& k = isa == dt::simd::Isa::Scalar ? dt::simd::scalar_kernels() : *dt::simd::avx2_kernels();
    const std::string name(dt::simd::isa_name(isa));
    std::printf("caxpy         %-7s  %.4f\n", name.c_str(),
                time_ms([&] { k.caxpy(n, dt::cplx(0.5, 0.25), x.data(), y.data()); }));
    std::printf("flip_apply    %-7s  %.4f\n", name.c_str(),
                time_ms([&] { k.flip_apply(n, 5, w.data(), x.data(), y.data()); }));
    std::printf("dot           %-7s  %.4f\n", name.c_str(), time_ms([&] { (void)k.dot(n, x.data(), y.data()); }));
    std::printf("her_rank1     %-7s  %.4f\n", name.c_str(), time_ms([&] { k.her_rank1(m, 0.1, v.data(), mat.data()); }));
  }
  dt::models::ModelSpec spec;
  spec.name = dt::models::ModelName::Ising;
  spec.n = 10;
  const auto space = dt::hilbert::build_space(spec.n, dt::hilbert::SpaceKind::Full, dt::hilbert::Boundary::Open);
  const auto h = dt::models::build_hamiltonian(spec, space);
  const auto t0 = clock::now();
  const auto eig = dt::evolve::diagonalize(h);
  std::printf("diagonalize   ising N=10 (dim %zu)  %.1f ms\n", eig.count(),
              std::chrono::duration<double, std::milli>(clock::now() - t0).count());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepthermal: projected ensembles and deep thermalization diagnostics"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  std::string run_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config and write CSV + manifest");
  run_cmd->add_option("config", run_path, "config file")->required();

  app.add_subcommand("list-models", "print models, parameters and defaults");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "parse and check a config without running it");
  validate_cmd->add_option("config", validate_path, "config file")->required();

  std::size_t bench_log2n = 16;
  int bench_repeat = 20;
  auto* bench_cmd = app.add_subcommand("bench", "timing report for kernels and a reference diagonalization");
  bench_cmd->add_option("--log2n", bench_log2n, "vector length exponent")->check(CLI::Range(4, 26));
  bench_cmd->add_option("--repeat", bench_repeat, "repetitions per kernel")->check(CLI::Range(1, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("parse", kExitParse, e.what());
  }

  try {
    dt::set_thread_count(threads);
    if (*run_cmd) {
      const auto cfg = dt::config::load_config(run_path);
      const auto report = dt::runner::run(cfg, dt::runner::resolve_out_dir(cfg));
      std::cout << "run_id=" << report.run_id << "\n";
      for (const auto& f : report.files) std::cout << "wrote " << f.string() << "\n";
      for (const auto& line : report.summary) std::cout << line << "\n";
    } else if (app.got_subcommand("list-models")) {
      list_models();
    } else if (*validate_cmd) {
      const auto cfg = dt::config::load_config(validate_path);
      dt::config::validate(cfg);
      std::cout << "ok run_id=" << dt::output::run_id(cfg) << " stem=" << dt::config::output_stem(cfg) << "\n";
    } else if (*bench_cmd) {
      bench(bench_log2n, bench_repeat);
    }
  } catch (const dt::Error& e) {
    switch (e.kind()) {
      case dt::ErrorKind::Parse:
        return report_error("parse", kExitParse, e.what());
      case dt::ErrorKind::Validation:
        return report_error("validation", kExitValidation, e.what());
      case dt::ErrorKind::Numeric:
        return report_error("numeric", kExitNumeric, e.what());
    }
  } catch (const std::exception& e) {
    return report_error("internal", kExitInternal, e.what());
  }
  return 0;
}
