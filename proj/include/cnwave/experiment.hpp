#pragma once

// Trajectory orchestration: reproducible seeded perturbations, diagnostic
// sampling with warm-started corrected-profile solves, and parallel sweeps
// over (m0, eps) parameter points.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <cnwave/evolve.hpp>
#include <cnwave/modulation.hpp>

namespace cnwave {

// fixed-seed combination of the first 6 odd cosine modes with complex
// coefficients, H1-normalized; Box-Muller over mt19937 keeps the draw
// bit-stable across platforms
inline SpectralField seeded_perturbation(int n, unsigned seed) {
  std::mt19937 gen(seed);
  auto uniform = [&] {
    return (static_cast<double>(gen()) + 1.0) / 4294967296.0;
  };
  std::vector<cplx> c(n, cplx(0, 0));
  for (int mode = 1; mode <= 11; mode += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const cplx z(r * std::cos(two_pi * u2), r * std::sin(two_pi * u2));
    c[mode] += 0.5 * z;
    c[n - mode] += 0.5 * z;
  }
  const double s = 1.0 / h1_norm(SpectralField::from_coeffs(c, Sector::Aplus));
  for (auto& z : c) z *= s;
  return SpectralField::from_coeffs(std::move(c), Sector::Aplus);
}

struct TrajectoryConfig {
  double m0 = 1.0;
  double eps = 0.01;
  double perturb_amp = 0.01;
  unsigned seed = 12345;
  double dt = 1e-3;
  double t_end = 100.0;
  int n_grid = 256;
  int sample_every = 100;
  bool sector_projection = false;
};

struct TrajectoryResult {
  TrajectoryConfig config;
  double initial_mass = 0;
  std::vector<DiagnosticsRecord> records;
  SpectralField final_state;
};

// evolve psi0 = Q_{m0} + amp * seeded perturbation, sampling diagnostics at
// the configured cadence; m(t) follows the decay law from the actual initial
// mass, so the decomposition's mass-consistency check stays exact
inline TrajectoryResult run_trajectory(const TrajectoryConfig& tc) {
  auto p0 = build_profile(tc.m0, tc.n_grid);
  const SpectralField psi0 =
      tc.perturb_amp == 0.0
          ? p0.field
          : p0.field + tc.perturb_amp * seeded_perturbation(tc.n_grid, tc.seed);

  TrajectoryResult out;
  out.config = tc;
  out.initial_mass = mass(psi0);

  EvolveConfig ec;
  ec.eps = tc.eps;
  ec.dt = tc.dt;
  ec.t_end = tc.t_end;
  ec.n_grid = tc.n_grid;
  ec.sample_every = tc.sample_every;
  ec.sector_projection = tc.sector_projection;

  double prev_gamma = 0.0;
  ApproxProfile warm;
  bool have_warm = false;
  auto observer = [&](double t, const SpectralField& psi) {
    const double mt = std::exp(-2 * tc.eps * t) * out.initial_mass;
    auto p = build_profile(mt, tc.n_grid);
    ApproxProfile a = have_warm ? build_corrected(mt, tc.eps, tc.n_grid, warm)
                                : build_corrected(mt, tc.eps, tc.n_grid);
    warm = a;
    have_warm = true;
    auto r = diagnostics(t, psi, p, a, prev_gamma);
    prev_gamma = r.gamma;
    out.records.push_back(r);
  };
  out.final_state = run(psi0, ec, observer);
  fill_gamma_dot(out.records);
  return out;
}

inline int thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CNWAVE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("CNWAVE_THREADS must be a positive integer");
    cap = static_cast<int>(std::min<long>(v, 1024));
  }
  return cap;
}

inline std::vector<TrajectoryResult> run_trajectories(
    const std::vector<TrajectoryConfig>& cfgs) {
  std::vector<TrajectoryResult> results(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  const int workers =
      std::min<int>(thread_cap(), static_cast<int>(cfgs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfgs.size(); ++i)
      results[i] = run_trajectory(cfgs[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < cfgs.size();) {
        try {
          results[i] = run_trajectory(cfgs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// like run_trajectories, but failures are reported per job instead of
// aborting the whole sweep
struct SweepOutcome {
  std::vector<TrajectoryResult> results;
  std::vector<std::string> errors;  // errors[i] empty on success
};

inline SweepOutcome run_sweep(const std::vector<TrajectoryConfig>& cfgs) {
  SweepOutcome out;
  out.results.resize(cfgs.size());
  out.errors.assign(cfgs.size(), std::string{});
  auto work = [&](std::size_t i) {
    try {
      out.results[i] = run_trajectory(cfgs[i]);
    } catch (const std::exception& e) {
      out.errors[i] = e.what();
    }
  };
  const int workers =
      std::min<int>(thread_cap(), static_cast<int>(cfgs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < cfgs.size();) work(i);
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace cnwave
