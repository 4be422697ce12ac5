#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <vector>

#include <cnwave/experiment.hpp>

using namespace cnwave;
using Catch::Matchers::WithinAbs;

TEST_CASE("seeded perturbation is reproducible and lives on odd low modes",
          "[experiment]") {
  auto v1 = seeded_perturbation(256, 12345);
  auto v2 = seeded_perturbation(256, 12345);
  for (int k = 0; k < 256; ++k) {
    CHECK(v1.coeffs()[k].real() == v2.coeffs()[k].real());
    CHECK(v1.coeffs()[k].imag() == v2.coeffs()[k].imag());
  }
  CHECK(l2_norm(seeded_perturbation(256, 54321) - v1) > 0.1);

  CHECK_THAT(h1_norm(v1), WithinAbs(1.0, 1e-12));
  CHECK(sector_residual(v1, Sector::Aplus) <= 1e-15);
  for (int k : {0, 2, 4, 6, 8, 10, 12, 13, 15, 100})
    CHECK(std::abs(v1.coeffs()[k]) == 0.0);
  for (int k : {1, 3, 5, 7, 9, 11}) {
    CHECK(std::abs(v1.coeffs()[k]) > 0.0);
    CHECK(std::abs(v1.coeffs()[k] - v1.coeffs()[256 - k]) == 0.0);
  }
}

TEST_CASE("unperturbed undamped trajectory stays on the orbit",
          "[experiment]") {
  TrajectoryConfig tc;
  tc.m0 = 1.0;
  tc.eps = 0.0;
  tc.perturb_amp = 0.0;
  tc.dt = 1e-3;
  tc.t_end = 5.0;
  tc.sample_every = 100;
  auto res = run_trajectory(tc);
  REQUIRE(res.records.size() == 51);
  CHECK_THAT(res.initial_mass, WithinAbs(1.0, 1e-10));
  CHECK(res.records.front().t == 0.0);
  CHECK_THAT(res.records[7].t, WithinAbs(0.7, 1e-12));
  for (const auto& r : res.records) CHECK(r.xi_h1 <= 1e-6);
}

TEST_CASE("damped trajectory follows the mass decay law", "[experiment]") {
  TrajectoryConfig tc;
  tc.eps = 0.02;
  tc.perturb_amp = 0.02;
  tc.t_end = 2.0;
  tc.sample_every = 200;
  auto res = run_trajectory(tc);
  CHECK_THAT(mass(res.final_state),
             WithinAbs(std::exp(-2 * tc.eps * tc.t_end) * res.initial_mass,
                       1e-12));
  for (const auto& r : res.records)
    CHECK_THAT(r.m, WithinAbs(std::exp(-2 * tc.eps * r.t) * res.initial_mass,
                              1e-12));
}

TEST_CASE("thread cap honors the environment variable", "[experiment]") {
  const char* saved = std::getenv("CNWAVE_THREADS");
  std::string saved_value = saved ? saved : "";

  setenv("CNWAVE_THREADS", "3", 1);
  CHECK(thread_cap() == 3);
  setenv("CNWAVE_THREADS", "abc", 1);
  REQUIRE_THROWS_AS(thread_cap(), std::invalid_argument);
  setenv("CNWAVE_THREADS", "0", 1);
  REQUIRE_THROWS_AS(thread_cap(), std::invalid_argument);
  unsetenv("CNWAVE_THREADS");
  CHECK(thread_cap() >= 1);

  if (saved)
    setenv("CNWAVE_THREADS", saved_value.c_str(), 1);
  else
    unsetenv("CNWAVE_THREADS");
}

TEST_CASE("parallel sweep matches serial runs exactly", "[experiment]") {
  std::vector<TrajectoryConfig> cfgs(3);
  cfgs[0] = {.m0 = 1.0, .eps = 0.02, .perturb_amp = 0.02, .t_end = 1.0,
             .sample_every = 250};
  cfgs[1] = {.m0 = 0.5, .eps = 0.01, .perturb_amp = 0.01, .t_end = 1.0,
             .sample_every = 250};
  cfgs[2] = {.m0 = 1.0, .eps = 0.005, .perturb_amp = 0.005, .t_end = 1.0,
             .sample_every = 250};

  const char* saved = std::getenv("CNWAVE_THREADS");
  std::string saved_value = saved ? saved : "";
  setenv("CNWAVE_THREADS", "1", 1);
  auto serial = run_trajectories(cfgs);
  setenv("CNWAVE_THREADS", "3", 1);
  auto parallel = run_trajectories(cfgs);
  if (saved)
    setenv("CNWAVE_THREADS", saved_value.c_str(), 1);
  else
    unsetenv("CNWAVE_THREADS");

  REQUIRE(serial.size() == parallel.size());
  for (std::size_t j = 0; j < serial.size(); ++j) {
    REQUIRE(serial[j].records.size() == parallel[j].records.size());
    for (std::size_t i = 0; i < serial[j].records.size(); ++i) {
      CHECK(serial[j].records[i].gamma == parallel[j].records[i].gamma);
      CHECK(serial[j].records[i].xi_h1 == parallel[j].records[i].xi_h1);
      CHECK(serial[j].records[i].lyap_eps == parallel[j].records[i].lyap_eps);
    }
    CHECK(l2_norm(serial[j].final_state - parallel[j].final_state) == 0.0);
  }

  std::vector<TrajectoryConfig> bad(1);
  bad[0].n_grid = 30;
  REQUIRE_THROWS_AS(run_trajectories(bad), std::invalid_argument);
}
