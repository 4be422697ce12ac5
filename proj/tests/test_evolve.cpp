#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <cnwave/evolve.hpp>
#include <cnwave/profiles.hpp>

using namespace cnwave;
using Catch::Matchers::WithinAbs;

namespace {

// deterministic smooth A+ perturbation on modes 1 and 3, H1-normalized
SpectralField smooth_perturbation(int n, double amp) {
  std::vector<cplx> c(n, cplx(0, 0));
  c[1] = cplx(0.4, 0.3) * 0.5;
  c[n - 1] = c[1];
  c[3] = cplx(-0.2, 0.5) * 0.5;
  c[n - 3] = c[3];
  auto v = SpectralField::from_coeffs(c, Sector::Aplus);
  const double s = amp / h1_norm(v);
  for (auto& z : c) z *= s;
  return SpectralField::from_coeffs(std::move(c), Sector::Aplus);
}

}  // namespace

TEST_CASE("config validation rejects out-of-range parameters", "[evolve]") {
  auto bad = [](EvolveConfig cfg) {
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
  };
  bad({.eps = -0.01});
  bad({.dt = 0.0});
  bad({.dt = 0.2});
  bad({.t_end = -1.0});
  bad({.eps = 1.0, .t_end = 51.0});
  bad({.sample_every = 0});
  bad({.n_grid = 30});
  CHECK_NOTHROW(validate(EvolveConfig{}));

  auto p = build_profile(1.0, 128);
  EvolveConfig cfg{.n_grid = 256};
  REQUIRE_THROWS_AS(run(p.field, cfg), std::invalid_argument);
}

TEST_CASE("one step damps the mass by exactly exp(-2 eps dt)", "[evolve]") {
  auto p = build_profile(1.0, 256);
  auto psi0 = p.field + smooth_perturbation(256, 0.3);
  EvolveConfig cfg{.eps = 0.02, .dt = 1e-3, .t_end = 1e-3};
  auto psi = step(psi0, cfg);
  CHECK_THAT(mass(psi) / (std::exp(-2 * cfg.eps * cfg.dt) * mass(psi0)),
             WithinAbs(1.0, 1e-13));

  SpectralField cur = psi0;
  for (long i = 1; i <= 10; ++i) cur = step(cur, cfg, i);
  CHECK_THAT(mass(cur) / (std::exp(-2 * cfg.eps * 10 * cfg.dt) * mass(psi0)),
             WithinAbs(1.0, 1e-13));
}

TEST_CASE("undamped flow preserves the cnoidal orbit", "[evolve]") {
  auto p = build_profile(1.0, 256);
  EvolveConfig cfg{.eps = 0.0, .dt = 1e-3, .t_end = 10.0};
  auto psi = run(p.field, cfg);
  const double gamma = std::arg(correlation(psi, p.field));
  auto diff = std::exp(cplx(0, -gamma)) * psi - p.field;
  CHECK(h1_norm(diff) <= 1e-6);
}

TEST_CASE("splitting is second order in dt", "[evolve]") {
  auto p = build_profile(1.0, 256);
  auto psi0 = p.field + smooth_perturbation(256, 0.05);
  auto final_at = [&](double dt) {
    EvolveConfig cfg{.eps = 0.01, .dt = dt, .t_end = 0.5};
    return run(psi0, cfg);
  };
  auto ref = final_at(4e-3 / 32.0);
  double e1 = h1_norm(final_at(4e-3) - ref);
  double e2 = h1_norm(final_at(2e-3) - ref);
  double e3 = h1_norm(final_at(1e-3) - ref);
  CHECK_THAT(std::log2(e1 / e2), WithinAbs(2.0, 0.1));
  CHECK_THAT(std::log2(e2 / e3), WithinAbs(2.0, 0.1));
}

TEST_CASE("long damped runs keep the sector and the mass law", "[evolve]") {
  auto p = build_profile(1.0, 256);
  for (bool proj : {false, true}) {
    EvolveConfig cfg{.eps = 0.01,
                     .dt = 1e-2,
                     .t_end = 100.0,
                     .sector_projection = proj};
    auto psi = run(p.field, cfg);
    CHECK(l2_norm(psi - project_sector(psi, Sector::Aplus)) <= 1e-10);
    CHECK_THAT(mass(psi) / (std::exp(-2 * cfg.eps * cfg.t_end) * mass(p.field)),
               WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("zero initial field stays zero", "[evolve]") {
  EvolveConfig cfg{.eps = 0.01, .dt = 1e-2, .t_end = 1.0};
  auto psi = run(SpectralField::zero(256, Sector::Aplus), cfg);
  CHECK(l2_norm(psi) == 0.0);
}

TEST_CASE("undamped energy drift stays tiny", "[evolve]") {
  auto p = build_profile(1.0, 256);
  EvolveConfig cfg{.eps = 0.0, .dt = 1e-3, .t_end = 10.0, .sample_every = 100};
  const double e0 = energy(p.field);
  double worst = 0;
  run(p.field, cfg, [&](double, const SpectralField& f) {
    worst = std::max(worst, std::fabs(energy(f) - e0));
  });
  CHECK(worst <= 1e-8);
}

TEST_CASE("non-finite states are reported with the step index", "[evolve]") {
  std::vector<cplx> s(256, cplx(0.1, 0));
  s[3] = cplx(std::numeric_limits<double>::infinity(), 0);
  auto bad = SpectralField::from_samples(std::move(s));
  EvolveConfig cfg{.eps = 0.0, .dt = 1e-3, .t_end = 1.0};
  REQUIRE_THROWS_WITH(step(bad, cfg, 7),
                      Catch::Matchers::ContainsSubstring("step 7"));
  REQUIRE_THROWS_WITH(run(bad, cfg),
                      Catch::Matchers::ContainsSubstring("step 1"));
}

TEST_CASE("observer fires at the sampling cadence", "[evolve]") {
  auto p = build_profile(1.0, 256);
  EvolveConfig cfg{.eps = 0.01, .dt = 1e-3, .t_end = 0.1, .sample_every = 10};
  std::vector<double> times;
  bool first_is_initial = false;
  run(p.field, cfg, [&](double t, const SpectralField& f) {
    if (times.empty())
      first_is_initial = l2_norm(f - p.field) == 0.0;
    times.push_back(t);
  });
  REQUIRE(times.size() == 11);
  CHECK(first_is_initial);
  for (int i = 0; i <= 10; ++i) CHECK_THAT(times[i], WithinAbs(0.01 * i, 1e-12));
}
