#include <catch2/catch_amalgamated.hpp>

#include <cnwave/torus.hpp>

#include <random>

using namespace cnwave;
using Catch::Matchers::WithinAbs;

namespace {

SpectralField random_field(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  std::vector<cplx> s(n);
  for (auto& v : s) v = cplx(dist(gen), dist(gen));
  return SpectralField::from_samples(s);
}

SpectralField sampled(int n, auto&& f, Sector sec = Sector::Full) {
  auto x = grid(n);
  std::vector<cplx> s(n);
  for (int j = 0; j < n; ++j) s[j] = f(x[j]);
  return SpectralField::from_samples(s, sec);
}

}  // namespace

TEST_CASE("grid size must be a positive multiple of 4", "[torus]") {
  CHECK_THROWS_AS(SpectralField::zero(0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField::zero(-8), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField::zero(6), std::invalid_argument);
  CHECK_NOTHROW(SpectralField::zero(8));
}

TEST_CASE("grid points are equispaced on [0,2pi)", "[torus]") {
  auto x = grid(8);
  REQUIRE(x.size() == 8);
  CHECK_THAT(x[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(x[3], WithinAbs(3.0 * two_pi / 8.0, 1e-15));
}

TEST_CASE("transform round trip on random fields", "[torus]") {
  for (int n : {16, 64, 256}) {
    auto u = random_field(n, 7u + n);
    auto v = SpectralField::from_coeffs(u.coeffs());
    double num = 0, den = 0;
    for (int j = 0; j < n; ++j) {
      num += std::norm(v.samples()[j] - u.samples()[j]);
      den += std::norm(u.samples()[j]);
    }
    CHECK(std::sqrt(num / den) <= 1e-13);
  }
}

TEST_CASE("coefficient indexing matches analytic modes", "[torus]") {
  int n = 32;
  auto u = sampled(n, [](double x) { return std::exp(cplx(0, 3.0 * x)); });
  CHECK_THAT(std::abs(u.coeff(3) - 1.0), WithinAbs(0.0, 1e-13));
  CHECK_THAT(std::abs(u.coeff(-3)), WithinAbs(0.0, 1e-13));
  auto v = sampled(n, [](double x) { return std::exp(cplx(0, -x)); });
  CHECK_THAT(std::abs(v.coeff(-1) - 1.0), WithinAbs(0.0, 1e-13));
}

TEST_CASE("Parseval identity", "[torus]") {
  int n = 128;
  auto u = random_field(n, 99);
  double coeff_sum = 0;
  for (int m = -n / 2; m < n / 2; ++m) coeff_sum += std::norm(u.coeff(m));
  double grid_norm2 = l2_norm(u) * l2_norm(u);
  CHECK_THAT(grid_norm2 / (two_pi * coeff_sum), WithinAbs(1.0, 1e-12));
}

TEST_CASE("sector projection on trigonometric examples", "[torus]") {
  int n = 64;
  auto cosx = sampled(n, [](double x) { return cplx(std::cos(x), 0); });
  auto cos2x = sampled(n, [](double x) { return cplx(std::cos(2 * x), 0); });
  auto sinx = sampled(n, [](double x) { return cplx(std::sin(x), 0); });

  CHECK(l2_norm(project_sector(cosx, Sector::Aplus) - cosx) <= 1e-13);
  CHECK(l2_norm(project_sector(cos2x, Sector::Aplus)) <= 1e-13);
  CHECK(l2_norm(project_sector(sinx, Sector::Aplus)) <= 1e-13);
  CHECK(l2_norm(project_sector(sinx, Sector::Aminus) - sinx) <= 1e-13);
  CHECK(l2_norm(project_sector(cos2x, Sector::S) - cos2x) <= 1e-13);
}

TEST_CASE("projection is idempotent and orthogonal", "[torus]") {
  int n = 64;
  auto u = random_field(n, 3);
  for (auto sec : {Sector::S, Sector::Aplus, Sector::Aminus}) {
    auto p = project_sector(u, sec);
    CHECK(l2_norm(project_sector(p, sec) - p) <= 1e-12 * l2_norm(u));
    CHECK(std::abs(l2_inner(u - p, p)) <= 1e-12 * l2_norm(u) * l2_norm(u));
  }
}

TEST_CASE("three-way sector decomposition reassembles the field", "[torus]") {
  int n = 64;
  auto u = random_field(n, 11);
  auto parts = sector_split(u);
  auto r = parts.s + parts.aplus + parts.aminus - u;
  CHECK(l2_norm(r) <= 1e-12 * l2_norm(u));
}

TEST_CASE("Aplus-tagged field has odd cosine coefficients only", "[torus]") {
  int n = 32;
  auto u = project_sector(random_field(n, 5), Sector::Aplus);
  for (int m = -n / 2; m < n / 2; m += 2)
    CHECK(std::abs(u.coeff(m)) <= 1e-13);
  for (int m = 1; m < n / 2; m += 2)
    CHECK(std::abs(u.coeff(m) - u.coeff(-m)) <= 1e-13);
}

TEST_CASE("l2_inner on trigonometric examples", "[torus]") {
  int n = 64;
  auto cosx = sampled(n, [](double x) { return cplx(std::cos(x), 0); });
  auto sinx = sampled(n, [](double x) { return cplx(std::sin(x), 0); });
  CHECK_THAT(l2_inner(cosx, cosx), WithinAbs(pi, 1e-13));
  CHECK_THAT(l2_inner(cosx, cplx(0, 1) * cosx), WithinAbs(0.0, 1e-13));
  CHECK_THAT(l2_inner(cosx, sinx), WithinAbs(0.0, 1e-13));
}

TEST_CASE("l2_inner is symmetric and real-bilinear", "[torus]") {
  int n = 32;
  auto f = random_field(n, 21), g = random_field(n, 22), h = random_field(n, 23);
  CHECK_THAT(l2_inner(f, g), WithinAbs(l2_inner(g, f), 1e-12));
  CHECK_THAT(l2_inner(f + 2.0 * h, g),
             WithinAbs(l2_inner(f, g) + 2.0 * l2_inner(h, g), 1e-11));
}

TEST_CASE("l2_inner rejects dimension mismatch", "[torus]") {
  CHECK_THROWS_AS(l2_inner(SpectralField::zero(16), SpectralField::zero(32)),
                  std::invalid_argument);
}

TEST_CASE("h1_norm on known fields", "[torus]") {
  int n = 64;
  auto cosx = sampled(n, [](double x) { return cplx(std::cos(x), 0); });
  auto one = sampled(n, [](double) { return cplx(1, 0); });
  auto e3 = sampled(n, [](double x) { return std::exp(cplx(0, 3 * x)); });
  CHECK_THAT(h1_norm(cosx), WithinAbs(std::sqrt(two_pi), 1e-13));
  CHECK_THAT(h1_norm(one), WithinAbs(std::sqrt(two_pi), 1e-13));
  CHECK_THAT(h1_norm(e3), WithinAbs(std::sqrt(10.0 * two_pi), 1e-12));
}

TEST_CASE("spectral derivative on trigonometric examples", "[torus]") {
  int n = 64;
  auto cosx = sampled(n, [](double x) { return cplx(std::cos(x), 0); },
                      Sector::Aplus);
  auto sinx = sampled(n, [](double x) { return cplx(std::sin(x), 0); });
  auto one = sampled(n, [](double) { return cplx(1, 0); });

  auto d1 = derivative(cosx, 1);
  CHECK(l2_norm(d1 + sinx) <= 1e-12);
  CHECK(d1.sector() == Sector::Aminus);
  CHECK(derivative(d1, 1).sector() == Sector::Aplus);
  CHECK(l2_norm(derivative(cosx, 2) + cosx) <= 1e-12);
  CHECK(l2_norm(derivative(one, 1)) <= 1e-13);
}

TEST_CASE("pointwise products follow the sector algebra", "[torus]") {
  int n = 64;
  auto a = project_sector(random_field(n, 31), Sector::Aplus);
  // even realization of S (as the potential Q^2 always is)
  auto s = sampled(n, [](double x) {
    return cplx(1.0, 0.7) * std::cos(2 * x) + cplx(0.3, -0.2) * std::cos(6 * x);
  }, Sector::S);

  auto aa = multiply(a, a);
  CHECK(aa.sector() == Sector::S);
  CHECK(sector_residual(aa, Sector::S) <= 1e-12 * l2_norm(aa));

  auto sa = multiply(s, a);
  CHECK(sa.sector() == Sector::Aplus);
  CHECK(sector_residual(sa, Sector::Aplus) <= 1e-12 * l2_norm(sa));
}

TEST_CASE("two-thirds dealiasing truncates high modes", "[torus]") {
  int n = 24;
  auto u = dealias_two_thirds(random_field(n, 41));
  for (int m = -n / 2; m < n / 2; ++m)
    if (std::abs(m) > n / 3) CHECK(std::abs(u.coeff(m)) == 0.0);
}
