#pragma once

// The cnoidal family on the 2*pi torus:
//   Q_k(x) = sqrt(2) k (2K/pi) cn(2Kx/pi, k),   omega(k) = 4K^2(2k^2-1)/pi^2
// parameterized by total mass m = M[Q_m] via the strictly increasing map
//   m(k) = (8/pi) K (E - (1-k^2)K) = (8/pi) k^2 K Theta.
// Q_m solves -Q'' + omega Q - Q^3 = 0 and lives in the A+ sector.
//
// Modulus derivatives are closed-form except the second k-derivatives, which
// use Richardson-extrapolated differences of the closed first derivatives.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "elliptic.hpp"
#include "torus.hpp"

namespace cnwave {

inline double omega_of_k(Modulus km) {
  const double K = complete_K(km);
  return 4.0 * K * K * (2.0 * km.k * km.k - 1.0) / (pi * pi);
}

inline double mass_of_k(Modulus km) {
  auto v = elliptic_values(km);
  return 8.0 / pi * km.k * km.k * v.K * v.Theta;
}

// dm/dk = (8/pi) [k^4 Theta^2 + k^2 (1-k^2) K^2] / (k (1-k^2))
inline double dm_dk(Modulus km) {
  const double k = km.k;
  auto v = elliptic_values(km);
  const double num = std::pow(k, 4) * v.Theta * v.Theta +
                     k * k * (1.0 - k * k) * v.K * v.K;
  return 8.0 / pi * num / (k * (1.0 - k * k));
}

// d omega / dm as the ratio of the closed k-derivatives, simplified:
//   [(2k^2-1) K Theta + 2(1-k^2) K^2] / (pi [k^2 Theta^2 + (1-k^2) K^2])
inline double domega_dm(Modulus km) {
  const double k = km.k;
  auto v = elliptic_values(km);
  const double num =
      (2.0 * k * k - 1.0) * v.K * v.Theta + 2.0 * (1.0 - k * k) * v.K * v.K;
  const double den = k * k * v.Theta * v.Theta + (1.0 - k * k) * v.K * v.K;
  return num / (pi * den);
}

inline Modulus k_of_m(double m, double m_max = 20.0) {
  if (!(m > 0.0) || m > m_max)
    throw std::domain_error("mass must lie in (0, " + std::to_string(m_max) +
                            "], got " + std::to_string(m));
  double lo = 1e-8, hi = 1.0 - 1e-8;
  if (m <= mass_of_k(Modulus(lo))) return Modulus(lo);
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (mass_of_k(Modulus(mid)) < m ? lo : hi) = mid;
  }
  double k = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    double step = (mass_of_k(Modulus(k)) - m) / dm_dk(Modulus(k));
    double next = k - step;
    if (!(next > 0.0 && next < 1.0)) break;
    k = next;
    if (std::fabs(step) < 1e-16) break;
  }
  return Modulus(k);
}

struct CnoidalProfile {
  double m;
  Modulus k;
  double omega;
  SpectralField field;  // real-valued, sector A+
};

inline CnoidalProfile build_profile(double m, int n_grid) {
  if (n_grid < 64)
    throw std::invalid_argument("profile grid must have at least 64 points");
  Modulus km = k_of_m(m);
  const double K = complete_K(km);
  const double amp = std::sqrt(2.0) * km.k * 2.0 * K / pi;
  auto x = grid(n_grid);
  std::vector<cplx> s(n_grid);
  for (int j = 0; j < n_grid; ++j)
    s[j] = cplx(amp * jacobi(2.0 * K * x[j] / pi, km).cn, 0.0);
  return {m, km, omega_of_k(km), SpectralField::from_samples(std::move(s),
                                                             Sector::Aplus)};
}

namespace detail {

// d/dk of Q_k(x) = sqrt(2) k (2K/pi) cn(u,k), u = 2Kx/pi: product rule plus
// the chain through u.  The x-linear term inside dcn_dk uses the unreduced
// argument (quasi-periodicity is carried by the epsilon function).
inline SpectralField dQ_dk_field(Modulus km, int n_grid) {
  const double k = km.k;
  const double K = complete_K(km);
  const double Kp = dK_dk(km);
  const double c = 2.0 * std::sqrt(2.0) / pi;
  auto x = grid(n_grid);
  std::vector<cplx> s(n_grid);
  for (int j = 0; j < n_grid; ++j) {
    const double u = 2.0 * K * x[j] / pi;
    auto jj = jacobi(u, km);
    const double du_dk = 2.0 * Kp * x[j] / pi;
    s[j] = cplx(c * ((K + k * Kp) * jj.cn +
                     k * K * (dcn_dk(u, km) - jj.sn * jj.dn * du_dk)),
                0.0);
  }
  return SpectralField::from_samples(std::move(s), Sector::Aplus);
}

}  // namespace detail

inline SpectralField dQ_dk(const CnoidalProfile& p) {
  return detail::dQ_dk_field(p.k, p.field.size());
}

inline SpectralField dQ_dm(const CnoidalProfile& p) {
  return (1.0 / dm_dk(p.k)) * dQ_dk(p);
}

// d^2m/dk^2 by Richardson-extrapolated central differences of dm_dk
inline double d2m_dk2(Modulus km, double h = 1e-4) {
  auto d1 = [&](double hh) {
    return (dm_dk(Modulus(km.k + hh)) - dm_dk(Modulus(km.k - hh))) / (2.0 * hh);
  };
  return (4.0 * d1(0.5 * h) - d1(h)) / 3.0;
}

// d^2Q/dm^2 = (d^2Q/dk^2 dm/dk - dQ/dk d^2m/dk^2) / (dm/dk)^3, with d^2Q/dk^2
// by Richardson differences of the closed-form dQ/dk
inline SpectralField d2Q_dm2(const CnoidalProfile& p, double h = 1e-4) {
  const int n = p.field.size();
  auto d1 = [&](double hh) {
    return (1.0 / (2.0 * hh)) * (detail::dQ_dk_field(Modulus(p.k.k + hh), n) -
                                 detail::dQ_dk_field(Modulus(p.k.k - hh), n));
  };
  auto d2Q_dk2 = (1.0 / 3.0) * (4.0 * d1(0.5 * h) - d1(h));
  const double mp = dm_dk(p.k), mpp = d2m_dk2(p.k, h);
  return (1.0 / std::pow(mp, 3)) * (mp * d2Q_dk2 - mpp * dQ_dk(p));
}

struct ProfileDerivatives {
  SpectralField dQ_dm;
  SpectralField d2Q_dm2;
  double domega_dm;
  double dm_dk;
};

inline ProfileDerivatives profile_derivatives(const CnoidalProfile& p) {
  return {dQ_dm(p), d2Q_dm2(p), domega_dm(p.k), dm_dk(p.k)};
}

inline double mass(const SpectralField& f) {
  const double nrm = l2_norm(f);
  return 0.5 * nrm * nrm;
}

inline double energy(const SpectralField& f) {
  auto fx = derivative(f, 1);
  auto a2 = multiply(f, conj_field(f));  // |f|^2, real
  const double nx = l2_norm(fx);
  return 0.5 * nx * nx - 0.25 * l2_inner(a2, a2);
}

inline double action(const SpectralField& f, double m) {
  return energy(f) + omega_of_k(k_of_m(m)) * mass(f);
}

// stationary-equation residual -Q'' + omega Q - Q^3 (zero for exact profiles)
inline SpectralField stationary_residual(const CnoidalProfile& p) {
  auto q3 = multiply(multiply(p.field, p.field), p.field);
  return (-1.0) * derivative(p.field, 2) + p.omega * p.field - q3;
}

}  // namespace cnwave
