#pragma once

// Jacobi elliptic functions and complete elliptic integrals from first
// principles: AGM iteration for K and E, descending-amplitude (Landen)
// recursion for am/sn/cn/dn, Jacobi zeta accumulation for the incomplete
// second-kind integral.  Modulus derivatives in closed form.
//
// Note on dcn_dk: Byrd & Friedman 710.52 is sometimes quoted with the
// complete integral E(k) inside the pointwise formula; the correct statement
// uses the incomplete integral E(am(x,k),k) (the Jacobi epsilon function).
// We implement the incomplete version, which matches finite differences of
// cn in k to full precision; the complete-integral reading does not.

#include <cmath>
#include <stdexcept>
#include <string>

namespace cnwave {

struct Modulus {
  double k;

  explicit Modulus(double k_in) {
    if (!(k_in > 0.0 && k_in < 1.0))
      throw std::domain_error("modulus must lie in (0,1), got " +
                              std::to_string(k_in));
    k = std::min(std::max(k_in, 1e-8), 1.0 - 1e-8);
  }
};

struct EllipticValues {
  double K;
  double E;
  double Theta;
};

namespace detail {

constexpr int agm_max_iter = 40;
constexpr double agm_tol = 1e-15;

struct AgmTables {
  double a[agm_max_iter + 1];
  double b[agm_max_iter + 1];
  double c[agm_max_iter + 1];
  int n;  // last index with meaningful c
};

inline AgmTables agm_tables(double k) {
  AgmTables t;
  t.a[0] = 1.0;
  t.b[0] = std::sqrt((1.0 - k) * (1.0 + k));
  t.c[0] = k;
  int i = 0;
  while (i < agm_max_iter && std::fabs(t.c[i]) > agm_tol) {
    t.a[i + 1] = 0.5 * (t.a[i] + t.b[i]);
    t.b[i + 1] = std::sqrt(t.a[i] * t.b[i]);
    t.c[i + 1] = 0.5 * (t.a[i] - t.b[i]);
    ++i;
  }
  t.n = i;
  return t;
}

// Theta(k) = int_0^{pi/2} cos^2(th)/sqrt(1-k^2 sin^2 th) dth.  For small k
// the defining combination (E-(1-k^2)K)/k^2 cancels catastrophically, so a
// power series is used below the switch point.
inline double theta_series(double k) {
  const double k2 = k * k;
  double term = 0.5, acc = 0.5, p = 1.0;
  for (int j = 1; j <= 24; ++j) {
    double r = (2.0 * j - 1.0) * (2.0 * j - 1.0) / (4.0 * j * (j + 1.0));
    term *= r;
    p *= k2;
    acc += term * p;
    if (term * p < 1e-18) break;
  }
  return 1.5707963267948966 * acc;
}

}  // namespace detail

inline EllipticValues elliptic_values(Modulus km) {
  const double k = km.k;
  auto t = detail::agm_tables(k);
  const double K = 3.141592653589793238 / (2.0 * t.a[t.n]);
  double csum = 0.0, w = 0.5;  // 2^{n-1} c_n^2, n = 0..N
  for (int i = 0; i <= t.n; ++i) {
    csum += w * t.c[i] * t.c[i];
    w *= 2.0;
  }
  const double E = K * (1.0 - csum);
  const double Theta =
      k < 0.35 ? detail::theta_series(k) : (E - (1.0 - k * k) * K) / (k * k);
  return {K, E, Theta};
}

inline double complete_K(Modulus k) { return elliptic_values(k).K; }
inline double complete_E(Modulus k) { return elliptic_values(k).E; }
inline double theta_integral(Modulus k) { return elliptic_values(k).Theta; }

struct JacobiValues {
  double sn, cn, dn;
  double am;   // amplitude of the reduced argument, plus winding
  double eps;  // incomplete second-kind integral E(am(x,k),k) at the full x
};

// Simultaneous sn/cn/dn/am and Jacobi epsilon by the descending-amplitude
// recursion on the AGM tables.  The argument is reduced mod 4K; epsilon picks
// up 4E per period (quasi-periodicity).
inline JacobiValues jacobi(double x, Modulus km) {
  const double k = km.k;
  auto t = detail::agm_tables(k);
  auto vals = elliptic_values(km);
  const double fourK = 4.0 * vals.K;
  const double q = std::round(x / fourK);
  const double xr = x - q * fourK;  // in [-2K, 2K]

  double phi = std::ldexp(t.a[t.n] * xr, t.n);
  double zeta = 0.0;
  for (int i = t.n; i >= 1; --i) {
    double s = t.c[i] / t.a[i] * std::sin(phi);
    s = std::min(1.0, std::max(-1.0, s));
    zeta += t.c[i] * std::sin(phi);
    phi = 0.5 * (phi + std::asin(s));
  }
  JacobiValues out;
  out.sn = std::sin(phi);
  out.cn = std::cos(phi);
  out.dn = std::sqrt(1.0 - k * k * out.sn * out.sn);
  out.am = phi + q * 2.0 * 3.141592653589793238;
  out.eps = zeta + vals.E / vals.K * x;
  return out;
}

inline double jacobi_epsilon(double x, Modulus k) { return jacobi(x, k).eps; }

// dK/dk = (E+(k^2-1)K)/(k(1-k^2)) = k*Theta/(1-k^2), cancellation-free.
inline double dK_dk(Modulus km) {
  auto v = elliptic_values(km);
  return km.k * v.Theta / (1.0 - km.k * km.k);
}

// dE/dk = (E-K)/k = k*(Theta - K), cancellation-free.
inline double dE_dk(Modulus km) {
  auto v = elliptic_values(km);
  return km.k * (v.Theta - v.K);
}

// d/dk [E + (k^2-1)K] = k*K
inline double dEk2K_dk(Modulus km) { return km.k * elliptic_values(km).K; }

// pointwise modulus derivative of cn (Byrd & Friedman 710.52, incomplete
// second-kind integral; see header note)
inline double dcn_dk(double x, Modulus km) {
  const double k = km.k;
  auto j = jacobi(x, km);
  return j.sn * j.dn / (k * (1.0 - k * k)) *
         ((k * k - 1.0) * x + j.eps - k * k * j.sn * j.cn / j.dn);
}

// Richardson-extrapolated second derivative in k (step h, one level); used
// for d^2/dk^2 of elliptic quantities whose closed second derivatives the
// construction does not provide.
template <class F>
double second_derivative_richardson(F&& f, double k, double h = 1e-4) {
  auto d2 = [&](double hh) {
    return (f(k + hh) - 2.0 * f(k) + f(k - hh)) / (hh * hh);
  };
  const double dh = d2(h), dh2 = d2(0.5 * h);
  return (4.0 * dh2 - dh) / 3.0;
}

}  // namespace cnwave
