#pragma once

// Phase extraction, perturbation decompositions and Lyapunov diagnostics for
// damped cnoidal trajectories.  gamma minimizes ||e^{-i gamma} psi - Q||_{L2};
// xi = e^{-i gamma} psi - Q_m measures the distance to the undamped profile
// and eta = xi - (Q_{m,eps} - Q_m) the distance to the damping-corrected one,
// with the same gamma in both decompositions.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <cnwave/approx.hpp>
#include <cnwave/profiles.hpp>
#include <cnwave/torus.hpp>

namespace cnwave {

inline double optimal_gamma(const SpectralField& psi, const SpectralField& q,
                            double prev_gamma = 0.0) {
  const cplx corr = correlation(psi, q);
  if (std::abs(corr) <= 1e-14 * l2_norm(psi) * l2_norm(q))
    throw std::runtime_error(
        "degenerate phase: |(psi, Q)| is too small to determine gamma");
  double gamma = std::arg(corr);
  gamma += two_pi * std::round((prev_gamma - gamma) / two_pi);
  return gamma;
}

struct Decomposition {
  double gamma = 0;
  SpectralField xi;
  SpectralField eta;
};

inline Decomposition decompose(const SpectralField& psi,
                               const CnoidalProfile& p, const ApproxProfile& a,
                               double prev_gamma = 0.0) {
  if (std::fabs(a.m - p.m) > 1e-12 * std::max(1.0, p.m))
    throw std::invalid_argument("profile masses disagree: " +
                                std::to_string(p.m) + " vs " +
                                std::to_string(a.m));
  const double mass_drift = std::fabs(mass(psi) - p.m);
  if (mass_drift > 1e-8 * p.m)
    throw std::runtime_error("mass of psi drifted from the decay law: |" +
                             std::to_string(mass(psi)) + " - " +
                             std::to_string(p.m) + "| > 1e-8 m");
  Decomposition d;
  d.gamma = optimal_gamma(psi, p.field, prev_gamma);
  const auto shifted = std::exp(cplx(0, -d.gamma)) * psi;
  d.xi = shifted - p.field;
  d.eta = shifted - a.field;
  return d;
}

inline Decomposition decompose(const SpectralField& psi, double m, double eps,
                               double prev_gamma = 0.0) {
  return decompose(psi, build_profile(m, psi.size()),
                   build_corrected(m, eps, psi.size()), prev_gamma);
}

inline double lyapunov(const SpectralField& psi, const CnoidalProfile& p) {
  return energy(psi) - energy(p.field);
}

inline double lyapunov(const SpectralField& psi, double m) {
  return lyapunov(psi, build_profile(m, psi.size()));
}

// quadratic-plus-corrections expansion of E[psi] - E[Q_m] for mass-matched
// psi = e^{i gamma}(Q_m + xi):
//   1/2 [(L+ xi_R, xi_R) + (L- xi_I, xi_I)]
//     - int Q (xi_R^3 + xi_R xi_I^2) - 1/4 int |xi|^4
inline double lyapunov_expanded(const SpectralField& xi,
                                const CnoidalProfile& p) {
  const auto xr = real_part(xi);
  const auto xim = imag_part(xi);
  const auto q2 = multiply(p.field, p.field);
  const auto abs2 = real_part(multiply(xi, conj_field(xi)));
  auto sq = [](double v) { return v * v; };
  const double lp = sq(l2_norm(derivative(xr))) + p.omega * sq(l2_norm(xr)) -
                    3.0 * l2_inner(q2, multiply(xr, xr));
  const double lm = sq(l2_norm(derivative(xim))) + p.omega * sq(l2_norm(xim)) -
                    l2_inner(q2, multiply(xim, xim));
  const double cubic = l2_inner(multiply(p.field, xr), abs2);
  const double quartic = 0.25 * l2_inner(abs2, abs2);
  return 0.5 * (lp + lm) - cubic - quartic;
}

// expansion of the modified-action difference around the corrected profile:
//   1/2 (S''_{m,eps} eta, eta) - int |eta|^2 Re(conj(Q_eps) eta)
//     - 1/4 int |eta|^4
inline double lyapunov_eps_expanded(const SpectralField& eta,
                                    const ApproxProfile& a) {
  const auto abs2 = real_part(multiply(eta, conj_field(eta)));
  const auto qabs2 = real_part(multiply(a.field, conj_field(a.field)));
  auto sq = [](double v) { return v * v; };
  const double quad =
      sq(l2_norm(derivative(eta))) + a.lambda * sq(l2_norm(eta)) -
      2.0 * l2_inner(qabs2, abs2) -
      correlation(multiply(a.field, a.field), multiply(eta, eta)).real();
  const double cubic =
      correlation(multiply(abs2, eta), a.field).real();
  const double quartic = 0.25 * l2_inner(abs2, abs2);
  return 0.5 * quad - cubic - quartic;
}

struct DiagnosticsRecord {
  double t = 0;
  double m = 0;
  double gamma = 0;
  double xi_l2 = 0;
  double xi_h1 = 0;
  double eta_l2 = 0;
  double eta_h1 = 0;
  double lyap = 0;
  double lyap_eps = 0;
  double gamma_dot = 0;
  double omega = 0;
  double lambda_eps = 0;
  // closed-form source integrals of the dL/dt identity
  double cubic_source = 0;    // int Q^3 xi_R
  double quartic_source = 0;  // int 3 xi_R^2 Q^2 + xi_I^2 Q^2
                              //     + 2 xi_R |xi|^2 Q + |xi|^4 / 2
  // orthogonality deviations, stored unnormalized
  double ortho_xi_phase = 0;  // |(xi, i Q)|
  double ortho_xi_mass = 0;   // |(xi, Q) + M[xi]|
  double ortho_eta_phase = 0; // |(eta, i Q_eps)|
  double ortho_eta_mass = 0;  // |(eta, Q_eps) + M[eta]|
};

inline DiagnosticsRecord diagnostics(double t, const SpectralField& psi,
                                     const CnoidalProfile& p,
                                     const ApproxProfile& a,
                                     double prev_gamma = 0.0) {
  auto d = decompose(psi, p, a, prev_gamma);
  DiagnosticsRecord r;
  r.t = t;
  r.m = p.m;
  r.gamma = d.gamma;
  r.xi_l2 = l2_norm(d.xi);
  r.xi_h1 = h1_norm(d.xi);
  r.eta_l2 = l2_norm(d.eta);
  r.eta_h1 = h1_norm(d.eta);
  r.lyap = lyapunov(psi, p);
  r.lyap_eps = lyapunov_eps_expanded(d.eta, a);
  r.omega = p.omega;
  r.lambda_eps = a.lambda;

  const auto xr = real_part(d.xi);
  const auto abs2 = real_part(multiply(d.xi, conj_field(d.xi)));
  const auto q2 = multiply(p.field, p.field);
  r.cubic_source = l2_inner(multiply(q2, p.field), xr);
  r.quartic_source = 3.0 * l2_inner(q2, multiply(xr, xr)) +
                     l2_inner(q2, multiply(imag_part(d.xi), imag_part(d.xi))) +
                     2.0 * l2_inner(multiply(p.field, xr), abs2) +
                     0.5 * l2_inner(abs2, abs2);

  r.ortho_xi_phase = std::fabs(l2_inner(d.xi, cplx(0, 1) * p.field));
  r.ortho_xi_mass = std::fabs(l2_inner(d.xi, p.field) + mass(d.xi));
  r.ortho_eta_phase = std::fabs(l2_inner(d.eta, cplx(0, 1) * a.field));
  r.ortho_eta_mass = std::fabs(l2_inner(d.eta, a.field) + mass(d.eta));
  return r;
}

inline void fill_gamma_dot(std::vector<DiagnosticsRecord>& rec) {
  const std::size_t n = rec.size();
  if (n < 2) return;
  for (std::size_t i = 1; i + 1 < n; ++i)
    rec[i].gamma_dot =
        (rec[i + 1].gamma - rec[i - 1].gamma) / (rec[i + 1].t - rec[i - 1].t);
  rec[0].gamma_dot = (rec[1].gamma - rec[0].gamma) / (rec[1].t - rec[0].t);
  rec[n - 1].gamma_dot =
      (rec[n - 1].gamma - rec[n - 2].gamma) / (rec[n - 1].t - rec[n - 2].t);
}

// finite-difference d/dt of the Lyapunov functional against its closed form
//   dL/dt = -2 eps L + 2 eps int Q^3 xi_R + eps (quartic sources);
// returns the worst interior-sample deviation
inline double lyapunov_time_derivative_check(
    const std::vector<DiagnosticsRecord>& rec, double eps) {
  if (rec.size() < 3)
    throw std::invalid_argument(
        "need at least 3 samples for the derivative check");
  double worst = 0;
  for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
    const double fd =
        (rec[i + 1].lyap - rec[i - 1].lyap) / (rec[i + 1].t - rec[i - 1].t);
    const double rhs = -2 * eps * rec[i].lyap + 2 * eps * rec[i].cubic_source +
                       eps * rec[i].quartic_source;
    worst = std::max(worst, std::fabs(fd - rhs));
  }
  return worst;
}

struct RateEstimates {
  double omega_rate = 0;   // max |omega - gamma_dot| / (eps + ||xi||_H1)
  double lambda_rate = 0;  // max |lambda_eps - gamma_dot| / (eps + ||eta||_H1)
};

inline RateEstimates rate_estimates(const std::vector<DiagnosticsRecord>& rec,
                                    double eps) {
  if (rec.size() < 3)
    throw std::invalid_argument("need at least 3 samples for rate estimates");
  RateEstimates out;
  auto ratio = [](double num, double den) {
    if (den <= 1e-12) return num <= 1e-8 ? 0.0 : num / 1e-12;
    return num / den;
  };
  for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
    out.omega_rate =
        std::max(out.omega_rate, ratio(std::fabs(rec[i].omega - rec[i].gamma_dot),
                                       eps + rec[i].xi_h1));
    out.lambda_rate = std::max(
        out.lambda_rate, ratio(std::fabs(rec[i].lambda_eps - rec[i].gamma_dot),
                               eps + rec[i].eta_h1));
  }
  return out;
}

struct StabilityReport {
  double eps = 0;
  double m0 = 0;
  double sup_envelope = 0;         // sup_t e^{eps t} ||xi(t)||_H1
  double sup_envelope_scaled = 0;  // sup_envelope / sqrt(eps)
  double envelope_n0 = 0;          // N(0) with N(t) = e^{eps t} sqrt(L_eps(t))
  double envelope_K = 0;           // smallest K with N(t) <= K (N(0)+eps^2 t)
  long out_of_window = 0;          // samples with ||xi||_H1 > 0.5 sqrt(m)
};

inline StabilityReport decay_report(const std::vector<DiagnosticsRecord>& rec,
                                    double eps, double m0) {
  if (rec.empty()) throw std::invalid_argument("no samples");
  StabilityReport rep;
  rep.eps = eps;
  rep.m0 = m0;
  rep.envelope_n0 =
      std::exp(eps * rec.front().t) * std::sqrt(std::max(rec.front().lyap_eps, 0.0));
  for (const auto& r : rec) {
    rep.sup_envelope = std::max(rep.sup_envelope, std::exp(eps * r.t) * r.xi_h1);
    if (r.xi_h1 > 0.5 * std::sqrt(r.m)) ++rep.out_of_window;
    const double n_t = std::exp(eps * r.t) * std::sqrt(std::max(r.lyap_eps, 0.0));
    const double den = rep.envelope_n0 + eps * eps * r.t;
    if (den > 0) rep.envelope_K = std::max(rep.envelope_K, n_t / den);
  }
  rep.sup_envelope_scaled = eps > 0 ? rep.sup_envelope / std::sqrt(eps) : 0.0;
  return rep;
}

}  // namespace cnwave
