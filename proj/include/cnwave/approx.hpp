#pragma once

// Damping-corrected profile.  For eps > 0 the cnoidal wave no longer solves
// the damped equation; the corrected profile absorbs the first-order forcing
//   -f'' - |f|^2 f + lambda f = i eps (Q_m - 2m dQ/dm),  M[f] = m,
// solved by Newton iteration on the A+ trig coefficients together with the
// multiplier lambda.  The phase degeneracy at eps = 0 is removed by the gauge
// (f, iQ_m) = 0; the square bordered system carries one extra unknown mu
// multiplying the phase direction iQ_m, which vanishes at the solution.

#include <cnwave/linop.hpp>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

namespace cnwave {

struct ApproxProfile {
  double m = 0;
  double eps = 0;
  double lambda = 0;
  SpectralField field;
  double newton_residual = 0;
  int iterations = 0;
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0;
};

struct CorrectedOptions {
  int max_iter = 50;
  double eps_max = 0.05;
  double tol = 1e-11;         // declare convergence below this residual
  double accept_tol = 1e-10;  // stagnation is still a success below this
};

// forcing direction g = Q_m - 2m dQ/dm driving the correction
inline SpectralField forcing_direction(const CnoidalProfile& p) {
  return p.field - (2.0 * p.m) * dQ_dm(p);
}

namespace detail {

struct NewtonState {
  Eigen::VectorXd cr, ci;  // A+ coefficients of Re f, Im f
  double lambda = 0;
  double mu = 0;
};

inline SpectralField state_field(const TrigBasis& basis, const NewtonState& s) {
  return basis.field(s.cr) + cplx(0, 1) * basis.field(s.ci);
}

// residual of {equation, mass, gauge} with the mu-bordered phase term
inline Eigen::VectorXd corrected_residual(const TrigBasis& basis,
                                          const NewtonState& s,
                                          const CnoidalProfile& p,
                                          const SpectralField& g, double eps) {
  const int d = basis.dim();
  auto f = state_field(basis, s);
  auto f2 = multiply(f, conj_field(f));
  auto r1 = (-1.0) * derivative(f, 2) + s.lambda * f - multiply(f2, f) -
            cplx(0, eps) * g + cplx(0, s.mu) * p.field;
  Eigen::VectorXd r(2 * d + 2);
  r.head(d) = basis.coords(real_part(r1));
  r.segment(d, d) = basis.coords(imag_part(r1));
  r(2 * d) = mass(f) - p.m;
  r(2 * d + 1) = l2_inner(f, cplx(0, 1) * p.field);
  return r;
}

inline std::optional<NewtonState> corrected_newton(
    const TrigBasis& basis, NewtonState s, const CnoidalProfile& p,
    const SpectralField& g, double eps, const CorrectedOptions& opt,
    int& iterations, double& residual) {
  const int d = basis.dim();
  const Eigen::VectorXd qc = basis.coords(p.field);
  Eigen::VectorXd r = corrected_residual(basis, s, p, g, eps);
  residual = r.norm();
  for (iterations = 0; iterations < opt.max_iter; ++iterations) {
    if (residual <= opt.tol) return s;
    auto f = state_field(basis, s);
    auto sv = assemble_second_variation_eps(f, s.lambda, Sector::Aplus);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * d + 2, 2 * d + 2);
    jac.topLeftCorner(2 * d, 2 * d) = sv.mat;
    jac.col(2 * d).head(d) = s.cr;
    jac.col(2 * d).segment(d, d) = s.ci;
    jac.col(2 * d + 1).segment(d, d) = qc;
    jac.row(2 * d).head(d) = s.cr.transpose();
    jac.row(2 * d).segment(d, d) = s.ci.transpose();
    jac.row(2 * d + 1).segment(d, d) = qc.transpose();
    Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-r);

    NewtonState best = s;
    Eigen::VectorXd best_r = r;
    double best_norm = residual;
    double alpha = 1.0;
    for (int back = 0; back < 10; ++back, alpha *= 0.5) {
      NewtonState trial = s;
      trial.cr += alpha * delta.head(d);
      trial.ci += alpha * delta.segment(d, d);
      trial.lambda += alpha * delta(2 * d);
      trial.mu += alpha * delta(2 * d + 1);
      Eigen::VectorXd tr = corrected_residual(basis, trial, p, g, eps);
      if (tr.norm() < best_norm) {
        best = trial;
        best_r = tr;
        best_norm = tr.norm();
        break;
      }
    }
    if (best_norm >= residual) {  // stagnated
      if (residual <= opt.accept_tol) return s;
      return std::nullopt;
    }
    s = best;
    r = best_r;
    residual = best_norm;
  }
  if (residual <= opt.accept_tol) return s;
  return std::nullopt;
}

}  // namespace detail

inline ApproxProfile build_corrected(double m, double eps, int n_grid,
                                     const SpectralField* warm_field,
                                     double warm_lambda,
                                     const CorrectedOptions& opt) {
  if (eps < 0 || eps > opt.eps_max)
    throw std::domain_error("damping must lie in [0, eps_max]");
  auto p = build_profile(m, n_grid);
  auto basis = TrigBasis::make(Sector::Aplus, n_grid);
  auto g = forcing_direction(p);

  detail::NewtonState s;
  if (warm_field != nullptr) {
    s.cr = basis.coords(real_part(*warm_field));
    s.ci = basis.coords(imag_part(*warm_field));
    s.lambda = warm_lambda;
  } else {
    s.cr = basis.coords(p.field);
    s.ci = Eigen::VectorXd::Zero(basis.dim());
    s.lambda = p.omega;
  }

  int iterations = 0;
  double residual = 0;
  auto sol = detail::corrected_newton(basis, s, p, g, eps, opt, iterations,
                                      residual);
  if (!sol && warm_field == nullptr && eps > 0.011) {
    // continuation fallback: walk up in steps of 0.01, warm-starting
    sol = s;
    for (double e = 0.01; sol; e = std::min(e + 0.01, eps)) {
      sol = detail::corrected_newton(basis, *sol, p, g, e, opt, iterations,
                                     residual);
      if (e >= eps) break;
    }
  }
  if (!sol)
    throw NewtonError("corrected-profile iteration did not converge", residual);

  ApproxProfile out;
  out.m = m;
  out.eps = eps;
  out.lambda = sol->lambda;
  out.field = detail::state_field(basis, *sol);
  out.iterations = iterations;
  detail::NewtonState pure = *sol;
  pure.mu = 0;
  out.newton_residual = detail::corrected_residual(basis, pure, p, g, eps).norm();
  return out;
}

inline ApproxProfile build_corrected(double m, double eps, int n_grid = 256,
                                     const CorrectedOptions& opt = {}) {
  return build_corrected(m, eps, n_grid, nullptr, 0.0, opt);
}

inline ApproxProfile build_corrected(double m, double eps, int n_grid,
                                     const ApproxProfile& warm,
                                     const CorrectedOptions& opt = {}) {
  return build_corrected(m, eps, n_grid, &warm.field, warm.lambda, opt);
}

struct ClosenessReport {
  double ratio_q = 0;       // ||Q_{m,eps} - Q_m||_H1 / (eps sqrt(m))
  double ratio_lambda = 0;  // |omega - lambda| / (eps sqrt(m))
};

inline ClosenessReport closeness_report(const ApproxProfile& a) {
  if (a.eps <= 0) throw std::domain_error("closeness ratios need eps > 0");
  auto p = build_profile(a.m, a.field.size());
  const double scale = a.eps * std::sqrt(a.m);
  return {h1_norm(a.field - p.field) / scale,
          std::fabs(p.omega - a.lambda) / scale};
}

// residual forcing left after the correction; the corrected direction
// g_eps = Q_{m,eps} - 2m dQ_{m,eps}/dm replaces g and the difference is
// second order in eps.  Both m-derivatives use the same centered stencil so
// the O(h^2) truncation cancels in the difference.
inline double forcing_residual(double m, double eps, int n_grid = 256) {
  if (eps <= 0) throw std::domain_error("forcing residual needs eps > 0");
  const double h = std::max(1e-4, 1e-2 * m);
  auto sol = build_corrected(m, eps, n_grid);
  auto sol_p = build_corrected(m + h, eps, n_grid, sol);
  auto sol_m = build_corrected(m - h, eps, n_grid, sol);
  auto q_p = build_profile(m + h, n_grid).field;
  auto q_m = build_profile(m - h, n_grid).field;
  auto dq = (0.5 / h) * (q_p - q_m);
  auto dq_eps = (0.5 / h) * (sol_p.field - sol_m.field);
  auto q = build_profile(m, n_grid).field;
  auto diff = (q - (2.0 * m) * dq) - (sol.field - (2.0 * m) * dq_eps);
  return eps * h1_norm(diff);
}

// size of the forcing acting on the uncorrected perturbation
inline double uncorrected_forcing(double m, double eps, int n_grid = 256) {
  auto p = build_profile(m, n_grid);
  return eps * h1_norm(forcing_direction(p));
}

inline double modified_action(const ApproxProfile& a, const SpectralField& g,
                              const SpectralField& f) {
  return energy(f) + a.lambda * mass(f) -
         a.eps * l2_inner(cplx(0, 1) * g, f);
}

inline double modified_action(const ApproxProfile& a, const SpectralField& f) {
  auto p = build_profile(a.m, a.field.size());
  return modified_action(a, forcing_direction(p), f);
}

inline double lyapunov_eps(const ApproxProfile& a, const SpectralField& g,
                           const SpectralField& eta) {
  return modified_action(a, g, a.field + eta) - modified_action(a, g, a.field);
}

inline double lyapunov_eps(const ApproxProfile& a, const SpectralField& eta) {
  auto p = build_profile(a.m, a.field.size());
  return lyapunov_eps(a, forcing_direction(p), eta);
}

}  // namespace cnwave
