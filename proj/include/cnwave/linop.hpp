#pragma once

// Linearized operators around the cnoidal profile,
//   L+ = -dxx + omega - 3Q^2,   L- = -dxx + omega - Q^2,
// assembled as dense symmetric matrices on an orthonormal real trigonometric
// basis of a symmetry sector: -dxx is diagonal (m^2), the potential is a
// multiplication operator discretized by grid quadrature (exact for
// band-limited products).  Also: the second variations S''_m (block-diagonal
// L+/L- acting on Re/Im) and S''_{m,eps} around the complex damped profile
// (real-linear, Re/Im coupled), spectra, quadratic forms, and constrained
// coercivity constants via projected generalized eigenproblems.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "profiles.hpp"
#include "torus.hpp"

namespace cnwave {

class TrigBasis {
 public:
  struct Fn {
    enum Kind { Const, Cos, Sin } kind;
    int m;
  };

  static TrigBasis make(Sector sec, int n) {
    detail::check_grid_size(n);
    TrigBasis b;
    b.sector_ = sec;
    b.n_ = n;
    switch (sec) {
      case Sector::Full:
        b.fns_.push_back({Fn::Const, 0});
        for (int m = 1; m < n / 2; ++m) {
          b.fns_.push_back({Fn::Cos, m});
          b.fns_.push_back({Fn::Sin, m});
        }
        break;
      case Sector::S:
        b.fns_.push_back({Fn::Const, 0});
        for (int m = 2; m < n / 2; m += 2) {
          b.fns_.push_back({Fn::Cos, m});
          b.fns_.push_back({Fn::Sin, m});
        }
        break;
      case Sector::Aplus:
        for (int m = 1; m < n / 2; m += 2) b.fns_.push_back({Fn::Cos, m});
        break;
      case Sector::Aminus:
        for (int m = 1; m < n / 2; m += 2) b.fns_.push_back({Fn::Sin, m});
        break;
    }
    return b;
  }

  // the half-anti-periodic space A = A+ directsum A- (odd modes, both parities)
  static TrigBasis make_half_anti(int n) {
    detail::check_grid_size(n);
    TrigBasis b;
    b.sector_ = Sector::Full;
    b.n_ = n;
    for (int m = 1; m < n / 2; m += 2) {
      b.fns_.push_back({Fn::Cos, m});
      b.fns_.push_back({Fn::Sin, m});
    }
    return b;
  }

  int dim() const { return static_cast<int>(fns_.size()); }
  int n_grid() const { return n_; }
  Sector sector() const { return sector_; }
  const std::vector<Fn>& functions() const { return fns_; }

  double sample(const Fn& f, double x) const {
    switch (f.kind) {
      case Fn::Const: return 1.0 / std::sqrt(two_pi);
      case Fn::Cos: return std::cos(f.m * x) / std::sqrt(pi);
      case Fn::Sin: return std::sin(f.m * x) / std::sqrt(pi);
    }
    return 0.0;
  }

  // dim x n matrix of sampled basis values (rows orthonormal in L^2)
  Eigen::MatrixXd sample_matrix() const {
    Eigen::MatrixXd phi(dim(), n_);
    auto x = grid(n_);
    for (int a = 0; a < dim(); ++a)
      for (int j = 0; j < n_; ++j) phi(a, j) = sample(fns_[a], x[j]);
    return phi;
  }

  // L^2 coordinates of the real part of f (exact for band-limited fields)
  Eigen::VectorXd coords(const SpectralField& f) const {
    if (f.size() != n_) throw std::invalid_argument("grid size mismatch");
    Eigen::VectorXd c(dim());
    auto x = grid(n_);
    const double w = two_pi / n_;
    for (int a = 0; a < dim(); ++a) {
      double acc = 0;
      for (int j = 0; j < n_; ++j)
        acc += f.samples()[j].real() * sample(fns_[a], x[j]);
      c(a) = acc * w;
    }
    return c;
  }

  SpectralField field(const Eigen::VectorXd& c, Sector sec) const {
    std::vector<cplx> s(n_, cplx(0, 0));
    auto x = grid(n_);
    for (int a = 0; a < dim(); ++a)
      for (int j = 0; j < n_; ++j)
        s[j] += cplx(c(a) * sample(fns_[a], x[j]), 0);
    return SpectralField::from_samples(std::move(s), sec);
  }

  SpectralField field(const Eigen::VectorXd& c) const {
    return field(c, sector_);
  }

  Eigen::VectorXd h1_weights() const {
    Eigen::VectorXd w(dim());
    for (int a = 0; a < dim(); ++a) w(a) = 1.0 + fns_[a].m * fns_[a].m;
    return w;
  }

 private:
  Sector sector_ = Sector::Full;
  int n_ = 0;
  std::vector<Fn> fns_;
};

namespace detail {

// multiplication operator by the real samples v on the basis:
// phi diag(v * 2pi/n) phi^T
inline Eigen::MatrixXd multiplication_matrix(const TrigBasis& b,
                                             const std::vector<double>& v) {
  Eigen::MatrixXd phi = b.sample_matrix();
  Eigen::VectorXd w(b.n_grid());
  const double q = two_pi / b.n_grid();
  for (int j = 0; j < b.n_grid(); ++j) w(j) = v[j] * q;
  return phi * w.asDiagonal() * phi.transpose();
}

inline Eigen::MatrixXd laplacian_matrix(const TrigBasis& b) {
  Eigen::VectorXd d(b.dim());
  for (int a = 0; a < b.dim(); ++a) {
    int m = b.functions()[a].m;
    d(a) = static_cast<double>(m) * m;
  }
  return Eigen::MatrixXd(d.asDiagonal());
}

}  // namespace detail

enum class OperatorKind { Lplus, Lminus };

struct SymmetricOperator {
  TrigBasis basis;
  Eigen::MatrixXd mat;
  std::string kind;
  double m = 0, k = 0, freq = 0;  // freq = omega (or lambda for eps-operators)
};

inline SymmetricOperator assemble_on(OperatorKind kind,
                                     const CnoidalProfile& p, TrigBasis b) {
  const double c = kind == OperatorKind::Lplus ? 3.0 : 1.0;
  std::vector<double> v(p.field.size());
  for (int j = 0; j < p.field.size(); ++j) {
    double q = p.field.samples()[j].real();
    v[j] = p.omega - c * q * q;
  }
  SymmetricOperator op{b, detail::laplacian_matrix(b) +
                              detail::multiplication_matrix(b, v),
                       kind == OperatorKind::Lplus ? "L+" : "L-", p.m, p.k.k,
                       p.omega};
  return op;
}

inline SymmetricOperator assemble(OperatorKind kind, const CnoidalProfile& p,
                                  Sector sec = Sector::Full) {
  return assemble_on(kind, p, TrigBasis::make(sec, p.field.size()));
}

inline SpectralField apply(const SymmetricOperator& op, const SpectralField& f) {
  return op.basis.field(op.mat * op.basis.coords(f), f.sector());
}

struct OperatorSpectrum {
  std::vector<double> eigenvalues;  // ascending
  std::vector<SpectralField> eigenvectors;
  Sector sector;
};

inline OperatorSpectrum spectrum_of(const Eigen::MatrixXd& mat,
                                    const TrigBasis& basis, int n_eigs) {
  if (n_eigs > mat.rows())
    throw std::invalid_argument("more eigenpairs requested than dimension");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
  OperatorSpectrum sp;
  sp.sector = basis.sector();
  for (int i = 0; i < n_eigs; ++i) {
    sp.eigenvalues.push_back(es.eigenvalues()(i));
    sp.eigenvectors.push_back(basis.field(es.eigenvectors().col(i)));
  }
  return sp;
}

inline OperatorSpectrum spectrum(const SymmetricOperator& op, int n_eigs) {
  return spectrum_of(op.mat, op.basis, n_eigs);
}

// closed-form lowest eigenvalues, with B = 4K^2/pi^2:
//   L-: (k^2-1)B [dn, S], 0 [cn, A+], k^2 B [sn, A-]
//   L+: (c- - 3k^2)B [S], -3k^2 B [A+ type], 0 [d/dx cn, A-],
//       (3-3k^2)B [S], (c+ - 3k^2)B [S],  c+- = k^2+1 +- 2 sqrt(k^4-k^2+1)
inline std::array<double, 3> lminus_eigenvalues_closed(Modulus km) {
  const double k = km.k, K = complete_K(km);
  const double B = 4.0 * K * K / (pi * pi);
  return {(k * k - 1.0) * B, 0.0, k * k * B};
}

inline std::array<double, 5> lplus_eigenvalues_closed(Modulus km) {
  const double k = km.k, K = complete_K(km);
  const double B = 4.0 * K * K / (pi * pi);
  const double r = 2.0 * std::sqrt(std::pow(k, 4) - k * k + 1.0);
  const double cm = k * k + 1.0 - r, cp = k * k + 1.0 + r;
  return {(cm - 3.0 * k * k) * B, -3.0 * k * k * B, 0.0,
          (3.0 - 3.0 * k * k) * B, (cp - 3.0 * k * k) * B};
}

// quadratic form (A f, f); complex fields contribute both parts,
// (A Re f, Re f) + (A Im f, Im f)
inline double quadratic_form(const SymmetricOperator& op,
                             const SpectralField& f) {
  Eigen::VectorXd cr = op.basis.coords(f);
  Eigen::VectorXd ci = op.basis.coords(imag_part(f));
  return cr.dot(op.mat * cr) + ci.dot(op.mat * ci);
}

// real-linear operator on (Re, Im) coordinate pairs over a shared sector basis
struct RealPairOperator {
  TrigBasis basis;
  Eigen::MatrixXd mat;  // 2d x 2d
  std::string kind;
  double m = 0, k = 0, freq = 0;

  Eigen::VectorXd coords(const SpectralField& f) const {
    const int d = basis.dim();
    Eigen::VectorXd z(2 * d);
    z.head(d) = basis.coords(f);
    z.tail(d) = basis.coords(imag_part(f));
    return z;
  }

  SpectralField field(const Eigen::VectorXd& z) const {
    const int d = basis.dim();
    auto re = basis.field(z.head(d), basis.sector());
    auto im = basis.field(z.tail(d), basis.sector());
    return re + cplx(0, 1) * im;
  }
};

// S''_m around the real profile: block-diagonal (L+ on Re, L- on Im)
inline RealPairOperator assemble_second_variation(const CnoidalProfile& p,
                                                  Sector sec) {
  auto lp = assemble(OperatorKind::Lplus, p, sec);
  auto lm = assemble(OperatorKind::Lminus, p, sec);
  const int d = lp.basis.dim();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  mat.topLeftCorner(d, d) = lp.mat;
  mat.bottomRightCorner(d, d) = lm.mat;
  return {lp.basis, std::move(mat), "S''_m", p.m, p.k.k, p.omega};
}

// S''_{m,eps} around a complex profile Q with multiplier lambda:
//   eta -> -eta'' + lambda eta - 2|Q|^2 eta - Q^2 conj(eta)
// on (Re, Im) pairs: blocks [[-dxx+lambda-2|Q|^2-P, -S], [-S, -dxx+lambda-2|Q|^2+P]]
// with P = Re Q^2, S = Im Q^2
inline RealPairOperator assemble_second_variation_eps(const SpectralField& Q,
                                                      double lambda,
                                                      Sector sec) {
  TrigBasis b = TrigBasis::make(sec, Q.size());
  const int n = Q.size(), d = b.dim();
  std::vector<double> diag_re(n), diag_im(n), off(n);
  for (int j = 0; j < n; ++j) {
    const cplx q = Q.samples()[j];
    const double a2 = std::norm(q);
    const cplx q2 = q * q;
    diag_re[j] = lambda - 2.0 * a2 - q2.real();
    diag_im[j] = lambda - 2.0 * a2 + q2.real();
    off[j] = -q2.imag();
  }
  Eigen::MatrixXd lap = detail::laplacian_matrix(b);
  Eigen::MatrixXd mat(2 * d, 2 * d);
  mat.topLeftCorner(d, d) = lap + detail::multiplication_matrix(b, diag_re);
  mat.bottomRightCorner(d, d) = lap + detail::multiplication_matrix(b, diag_im);
  mat.topRightCorner(d, d) = detail::multiplication_matrix(b, off);
  mat.bottomLeftCorner(d, d) = mat.topRightCorner(d, d);
  return {b, std::move(mat), "S''_m_eps", 0, 0, lambda};
}

inline SpectralField apply(const RealPairOperator& op, const SpectralField& f) {
  return op.field(op.mat * op.coords(f));
}

inline double quadratic_form(const RealPairOperator& op,
                             const SpectralField& f) {
  Eigen::VectorXd z = op.coords(f);
  return z.dot(op.mat * z);
}

inline OperatorSpectrum spectrum(const RealPairOperator& op, int n_eigs) {
  if (n_eigs > op.mat.rows())
    throw std::invalid_argument("more eigenpairs requested than dimension");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.mat);
  OperatorSpectrum sp;
  sp.sector = op.basis.sector();
  for (int i = 0; i < n_eigs; ++i) {
    sp.eigenvalues.push_back(es.eigenvalues()(i));
    sp.eigenvectors.push_back(op.field(es.eigenvectors().col(i)));
  }
  return sp;
}

enum class NormKind { L2, H1 };

namespace detail {

inline double projected_min_rayleigh(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& gram_diag,
                                     const Eigen::MatrixXd& C) {
  const auto dim = A.rows();
  Eigen::MatrixXd U;
  if (C.cols() == 0) {
    U = Eigen::MatrixXd::Identity(dim, dim);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(C);
    if (rank_qr.rank() < C.cols())
      throw std::invalid_argument("degenerate constraint set");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    Eigen::MatrixXd full = qr.householderQ();
    U = full.rightCols(dim - C.cols());
  }
  Eigen::MatrixXd Ap = U.transpose() * A * U;
  Eigen::MatrixXd Gp = U.transpose() * gram_diag.asDiagonal() * U;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ap, Gp);
  return ges.eigenvalues()(0);
}

}  // namespace detail

// smallest Rayleigh quotient (A f, f) / ||f||^2 over the orthogonal
// complement of the constraints, with the L^2 or H^1 norm downstairs
inline double coercivity_constant(const SymmetricOperator& op,
                                  const std::vector<SpectralField>& constraints,
                                  NormKind norm) {
  Eigen::MatrixXd C(op.basis.dim(), constraints.size());
  for (size_t i = 0; i < constraints.size(); ++i)
    C.col(i) = op.basis.coords(constraints[i]);
  Eigen::VectorXd g = norm == NormKind::H1
                          ? op.basis.h1_weights()
                          : Eigen::VectorXd::Ones(op.basis.dim());
  return detail::projected_min_rayleigh(op.mat, g, C);
}

inline double coercivity_constant(const RealPairOperator& op,
                                  const std::vector<SpectralField>& constraints,
                                  NormKind norm) {
  const int d = op.basis.dim();
  Eigen::MatrixXd C(2 * d, constraints.size());
  for (size_t i = 0; i < constraints.size(); ++i) C.col(i) = op.coords(constraints[i]);
  Eigen::VectorXd g(2 * d);
  Eigen::VectorXd w = norm == NormKind::H1 ? op.basis.h1_weights()
                                           : Eigen::VectorXd::Ones(d);
  g.head(d) = w;
  g.tail(d) = w;
  return detail::projected_min_rayleigh(op.mat, g, C);
}

}  // namespace cnwave
