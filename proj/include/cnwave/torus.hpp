#pragma once

// Discrete 2*pi-periodic complex fields: spectral representation, symmetry
// sectors, norms and inner products.  Conventions:
//   grid      x_j = 2*pi*j/n,  j = 0..n-1
//   coeffs    c_m = (1/n) sum_j f(x_j) e^{-i m x_j},  m = -n/2 .. n/2-1
//   (f,g)     = Re int f conj(g) dx          (real inner product)
//   ||f||_H1  = sqrt(||f||_L2^2 + ||f'||_L2^2)
// Sectors: S = pi-periodic (even modes), A = half-anti-periodic (odd modes),
// A+ = A and even in x (cosine), A- = A and odd in x (sine).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace cnwave {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Sector { Full, S, Aplus, Aminus };

inline std::string sector_name(Sector s) {
  switch (s) {
    case Sector::Full: return "full";
    case Sector::S: return "S";
    case Sector::Aplus: return "A+";
    case Sector::Aminus: return "A-";
  }
  return "?";
}

// Sector of a pointwise product.  Follows the closure rules used throughout:
// products of A-fields are pi-periodic, S-fields arising here are even so
// S*A+ stays in A+ and S*A- in A-.
inline Sector product_sector(Sector a, Sector b) {
  if (a == Sector::Full || b == Sector::Full) return Sector::Full;
  if (a == Sector::S && b == Sector::S) return Sector::S;
  if (a != Sector::S && b != Sector::S) return Sector::S;
  return a == Sector::S ? b : a;
}

inline std::vector<double> grid(int n) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = two_pi * j / n;
  return x;
}

namespace detail {

inline void check_grid_size(int n) {
  if (n < 4 || n % 4 != 0)
    throw std::invalid_argument("n_grid must be a positive multiple of 4, got " +
                                std::to_string(n));
}

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

// DFT bin k holds logical mode m = k for k < n/2, m = k - n for k >= n/2.
inline int bin_mode(int k, int n) { return k < n / 2 ? k : k - n; }

inline std::vector<cplx> dft(const std::vector<cplx>& samples) {
  std::vector<cplx> c;
  fft_engine().fwd(c, samples);
  const double s = 1.0 / samples.size();
  for (auto& v : c) v *= s;
  return c;
}

inline std::vector<cplx> idft(const std::vector<cplx>& coeffs) {
  std::vector<cplx> s;
  fft_engine().inv(s, coeffs);
  const double f = static_cast<double>(coeffs.size());
  for (auto& v : s) v *= f;
  return s;
}

}  // namespace detail

class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField from_samples(std::vector<cplx> samples,
                                    Sector sec = Sector::Full) {
    detail::check_grid_size(static_cast<int>(samples.size()));
    SpectralField f;
    f.n_ = static_cast<int>(samples.size());
    f.coeffs_ = detail::dft(samples);
    f.samples_ = std::move(samples);
    f.sector_ = sec;
    return f;
  }

  // coeffs in DFT-bin order (bin k <-> mode k for k < n/2, k - n otherwise)
  static SpectralField from_coeffs(std::vector<cplx> coeffs,
                                   Sector sec = Sector::Full) {
    detail::check_grid_size(static_cast<int>(coeffs.size()));
    SpectralField f;
    f.n_ = static_cast<int>(coeffs.size());
    f.samples_ = detail::idft(coeffs);
    f.coeffs_ = std::move(coeffs);
    f.sector_ = sec;
    return f;
  }

  static SpectralField zero(int n, Sector sec = Sector::Full) {
    detail::check_grid_size(n);
    SpectralField f;
    f.n_ = n;
    f.samples_.assign(n, cplx(0, 0));
    f.coeffs_.assign(n, cplx(0, 0));
    f.sector_ = sec;
    return f;
  }

  int size() const { return n_; }
  Sector sector() const { return sector_; }
  const std::vector<cplx>& samples() const { return samples_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  // coefficient of logical mode m in [-n/2, n/2)
  cplx coeff(int m) const {
    int k = m >= 0 ? m : m + n_;
    return coeffs_[k];
  }

  SpectralField retag(Sector sec) const {
    SpectralField f = *this;
    f.sector_ = sec;
    return f;
  }

 private:
  int n_ = 0;
  std::vector<cplx> samples_;
  std::vector<cplx> coeffs_;
  Sector sector_ = Sector::Full;
};

namespace detail {

inline void check_same_size(const SpectralField& f, const SpectralField& g) {
  if (f.size() != g.size())
    throw std::invalid_argument("grid size mismatch: " +
                                std::to_string(f.size()) + " vs " +
                                std::to_string(g.size()));
}

}  // namespace detail

inline SpectralField operator+(const SpectralField& f, const SpectralField& g) {
  detail::check_same_size(f, g);
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = f.samples()[j] + g.samples()[j];
  Sector sec = f.sector() == g.sector() ? f.sector() : Sector::Full;
  return SpectralField::from_samples(std::move(s), sec);
}

inline SpectralField operator-(const SpectralField& f, const SpectralField& g) {
  detail::check_same_size(f, g);
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = f.samples()[j] - g.samples()[j];
  Sector sec = f.sector() == g.sector() ? f.sector() : Sector::Full;
  return SpectralField::from_samples(std::move(s), sec);
}

inline SpectralField operator*(cplx a, const SpectralField& f) {
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = a * f.samples()[j];
  return SpectralField::from_samples(std::move(s), f.sector());
}

inline SpectralField operator*(double a, const SpectralField& f) {
  return cplx(a, 0) * f;
}

// pointwise product
inline SpectralField multiply(const SpectralField& f, const SpectralField& g) {
  detail::check_same_size(f, g);
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = f.samples()[j] * g.samples()[j];
  return SpectralField::from_samples(std::move(s),
                                     product_sector(f.sector(), g.sector()));
}

inline SpectralField conj_field(const SpectralField& f) {
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = std::conj(f.samples()[j]);
  return SpectralField::from_samples(std::move(s), f.sector());
}

inline SpectralField real_part(const SpectralField& f) {
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = cplx(f.samples()[j].real(), 0);
  return SpectralField::from_samples(std::move(s), f.sector());
}

inline SpectralField imag_part(const SpectralField& f) {
  std::vector<cplx> s(f.size());
  for (int j = 0; j < f.size(); ++j) s[j] = cplx(f.samples()[j].imag(), 0);
  return SpectralField::from_samples(std::move(s), f.sector());
}

inline SpectralField project_sector(const SpectralField& u, Sector s) {
  const int n = u.size();
  std::vector<cplx> c = u.coeffs();
  if (s == Sector::Full) return SpectralField::from_coeffs(std::move(c), Sector::Full);
  if (s == Sector::S) {
    for (int k = 0; k < n; ++k)
      if (detail::bin_mode(k, n) % 2 != 0) c[k] = 0;
    return SpectralField::from_coeffs(std::move(c), s);
  }
  // A+ / A-: odd modes only, then split by parity.  Modes +m and -m live in
  // bins m and n-m; the even (cosine) part symmetrizes them, the odd (sine)
  // part antisymmetrizes.
  std::vector<cplx> out(n, cplx(0, 0));
  for (int k = 1; k < n / 2; k += 2) {
    cplx cp = c[k], cm = c[n - k];
    if (s == Sector::Aplus) {
      out[k] = 0.5 * (cp + cm);
      out[n - k] = out[k];
    } else {
      out[k] = 0.5 * (cp - cm);
      out[n - k] = -out[k];
    }
  }
  return SpectralField::from_coeffs(std::move(out), s);
}

inline double l2_inner(const SpectralField& f, const SpectralField& g) {
  detail::check_same_size(f, g);
  double acc = 0;
  for (int j = 0; j < f.size(); ++j)
    acc += f.samples()[j].real() * g.samples()[j].real() +
           f.samples()[j].imag() * g.samples()[j].imag();
  return acc * two_pi / f.size();
}

// complex correlation int f conj(g) dx (used for the modulation phase)
inline cplx correlation(const SpectralField& f, const SpectralField& g) {
  detail::check_same_size(f, g);
  cplx acc = 0;
  for (int j = 0; j < f.size(); ++j)
    acc += f.samples()[j] * std::conj(g.samples()[j]);
  return acc * (two_pi / f.size());
}

inline double l2_norm(const SpectralField& f) {
  return std::sqrt(std::max(0.0, l2_inner(f, f)));
}

inline double h1_norm(const SpectralField& f) {
  const int n = f.size();
  double acc = 0;
  for (int k = 0; k < n; ++k) {
    double m = detail::bin_mode(k, n);
    acc += (1.0 + m * m) * std::norm(f.coeffs()[k]);
  }
  return std::sqrt(two_pi * acc);
}

inline SpectralField derivative(const SpectralField& f, int order = 1) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative order must be 1 or 2");
  const int n = f.size();
  std::vector<cplx> c = f.coeffs();
  for (int k = 0; k < n; ++k) {
    cplx im(0, detail::bin_mode(k, n));
    c[k] *= order == 1 ? im : im * im;
  }
  Sector sec = f.sector();
  if (order == 1) {
    if (sec == Sector::Aplus) sec = Sector::Aminus;
    else if (sec == Sector::Aminus) sec = Sector::Aplus;
  }
  return SpectralField::from_coeffs(std::move(c), sec);
}

// || u - P_s u || / || u ||, for validation and eigenfunction classification
inline double sector_residual(const SpectralField& u, Sector s) {
  double nu = l2_norm(u);
  if (nu == 0) return 0;
  return l2_norm(u - project_sector(u, s)) / nu;
}

// orthogonal decomposition u = s + aplus + aminus
struct SectorSplit {
  SpectralField s, aplus, aminus;
};

inline SectorSplit sector_split(const SpectralField& u) {
  return {project_sector(u, Sector::S), project_sector(u, Sector::Aplus),
          project_sector(u, Sector::Aminus)};
}

// fraction of ||u||^2 in each of S, A+, A-, for eigenfunction classification
struct SectorFractions {
  double s, aplus, aminus;
};

inline SectorFractions sector_fractions(const SpectralField& u) {
  double n2 = l2_inner(u, u);
  if (n2 == 0) return {0, 0, 0};
  auto frac = [&](Sector s) {
    auto p = project_sector(u, s);
    return l2_inner(p, p) / n2;
  };
  return {frac(Sector::S), frac(Sector::Aplus), frac(Sector::Aminus)};
}

// 2/3-rule truncation for stiff runs (off by default everywhere)
inline SpectralField dealias_two_thirds(const SpectralField& f) {
  const int n = f.size();
  std::vector<cplx> c = f.coeffs();
  for (int k = 0; k < n; ++k)
    if (std::abs(detail::bin_mode(k, n)) > n / 3) c[k] = 0;
  return SpectralField::from_coeffs(std::move(c), f.sector());
}

}  // namespace cnwave
