#pragma once

// Periodic spectral substrate: grid, fields, Fourier multipliers and Sobolev norms.
//
// Transform convention (fixed):
//   forward   f^(xi) = (1/n) sum_j f(x_j) exp(-i xi x_j)
//   inverse   f(x_j) = sum_xi f^(xi) exp(i xi x_j)
//   L2 norm   ||f||^2 = L sum_xi |f^(xi)|^2
// Coefficients are stored in FFT slot order: slot s < n/2 holds wavenumber s,
// slot s >= n/2 holds wavenumber s - n (slot n/2 is the unpaired Nyquist mode -n/2).

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace dkg {

using Index = Eigen::Index;

template <typename Real = double>
class SpectralGrid {
 public:
  SpectralGrid(Index n, Real length) : n_(n), length_(length) {
    if (n < 8 || n % 2 != 0) {
      throw std::invalid_argument("SpectralGrid: n must be even and >= 8, got " + std::to_string(n));
    }
    if (!(length > Real(0))) {
      throw std::invalid_argument("SpectralGrid: period must be positive");
    }
  }

  Index size() const { return n_; }
  Real length() const { return length_; }
  Real spacing() const { return length_ / Real(n_); }
  Real point(Index j) const { return Real(j) * length_ / Real(n_); }

  /// Integer wavenumber held in FFT slot `slot`.
  Index wavenumber(Index slot) const { return slot < n_ / 2 ? slot : slot - n_; }

  /// FFT slot of wavenumber k, taken modulo n.
  Index slot(Index k) const {
    Index s = k % n_;
    return s < 0 ? s + n_ : s;
  }

  /// Angular frequency xi = k 2pi/L of the mode in `slot`.
  Real frequency(Index slot) const {
    return Real(wavenumber(slot)) * Real(2) * std::numbers::pi_v<Real> / length_;
  }

  /// Slot holding the wavenumber -k; the Nyquist slot is its own partner.
  Index partner(Index slot) const { return slot == 0 ? 0 : n_ - slot; }

  bool is_nyquist(Index slot) const { return slot == n_ / 2; }

  /// Largest |k| kept by the 2/3 rule: quadratic products of fields with |k| <= K
  /// alias only onto |k| >= n - 2K > K.
  Index dealias_cutoff() const { return (n_ - 1) / 3; }

  friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  Index n_;
  Real length_;
};

template <typename Real = double>
SpectralGrid<Real> make_grid(Index n, Real length = Real(2) * std::numbers::pi_v<Real>) {
  return SpectralGrid<Real>(n, length);
}

namespace detail {

template <typename Real>
Eigen::FFT<Real>& fft_engine() {
  thread_local Eigen::FFT<Real> engine = [] {
    Eigen::FFT<Real> e;
    e.SetFlag(Eigen::FFT<Real>::Unscaled);
    return e;
  }();
  return engine;
}

template <typename Real>
void require_same_grid(const SpectralGrid<Real>& a, const SpectralGrid<Real>& b, const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

}  // namespace detail

/// A C^Components-valued function on the grid, held by its spectral coefficients.
/// Rows index FFT slots, columns index components.
template <typename Real, int Components>
class Field {
 public:
  using RealScalar = Real;
  using Complex = std::complex<Real>;
  using Coefficients = Eigen::Matrix<Complex, Eigen::Dynamic, Components>;
  using Values = Coefficients;
  static constexpr int components = Components;

  explicit Field(const SpectralGrid<Real>& grid, bool real = false)
      : grid_(grid), coeffs_(Coefficients::Zero(grid.size(), Components)), real_(real) {}

  Field(const SpectralGrid<Real>& grid, Coefficients coeffs, bool real = false)
      : grid_(grid), coeffs_(std::move(coeffs)), real_(real) {
    if (coeffs_.rows() != grid.size()) {
      throw std::invalid_argument("Field: coefficient count does not match grid size");
    }
  }

  /// Builds a field from nodal values f(x_j).
  static Field from_values(const SpectralGrid<Real>& grid, const Values& values, bool real = false) {
    if (values.rows() != grid.size()) {
      throw std::invalid_argument("Field::from_values: value count does not match grid size");
    }
    const Index n = grid.size();
    Coefficients c(n, Components);
    auto& fft = detail::fft_engine<Real>();
    for (Index col = 0; col < Components; ++col) {
      fft.fwd(c.col(col).data(), values.col(col).data(), n);
    }
    c /= Real(n);
    return Field(grid, std::move(c), real);
  }

  /// Nodal values f(x_j), j = 0..n-1.
  Values values() const {
    const Index n = grid_.size();
    Values v(n, Components);
    auto& fft = detail::fft_engine<Real>();
    for (Index col = 0; col < Components; ++col) {
      fft.inv(v.col(col).data(), coeffs_.col(col).data(), n);
    }
    return v;
  }

  const SpectralGrid<Real>& grid() const { return grid_; }
  const Coefficients& coefficients() const { return coeffs_; }
  Coefficients& coefficients() { return coeffs_; }
  Complex coefficient(Index k, Index component = 0) const { return coeffs_(grid_.slot(k), component); }

  bool is_real() const { return real_; }
  void set_real(bool real) { real_ = real; }

  Field& operator+=(const Field& other) {
    detail::require_same_grid(grid_, other.grid_, "Field::operator+=");
    coeffs_ += other.coeffs_;
    real_ = real_ && other.real_;
    return *this;
  }
  Field& operator-=(const Field& other) {
    detail::require_same_grid(grid_, other.grid_, "Field::operator-=");
    coeffs_ -= other.coeffs_;
    real_ = real_ && other.real_;
    return *this;
  }
  Field& operator*=(Real a) {
    coeffs_ *= a;
    return *this;
  }
  Field& operator*=(Complex a) {
    coeffs_ *= a;
    real_ = real_ && a.imag() == Real(0);
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator-(Field a) { return a *= Real(-1); }
  friend Field operator*(Real s, Field a) { return a *= s; }
  friend Field operator*(Field a, Real s) { return a *= s; }
  friend Field operator*(Complex s, Field a) { return a *= s; }

 private:
  SpectralGrid<Real> grid_;
  Coefficients coeffs_;
  bool real_;
};

template <typename Real = double>
using ScalarField = Field<Real, 1>;
template <typename Real = double>
using SpinorField = Field<Real, 2>;

/// A Fourier multiplier m(D), tabulated on the grid's slots.
template <typename Real = double>
class Multiplier {
 public:
  using Complex = std::complex<Real>;
  using Symbol = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  Multiplier(const SpectralGrid<Real>& grid, Symbol symbol) : grid_(grid), symbol_(std::move(symbol)) {
    if (symbol_.size() != grid.size()) {
      throw std::invalid_argument("Multiplier: tabulated symbol length must equal n");
    }
  }

  /// Tabulates m(xi) at every grid frequency; m may return a real or complex value.
  template <typename SymbolFn>
  static Multiplier from_symbol(const SpectralGrid<Real>& grid, SymbolFn&& m) {
    Symbol s(grid.size());
    for (Index slot = 0; slot < grid.size(); ++slot) {
      s(slot) = Complex(m(grid.frequency(slot)));
    }
    return Multiplier(grid, std::move(s));
  }

  const SpectralGrid<Real>& grid() const { return grid_; }
  const Symbol& symbol() const { return symbol_; }

  /// True when m(-xi) = conj(m(xi)) on every slot pair (Nyquist symbol real).
  bool preserves_reality(Real tol = Real(0)) const {
    for (Index s = 0; s < grid_.size(); ++s) {
      if (std::abs(symbol_(grid_.partner(s)) - std::conj(symbol_(s))) > tol) return false;
    }
    return true;
  }

  friend Multiplier operator*(const Multiplier& a, const Multiplier& b) {
    detail::require_same_grid(a.grid_, b.grid_, "Multiplier::operator*");
    return Multiplier(a.grid_, a.symbol_.cwiseProduct(b.symbol_));
  }

 private:
  SpectralGrid<Real> grid_;
  Symbol symbol_;
};

/// (m f)^(xi) = m(xi) f^(xi), componentwise.
template <typename Real, int C>
Field<Real, C> apply_multiplier(const Field<Real, C>& f, const Multiplier<Real>& m) {
  detail::require_same_grid(f.grid(), m.grid(), "apply_multiplier");
  typename Field<Real, C>::Coefficients c = m.symbol().asDiagonal() * f.coefficients();
  return Field<Real, C>(f.grid(), std::move(c), f.is_real() && m.preserves_reality());
}

template <typename Real, int C>
Field<Real, C> operator*(const Multiplier<Real>& m, const Field<Real, C>& f) {
  return apply_multiplier(f, m);
}

// Named symbols.

/// <xi>^p = (1 + xi^2)^(p/2).
template <typename Real>
Real japanese_bracket(Real xi, Real p = Real(1)) {
  return std::pow(Real(1) + xi * xi, p / Real(2));
}

template <typename Real>
Multiplier<Real> bracket_power(const SpectralGrid<Real>& grid, Real p) {
  return Multiplier<Real>::from_symbol(grid, [p](Real xi) { return japanese_bracket(xi, p); });
}

/// |D|
template <typename Real>
Multiplier<Real> abs_derivative(const SpectralGrid<Real>& grid) {
  return Multiplier<Real>::from_symbol(grid, [](Real xi) { return std::abs(xi); });
}

/// d/dx, symbol i xi.
template <typename Real>
Multiplier<Real> derivative(const SpectralGrid<Real>& grid) {
  return Multiplier<Real>::from_symbol(grid, [](Real xi) { return std::complex<Real>(Real(0), xi); });
}

/// exp(-i sign t |D|)
template <typename Real>
Multiplier<Real> half_wave_propagator(const SpectralGrid<Real>& grid, int sign, Real t) {
  return Multiplier<Real>::from_symbol(grid, [=](Real xi) {
    return std::polar(Real(1), -Real(sign) * t * std::abs(xi));
  });
}

/// exp(-i sign t A^(1/2)) with A = -d^2/dx^2 + 1, symbol <xi>.
template <typename Real>
Multiplier<Real> klein_gordon_propagator(const SpectralGrid<Real>& grid, int sign, Real t) {
  return Multiplier<Real>::from_symbol(grid, [=](Real xi) {
    return std::polar(Real(1), -Real(sign) * t * japanese_bracket(xi));
  });
}

/// ( L sum_xi <xi>^(2s) |f^(xi)|^2 )^(1/2), summed over components.
template <typename Real, int C>
Real sobolev_norm(const Field<Real, C>& f, Real s) {
  const auto& grid = f.grid();
  Real sum = 0;
  for (Index slot = 0; slot < grid.size(); ++slot) {
    const Real w = japanese_bracket(grid.frequency(slot), Real(2) * s);
    sum += w * f.coefficients().row(slot).squaredNorm();
  }
  return std::sqrt(grid.length() * sum);
}

template <typename Real, int C>
Real l2_norm(const Field<Real, C>& f) {
  return std::sqrt(f.grid().length()) * f.coefficients().norm();
}

/// Quadrature L2 norm from nodal values, ((L/n) sum_j |f(x_j)|^2)^(1/2).
template <typename Real, int C>
Real l2_norm_physical(const Field<Real, C>& f) {
  return std::sqrt(f.grid().spacing()) * f.values().norm();
}

/// 2/3-rule truncation: zeroes every mode with |k| > dealias_cutoff().
template <typename Real, int C>
void dealias_in_place(Field<Real, C>& f) {
  const auto& grid = f.grid();
  const Index cutoff = grid.dealias_cutoff();
  for (Index slot = 0; slot < grid.size(); ++slot) {
    if (std::abs(grid.wavenumber(slot)) > cutoff) f.coefficients().row(slot).setZero();
  }
}

template <typename Real, int C>
Field<Real, C> dealias(Field<Real, C> f) {
  dealias_in_place(f);
  return f;
}

/// Largest |f^(k) - conj f^(-k)| over all slots; zero exactly when f is real-valued.
template <typename Real, int C>
Real reality_defect(const Field<Real, C>& f) {
  const auto& grid = f.grid();
  Real worst = 0;
  for (Index slot = 0; slot < grid.size(); ++slot) {
    const auto& c = f.coefficients();
    worst = std::max(worst, (c.row(slot) - c.row(grid.partner(slot)).conjugate()).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Projects onto real-valued fields: f^(k) <- (f^(k) + conj f^(-k))/2, Nyquist made real.
/// Returns the defect removed.
template <typename Real, int C>
Real enforce_reality(Field<Real, C>& f) {
  const Real defect = reality_defect(f);
  const auto& grid = f.grid();
  auto& c = f.coefficients();
  for (Index slot = 0; slot <= grid.size() / 2; ++slot) {
    const Index p = grid.partner(slot);
    const auto avg = ((c.row(slot) + c.row(p).conjugate()) / Real(2)).eval();
    c.row(slot) = avg;
    c.row(p) = avg.conjugate();
  }
  f.set_real(true);
  return defect;
}

}  // namespace dkg
