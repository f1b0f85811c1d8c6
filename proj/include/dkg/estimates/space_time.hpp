#pragma once

// Doubly periodic space-time fields and the discrete Bourgain norms
//   ||u||_{X^{s,b}_sign}^2 = L T sum_{xi,tau} <xi>^{2s} <tau + sign |xi|>^{2b} |u~(xi,tau)|^2,
// with u~ = (1/(n n_t)) sum_{j,l} u(x_j, t_l) exp(-i(xi x_j + tau t_l)).
// A solution of the free half-wave equation with symbol sign |xi| sits on tau = -sign |xi|.

#include "dkg/dirac_algebra.hpp"
#include "dkg/random.hpp"
#include "dkg/spectral_grid.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dkg {

template <typename Real = double>
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(Index n, Index n_t, Real length = Real(2) * std::numbers::pi_v<Real>,
                Real period = Real(2) * std::numbers::pi_v<Real>)
      : space_(n, length), time_(n_t, period) {}

  const SpectralGrid<Real>& space() const { return space_; }
  const SpectralGrid<Real>& time() const { return time_; }
  Index n() const { return space_.size(); }
  Index n_t() const { return time_.size(); }
  Real length() const { return space_.length(); }
  Real period() const { return time_.length(); }

  Real xi(Index slot) const { return space_.frequency(slot); }
  Real tau(Index slot) const { return time_.frequency(slot); }

  /// Same box, both resolutions doubled.
  SpaceTimeGrid refined() const { return SpaceTimeGrid(2 * n(), 2 * n_t(), length(), period()); }

  friend bool operator==(const SpaceTimeGrid& a, const SpaceTimeGrid& b) {
    return a.space_ == b.space_ && a.time_ == b.time_;
  }

 private:
  SpectralGrid<Real> space_;
  SpectralGrid<Real> time_;
};

/// Rows index spatial slots, columns time slots; one matrix per component.
template <typename Real, int Components>
class SpaceTimeField {
 public:
  using Complex = std::complex<Real>;
  using Plane = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Planes = std::array<Plane, Components>;

  explicit SpaceTimeField(const SpaceTimeGrid<Real>& grid) : grid_(grid) {
    for (auto& p : coeffs_) p = Plane::Zero(grid.n(), grid.n_t());
  }
  SpaceTimeField(const SpaceTimeGrid<Real>& grid, Planes coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    for (const auto& p : coeffs_)
      if (p.rows() != grid.n() || p.cols() != grid.n_t())
        throw std::invalid_argument("SpaceTimeField: coefficient plane does not match the grid");
  }

  static SpaceTimeField from_values(const SpaceTimeGrid<Real>& grid, const Planes& values) {
    Planes c;
    for (int comp = 0; comp < Components; ++comp) c[comp] = transform(values[comp], false);
    return SpaceTimeField(grid, std::move(c));
  }

  Planes values() const {
    Planes v;
    for (int comp = 0; comp < Components; ++comp) v[comp] = transform(coeffs_[comp], true);
    return v;
  }

  const SpaceTimeGrid<Real>& grid() const { return grid_; }
  const Planes& coefficients() const { return coeffs_; }
  Planes& coefficients() { return coeffs_; }
  const Plane& coefficients(int comp) const { return coeffs_[comp]; }
  Plane& coefficients(int comp) { return coeffs_[comp]; }

 private:
  // Forward: 1/(n n_t) normalization; inverse: plain sum.
  static Plane transform(const Plane& in, bool inverse) {
    const Index n = in.rows(), nt = in.cols();
    auto& fft = detail::fft_engine<Real>();
    Plane columns(n, nt);
    for (Index c = 0; c < nt; ++c) {
      if (inverse) fft.inv(columns.col(c).data(), in.col(c).data(), n);
      else fft.fwd(columns.col(c).data(), in.col(c).data(), n);
    }
    const Plane rows_in = columns.transpose();
    Plane rows_out(nt, n);
    for (Index r = 0; r < n; ++r) {
      if (inverse) fft.inv(rows_out.col(r).data(), rows_in.col(r).data(), nt);
      else fft.fwd(rows_out.col(r).data(), rows_in.col(r).data(), nt);
    }
    Plane out = rows_out.transpose();
    if (!inverse) out /= Real(n * nt);
    return out;
  }

  SpaceTimeGrid<Real> grid_;
  Planes coeffs_;
};

template <typename Real = double>
using SpaceTimeScalar = SpaceTimeField<Real, 1>;
template <typename Real = double>
using SpaceTimeSpinor = SpaceTimeField<Real, 2>;

/// Exponents of one X^{s,b}_sign (spinor) or Y^{s,b}_sign (scalar) norm.
template <typename Real = double>
struct XsbParams {
  Real s = 0;
  Real b = 0;
  Sign sign = Sign::Plus;
};

/// Weight <xi>^s <tau + sign |xi|>^b.
template <typename Real>
Real xsb_weight(Real xi, Real tau, const XsbParams<Real>& p) {
  return japanese_bracket(xi, p.s) * japanese_bracket(tau + Real(to_int(p.sign)) * std::abs(xi), p.b);
}

template <typename Real, int C>
Real xsb_norm(const SpaceTimeField<Real, C>& u, const XsbParams<Real>& p) {
  const auto& grid = u.grid();
  Real sum = 0;
  for (Index r = 0; r < grid.n_t(); ++r) {
    const Real tau = grid.tau(r);
    for (Index s = 0; s < grid.n(); ++s) {
      const Real w = xsb_weight(grid.xi(s), tau, p);
      Real mass = 0;
      for (int comp = 0; comp < C; ++comp) mass += std::norm(u.coefficients(comp)(s, r));
      sum += w * w * mass;
    }
  }
  return std::sqrt(grid.length() * grid.period() * sum);
}

/// pi_sign(D) applied at every time: each spatial mode multiplied by projection(sign, sgn xi).
template <typename Real>
SpaceTimeSpinor<Real> project(const SpaceTimeSpinor<Real>& u, Sign sign,
                              const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const auto& grid = u.grid();
  SpaceTimeSpinor<Real> out(grid);
  for (Index s = 0; s < grid.n(); ++s) {
    const Matrix2<Real> p = projection(sign, sign_of(grid.xi(s)), dirac);
    out.coefficients(0).row(s) = p(0, 0) * u.coefficients(0).row(s) + p(0, 1) * u.coefficients(1).row(s);
    out.coefficients(1).row(s) = p(1, 0) * u.coefficients(0).row(s) + p(1, 1) * u.coefficients(1).row(s);
  }
  return out;
}

/// <beta u, v>_{C^2} pointwise in (x, t), no truncation. Exact (alias-free) when both inputs
/// are supported in |k| < n/4 and |k_t| < n_t/4.
template <typename Real>
SpaceTimeScalar<Real> nullform(const SpaceTimeSpinor<Real>& u, const SpaceTimeSpinor<Real>& v,
                               const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("nullform: space-time grid mismatch");
  const auto uv = u.values();
  const auto vv = v.values();
  typename SpaceTimeScalar<Real>::Planes w;
  w[0] = (dirac.beta(0, 0) * uv[0] + dirac.beta(0, 1) * uv[1]).cwiseProduct(vv[0].conjugate()) +
         (dirac.beta(1, 0) * uv[0] + dirac.beta(1, 1) * uv[1]).cwiseProduct(vv[1].conjugate());
  return SpaceTimeScalar<Real>::from_values(u.grid(), w);
}

enum class Support { All, Positive, Negative };

/// Random spinor with u~(xi, tau) = <xi>^{-s-1/2-decay} <tau + sign|xi|>^{-b-1/2-decay} z on the
/// alias-free band |k| < n/4, |k_t| < n_t/4, so that its X^{s,b}_sign norm stays bounded under
/// refinement. z is keyed by (seed, stream, component, k, k_t): refining a grid keeps every
/// existing draw. `support` optionally restricts to sgn xi = +1 (xi >= 0) or -1.
template <typename Real>
SpaceTimeSpinor<Real> random_xsb_field(const SpaceTimeGrid<Real>& grid, const XsbParams<Real>& p, Real decay,
                                       std::uint64_t seed, std::int64_t stream, Support support = Support::All) {
  SpaceTimeSpinor<Real> u(grid);
  const Index band = grid.n() / 4, band_t = grid.n_t() / 4;
  const XsbParams<Real> law{-p.s - Real(0.5) - decay, -p.b - Real(0.5) - decay, p.sign};
  for (Index s = 0; s < grid.n(); ++s) {
    const Index k = grid.space().wavenumber(s);
    if (std::abs(k) >= band) continue;
    const Sign sg = sign_of(grid.xi(s));
    if ((support == Support::Positive && sg != Sign::Plus) || (support == Support::Negative && sg != Sign::Minus))
      continue;
    for (Index r = 0; r < grid.n_t(); ++r) {
      const Index kt = grid.time().wavenumber(r);
      if (std::abs(kt) >= band_t) continue;
      const Real amp = xsb_weight(grid.xi(s), grid.tau(r), law);
      for (int comp = 0; comp < 2; ++comp)
        u.coefficients(comp)(s, r) = amp * complex_gaussian<Real>(counter_key(seed, {stream, comp, k, kt}));
    }
  }
  return u;
}

}  // namespace dkg
