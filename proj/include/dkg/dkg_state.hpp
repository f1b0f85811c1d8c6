#pragma once

// States of the Dirac-Klein-Gordon system and the half-wave change of variables
//   psi_{+-} = pi_{+-}(D) psi,   phi_{+-} = phi +- i A^{-1/2} phi_t,   A = -d^2/dx^2 + 1,
// with inverse psi = psi_+ + psi_-, phi = (phi_+ + phi_-)/2, phi_t = A^{1/2}(phi_+ - phi_-)/(2i).

#include "dkg/dirac_algebra.hpp"
#include "dkg/random.hpp"
#include "dkg/spectral_grid.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace dkg {

template <typename Real = double>
struct Params {
  Real M = 0;  // Dirac mass
  Real m = 1;  // Klein-Gordon mass, > 0
  Real g = 0;  // coupling

  /// Coefficient of the linear source left over when A is built with unit mass.
  Real c0() const { return Real(1) - m * m; }

  void validate() const {
    if (!(m > Real(0))) throw std::invalid_argument("Params: Klein-Gordon mass m must be positive");
  }
};

template <typename Real = double>
struct PhysicalState {
  SpinorField<Real> psi;
  ScalarField<Real> phi;
  ScalarField<Real> phi_t;
  Real time = 0;

  explicit PhysicalState(const SpectralGrid<Real>& grid)
      : psi(grid), phi(grid, true), phi_t(grid, true) {}
  PhysicalState(SpinorField<Real> psi_, ScalarField<Real> phi_, ScalarField<Real> phi_t_, Real t = 0)
      : psi(std::move(psi_)), phi(std::move(phi_)), phi_t(std::move(phi_t_)), time(t) {
    detail::require_same_grid(psi.grid(), phi.grid(), "PhysicalState");
    detail::require_same_grid(psi.grid(), phi_t.grid(), "PhysicalState");
  }

  const SpectralGrid<Real>& grid() const { return psi.grid(); }

  PhysicalState& operator+=(const PhysicalState& o) {
    psi += o.psi, phi += o.phi, phi_t += o.phi_t;
    return *this;
  }
  PhysicalState& operator*=(Real a) {
    psi *= a, phi *= a, phi_t *= a;
    return *this;
  }
  friend PhysicalState operator+(PhysicalState a, const PhysicalState& b) { return a += b; }
  friend PhysicalState operator-(PhysicalState a, const PhysicalState& b) { return a += Real(-1) * b; }
  friend PhysicalState operator*(Real s, PhysicalState a) { return a *= s; }
};

template <typename Real = double>
struct DiagonalState {
  SpinorField<Real> psi_plus;
  SpinorField<Real> psi_minus;
  ScalarField<Real> phi_plus;
  ScalarField<Real> phi_minus;
  Real time = 0;

  explicit DiagonalState(const SpectralGrid<Real>& grid)
      : psi_plus(grid), psi_minus(grid), phi_plus(grid), phi_minus(grid) {}
  DiagonalState(SpinorField<Real> pp, SpinorField<Real> pm, ScalarField<Real> fp, ScalarField<Real> fm,
                Real t = 0)
      : psi_plus(std::move(pp)), psi_minus(std::move(pm)), phi_plus(std::move(fp)), phi_minus(std::move(fm)),
        time(t) {}

  const SpectralGrid<Real>& grid() const { return psi_plus.grid(); }

  const SpinorField<Real>& psi(Sign s) const { return s == Sign::Plus ? psi_plus : psi_minus; }
  SpinorField<Real>& psi(Sign s) { return s == Sign::Plus ? psi_plus : psi_minus; }
  const ScalarField<Real>& phi(Sign s) const { return s == Sign::Plus ? phi_plus : phi_minus; }
  ScalarField<Real>& phi(Sign s) { return s == Sign::Plus ? phi_plus : phi_minus; }

  DiagonalState& operator+=(const DiagonalState& o) {
    psi_plus += o.psi_plus, psi_minus += o.psi_minus, phi_plus += o.phi_plus, phi_minus += o.phi_minus;
    return *this;
  }
  DiagonalState& operator*=(Real a) {
    psi_plus *= a, psi_minus *= a, phi_plus *= a, phi_minus *= a;
    return *this;
  }
  friend DiagonalState operator+(DiagonalState a, const DiagonalState& b) { return a += b; }
  friend DiagonalState operator-(DiagonalState a, const DiagonalState& b) { return a += Real(-1) * b; }
  friend DiagonalState operator*(Real s, DiagonalState a) { return a *= s; }

  bool all_finite() const {
    return psi_plus.coefficients().allFinite() && psi_minus.coefficients().allFinite() &&
           phi_plus.coefficients().allFinite() && phi_minus.coefficients().allFinite();
  }
};

/// L2 norm of the full diagonal state, (sum of squared L2 norms of the four fields)^(1/2).
template <typename Real>
Real l2_norm(const DiagonalState<Real>& d) {
  const Real a = l2_norm(d.psi_plus), b = l2_norm(d.psi_minus);
  const Real c = l2_norm(d.phi_plus), e = l2_norm(d.phi_minus);
  return std::sqrt(a * a + b * b + c * c + e * e);
}

/// pi_sign(D) psi: each mode multiplied by projection(sign, sgn xi).
template <typename Real>
SpinorField<Real> project(const SpinorField<Real>& psi, Sign sign,
                          const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const auto& grid = psi.grid();
  const Matrix2<Real> pos = projection(sign, Sign::Plus, dirac).transpose();
  const Matrix2<Real> neg = projection(sign, Sign::Minus, dirac).transpose();
  typename SpinorField<Real>::Coefficients c(grid.size(), 2);
  for (Index slot = 0; slot < grid.size(); ++slot) {
    const auto& p = sign_of(grid.frequency(slot)) == Sign::Plus ? pos : neg;
    c.row(slot).noalias() = psi.coefficients().row(slot) * p;
  }
  return SpinorField<Real>(grid, std::move(c));
}

/// || pi_sign(D) psi - psi || / || psi ||, zero for the zero field.
template <typename Real>
Real projection_residue(const SpinorField<Real>& psi, Sign sign,
                        const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const Real norm = l2_norm(psi);
  if (norm == Real(0)) return Real(0);
  return l2_norm(project(psi, sign, dirac) - psi) / norm;
}

/// Constant 2x2 matrix applied to every spinor value.
template <typename Real>
SpinorField<Real> apply_matrix(const Matrix2<Real>& a, const SpinorField<Real>& psi) {
  typename SpinorField<Real>::Coefficients c = psi.coefficients() * a.transpose();
  return SpinorField<Real>(psi.grid(), std::move(c));
}

/// Discrete charge L sum_xi |psi^(xi)|^2 = integral of |psi|^2 over one period.
template <typename Real>
Real charge(const SpinorField<Real>& psi) {
  return psi.grid().length() * psi.coefficients().squaredNorm();
}

template <typename Real>
DiagonalState<Real> to_diagonal(const PhysicalState<Real>& p, const Params<Real>& params,
                                const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  params.validate();
  const auto& grid = p.grid();
  detail::require_same_grid(grid, p.phi.grid(), "to_diagonal");
  detail::require_same_grid(grid, p.phi_t.grid(), "to_diagonal");
  using Complex = std::complex<Real>;
  const ScalarField<Real> inv_sqrt_a_phi_t = apply_multiplier(p.phi_t, bracket_power(grid, Real(-1)));
  const Complex i(0, 1);
  DiagonalState<Real> d(project(p.psi, Sign::Plus, dirac), project(p.psi, Sign::Minus, dirac),
                        p.phi + i * inv_sqrt_a_phi_t, p.phi - i * inv_sqrt_a_phi_t, p.time);
  return d;
}

template <typename Real>
struct PhysicalConversion {
  PhysicalState<Real> state;
  Real reality_residue = 0;  // largest symmetric defect removed from phi and phi_t
  bool reality_warning = false;  // residue exceeded 1e-10
};

/// Inverse of to_diagonal. phi and phi_t are symmetrized to real fields and the removed
/// defect is reported rather than treated as an error.
template <typename Real>
PhysicalConversion<Real> to_physical(const DiagonalState<Real>& d, const Params<Real>& params) {
  params.validate();
  const auto& grid = d.grid();
  using Complex = std::complex<Real>;
  ScalarField<Real> phi = Real(0.5) * (d.phi_plus + d.phi_minus);
  ScalarField<Real> phi_t =
      apply_multiplier(d.phi_plus - d.phi_minus, bracket_power(grid, Real(1)));
  phi_t *= Complex(0, Real(-0.5));  // 1/(2i) = -i/2
  const Real r1 = enforce_reality(phi);
  const Real r2 = enforce_reality(phi_t);
  PhysicalConversion<Real> out{PhysicalState<Real>(d.psi_plus + d.psi_minus, std::move(phi), std::move(phi_t), d.time),
                               std::max(r1, r2), false};
  out.reality_warning = out.reality_residue > Real(1e-10);
  return out;
}

/// |phi_- - conj(phi_+)| measured as the largest coefficient defect of phi_-(k) - conj phi_+(-k).
template <typename Real>
Real half_wave_conjugacy_defect(const DiagonalState<Real>& d) {
  const auto& grid = d.grid();
  Real worst = 0;
  for (Index s = 0; s < grid.size(); ++s) {
    worst = std::max(worst, std::abs(d.phi_minus.coefficients()(s) -
                                     std::conj(d.phi_plus.coefficients()(grid.partner(s)))));
  }
  return worst;
}

/// Random field with f^(xi) = <xi>^(-s - 1/2 - 0.01) sigma(xi) z_xi, z_xi standard complex
/// Gaussian keyed by (seed, component, wavenumber). sigma is 1 for |k| <= K/2, falls as
/// cos^2 to 0 at the dealiasing cutoff K and vanishes beyond it.
template <typename Real, int C>
Field<Real, C> random_sobolev_field(const SpectralGrid<Real>& grid, Real s, std::uint64_t seed,
                                    bool real = false) {
  constexpr Real kOffset = Real(0.51);
  const Real cutoff = Real(grid.dealias_cutoff());
  auto taper = [&](Index k) -> Real {
    const Real r = std::abs(Real(k)) / cutoff;
    if (r <= Real(0.5)) return Real(1);
    if (r >= Real(1)) return Real(0);
    const Real c = std::cos(std::numbers::pi_v<Real> * (r - Real(0.5)));
    return c * c;
  };
  typename Field<Real, C>::Coefficients coeffs(grid.size(), C);
  for (Index slot = 0; slot < grid.size(); ++slot) {
    const Index k = grid.wavenumber(slot);
    const Real amp = japanese_bracket(grid.frequency(slot), -s - kOffset) * taper(k);
    for (Index c = 0; c < C; ++c) {
      // Real fields mirror the k > 0 draws; the self-paired modes keep E|f^|^2 via sqrt(2) Re z.
      if (real && k < 0 && !grid.is_nyquist(slot)) continue;
      std::complex<Real> z = complex_gaussian<Real>(counter_key(seed, {c, k}));
      if (real && (k == 0 || grid.is_nyquist(slot))) z = std::sqrt(Real(2)) * z.real();
      coeffs(slot, c) = amp * z;
      if (real && k > 0) coeffs(grid.partner(slot), c) = std::conj(amp * z);
    }
  }
  return Field<Real, C>(grid, std::move(coeffs), real);
}

/// Recipe for random initial data psi0 in H^{-l}, phi0 in H^k, phi1 in H^{k-1}.
/// `smoothing` raises all three exponents (for convergence studies); with `normalize`
/// each field is rescaled so that its norm in its own space equals `amplitude`.
template <typename Real = double>
struct DataSpec {
  Real l = 0;
  Real k = Real(0.25);
  std::uint64_t seed = 1;
  Real amplitude = 1;
  Real smoothing = 0;
  bool normalize = true;
};

template <typename Real>
PhysicalState<Real> random_initial_data(const SpectralGrid<Real>& grid, const DataSpec<Real>& spec) {
  auto psi = random_sobolev_field<Real, 2>(grid, -spec.l + spec.smoothing, counter_key(spec.seed, {0}));
  auto phi = random_sobolev_field<Real, 1>(grid, spec.k + spec.smoothing, counter_key(spec.seed, {1}), true);
  auto phi_t = random_sobolev_field<Real, 1>(grid, spec.k - Real(1) + spec.smoothing, counter_key(spec.seed, {2}), true);
  auto scale = [&](auto& f, Real s) {
    const Real norm = sobolev_norm(f, s);
    f *= spec.normalize ? (norm > Real(0) ? spec.amplitude / norm : Real(0)) : spec.amplitude;
  };
  scale(psi, -spec.l);
  scale(phi, spec.k);
  scale(phi_t, spec.k - Real(1));
  return PhysicalState<Real>(std::move(psi), std::move(phi), std::move(phi_t));
}

}  // namespace dkg
