#pragma once

// Right-hand sides of the diagonalized system
//   (-i d_t +- |D|) psi_{+-} = F_{+-} = -M beta psi_{-+} + g pi_{+-}(D)( phi beta psi )
//   ( i d_t -+ A^{1/2}) phi_{+-} = G_{+-} = -+ A^{-1/2}( <beta psi, psi> + c0 phi )
// with psi = psi_+ + psi_-, phi = (phi_+ + phi_-)/2. Products are taken pointwise on the
// grid and truncated by the 2/3 rule.

#include "dkg/dirac_algebra.hpp"
#include "dkg/dkg_state.hpp"
#include "dkg/spectral_grid.hpp"

#include <utility>

namespace dkg {

/// <beta psi(x), psi'(x)>_{C^2}, conjugate-linear in the second slot, dealiased.
template <typename Real>
ScalarField<Real> nullform(const SpinorField<Real>& psi, const SpinorField<Real>& psi_prime,
                           const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  detail::require_same_grid(psi.grid(), psi_prime.grid(), "nullform");
  const auto u = psi.values();
  const auto v = psi_prime.values();
  const typename SpinorField<Real>::Values bu = u * dirac.beta.transpose();
  typename ScalarField<Real>::Values w = bu.cwiseProduct(v.conjugate()).rowwise().sum();
  auto out = ScalarField<Real>::from_values(psi.grid(), w);
  dealias_in_place(out);
  return out;
}

/// <beta pi_s1(D) psi, pi_s2(D) psi'> by projecting first, then taking the pointwise product.
template <typename Real>
ScalarField<Real> nullform_projected(const SpinorField<Real>& psi, const SpinorField<Real>& psi_prime,
                                     SignPair pair,
                                     const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  return nullform(project(psi, pair.first, dirac), project(psi_prime, pair.second, dirac), dirac);
}

/// Same quantity through the symbol table: the periodic convolution
///   out(xi1 + xi2) += < gamma(pair, sgn xi1, sgn xi2) psi^(xi1), psi'^(-xi2) >,
/// where psi' is read at its own grid frequency eta = -xi2 and sgn xi2 := -xi_hat(eta), which
/// keeps the xi_hat(0) = +1 convention consistent with nullform_projected. O(n^2); for verification.
template <typename Real>
ScalarField<Real> nullform_projected_spectral(const SpinorField<Real>& psi, const SpinorField<Real>& psi_prime,
                                              SignPair pair,
                                              const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  detail::require_same_grid(psi.grid(), psi_prime.grid(), "nullform_projected_spectral");
  const auto& grid = psi.grid();
  const Index n = grid.size();
  const GammaTable<Real> table(dirac);
  using Complex = std::complex<Real>;
  using Row = Eigen::Matrix<Complex, 1, 2>;

  typename ScalarField<Real>::Coefficients out = ScalarField<Real>::Coefficients::Zero(n);
  for (Index a = 0; a < n; ++a) {
    const Row pa = psi.coefficients().row(a);
    if (pa.squaredNorm() == Real(0)) continue;
    const Sign sgn1 = sign_of(grid.frequency(a));
    // gamma psi^(xi1) for both possible signs of xi2
    const Eigen::Matrix<Complex, 2, 1> g_pos = table(pair, sgn1, Sign::Plus) * pa.transpose();
    const Eigen::Matrix<Complex, 2, 1> g_neg = table(pair, sgn1, Sign::Minus) * pa.transpose();
    for (Index b = 0; b < n; ++b) {
      const Sign sgn2 = flip(sign_of(grid.frequency(b)));
      const auto& gv = sgn2 == Sign::Plus ? g_pos : g_neg;
      const Row qb = psi_prime.coefficients().row(b);
      const Complex term = gv(0) * std::conj(qb(0)) + gv(1) * std::conj(qb(1));
      out(grid.slot(grid.wavenumber(a) - grid.wavenumber(b))) += term;
    }
  }
  ScalarField<Real> f(grid, std::move(out));
  dealias_in_place(f);
  return f;
}

template <typename Real = double>
struct RhsBundle {
  SpinorField<Real> F_plus;
  SpinorField<Real> F_minus;
  ScalarField<Real> G_plus;
  ScalarField<Real> G_minus;
};

/// F_{+-} = -M beta psi_{-+} + g pi_{+-}(D)[ (phi_+ + phi_-)/2 beta (psi_+ + psi_-) ].
template <typename Real>
std::pair<SpinorField<Real>, SpinorField<Real>> dirac_rhs(
    const DiagonalState<Real>& d, const Params<Real>& params,
    const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const auto& grid = d.grid();
  SpinorField<Real> f_plus = Real(-params.M) * apply_matrix(dirac.beta, d.psi_minus);
  SpinorField<Real> f_minus = Real(-params.M) * apply_matrix(dirac.beta, d.psi_plus);
  if (params.g != Real(0)) {
    const auto phi = (Real(0.5) * (d.phi_plus + d.phi_minus)).values();
    const auto beta_psi = ((d.psi_plus + d.psi_minus).values() * dirac.beta.transpose()).eval();
    typename SpinorField<Real>::Values prod = phi.col(0).asDiagonal() * beta_psi;
    auto source = SpinorField<Real>::from_values(grid, prod);
    dealias_in_place(source);
    f_plus += params.g * project(source, Sign::Plus, dirac);
    f_minus += params.g * project(source, Sign::Minus, dirac);
  }
  return {std::move(f_plus), std::move(f_minus)};
}

/// G_{+-} = -+ <xi>^{-1}[ <beta psi, psi> + c0 phi ], phi = (phi_+ + phi_-)/2.
template <typename Real>
std::pair<ScalarField<Real>, ScalarField<Real>> kg_rhs(
    const DiagonalState<Real>& d, const Params<Real>& params,
    const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const SpinorField<Real> psi = d.psi_plus + d.psi_minus;
  ScalarField<Real> source = nullform(psi, psi, dirac);
  if (params.c0() != Real(0)) source += (params.c0() / Real(2)) * (d.phi_plus + d.phi_minus);
  ScalarField<Real> g_plus = apply_multiplier(source, bracket_power(d.grid(), Real(-1)));
  g_plus *= Real(-1);
  ScalarField<Real> g_minus = Real(-1) * g_plus;
  return {std::move(g_plus), std::move(g_minus)};
}

template <typename Real>
RhsBundle<Real> rhs(const DiagonalState<Real>& d, const Params<Real>& params,
                    const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  auto [fp, fm] = dirac_rhs(d, params, dirac);
  auto [gp, gm] = kg_rhs(d, params, dirac);
  return {std::move(fp), std::move(fm), std::move(gp), std::move(gm)};
}

}  // namespace dkg
