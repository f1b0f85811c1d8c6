#pragma once

// The product estimate ||u v||_{H^{k-1}} <= C_k ||u||_{L^2} ||v||_{L^2} for 0 < k < 1/2, and the
// a-priori bound it yields for the Klein-Gordon field when the charge is conserved:
//
//   ||phi(t)||_{H^k} + ||phi_t(t)||_{H^{k-1}} <= (2(||phi0||_{H^k} + ||phi1||_{H^{k-1}}) + 2 C_k Q t) e^{|c0| t}.
//
// On the grid, |(uv)^(xi)| <= ||u^||_{l^2} ||v^||_{l^2} = ||u|| ||v|| / L, so
// C_k^2 = (1/L) sum_xi <xi>^{2(k-1)} bounds every discrete product; the sum diverges as
// n grows once k >= 1/2.

#include "dkg/integrator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dkg {

template <typename Real>
Real product_constant(const SpectralGrid<Real>& grid, Real k) {
  Real sum = 0;
  for (Index s = 0; s < grid.size(); ++s) sum += japanese_bracket(grid.frequency(s), Real(2) * (k - Real(1)));
  return std::sqrt(sum / grid.length());
}

template <typename Real = double>
struct ProductCheck {
  Real lhs = 0;       // ||u v||_{H^{k-1}}
  Real rhs = 0;       // C_k ||u|| ||v||
  Real ratio = 0;     // lhs / rhs, <= 1 always
  Real constant = 0;  // C_k
  bool constant_diverges = false;  // k >= 1/2: C_k grows without bound under refinement
};

/// The pointwise product is taken without truncation, which is what the grid constant bounds.
template <typename Real>
ProductCheck<Real> product_estimate_check(const ScalarField<Real>& u, const ScalarField<Real>& v, Real k,
                                          bool allow_large_k = false) {
  detail::require_same_grid(u.grid(), v.grid(), "product_estimate_check");
  if (!(k > Real(0))) throw std::invalid_argument("product_estimate_check: k must be positive");
  if (k >= Real(0.5) && !allow_large_k)
    throw std::invalid_argument("product_estimate_check: k >= 1/2, the constant is unbounded in n");
  const auto& grid = u.grid();
  const ScalarField<Real> uv = ScalarField<Real>::from_values(grid, u.values().cwiseProduct(v.values()));
  ProductCheck<Real> r;
  r.constant = product_constant(grid, k);
  r.constant_diverges = k >= Real(0.5);
  r.lhs = sobolev_norm(uv, k - Real(1));
  r.rhs = r.constant * l2_norm(u) * l2_norm(v);
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : Real(0);
  return r;
}

template <typename Real = double>
struct GronwallPoint {
  Real time = 0;
  Real value = 0;  // ||phi||_{H^k} + ||phi_t||_{H^{k-1}}
  Real bound = 0;  // slack times the a-priori bound
  bool holds = true;
};

template <typename Real = double>
struct GronwallReport {
  std::vector<GronwallPoint<Real>> points;
  Real constant = 0;  // C_k on the grid
  Real charge = 0;    // charge of the first snapshot
  Real worst_fraction = 0;  // max value / bound
  bool holds() const {
    for (const auto& p : points)
      if (!p.holds) return false;
    return true;
  }
};

/// Checks the a-priori bound at every saved snapshot of `traj`, with the charge and the data
/// norms taken from the first snapshot.
template <typename Real>
GronwallReport<Real> gronwall_monitor(const Trajectory<Real>& traj, const Params<Real>& params, Real k,
                                      Real slack = Real(1.1)) {
  if (traj.snapshots.empty()) throw std::invalid_argument("gronwall_monitor: empty trajectory");
  if (!(k > Real(0) && k < Real(0.5))) throw std::invalid_argument("gronwall_monitor: k must lie in (0, 1/2)");
  GronwallReport<Real> report;
  const auto& grid = traj.snapshots.front().grid();
  report.constant = product_constant(grid, k);
  auto norms = [&](const DiagonalState<Real>& d) {
    const auto p = to_physical(d, params).state;
    return std::pair{sobolev_norm(p.phi, k), sobolev_norm(p.phi_t, k - Real(1))};
  };
  const auto [phi0, phi1] = norms(traj.snapshots.front());
  report.charge = charge(traj.snapshots.front().psi_plus + traj.snapshots.front().psi_minus);
  const Real t0 = traj.snapshots.front().time;
  const Real c0 = std::abs(params.c0());
  for (const auto& d : traj.snapshots) {
    const Real t = d.time - t0;
    const auto [a, b] = norms(d);
    GronwallPoint<Real> p{d.time, a + b};
    p.bound = slack * (2 * (phi0 + phi1) + 2 * report.constant * report.charge * t) * std::exp(c0 * t);
    p.holds = p.value <= p.bound;
    report.worst_fraction = std::max(report.worst_fraction, p.value / p.bound);
    report.points.push_back(p);
  }
  return report;
}

}  // namespace dkg
