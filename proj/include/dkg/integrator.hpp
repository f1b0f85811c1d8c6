#pragma once

// Time evolution of the diagonalized system
//   d_t psi_{+-} = -+ i|D| psi_{+-} + i F_{+-},     d_t phi_{+-} = -+ i A^{1/2} phi_{+-} - i G_{+-},
// i.e. the Duhamel form
//   psi_{+-}(t) = e^{-+it|D|} psi_{+-}(0) + i int_0^t e^{-+i(t-s)|D|} F_{+-}(s) ds
//   phi_{+-}(t) = e^{-+itA^{1/2}} phi_{+-}(0) - i int_0^t e^{-+i(t-s)A^{1/2}} G_{+-}(s) ds,
// plus an independent solver for the original second-order system used for cross-checks.

#include "dkg/dkg_state.hpp"
#include "dkg/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dkg {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { LawsonRK4, Strang, Picard };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::LawsonRK4: return "lawson-rk4";
    case Scheme::Strang: return "strang";
    case Scheme::Picard: return "picard";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  if (name == "lawson-rk4") return Scheme::LawsonRK4;
  if (name == "strang") return Scheme::Strang;
  if (name == "picard") return Scheme::Picard;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected lawson-rk4, strang or picard)");
}

template <typename Real = double>
struct PicardConfig {
  Real interval = Real(0.05);  // T_p
  Index nodes = 33;            // trapezoid nodes on [0, T_p]; >= 8 T_p max|xi| / pi resolves the phases
  int max_iterations = 12;
  Real tolerance = Real(1e-13);  // stop once successive iterates differ by less than this
};

template <typename Real = double>
struct SchemeConfig {
  Scheme scheme = Scheme::LawsonRK4;
  Real dt = Real(1e-2);
  Real final_time = Real(1);
  PicardConfig<Real> picard;

  void validate() const {
    if (!(dt > Real(0))) throw std::invalid_argument("SchemeConfig: dt must be positive");
    if (!(final_time >= dt)) throw std::invalid_argument("SchemeConfig: final time must be >= dt");
    if (picard.nodes < 2) throw std::invalid_argument("SchemeConfig: picard needs at least 2 nodes");
    if (!(picard.interval > Real(0))) throw std::invalid_argument("SchemeConfig: picard interval must be positive");
  }
};

/// Exact linear flow: psi_{+-} modes times e^{-+i dt|xi|}, phi_{+-} modes times e^{-+i dt<xi>}.
template <typename Real>
DiagonalState<Real> free_flow(const DiagonalState<Real>& d, Real dt) {
  const auto& grid = d.grid();
  DiagonalState<Real> out(apply_multiplier(d.psi_plus, half_wave_propagator(grid, +1, dt)),
                          apply_multiplier(d.psi_minus, half_wave_propagator(grid, -1, dt)),
                          apply_multiplier(d.phi_plus, klein_gordon_propagator(grid, +1, dt)),
                          apply_multiplier(d.phi_minus, klein_gordon_propagator(grid, -1, dt)), d.time + dt);
  return out;
}

/// Everything in d_t u except the free flow: (i F_+, i F_-, -i G_+, -i G_-).
template <typename Real>
DiagonalState<Real> nonlinear_tendency(const DiagonalState<Real>& d, const Params<Real>& params,
                                       const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  using Complex = std::complex<Real>;
  const Complex i(0, 1);
  auto [fp, fm] = dirac_rhs(d, params, dirac);
  auto [gp, gm] = kg_rhs(d, params, dirac);
  return DiagonalState<Real>(i * fp, i * fm, -i * gp, -i * gm, d.time);
}

/// Classical RK4 on the integrating-factor variables w = E(-t) u (Lawson).
/// `flow(u, h)` applies E(h); `tendency(u)` is the non-free part of d_t u.
template <typename State, typename Real, typename Flow, typename Tendency>
State lawson_rk4_step(const State& u, Real h, Flow&& flow, Tendency&& tendency) {
  const State k1 = tendency(u);
  const State half_u = flow(u, h / 2);
  const State k2 = tendency(half_u + (h / 2) * flow(k1, h / 2));
  const State k3 = tendency(half_u + (h / 2) * k2);
  const State k4 = tendency(flow(u, h) + h * flow(k3, h / 2));
  return flow(u + (h / 6) * k1, h) + (h / 3) * flow(k2 + k3, h / 2) + (h / 6) * k4;
}

/// Half free flow, explicit midpoint on the nonlinear part, half free flow.
template <typename State, typename Real, typename Flow, typename Tendency>
State strang_step(const State& u, Real h, Flow&& flow, Tendency&& tendency) {
  const State v = flow(u, h / 2);
  const State mid = v + (h / 2) * tendency(v);
  return flow(v + h * tendency(mid), h / 2);
}

template <typename Real>
DiagonalState<Real> step(const DiagonalState<Real>& d, const Params<Real>& params, Scheme scheme, Real dt,
                         const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  auto flow = [](const DiagonalState<Real>& u, Real h) { return free_flow(u, h); };
  auto tendency = [&](const DiagonalState<Real>& u) { return nonlinear_tendency(u, params, dirac); };
  DiagonalState<Real> next(d.grid());
  switch (scheme) {
    case Scheme::LawsonRK4: next = lawson_rk4_step(d, dt, flow, tendency); break;
    case Scheme::Strang: next = strang_step(d, dt, flow, tendency); break;
    case Scheme::Picard: throw std::invalid_argument("step: picard is not a one-step scheme; use picard_solve");
  }
  next.time = d.time + dt;
  if (!next.all_finite()) {
    throw NumericalError("non-finite state after step to t = " + std::to_string(static_cast<double>(next.time)));
  }
  return next;
}

template <typename Real>
DiagonalState<Real> step(const DiagonalState<Real>& d, const Params<Real>& params, const SchemeConfig<Real>& cfg,
                         const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  return step(d, params, cfg.scheme, cfg.dt, dirac);
}

/// Regularity exponents used for the recorded norms: psi in H^{-l}, phi in H^k, phi_t in H^{k-1}.
template <typename Real = double>
struct DiagnosticsSpec {
  Real l = 0;
  Real k = Real(0.25);
};

template <typename Real = double>
struct Diagnostics {
  Real time = 0;
  Real charge = 0;
  Real psi_norm = 0;    // ||psi||_{H^{-l}}
  Real phi_norm = 0;    // ||phi||_{H^k}
  Real phi_t_norm = 0;  // ||phi_t||_{H^{k-1}}
  Real reality_residue = 0;     // max |phi_-^(k) - conj phi_+^(-k)|
  Real projection_residue = 0;  // max over signs of ||pi psi_{+-} - psi_{+-}|| / ||psi_{+-}||
};

template <typename Real>
Diagnostics<Real> diagnose(const DiagonalState<Real>& d, const Params<Real>& params, const DiagnosticsSpec<Real>& spec,
                           const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const auto phys = to_physical(d, params);
  Diagnostics<Real> out;
  out.time = d.time;
  out.charge = charge(phys.state.psi);
  out.psi_norm = sobolev_norm(phys.state.psi, -spec.l);
  out.phi_norm = sobolev_norm(phys.state.phi, spec.k);
  out.phi_t_norm = sobolev_norm(phys.state.phi_t, spec.k - Real(1));
  out.reality_residue = half_wave_conjugacy_defect(d);
  out.projection_residue = std::max(projection_residue(d.psi_plus, Sign::Plus, dirac),
                                    projection_residue(d.psi_minus, Sign::Minus, dirac));
  return out;
}

template <typename Real = double>
struct Trajectory {
  std::vector<DiagonalState<Real>> snapshots;
  std::vector<Diagnostics<Real>> diagnostics;
  Real max_projection_residue = 0;  // over every step, not only saved snapshots
  Real max_reality_residue = 0;
};

/// A step produced non-finite values; carries the last finite state and what was saved so far.
template <typename Real>
class EvolutionError : public NumericalError {
 public:
  EvolutionError(const std::string& what, DiagonalState<Real> last_good, Trajectory<Real> partial)
      : NumericalError(what), last_good_(std::move(last_good)), partial_(std::move(partial)) {}
  const DiagonalState<Real>& last_good() const { return last_good_; }
  const Trajectory<Real>& partial() const { return partial_; }

 private:
  DiagonalState<Real> last_good_;
  Trajectory<Real> partial_;
};

/// Integrates to cfg.final_time with a uniform step T/ceil(T/dt), saving every `save_every`
/// steps and the final state.
template <typename Real>
Trajectory<Real> evolve(const DiagonalState<Real>& d0, const Params<Real>& params, const SchemeConfig<Real>& cfg,
                        const DiagnosticsSpec<Real>& spec = {}, Index save_every = 1,
                        const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  cfg.validate();
  if (cfg.scheme == Scheme::Picard) throw std::invalid_argument("evolve: use picard_solve for the picard scheme");
  if (save_every < 1) throw std::invalid_argument("evolve: save_every must be >= 1");
  const auto steps = static_cast<Index>(std::ceil(cfg.final_time / cfg.dt * (Real(1) - Real(1e-12))));
  const Real h = cfg.final_time / Real(steps);

  Trajectory<Real> traj;
  auto record = [&](const DiagonalState<Real>& d, bool save) {
    const Real pres = std::max(projection_residue(d.psi_plus, Sign::Plus, dirac),
                               projection_residue(d.psi_minus, Sign::Minus, dirac));
    traj.max_projection_residue = std::max(traj.max_projection_residue, pres);
    traj.max_reality_residue = std::max(traj.max_reality_residue, half_wave_conjugacy_defect(d));
    if (save) {
      traj.snapshots.push_back(d);
      traj.diagnostics.push_back(diagnose(d, params, spec, dirac));
    }
  };

  DiagonalState<Real> d = d0;
  record(d, true);
  for (Index s = 1; s <= steps; ++s) {
    DiagonalState<Real> next(d.grid());
    try {
      next = step(d, params, cfg.scheme, h, dirac);
    } catch (const NumericalError& e) {
      throw EvolutionError<Real>(e.what(), d, std::move(traj));
    }
    next.time = d0.time + Real(s) * h;
    d = std::move(next);
    record(d, s % save_every == 0 || s == steps);
  }
  return traj;
}

template <typename Real = double>
struct PicardResult {
  std::vector<Trajectory<Real>> iterates;  // iterate j at the quadrature nodes; iterate 0 is the free flow
  std::vector<Real> differences;           // d_j = max over nodes of ||u^(j) - u^(j-1)||, j >= 1
  std::vector<Real> ratios;                // d_{j+1} / d_j
  // The same restricted to (psi_+, psi_-). With g = 0 the Dirac half is a closed linear
  // system while phi stays driven by <beta psi, psi>, so these are the linear-theory numbers.
  std::vector<Real> dirac_differences;
  std::vector<Real> dirac_ratios;
  bool converged = false;

  const DiagonalState<Real>& limit() const { return iterates.back().snapshots.back(); }
};

/// Fixed-point iteration of the Duhamel equations on [0, T_p]: the integral of the nonlinearity
/// evaluated on the previous iterate is taken by the composite trapezoid rule on the nodes,
///   I_i = E(h) I_{i-1} + h/2 ( E(h) N_{i-1} + N_i ),   u^(j+1)(t_i) = E(t_i) u0 + I_i.
/// Divergence is reported through the ratios, not thrown.
template <typename Real>
PicardResult<Real> picard_solve(const DiagonalState<Real>& d0, const Params<Real>& params,
                                const SchemeConfig<Real>& cfg,
                                const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const auto& pc = cfg.picard;
  if (pc.nodes < 2) throw std::invalid_argument("picard_solve: need at least 2 nodes");
  if (!(pc.interval > Real(0))) throw std::invalid_argument("picard_solve: interval must be positive");
  const Index nodes = pc.nodes;
  const Real h = pc.interval / Real(nodes - 1);

  std::vector<DiagonalState<Real>> free;
  free.reserve(nodes);
  for (Index i = 0; i < nodes; ++i) {
    DiagonalState<Real> f = free_flow(d0, Real(i) * h);
    f.time = d0.time + Real(i) * h;
    free.push_back(std::move(f));
  }

  PicardResult<Real> result;
  auto as_trajectory = [](std::vector<DiagonalState<Real>> states) {
    Trajectory<Real> t;
    t.snapshots = std::move(states);
    return t;
  };
  result.iterates.push_back(as_trajectory(free));

  for (int j = 0; j < pc.max_iterations; ++j) {
    const auto& prev = result.iterates.back().snapshots;
    std::vector<DiagonalState<Real>> next;
    next.reserve(nodes);
    DiagonalState<Real> integral(d0.grid());
    DiagonalState<Real> n_prev = nonlinear_tendency(prev[0], params, dirac);
    next.push_back(free[0]);
    for (Index i = 1; i < nodes; ++i) {
      const DiagonalState<Real> n_i = nonlinear_tendency(prev[i], params, dirac);
      integral = free_flow(integral, h) + (h / 2) * (free_flow(n_prev, h) + n_i);
      DiagonalState<Real> u = free[i] + integral;
      u.time = free[i].time;
      if (!u.all_finite()) throw NumericalError("picard_solve: non-finite iterate");
      next.push_back(std::move(u));
      n_prev = n_i;
    }
    Real diff = 0, dirac_diff = 0;
    for (Index i = 0; i < nodes; ++i) {
      const DiagonalState<Real> delta = next[i] - prev[i];
      diff = std::max(diff, l2_norm(delta));
      dirac_diff = std::max(dirac_diff, std::hypot(l2_norm(delta.psi_plus), l2_norm(delta.psi_minus)));
    }
    auto push = [](std::vector<Real>& differences, std::vector<Real>& ratios, Real d) {
      if (!differences.empty()) ratios.push_back(differences.back() > Real(0) ? d / differences.back() : Real(0));
      differences.push_back(d);
    };
    push(result.differences, result.ratios, diff);
    push(result.dirac_differences, result.dirac_ratios, dirac_diff);
    result.iterates.push_back(as_trajectory(std::move(next)));
    if (diff <= pc.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

// Reference solver for the untransformed system.
//   Dirac (after multiplying by beta): d_t psi = -i (xi alpha + M beta) psi + i g phi beta psi
//   Klein-Gordon: phi_tt = -(xi^2 + m^2) phi + <beta psi, psi>
// Linear parts are propagated exactly (2x2 matrix exponential, trigonometric rotation with
// the true mass m); the rest by Lawson RK4 in the same variables.

template <typename Real>
PhysicalState<Real> physical_linear_flow(const PhysicalState<Real>& p, Real h, const Params<Real>& params,
                                         const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  using Complex = std::complex<Real>;
  const auto& grid = p.grid();
  const Complex i(0, 1);
  PhysicalState<Real> out = p;
  for (Index slot = 0; slot < grid.size(); ++slot) {
    const Real xi = grid.frequency(slot);
    const Real omega = std::sqrt(xi * xi + params.M * params.M);
    const Matrix2<Real> ham = xi * dirac.alpha + params.M * dirac.beta;
    Matrix2<Real> prop = Matrix2<Real>::Identity() * std::cos(omega * h);
    if (omega > Real(0)) prop -= i * (std::sin(omega * h) / omega) * ham;
    out.psi.coefficients().row(slot) = p.psi.coefficients().row(slot) * prop.transpose();

    const Real w = std::sqrt(xi * xi + params.m * params.m);
    const Real c = std::cos(w * h), s = std::sin(w * h);
    const Complex f = p.phi.coefficients()(slot), ft = p.phi_t.coefficients()(slot);
    out.phi.coefficients()(slot) = c * f + (s / w) * ft;
    out.phi_t.coefficients()(slot) = -w * s * f + c * ft;
  }
  out.time = p.time + h;
  return out;
}

template <typename Real>
PhysicalState<Real> physical_tendency(const PhysicalState<Real>& p, const Params<Real>& params,
                                      const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  using Complex = std::complex<Real>;
  const auto& grid = p.grid();
  PhysicalState<Real> out(grid);
  out.time = p.time;
  if (params.g != Real(0)) {
    const auto phi = p.phi.values();
    typename SpinorField<Real>::Values prod = phi.col(0).asDiagonal() * (p.psi.values() * dirac.beta.transpose());
    auto source = SpinorField<Real>::from_values(grid, prod);
    dealias_in_place(source);
    out.psi = Complex(0, params.g) * source;
  }
  out.phi_t = nullform(p.psi, p.psi, dirac);
  return out;
}

template <typename Real = double>
struct PhysicalTrajectory {
  std::vector<PhysicalState<Real>> snapshots;
};

template <typename Real>
PhysicalTrajectory<Real> reference_solve(const PhysicalState<Real>& p0, const Params<Real>& params, Real dt,
                                         Real final_time, Index save_every = 1,
                                         const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  params.validate();
  if (!(dt > Real(0)) || !(final_time >= dt)) throw std::invalid_argument("reference_solve: need 0 < dt <= T");
  if (save_every < 1) throw std::invalid_argument("reference_solve: save_every must be >= 1");
  const auto steps = static_cast<Index>(std::ceil(final_time / dt * (Real(1) - Real(1e-12))));
  const Real h = final_time / Real(steps);
  auto flow = [&](const PhysicalState<Real>& u, Real tau) { return physical_linear_flow(u, tau, params, dirac); };
  auto tendency = [&](const PhysicalState<Real>& u) { return physical_tendency(u, params, dirac); };

  PhysicalTrajectory<Real> traj;
  PhysicalState<Real> p = p0;
  traj.snapshots.push_back(p);
  for (Index s = 1; s <= steps; ++s) {
    PhysicalState<Real> next = lawson_rk4_step(p, h, flow, tendency);
    next.time = p0.time + Real(s) * h;
    if (!(next.psi.coefficients().allFinite() && next.phi.coefficients().allFinite() &&
          next.phi_t.coefficients().allFinite())) {
      throw NumericalError("reference_solve: non-finite state at t = " + std::to_string(static_cast<double>(next.time)));
    }
    p = std::move(next);
    if (s % save_every == 0 || s == steps) traj.snapshots.push_back(p);
  }
  return traj;
}

}  // namespace dkg
