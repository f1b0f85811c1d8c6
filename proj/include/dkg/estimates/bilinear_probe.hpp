#pragma once

// Randomized lower bounds for the best constants in the two bilinear estimates
//
//   null form:  || <beta pi_{s1} psi, pi_{s2} psi'> ||_{Y^{k-1, -1/2+2e}_pm}
//                 <= C ||psi||_{X^{-l, 1/2+e}_{s1}} ||psi'||_{X^{-l, 1/2+e}_{s2}}
//   dual form:  || <beta pi_{s1} psi, pi_{s2} psi'> ||_{Y^{-k, -1/2-e}_pm}
//                 <= C ||psi||_{X^{-l, 1/2+e}_{s1}} ||psi'||_{X^{l, 1/2-2e}_{s2}}
//
// on a doubly periodic box. A bounded ratio under grid refinement is evidence for the
// estimate; growth is evidence against it.

#include "dkg/estimates/admissibility.hpp"
#include "dkg/estimates/space_time.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace dkg {

enum class Estimate { NullForm, Dual };

inline std::string to_string(Estimate e) { return e == Estimate::NullForm ? "null-form" : "dual"; }

template <typename Real = double>
struct ProbeConfig {
  Estimate estimate = Estimate::NullForm;
  Real l = Real(0.2);
  Real k = Real(0.3);
  Real eps = Real(0.01);
  SignPair pair{Sign::Plus, Sign::Plus};
  Index n = 64;
  Index n_t = 64;
  Real length = Real(2) * std::numbers::pi_v<Real>;
  Real period = Real(2) * std::numbers::pi_v<Real>;
  int trials = 200;
  std::uint64_t seed = 1;
  Real decay = Real(0.5);  // extra decay of the random law beyond the critical rate
  unsigned threads = 0;    // 0: hardware concurrency
  bool override_admissibility = false;

  std::vector<Violation> violations() const {
    return estimate == Estimate::NullForm ? null_form_estimate_violations(l, k) : dual_estimate_violations(l, k);
  }

  void validate() const {
    if (!(eps > 0 && eps <= Real(0.1))) throw std::invalid_argument("probe: eps must lie in (0, 0.1]");
    if (trials < 1) throw std::invalid_argument("probe: trials must be positive");
    if (!(decay > 0)) throw std::invalid_argument("probe: decay must be positive");
    if (n < 8 || n_t < 8 || n % 2 || n_t % 2) throw std::invalid_argument("probe: grid sizes must be even and >= 8");
    const auto v = violations();
    if (!v.empty() && !override_admissibility)
      throw std::invalid_argument("probe: (l, k) outside the estimate's range: " + describe(v));
  }

  XsbParams<Real> left_norm() const { return {-l, Real(0.5) + eps, pair.first}; }
  XsbParams<Real> right_norm() const {
    return estimate == Estimate::NullForm ? XsbParams<Real>{-l, Real(0.5) + eps, pair.second}
                                          : XsbParams<Real>{l, Real(0.5) - 2 * eps, pair.second};
  }
  XsbParams<Real> target_norm(Sign phi_sign) const {
    return estimate == Estimate::NullForm ? XsbParams<Real>{k - 1, Real(-0.5) + 2 * eps, phi_sign}
                                          : XsbParams<Real>{-k, Real(-0.5) - eps, phi_sign};
  }
};

template <typename Real = double>
struct ProbeSample {
  int trial = 0;
  Sign phi_sign = Sign::Plus;
  Real lhs = 0;
  Real rhs = 0;
  Real ratio = 0;
};

template <typename Real = double>
struct ProbeStats {
  Real max_ratio = 0;
  Real mean_ratio = 0;
  int argmax_trial = -1;
  int evaluated = 0;
};

template <typename Real = double>
struct ProbeResult {
  ProbeConfig<Real> config;
  std::vector<ProbeSample<Real>> samples;  // trial-major, plus before minus
  std::array<ProbeStats<Real>, 2> stats;   // indexed by phi sign: [0] plus, [1] minus
  int skipped = 0;                         // trials whose right-hand side vanished

  const ProbeStats<Real>& stats_for(Sign phi_sign) const { return stats[phi_sign == Sign::Plus ? 0 : 1]; }
};

/// Worker count: explicit request, else DKG_LAB_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DKG_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) cap = std::min(cap, static_cast<unsigned>(v));
  }
  return requested ? std::min(requested, cap) : cap;
}

/// Runs `body(i)` for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(int count, unsigned threads, Body body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1))));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

/// One trial: returns {lhs(+), lhs(-), rhs}.
template <typename Real>
std::array<Real, 3> probe_trial(const ProbeConfig<Real>& cfg, const SpaceTimeGrid<Real>& grid, int trial,
                                Support left_support = Support::All, Support right_support = Support::All) {
  const auto left = project(
      random_xsb_field(grid, cfg.left_norm(), cfg.decay, cfg.seed, 2 * std::int64_t(trial), left_support),
      cfg.pair.first);
  const auto right = project(
      random_xsb_field(grid, cfg.right_norm(), cfg.decay, cfg.seed, 2 * std::int64_t(trial) + 1, right_support),
      cfg.pair.second);
  const auto w = nullform(left, right);
  return {xsb_norm(w, cfg.target_norm(Sign::Plus)), xsb_norm(w, cfg.target_norm(Sign::Minus)),
          xsb_norm(left, cfg.left_norm()) * xsb_norm(right, cfg.right_norm())};
}

template <typename Real>
ProbeResult<Real> probe_bilinear(const ProbeConfig<Real>& cfg) {
  cfg.validate();
  const SpaceTimeGrid<Real> grid(cfg.n, cfg.n_t, cfg.length, cfg.period);
  std::vector<std::array<Real, 3>> raw(cfg.trials);
  parallel_for(cfg.trials, resolve_threads(cfg.threads), [&](int t) { raw[t] = probe_trial(cfg, grid, t); });

  ProbeResult<Real> result;
  result.config = cfg;
  for (int t = 0; t < cfg.trials; ++t) {
    const auto [lp, lm, rhs] = raw[t];
    if (!(rhs > 0)) {
      ++result.skipped;
      continue;
    }
    for (int i = 0; i < 2; ++i) {
      const Real lhs = i == 0 ? lp : lm;
      ProbeSample<Real> s{t, i == 0 ? Sign::Plus : Sign::Minus, lhs, rhs, lhs / rhs};
      auto& st = result.stats[i];
      if (s.ratio > st.max_ratio || st.argmax_trial < 0) {
        st.max_ratio = s.ratio;
        st.argmax_trial = t;
      }
      st.mean_ratio += s.ratio;
      ++st.evaluated;
      result.samples.push_back(s);
    }
  }
  for (auto& st : result.stats)
    if (st.evaluated) st.mean_ratio /= Real(st.evaluated);
  return result;
}

template <typename Real>
ProbeResult<Real> probe_null_form(ProbeConfig<Real> cfg) {
  cfg.estimate = Estimate::NullForm;
  return probe_bilinear(cfg);
}

template <typename Real>
ProbeResult<Real> probe_dual(ProbeConfig<Real> cfg) {
  cfg.estimate = Estimate::Dual;
  return probe_bilinear(cfg);
}

template <typename Real = double>
struct RefinementReport {
  std::vector<ProbeResult<Real>> levels;  // n, 2n, 4n, ...
  /// max_ratio(level i+1) / max_ratio(level i) for the given phi sign.
  std::vector<Real> growth(Sign phi_sign) const {
    std::vector<Real> g;
    for (std::size_t i = 1; i < levels.size(); ++i)
      g.push_back(levels[i].stats_for(phi_sign).max_ratio / levels[i - 1].stats_for(phi_sign).max_ratio);
    return g;
  }
};

/// The same trials (nested draws) on `doublings + 1` grids, each refining (n, n_t) by two.
template <typename Real>
RefinementReport<Real> probe_refinement(ProbeConfig<Real> cfg, int doublings = 1) {
  RefinementReport<Real> report;
  for (int i = 0; i <= doublings; ++i) {
    report.levels.push_back(probe_bilinear(cfg));
    cfg.n *= 2;
    cfg.n_t *= 2;
  }
  return report;
}

}  // namespace dkg
