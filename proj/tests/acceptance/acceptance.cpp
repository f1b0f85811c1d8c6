// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include "dkg/estimates.hpp"
#include "dkg/experiments.hpp"
#include "dkg/nonlinearity.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dkg;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SpinorField<double> random_spinor(const SpectralGrid<double>& grid, std::mt19937_64& rng, Index kmax) {
  SpinorField<double>::Coefficients c(grid.size(), 2);
  c.col(0) = oracle::random_band_limited(grid.size(), kmax, rng);
  c.col(1) = oracle::random_band_limited(grid.size(), kmax, rng);
  return SpinorField<double>(grid, c);
}

PhysicalState<double> data(const SpectralGrid<double>& grid, std::uint64_t seed, double smoothing = 0.0,
                           double l = 0.0, double k = 0.25) {
  return random_initial_data(grid, DataSpec<double>{.l = l, .k = k, .seed = seed, .smoothing = smoothing});
}

DiagonalState<double> final_state(const DiagonalState<double>& d0, const Params<double>& params, Scheme scheme,
                                  double dt, double T) {
  return evolve(d0, params, SchemeConfig<double>{.scheme = scheme, .dt = dt, .final_time = T}, {}, Index(1) << 40)
      .snapshots.back();
}

double physical_distance(const PhysicalState<double>& a, const PhysicalState<double>& b) {
  const double x = l2_norm(a.psi - b.psi), y = l2_norm(a.phi - b.phi), z = l2_norm(a.phi_t - b.phi_t);
  return std::sqrt(x * x + y * y + z * z);
}

// 1 ----------------------------------------------------------------------------------------
void dirac_algebra(Outcome& o) {
  const auto t0 = Clock::now();
  const auto report = verify_algebra<double>();
  const double t = seconds_since(t0);
  o.detail << "max deviation " << report.max_deviation << " over " << report.checks.size() << " identities, " << t
           << " s";
  o.require(report.ok() && report.max_deviation <= 1e-14, "deviation <= 1e-14");
  o.require(t < 1.0, "runtime < 1 s");
}

// 2 ----------------------------------------------------------------------------------------
void gamma_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  const GammaTable<double> table;
  double cell_err = 0;
  for (const auto& cell : GammaTable<double>::cells()) {
    const Eigen::Matrix2cd direct = oracle::beta() * oracle::proj(to_int(cell.pair.second), to_int(cell.sgn2)) *
                                    oracle::proj(to_int(cell.pair.first), to_int(cell.sgn1));
    cell_err = std::max(cell_err, (table(cell.pair, cell.sgn1, cell.sgn2) - direct).cwiseAbs().maxCoeff());
  }

  const auto grid = make_grid(64);
  std::mt19937_64 rng(2024);
  double path_err = 0;
  for (int t = 0; t < 100; ++t) {
    const auto psi = random_spinor(grid, rng, 32);
    const auto chi = random_spinor(grid, rng, 32);
    for (SignPair pair : kSignPairs)
      path_err = std::max(path_err, (nullform_projected(psi, chi, pair).coefficients() -
                                     nullform_projected_spectral(psi, chi, pair).coefficients())
                                        .cwiseAbs()
                                        .maxCoeff());
  }

  double zero_err = 0;
  std::normal_distribution<double> g;
  for (const auto& cell : GammaTable<double>::zero_cells()) {
    // psi at xi1 with sign sgn1; psi' read at its own frequency eta = -xi2
    SpinorField<double> psi(grid), chi(grid);
    psi.coefficients().row(grid.slot(3 * to_int(cell.sgn1))) << std::complex(g(rng), g(rng)),
        std::complex(g(rng), g(rng));
    chi.coefficients().row(grid.slot(-5 * to_int(cell.sgn2))) << std::complex(g(rng), g(rng)),
        std::complex(g(rng), g(rng));
    zero_err = std::max({zero_err, nullform_projected(psi, chi, cell.pair).coefficients().cwiseAbs().maxCoeff(),
                         nullform_projected_spectral(psi, chi, cell.pair).coefficients().cwiseAbs().maxCoeff()});
  }
  const double t = seconds_since(t0);
  o.detail << "16 cells " << cell_err << ", two paths " << path_err << ", 8 zero cells " << zero_err << ", " << t
           << " s";
  o.require(GammaTable<double>::cells().size() == 16 && GammaTable<double>::zero_cells().size() == 8, "16/8 cells");
  o.require(cell_err <= 1e-15, "cells <= 1e-15");
  o.require(path_err <= 1e-12, "two paths <= 1e-12");
  o.require(zero_err <= 1e-12, "zero cells <= 1e-12");
  o.require(t < 10.0, "runtime < 10 s");
}

// 3 ----------------------------------------------------------------------------------------
void round_trips(Outcome& o) {
  const auto grid = make_grid(64);
  const Params<double> params{.M = 0.7, .m = 1.3, .g = 1.0};
  double trip = 0, pyth = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto p = data(grid, 5000 + t, 0.0, 0.2, 0.3);
    const auto back = to_physical(to_diagonal(p, params), params).state;
    const double scale = std::sqrt(std::pow(l2_norm(p.psi), 2) + std::pow(l2_norm(p.phi), 2) +
                                   std::pow(l2_norm(p.phi_t), 2));
    trip = std::max(trip, physical_distance(back, p) / scale);
    const auto d = to_diagonal(p, params);
    const double q = charge(p.psi);
    pyth = std::max(pyth, std::abs(charge(d.psi_plus) + charge(d.psi_minus) - q) / q);
  }
  o.detail << "round trip " << trip << ", charge Pythagoras " << pyth << " (relative, 100 states)";
  o.require(trip <= 1e-12, "round trip <= 1e-12");
  o.require(pyth <= 1e-12, "Pythagoras <= 1e-12");
}

// 4 ----------------------------------------------------------------------------------------
void free_flow_exactness(Outcome& o) {
  const auto grid = make_grid(32);
  double phase_err = 0;
  for (Index k : {-15, -7, -1, 0, 1, 4, 11, 16}) {
    const Index s = grid.slot(k);
    const double xi = grid.frequency(s);
    DiagonalState<double> d(grid);
    d.psi_plus.coefficients()(s, 0) = 1.0;
    d.psi_minus.coefficients()(s, 1) = 1.0;
    d.phi_plus.coefficients()(s) = 1.0;
    d.phi_minus.coefficients()(s) = 1.0;
    for (double t : {0.3, 1.0, 7.5}) {
      const auto f = free_flow(d, t);
      const double w = std::sqrt(1 + xi * xi);
      phase_err = std::max({phase_err, std::abs(f.psi_plus.coefficients()(s, 0) - std::polar(1.0, -t * std::abs(xi))),
                            std::abs(f.psi_minus.coefficients()(s, 1) - std::polar(1.0, t * std::abs(xi))),
                            std::abs(f.phi_plus.coefficients()(s) - std::polar(1.0, -t * w)),
                            std::abs(f.phi_minus.coefficients()(s) - std::polar(1.0, t * w))});
    }
  }
  PhysicalState<double> p(grid);
  ScalarField<double>::Values cosx(32);
  for (Index j = 0; j < 32; ++j) cosx(j) = std::cos(grid.point(j));
  p.phi = ScalarField<double>::from_values(grid, cosx, true);
  const Params<double> params;
  const auto phi1 = to_physical(free_flow(to_diagonal(p, params), 1.0), params).state.phi.values();
  double kg_err = 0;
  for (Index j = 0; j < 32; ++j)
    kg_err = std::max(kg_err, std::abs(phi1(j) - std::cos(std::sqrt(2.0)) * std::cos(grid.point(j))));
  o.detail << "phases " << phase_err << ", cos(sqrt2 t) cos x at t = 1: " << kg_err;
  o.require(phase_err <= 1e-12, "phases <= 1e-12");
  o.require(kg_err <= 1e-12, "KG mode <= 1e-12");
}

// 5 ----------------------------------------------------------------------------------------
void cross_validation(Outcome& o) {
  const auto grid = make_grid(128);
  const Params<double> params{.M = 1.0, .m = 1.0, .g = 1.0};
  const double T = 1.0;
  const auto p0 = data(grid, 77, 3.0);
  const auto d0 = to_diagonal(p0, params);
  const auto reference = reference_solve(p0, params, 1.0 / 1280, T).snapshots.back();

  const std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> err;
  for (double dt : dts)
    err.push_back(physical_distance(to_physical(final_state(d0, params, Scheme::LawsonRK4, dt, T), params).state,
                                    reference));
  double min_order = 1e9;
  o.detail << "Lawson vs reference errors";
  for (double e : err) o.detail << " " << e;
  o.detail << "; orders";
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double order = std::log2(err[i - 1] / err[i]);
    min_order = std::min(min_order, order);
    o.detail << " " << order;
  }

  std::vector<DiagonalState<double>> strang;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) strang.push_back(final_state(d0, params, Scheme::Strang, dt, T));
  o.detail << "; Strang self-convergence orders";
  bool strang_ok = true;
  for (std::size_t i = 2; i < strang.size(); ++i) {
    const double order = std::log2(l2_norm(strang[i - 2] - strang[i - 1]) / l2_norm(strang[i - 1] - strang[i]));
    o.detail << " " << order;
    strang_ok &= order >= 1.8 && order <= 2.2;
  }
  o.require(min_order >= 3.5, "Lawson order >= 3.5");
  o.require(strang_ok, "Strang order in [1.8, 2.2]");
}

// 6, 7 -------------------------------------------------------------------------------------
double max_charge_drift(const Trajectory<double>& traj) {
  const double q0 = traj.diagnostics.front().charge;
  double drift = 0;
  for (const auto& d : traj.diagnostics) drift = std::max(drift, std::abs(d.charge - q0) / q0);
  return drift;
}

struct CoupledRun {
  Trajectory<double> traj;
  std::vector<std::pair<double, double>> drift_levels;  // (dt, drift)
};

const CoupledRun& coupled_run() {
  static const CoupledRun run = [] {
    CoupledRun r;
    const auto grid = make_grid(256);
    const Params<double> params{.M = 1.0, .m = 1.0, .g = 1.0};
    const auto d0 = to_diagonal(data(grid, 31, 3.0), params);
    r.traj = evolve(d0, params, SchemeConfig<double>{.dt = 1e-3, .final_time = 1.0}, {}, 10);
    for (double dt : {0.02, 0.01, 0.005}) {
      const auto t = evolve(d0, params, SchemeConfig<double>{.dt = dt, .final_time = 1.0}, {}, 1);
      r.drift_levels.emplace_back(dt, max_charge_drift(t));
    }
    return r;
  }();
  return run;
}

void charge_conservation(Outcome& o) {
  const auto& run = coupled_run();
  const double drift = max_charge_drift(run.traj);
  o.detail << "drift at dt = 1e-3: " << drift << "; drifts";
  for (const auto& [dt, d] : run.drift_levels) o.detail << " " << d << " (dt " << dt << ")";
  o.detail << "; log2 ratios";
  bool ratio_ok = true;
  for (std::size_t i = 1; i < run.drift_levels.size(); ++i) {
    const double r = std::log2(run.drift_levels[i - 1].second / run.drift_levels[i].second);
    o.detail << " " << r;
    ratio_ok &= std::abs(r - 4.0) <= 0.5;
  }
  o.require(drift <= 1e-6, "drift <= 1e-6");
  o.require(ratio_ok, "drift ratio within 4 +- 0.5");
}

void projection_persistence(Outcome& o) {
  const auto& run = coupled_run();
  o.detail << "max per-step residue " << run.traj.max_projection_residue << " over "
           << std::lround(1.0 / 1e-3) << " steps (n = 256, g = M = m = 1)";
  o.require(run.traj.max_projection_residue <= 1e-11, "residue <= 1e-11");
}

// 8 ----------------------------------------------------------------------------------------
void picard_contraction(Outcome& o) {
  const auto grid = make_grid(64);
  {
    const Params<double> params{.M = 1.0, .m = 1.0, .g = 1.0};
    const auto d0 = to_diagonal(data(grid, 41, 1.0), params);
    SchemeConfig<double> cfg{.scheme = Scheme::Picard};
    cfg.picard = {.interval = 0.05, .nodes = 33, .max_iterations = 12, .tolerance = 1e-14};
    const auto coarse = picard_solve(d0, params, cfg);
    cfg.picard.nodes = 65;
    const auto fine = picard_solve(d0, params, cfg);
    const auto lawson = final_state(d0, params, Scheme::LawsonRK4, 0.05 / 128, 0.05);
    const double quadrature = l2_norm(coarse.limit() - fine.limit());
    const double err = l2_norm(coarse.limit() - lawson);
    double worst = 0;
    for (double r : coarse.ratios) worst = std::max(worst, r);
    o.detail << "full coupling: max ratio " << worst << ", |limit - Lawson| " << err << " vs quadrature estimate "
             << quadrature;
    o.require(!coarse.ratios.empty() && worst < 1.0, "ratios < 1");
    o.require(err <= 2.0 * quadrature + 1e-12, "limit within quadrature error");
  }
  {
    const Params<double> params{.M = 0.5, .m = 1.0, .g = 0.0};
    const auto d0 = to_diagonal(data(grid, 42, 3.0), params);
    SchemeConfig<double> cfg{.scheme = Scheme::Picard};
    cfg.picard = {.interval = 0.05, .nodes = 33, .max_iterations = 5, .tolerance = 0.0};
    const auto res = picard_solve(d0, params, cfg);
    const int jmax = 5;
    const double h = cfg.picard.interval / double(cfg.picard.nodes - 1);
    std::vector<double> d(jmax + 1, 0.0);
    for (Index node = 0; node < cfg.picard.nodes; ++node) {
      std::vector<double> sq(jmax + 1, 0.0);
      for (Index s = 0; s < grid.size(); ++s) {
        Eigen::Vector4cd u0;
        u0 << d0.psi_plus.coefficients().row(s).transpose(), d0.psi_minus.coefficients().row(s).transpose();
        const auto terms = oracle::dyson_terms(grid.frequency(s), params.M, double(node) * h, u0, jmax);
        for (int j = 0; j <= jmax; ++j) sq[j] += terms[j].squaredNorm();
      }
      for (int j = 0; j <= jmax; ++j) d[j] = std::max(d[j], std::sqrt(grid.length() * sq[j]));
    }
    o.detail << "; linear (g = 0, M = 0.5) observed/predicted";
    bool ok = res.dirac_ratios.size() >= 3;
    for (std::size_t j = 0; j < 3 && j < res.dirac_ratios.size(); ++j) {
      const double predicted = d[j + 2] / d[j + 1];
      const double q = res.dirac_ratios[j] / predicted;
      o.detail << " " << q;
      ok &= std::abs(q - 1.0) <= 0.2;
    }
    o.require(ok, "linear ratios within 20% of the exact solve");
  }
}

// 9 ----------------------------------------------------------------------------------------
void inequalities(Outcome& o) {
  const auto t0 = Clock::now();
  long long violations = 0, samples = 0, tight = 0;
  for (const auto& c : inequality_cases()) {
    const auto scan = scan_inequality(c, 1000000, 99);
    violations += scan.violations;
    samples += scan.samples;
    tight += scan.tight;
  }
  const double t = seconds_since(t0);
  o.detail << samples << " tuples over 8 cases, " << violations << " violations, " << tight
           << " with zero slack, " << t << " s";
  o.require(violations == 0, "zero violations");
  o.require(samples == 8000000, "10^6 per case");
  o.require(t < 30.0, "runtime < 30 s");
}

// 10 ---------------------------------------------------------------------------------------
void product_estimate(Outcome& o) {
  const auto grid = make_grid(256);
  std::mt19937_64 rng(10);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const ScalarField<double> u(grid, oracle::random_vector(256, rng));
    const ScalarField<double> v(grid, t % 2 ? oracle::random_vector(256, rng)
                                            : oracle::random_band_limited(256, 1 + t % 50, rng));
    worst = std::max(worst, product_estimate_check(u, v, 0.25).ratio);
  }
  ScalarField<double> one(grid, true);
  one.coefficients()(0) = 1.0;
  const double unit_err = std::abs(l2_norm(one) - std::sqrt(2 * kPi));
  const double product_err = std::abs(product_estimate_check(one, one, 0.25).lhs - std::sqrt(2 * kPi));
  o.detail << "C_k = " << product_constant(grid, 0.25) << ", max ratio over 1000 pairs " << worst
           << ", |‖1‖ - sqrt(2 pi)| = " << unit_err << ", product of ones " << product_err;
  o.require(worst <= 1.0, "ratio <= 1");
  o.require(unit_err <= 1e-13 && product_err <= 1e-13, "sqrt(2 pi) to 1e-13");
}

// 11 ---------------------------------------------------------------------------------------
void gronwall(Outcome& o) {
  const auto grid = make_grid(128);
  const Params<double> params{.M = 0.5, .m = 1.0, .g = 1.0};
  const auto d0 = to_diagonal(data(grid, 51), params);
  const auto traj = evolve(d0, params, SchemeConfig<double>{.dt = 0.005, .final_time = 2.0},
                           DiagnosticsSpec<double>{0.0, 0.25}, 10);
  const auto report = gronwall_monitor(traj, params, 0.25, 1.1);
  o.detail << report.points.size() << " snapshots, worst value/bound " << report.worst_fraction;
  o.require(report.holds(), "bound at every snapshot");
}

// 12 ---------------------------------------------------------------------------------------
void probes(Outcome& o) {
  double worst = 0;
  for (Estimate e : {Estimate::NullForm, Estimate::Dual}) {
    double est_worst = 0;
    for (SignPair pair : kSignPairs) {
      ProbeConfig<double> cfg;
      cfg.estimate = e;
      cfg.l = 0.2;
      cfg.k = 0.3;
      cfg.eps = 0.01;
      cfg.pair = pair;
      cfg.trials = 200;
      cfg.n = cfg.n_t = 64;
      const auto rep = probe_refinement(cfg, 1);
      for (Sign phi : kSigns) est_worst = std::max(est_worst, std::abs(rep.growth(phi).front() - 1.0));
    }
    o.detail << to_string(e) << " max |growth - 1| " << est_worst << "; ";
    worst = std::max(worst, est_worst);
  }
  o.require(worst <= 0.1, "change <= 10% for every pair and sign");

  ProbeConfig<double> bad;
  bad.estimate = Estimate::Dual;
  bad.l = 0.3;
  bad.k = 0.1;
  bad.override_admissibility = true;
  bad.trials = 50;
  bad.n = bad.n_t = 32;
  const auto rep = probe_refinement(bad, 2);
  o.detail << "report only, (l, k) = (0.3, 0.1) dual estimate growth for ++/+:";
  for (double g : rep.growth(Sign::Plus)) o.detail << " " << g;
}

// 13 ---------------------------------------------------------------------------------------
void validator(Outcome& o) {
  auto config = [](Experiment e, double l, double k) {
    ExperimentConfig c;
    c.experiment = e;
    c.l = l;
    c.k = k;
    return c;
  };
  bool ok = true;
  for (double eps : {0.1, 1e-3, 1e-9}) {
    ok &= local_violations(0.25 - eps, 0.25 - eps).empty() && local_violations(0.0, eps).empty();
    ok &= validate(config(Experiment::Simulate, 0.25 - eps, 0.25 - eps)).empty();
    ok &= validate(config(Experiment::Simulate, 0.0, eps)).empty();
  }
  ok &= !local_violations(0.25, 0.25).empty() && !local_violations(0.3, 0.5).empty();
  o.require(ok, "local examples");

  bool global_ok = true;
  for (double k = -0.5; k <= 1.0 + 1e-12; k += 1.0 / 64) {
    const bool inside = k > 0 && k < 0.5;
    global_ok &= global_violations(k).empty() == inside;
    global_ok &= validate(config(Experiment::Gronwall, 0.0, k)).empty() == inside;
  }
  global_ok &= global_violations(1e-12).empty() && !global_violations(0.5).empty() && global_violations(0.5 - 1e-12).empty();
  o.require(global_ok, "global range exactly 0 < k < 1/2");
  o.detail << "(1/4 - e, 1/4 - e) and (0, e) accepted for e in {0.1, 1e-3, 1e-9}; k scanned on [-1/2, 1] in steps of "
              "1/64";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Dirac algebra identities", dirac_algebra},
      {"gamma table and two-path null form", gamma_equivalence},
      {"round trips and charge Pythagoras", round_trips},
      {"free-flow exactness", free_flow_exactness},
      {"solver cross-validation", cross_validation},
      {"charge conservation", charge_conservation},
      {"projection persistence", projection_persistence},
      {"Picard contraction", picard_contraction},
      {"algebraic modulation inequalities", inequalities},
      {"product estimate", product_estimate},
      {"Gronwall monitor", gronwall},
      {"bilinear-estimate probes", probes},
      {"admissibility validator", validator},
  };
  int failures = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", ++index, name.c_str(), o.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", index - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
