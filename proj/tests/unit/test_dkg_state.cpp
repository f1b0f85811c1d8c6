#include "catch_amalgamated.hpp"

#include "dkg/dkg_state.hpp"
#include "oracles.hpp"

#include <numbers>
#include <random>

using namespace dkg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;

PhysicalState<double> random_physical(const SpectralGrid<double>& grid, std::uint64_t seed) {
  PhysicalState<double> p(random_sobolev_field<double, 2>(grid, 0.0, seed),
                          random_sobolev_field<double, 1>(grid, 0.25, seed + 1, true),
                          random_sobolev_field<double, 1>(grid, -0.75, seed + 2, true));
  return p;
}

ScalarField<double> single_mode(const SpectralGrid<double>& grid, Index k, std::complex<double> c = 1.0) {
  ScalarField<double> f(grid);
  f.coefficients()(grid.slot(k)) = c;
  return f;
}
}  // namespace

TEST_CASE("params", "[dkg_state]") {
  Params<double> p{.M = 0.0, .m = 2.0, .g = 1.0};
  CHECK(p.c0() == -3.0);
  CHECK_NOTHROW(p.validate());
  p.m = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("to_diagonal examples", "[dkg_state]") {
  const auto grid = make_grid(32);
  const Params<double> params;

  SECTION("static data splits evenly") {
    PhysicalState<double> p(grid);
    p.phi = random_sobolev_field<double, 1>(grid, 0.0, 9, true);
    const auto d = to_diagonal(p, params);
    CHECK((d.phi_plus.coefficients() - p.phi.coefficients()).norm() == 0.0);
    CHECK((d.phi_minus.coefficients() - p.phi.coefficients()).norm() == 0.0);
  }

  SECTION("(1, i) e^{ix} is a pure plus wave") {
    PhysicalState<double> p(grid);
    p.psi.coefficients().row(1) << 1.0, oracle::I;
    const auto d = to_diagonal(p, params);
    CHECK(d.psi_minus.coefficients().norm() == 0.0);
    CHECK((d.psi_plus.coefficients() - p.psi.coefficients()).norm() == 0.0);
  }

  SECTION("real data gives conjugate half waves") {
    const auto d = to_diagonal(random_physical(grid, 11), params);
    CHECK(half_wave_conjugacy_defect(d) <= 1e-13);
  }

  SECTION("grid mismatch") {
    PhysicalState<double> p(grid);
    p.phi = ScalarField<double>(make_grid(16), true);
    CHECK_THROWS_AS(to_diagonal(p, params), std::invalid_argument);
  }
}

TEST_CASE("to_physical examples", "[dkg_state]") {
  const auto grid = make_grid(32);
  const Params<double> params;

  SECTION("constant state") {
    DiagonalState<double> d(grid);
    d.phi_plus = single_mode(grid, 0);
    d.phi_minus = single_mode(grid, 0);
    const auto conv = to_physical(d, params);
    CHECK(std::abs(conv.state.phi.coefficient(0) - 1.0) == 0.0);
    CHECK(conv.state.phi_t.coefficients().norm() == 0.0);
    CHECK(conv.state.psi.coefficients().norm() == 0.0);
    CHECK_FALSE(conv.reality_warning);
  }

  SECTION("phi_+ = e^{ix}, phi_- = e^{-ix}") {
    DiagonalState<double> d(grid);
    d.phi_plus = single_mode(grid, 1);
    d.phi_minus = single_mode(grid, -1);
    const auto conv = to_physical(d, params);
    const auto phi = conv.state.phi.values();
    const auto phi_t = conv.state.phi_t.values();
    for (Index j = 0; j < grid.size(); ++j) {
      const double x = grid.point(j);
      CHECK(std::abs(phi(j) - std::cos(x)) < 1e-14);
      CHECK(std::abs(phi_t(j) - std::sqrt(2.0) * std::sin(x)) < 1e-14);
    }
  }

  SECTION("non-conjugate half waves are reported") {
    DiagonalState<double> d(grid);
    d.phi_plus = single_mode(grid, 2);
    const auto conv = to_physical(d, params);
    CHECK(conv.reality_warning);
    CHECK(conv.reality_residue > 0.1);
  }
}

TEST_CASE("round trips and charge over 100 random states", "[dkg_state]") {
  const auto grid = make_grid(64);
  const Params<double> params{.M = 0.3, .m = 1.0, .g = 1.0};
  double worst_round_trip = 0.0, worst_pythagoras = 0.0, worst_projection = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto p = random_physical(grid, 1000 + 7 * t);
    const auto d = to_diagonal(p, params);
    const auto back = to_physical(d, params).state;
    const double scale = l2_norm(p.psi) + l2_norm(p.phi) + l2_norm(p.phi_t);
    const double err = l2_norm(back.psi - p.psi) + l2_norm(back.phi - p.phi) + l2_norm(back.phi_t - p.phi_t);
    worst_round_trip = std::max(worst_round_trip, err / scale);
    const double q = charge(p.psi);
    worst_pythagoras = std::max(worst_pythagoras, std::abs(charge(d.psi_plus) + charge(d.psi_minus) - q) / q);
    worst_projection = std::max({worst_projection, projection_residue(d.psi_plus, Sign::Plus),
                                 projection_residue(d.psi_minus, Sign::Minus)});
    CHECK_THAT(charge(back.psi), WithinRel(q, 1e-13));
  }
  CHECK(worst_round_trip <= 1e-12);
  CHECK(worst_pythagoras <= 1e-12);
  CHECK(worst_projection <= 1e-12);
}

TEST_CASE("charge", "[dkg_state]") {
  const auto grid = make_grid(16);
  SpinorField<double> psi(grid);
  psi.coefficients()(0, 0) = 1.0;
  CHECK_THAT(charge(psi), WithinRel(2 * kPi, 1e-15));
  CHECK_THAT(charge(2.0 * psi), WithinRel(4 * charge(psi), 1e-15));

  // the discrete charge is the quadrature integral of |psi|^2
  const auto rough = random_sobolev_field<double, 2>(grid, -0.2, 3);
  const auto v = rough.values();
  CHECK_THAT(charge(rough), WithinRel(grid.spacing() * v.squaredNorm(), 1e-13));
}

TEST_CASE("random Sobolev fields", "[dkg_state]") {
  const auto grid = make_grid(128);
  const auto a = random_sobolev_field<double, 2>(grid, 0.1, 42);
  const auto b = random_sobolev_field<double, 2>(grid, 0.1, 42);
  CHECK((a.coefficients() - b.coefficients()).norm() == 0.0);
  CHECK((a.coefficients() - random_sobolev_field<double, 2>(grid, 0.1, 43).coefficients()).norm() > 0.0);

  const auto r = random_sobolev_field<double, 1>(grid, 0.0, 5, true);
  CHECK(r.is_real());
  CHECK(r.values().imag().cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(reality_defect(r) == 0.0);

  // nothing above the dealiasing cutoff; coefficient law on the untapered band
  for (Index s = 0; s < grid.size(); ++s) {
    if (std::abs(grid.wavenumber(s)) > grid.dealias_cutoff()) CHECK(a.coefficients().row(s).norm() == 0.0);
  }

  SECTION("norm growth under refinement") {
    std::vector<double> h0, h_half;
    for (Index n : {64, 256, 1024, 4096}) {
      double s0 = 0, s1 = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = random_sobolev_field<double, 1>(make_grid(n), 0.0, seed);
        s0 += sobolev_norm(f, 0.0);
        s1 += sobolev_norm(f, 0.5);
      }
      h0.push_back(s0 / 20);
      h_half.push_back(s1 / 20);
    }
    // H^0 mass converges (marginally), H^{1/2} grows without bound
    CHECK(h0.back() / h0.front() < 1.5);
    CHECK(h_half.back() / h_half.front() > 4.0);
    for (std::size_t i = 1; i < h_half.size(); ++i) CHECK(h_half[i] > 1.4 * h_half[i - 1]);
  }

  SECTION("nested draws on refinement") {
    const auto coarse = random_sobolev_field<double, 1>(make_grid(64), 0.0, 7);
    const auto fine = random_sobolev_field<double, 1>(make_grid(128), 0.0, 7);
    // modes untouched by either taper agree exactly
    for (Index k = -10; k <= 10; ++k) CHECK(coarse.coefficient(k) == fine.coefficient(k));
  }
}
