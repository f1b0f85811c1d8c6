#pragma once

// The algebraic modulation inequality behind both bilinear estimates:
//
//   2 min(|xi1|, |xi2|) <= |sigma1| + |sigma2| + |sigma|,   xi = xi1 + xi2, tau = tau1 + tau2,
//
// with sigma1 = tau1 + s1|xi1|, sigma2 = tau2 - s2|xi2|, sigma = tau + phi|xi|. It is claimed
// on xi1 xi2 <= 0 for mixed pairs (s2 = -s1) and on xi1 xi2 >= 0 for equal pairs, for
// either sign phi of the target modulation.

#include "dkg/dirac_algebra.hpp"
#include "dkg/random.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dkg {

struct InequalityCase {
  SignPair pair;
  Sign phi_sign = Sign::Plus;

  /// Mixed pairs live on opposite-sign frequencies, equal pairs on same-sign ones.
  bool in_region(double xi1, double xi2) const { return pair.mixed() ? xi1 * xi2 <= 0 : xi1 * xi2 >= 0; }
  std::string label() const { return pair.label() + "/" + to_char(phi_sign); }
};

/// The four sign pairs times the two target signs.
inline std::array<InequalityCase, 8> inequality_cases() {
  std::array<InequalityCase, 8> out;
  int i = 0;
  for (SignPair p : kSignPairs)
    for (Sign phi : kSigns) out[i++] = {p, phi};
  return out;
}

template <typename Real = double>
struct ModulationTriple {
  Real sigma1 = 0;
  Real sigma2 = 0;
  Real sigma = 0;
};

template <typename Real = double>
struct InequalityCheck {
  bool holds = true;
  Real lhs = 0;    // 2 min(|xi1|, |xi2|)
  Real rhs = 0;    // |sigma1| + |sigma2| + |sigma|
  Real slack = 0;  // rhs - lhs
  ModulationTriple<Real> triple;
};

template <typename Real>
ModulationTriple<Real> modulations(const InequalityCase& c, Real xi1, Real xi2, Real tau1, Real tau2) {
  const Real s1 = Real(to_int(c.pair.first)), s2 = Real(to_int(c.pair.second)), phi = Real(to_int(c.phi_sign));
  return {tau1 + s1 * std::abs(xi1), tau2 - s2 * std::abs(xi2), (tau1 + tau2) + phi * std::abs(xi1 + xi2)};
}

/// Throws std::invalid_argument outside the case's frequency region. Rounding is tolerated
/// at a few ulps of the largest input; dyadic inputs are evaluated exactly.
template <typename Real>
InequalityCheck<Real> check_algebraic_inequality(const InequalityCase& c, Real xi1, Real xi2, Real tau1, Real tau2) {
  if (!c.in_region(double(xi1), double(xi2)))
    throw std::invalid_argument("inequality " + c.label() + ": (xi1, xi2) outside the region of this sign pair");
  InequalityCheck<Real> r;
  r.triple = modulations(c, xi1, xi2, tau1, tau2);
  r.lhs = 2 * std::min(std::abs(xi1), std::abs(xi2));
  r.rhs = std::abs(r.triple.sigma1) + std::abs(r.triple.sigma2) + std::abs(r.triple.sigma);
  r.slack = r.rhs - r.lhs;
  const Real scale = std::max({std::abs(xi1), std::abs(xi2), std::abs(tau1), std::abs(tau2), Real(1)});
  r.holds = r.slack >= -16 * std::numeric_limits<Real>::epsilon() * scale;
  return r;
}

struct InequalityTuple {
  double xi1 = 0, xi2 = 0, tau1 = 0, tau2 = 0;
};

struct InequalityScan {
  InequalityCase which;
  long long samples = 0;
  long long violations = 0;
  long long tight = 0;  // samples with zero slack
  double min_slack = std::numeric_limits<double>::infinity();
  InequalityTuple worst;
};

/// Draws dyadic tuples (multiples of 2^-resolution_bits, |xi| <= range) inside the case's
/// region. Half of them are placed near the characteristic surfaces: two of the three
/// modulations are set to small dyadic values and the third follows.
inline InequalityScan scan_inequality(const InequalityCase& c, long long samples, std::uint64_t seed,
                                      double range = 1024.0, int resolution_bits = 8) {
  if (samples < 0) throw std::invalid_argument("scan_inequality: negative sample count");
  SplitMix64 rng(counter_key(seed, {to_int(c.pair.first), to_int(c.pair.second), to_int(c.phi_sign)}));
  const double unit = std::ldexp(1.0, -resolution_bits);
  const auto steps = static_cast<std::uint64_t>(range / unit);
  auto dyadic = [&](double bound_in_units) {
    const auto span = static_cast<std::uint64_t>(bound_in_units);
    return (static_cast<double>(rng.next() % (2 * span + 1)) - double(span)) * unit;
  };
  const double s1 = to_int(c.pair.first), s2 = to_int(c.pair.second), phi = to_int(c.phi_sign);

  InequalityScan scan{c};
  for (long long i = 0; i < samples; ++i) {
    // occasional exact zeros and equal magnitudes exercise the boundary of the region
    double xi1 = (rng.next() % 64 == 0) ? 0.0 : dyadic(double(steps));
    double xi2 = (rng.next() % 64 == 0) ? -xi1 : dyadic(double(steps));
    if (!c.in_region(xi1, xi2)) xi2 = -xi2;
    double tau1, tau2;
    if (i % 2 == 0) {
      tau1 = dyadic(double(steps));
      tau2 = dyadic(double(steps));
    } else {
      const double near = 4.0 / unit;  // modulations within +-4
      const double d1 = dyadic(near), d2 = dyadic(near);
      const double cone = phi * std::abs(xi1 + xi2);
      switch (rng.next() % 3) {
        case 0:  // sigma1, sigma2 small
          tau1 = d1 - s1 * std::abs(xi1);
          tau2 = d2 + s2 * std::abs(xi2);
          break;
        case 1:  // sigma1, sigma small
          tau1 = d1 - s1 * std::abs(xi1);
          tau2 = d2 - cone - tau1;
          break;
        default:  // sigma2, sigma small
          tau2 = d1 + s2 * std::abs(xi2);
          tau1 = d2 - cone - tau2;
          break;
      }
    }
    const auto r = check_algebraic_inequality(c, xi1, xi2, tau1, tau2);
    ++scan.samples;
    if (!r.holds) ++scan.violations;
    if (r.slack == 0) ++scan.tight;
    if (r.slack < scan.min_slack) {
      scan.min_slack = r.slack;
      scan.worst = {xi1, xi2, tau1, tau2};
    }
  }
  return scan;
}

}  // namespace dkg
