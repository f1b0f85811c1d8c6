#pragma once

// 2x2 algebra of the one-dimensional Dirac operator: alpha, beta, the eigenspace
// projections pi_{+-}(xi) = (I +- xi_hat alpha)/2 and the null-form symbol table.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace dkg {

template <typename Real = double>
using Matrix2 = Eigen::Matrix<std::complex<Real>, 2, 2>;

enum class Sign : int { Minus = -1, Plus = 1 };

constexpr int to_int(Sign s) { return static_cast<int>(s); }
constexpr Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
constexpr Sign operator*(Sign a, Sign b) { return to_int(a) * to_int(b) > 0 ? Sign::Plus : Sign::Minus; }
constexpr char to_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }
inline constexpr std::array<Sign, 2> kSigns{Sign::Plus, Sign::Minus};

/// xi_hat = xi/|xi|, with the grid convention xi_hat(0) = +1.
template <typename Real>
constexpr Sign sign_of(Real xi) {
  return xi < Real(0) ? Sign::Minus : Sign::Plus;
}

/// The independent signs ([+-], +-): `first` projects the left argument, `second` the right.
struct SignPair {
  Sign first = Sign::Plus;
  Sign second = Sign::Plus;

  bool mixed() const { return first != second; }
  std::string label() const { return {to_char(first), to_char(second)}; }
  friend bool operator==(const SignPair&, const SignPair&) = default;
};

inline constexpr std::array<SignPair, 4> kSignPairs{
    SignPair{Sign::Plus, Sign::Plus}, SignPair{Sign::Plus, Sign::Minus},
    SignPair{Sign::Minus, Sign::Plus}, SignPair{Sign::Minus, Sign::Minus}};

/// Hermitian alpha, beta with alpha^2 = beta^2 = I and alpha beta + beta alpha = 0.
/// Any such pair may be injected; `standard()` is the representation used by default.
template <typename Real = double>
struct DiracMatrices {
  Matrix2<Real> alpha;
  Matrix2<Real> beta;

  static DiracMatrices standard() {
    using C = std::complex<Real>;
    const C i(0, 1);
    DiracMatrices d;
    d.alpha << C(0), -i, i, C(0);
    d.beta << C(0), C(1), C(1), C(0);
    return d;
  }
};

/// pi_sign(xi_hat) = (I + sign xi_hat alpha) / 2.
template <typename Real = double>
Matrix2<Real> projection(Sign sign, Sign xi_hat,
                         const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const Real e = Real(to_int(sign * xi_hat));
  return (Matrix2<Real>::Identity() + e * dirac.alpha) / Real(2);
}

/// Symbol of <beta pi_s1(D) psi, pi_s2(D) psi'> in the cell (sgn xi1, sgn xi2):
/// beta pi_s2(xi2) pi_s1(xi1) = (beta + e beta alpha)/2 if s1 sgn1 = s2 sgn2 = e, else 0.
template <typename Real = double>
Matrix2<Real> gamma(SignPair pair, Sign sgn1, Sign sgn2,
                    const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
  const Sign e1 = pair.first * sgn1;
  const Sign e2 = pair.second * sgn2;
  if (e1 != e2) return Matrix2<Real>::Zero();
  const Real e = Real(to_int(e1));
  return (dirac.beta + e * dirac.beta * dirac.alpha) / Real(2);
}

/// All 16 cells of gamma, indexed by (pair, sgn xi1, sgn xi2).
template <typename Real = double>
class GammaTable {
 public:
  struct Cell {
    SignPair pair;
    Sign sgn1;
    Sign sgn2;
  };

  explicit GammaTable(const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard()) {
    for (const Cell& c : cells()) entries_[index(c.pair, c.sgn1, c.sgn2)] = gamma(c.pair, c.sgn1, c.sgn2, dirac);
  }

  const Matrix2<Real>& operator()(SignPair pair, Sign sgn1, Sign sgn2) const {
    return entries_[index(pair, sgn1, sgn2)];
  }

  static std::vector<Cell> cells() {
    std::vector<Cell> out;
    for (SignPair p : kSignPairs)
      for (Sign a : kSigns)
        for (Sign b : kSigns) out.push_back({p, a, b});
    return out;
  }

  /// Cells where the symbol vanishes identically (the null structure).
  static std::vector<Cell> zero_cells() {
    std::vector<Cell> out;
    for (const Cell& c : cells())
      if (c.pair.first * c.sgn1 != c.pair.second * c.sgn2) out.push_back(c);
    return out;
  }

 private:
  static std::size_t index(SignPair p, Sign a, Sign b) {
    auto bit = [](Sign s) { return s == Sign::Plus ? 0u : 1u; };
    return (bit(p.first) << 3) | (bit(p.second) << 2) | (bit(a) << 1) | bit(b);
  }
  std::array<Matrix2<Real>, 16> entries_;
};

struct IdentityCheck {
  std::string name;
  double deviation = 0;
  bool holds = true;
};

struct AlgebraReport {
  std::vector<IdentityCheck> checks;
  double max_deviation = 0;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.holds) out.push_back(c.name);
    return out;
  }
};

/// Checks every identity the diagonalization relies on. An identity "holds" when its
/// max-entry deviation is at most `tolerance`.
template <typename Real = double>
AlgebraReport verify_algebra(const DiracMatrices<Real>& dirac = DiracMatrices<Real>::standard(),
                             Real tolerance = Real(1e-14)) {
  using M2 = Matrix2<Real>;
  const M2 id = M2::Identity();
  const M2& a = dirac.alpha;
  const M2& b = dirac.beta;
  AlgebraReport report;
  auto check = [&](std::string name, const M2& residual) {
    const double dev = static_cast<double>(residual.cwiseAbs().maxCoeff());
    report.checks.push_back({std::move(name), dev, dev <= static_cast<double>(tolerance)});
    report.max_deviation = std::max(report.max_deviation, dev);
  };

  check("alpha^2 = I", a * a - id);
  check("beta^2 = I", b * b - id);
  check("alpha beta + beta alpha = 0", a * b + b * a);
  check("alpha hermitian", a - a.adjoint());
  check("beta hermitian", b - b.adjoint());
  for (Sign xi : kSigns) {
    const std::string at = std::string(" at xi_hat=") + to_char(xi);
    const M2 pp = projection(Sign::Plus, xi, dirac);
    const M2 pm = projection(Sign::Minus, xi, dirac);
    check("pi+^2 = pi+" + at, pp * pp - pp);
    check("pi-^2 = pi-" + at, pm * pm - pm);
    check("pi+ pi- = 0" + at, pp * pm);
    check("pi- pi+ = 0" + at, pm * pp);
    check("pi+ beta = beta pi-" + at, pp * b - b * pm);
    check("pi- beta = beta pi+" + at, pm * b - b * pp);
    check("pi+ + pi- = I" + at, pp + pm - id);
    check("pi+ hermitian" + at, pp - pp.adjoint());
    check("pi- hermitian" + at, pm - pm.adjoint());
    check("pi+(-xi) = pi-(xi)" + at, projection(Sign::Plus, flip(xi), dirac) - pm);
  }
  return report;
}

}  // namespace dkg
