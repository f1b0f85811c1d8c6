#pragma once

// Exponent ranges in which the well-posedness results and the two bilinear estimates are
// claimed. Each check returns every violated clause, not only the first one.

#include <string>
#include <vector>

namespace dkg {

struct Violation {
  std::string clause;  // the inequality that fails, e.g. "l < 1/4"
  std::string source;  // which result it belongs to
};

namespace detail {
inline void require(std::vector<Violation>& out, bool ok, const char* clause, const char* source) {
  if (!ok) out.push_back({clause, source});
}
}  // namespace detail

inline constexpr const char* kLocalWellPosedness = "local well-posedness (psi in H^{-l}, phi in H^k)";
inline constexpr const char* kGlobalWellPosedness = "global well-posedness (psi in L^2, phi in H^k)";
inline constexpr const char* kNullFormEstimate = "bilinear estimate into Y^{k-1}";
inline constexpr const char* kDualEstimate = "bilinear estimate into Y^{-k}";

/// Range of the bilinear estimate for the null form <beta psi, psi'> into Y^{k-1}.
template <typename Real>
std::vector<Violation> null_form_estimate_violations(Real l, Real k) {
  std::vector<Violation> v;
  detail::require(v, l < Real(0.25), "l < 1/4", kNullFormEstimate);
  detail::require(v, 2 * l + k < Real(1), "2l + k < 1", kNullFormEstimate);
  detail::require(v, l + k <= Real(1), "l + k <= 1", kNullFormEstimate);
  return v;
}

/// Range of the estimate for <beta psi, psi'> tested against Y^{-k}, the dual form of phi psi.
template <typename Real>
std::vector<Violation> dual_estimate_violations(Real l, Real k) {
  std::vector<Violation> v;
  detail::require(v, k >= (l < 0 ? -l : l), "k >= |l|", kDualEstimate);
  detail::require(v, k > Real(0), "k > 0", kDualEstimate);
  return v;
}

/// Union of the two estimate ranges: the hypothesis of the local result.
template <typename Real>
std::vector<Violation> local_violations(Real l, Real k) {
  std::vector<Violation> v;
  detail::require(v, l < Real(0.25), "l < 1/4", kLocalWellPosedness);
  detail::require(v, k > Real(0), "k > 0", kLocalWellPosedness);
  detail::require(v, 2 * l + k < Real(1), "2l + k < 1", kLocalWellPosedness);
  detail::require(v, l + k <= Real(1), "l + k <= 1", kLocalWellPosedness);
  detail::require(v, k >= (l < 0 ? -l : l), "k >= |l|", kLocalWellPosedness);
  return v;
}

/// Global result: charge data (l = 0) and 0 < k < 1/2.
template <typename Real>
std::vector<Violation> global_violations(Real k) {
  std::vector<Violation> v;
  detail::require(v, k > Real(0), "k > 0", kGlobalWellPosedness);
  detail::require(v, k < Real(0.5), "k < 1/2", kGlobalWellPosedness);
  return v;
}

inline std::string describe(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.clause + " (" + v.source + ")";
  }
  return out;
}

}  // namespace dkg
