#pragma once

// Artifact formats shared with the plotting scripts.
//
// CSV: comma separated, one header line, numbers in scientific notation with 17 significant
// digits (exact round trip for doubles), strings unquoted (they never contain commas).
//
// Snapshot (JSON, "format": "dkg-snapshot", "version": 1):
//   { "format", "version", "n", "length", "time", "params": {"M", "m", "g"},
//     "fields": { "psi_plus": [[[re, im], ...], [[re, im], ...]], "psi_minus": ...,
//                 "phi_plus": [[[re, im], ...]], "phi_minus": ... } }
// Every field is a list of components, each a list of n spectral coefficients in FFT slot
// order under the averaging convention f^(xi) = (1/n) sum_j f(x_j) e^{-i xi x_j}.

#include "dkg/dkg_state.hpp"
#include "dkg/estimates/bilinear_probe.hpp"
#include "dkg/integrator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dkg::io {

using Json = nlohmann::json;

inline constexpr const char* kSnapshotFormat = "dkg-snapshot";
inline constexpr int kSnapshotVersion = 1;

inline const std::vector<std::string> kTrajectoryColumns = {
    "time", "charge", "psi_norm_h_minus_l", "phi_norm_h_k", "phi_t_norm_h_k_minus_1", "reality_residue",
    "projection_residue"};
inline const std::vector<std::string> kProbeColumns = {"l",      "k",       "eps",   "pair", "phi_sign", "grid_n",
                                                       "grid_nt", "trial", "lhs",   "rhs",  "ratio"};
inline const std::vector<std::string> kConvergenceColumns = {"scheme", "dt", "steps", "error", "observed_order"};
inline const std::vector<std::string> kPicardColumns = {"iteration", "difference", "ratio", "dirac_difference",
                                                        "dirac_ratio"};
inline const std::vector<std::string> kInequalityColumns = {"pair", "phi_sign", "samples", "violations", "tight",
                                                            "min_slack"};
inline const std::vector<std::string> kProductColumns = {"trial", "k", "lhs", "rhs", "ratio"};
inline const std::vector<std::string> kGronwallColumns = {"time", "value", "bound", "holds"};
inline const std::vector<std::string> kNullCheckColumns = {"pair", "sgn1", "sgn2", "max_abs_direct",
                                                           "max_abs_spectral"};

/// 17 significant digits, scientific notation.
std::string format_number(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// FNV-1a of the compact dump of a JSON value (object keys sorted), as 16 hex digits.
std::string config_hash(const Json& config);

using Cell = std::variant<double, std::int64_t, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Parsed CSV: header plus rows of raw strings.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;  // throws if absent
};
CsvData read_csv(const std::filesystem::path& path);

CsvTable trajectory_table(const std::vector<Diagnostics<double>>& diagnostics);
CsvTable probe_table(const std::vector<ProbeResult<double>>& results);

Json snapshot_json(const DiagonalState<double>& d, const Params<double>& params);
void save_snapshot(const std::filesystem::path& path, const DiagonalState<double>& d, const Params<double>& params);

struct Snapshot {
  DiagonalState<double> state;
  Params<double> params;
};
Snapshot snapshot_from_json(const Json& j);
Snapshot load_snapshot(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace dkg::io
