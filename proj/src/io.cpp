#include "dkg/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dkg::io {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("CsvTable: no columns");
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument("CsvTable: row has " + std::to_string(row.size()) + " cells, expected " +
                                std::to_string(columns_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_number(v);
            else out << v;
          },
          row[c]);
    }
    out << '\n';
  }
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << str();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("CSV has no column '" + name + "'");
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  CsvData data;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path.string() + ": empty CSV");
  data.columns = split(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != data.columns.size())
      throw std::runtime_error(path.string() + ": row with " + std::to_string(row.size()) + " cells");
    data.rows.push_back(std::move(row));
  }
  return data;
}

CsvTable trajectory_table(const std::vector<Diagnostics<double>>& diagnostics) {
  CsvTable t(kTrajectoryColumns);
  for (const auto& d : diagnostics)
    t.add_row({d.time, d.charge, d.psi_norm, d.phi_norm, d.phi_t_norm, d.reality_residue, d.projection_residue});
  return t;
}

CsvTable probe_table(const std::vector<ProbeResult<double>>& results) {
  CsvTable t(kProbeColumns);
  for (const auto& r : results) {
    const auto& c = r.config;
    for (const auto& s : r.samples)
      t.add_row({c.l, c.k, c.eps, c.pair.label(), std::string(1, to_char(s.phi_sign)), std::int64_t(c.n),
                 std::int64_t(c.n_t), std::int64_t(s.trial), s.lhs, s.rhs, s.ratio});
  }
  return t;
}

namespace {
template <int C>
Json field_json(const Field<double, C>& f) {
  Json comps = Json::array();
  for (int c = 0; c < C; ++c) {
    Json coeffs = Json::array();
    for (Index s = 0; s < f.grid().size(); ++s) {
      const auto z = f.coefficients()(s, c);
      coeffs.push_back({z.real(), z.imag()});
    }
    comps.push_back(std::move(coeffs));
  }
  return comps;
}

template <int C>
Field<double, C> field_from_json(const SpectralGrid<double>& grid, const Json& j, const char* name) {
  if (!j.is_array() || j.size() != C)
    throw std::runtime_error(std::string("snapshot: field ") + name + " must have " + std::to_string(C) +
                             " components");
  typename Field<double, C>::Coefficients coeffs(grid.size(), C);
  for (int c = 0; c < C; ++c) {
    const auto& comp = j[c];
    if (!comp.is_array() || Index(comp.size()) != grid.size())
      throw std::runtime_error(std::string("snapshot: field ") + name + " has the wrong number of coefficients");
    for (Index s = 0; s < grid.size(); ++s)
      coeffs(s, c) = {comp[s].at(0).get<double>(), comp[s].at(1).get<double>()};
  }
  return Field<double, C>(grid, std::move(coeffs));
}
}  // namespace

Json snapshot_json(const DiagonalState<double>& d, const Params<double>& params) {
  Json j;
  j["format"] = kSnapshotFormat;
  j["version"] = kSnapshotVersion;
  j["n"] = d.grid().size();
  j["length"] = d.grid().length();
  j["time"] = d.time;
  j["params"] = {{"M", params.M}, {"m", params.m}, {"g", params.g}};
  j["fields"] = {{"psi_plus", field_json(d.psi_plus)},
                 {"psi_minus", field_json(d.psi_minus)},
                 {"phi_plus", field_json(d.phi_plus)},
                 {"phi_minus", field_json(d.phi_minus)}};
  return j;
}

void save_snapshot(const std::filesystem::path& path, const DiagonalState<double>& d, const Params<double>& params) {
  write_json(path, snapshot_json(d, params));
}

Snapshot snapshot_from_json(const Json& j) {
  if (j.value("format", "") != kSnapshotFormat) throw std::runtime_error("snapshot: not a dkg-snapshot document");
  if (j.value("version", 0) != kSnapshotVersion)
    throw std::runtime_error("snapshot: unsupported version " + j.value("version", Json()).dump());
  const auto grid = make_grid<double>(j.at("n").get<Index>(), j.at("length").get<double>());
  const auto& f = j.at("fields");
  Params<double> params{j.at("params").at("M").get<double>(), j.at("params").at("m").get<double>(),
                        j.at("params").at("g").get<double>()};
  return {DiagonalState<double>(field_from_json<2>(grid, f.at("psi_plus"), "psi_plus"),
                                field_from_json<2>(grid, f.at("psi_minus"), "psi_minus"),
                                field_from_json<1>(grid, f.at("phi_plus"), "phi_plus"),
                                field_from_json<1>(grid, f.at("phi_minus"), "phi_minus"), j.at("time").get<double>()),
          params};
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return snapshot_from_json(Json::parse(f));
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dkg::io
