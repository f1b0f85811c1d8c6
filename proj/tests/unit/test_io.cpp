#include "catch_amalgamated.hpp"

#include "dkg/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>

using namespace dkg;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dkg_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}
}  // namespace

TEST_CASE("number formatting", "[io]") {
  CHECK(io::format_number(0.1) == "1.0000000000000001e-01");
  CHECK(io::format_number(-2.0) == "-2.0000000000000000e+00");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, double(i % 40) - 20);
    CHECK(std::strtod(io::format_number(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("hashing", "[io]") {
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a("foobar") == 0x85944171f73967e8ULL);
  const auto a = io::Json::parse(R"({"n": 64, "g": 1.0})");
  const auto b = io::Json::parse(R"({"g": 1.0, "n": 64})");
  CHECK(io::config_hash(a) == io::config_hash(b));
  CHECK(io::config_hash(a).size() == 16);
  CHECK(io::config_hash(a) != io::config_hash(io::Json::parse(R"({"n": 64, "g": 2.0})")));
}

TEST_CASE("CSV tables", "[io]") {
  io::CsvTable t({"a", "b", "c"});
  t.add_row({1.5, std::int64_t(3), std::string("++")});
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  CHECK(t.str() == "a,b,c\n1.5000000000000000e+00,3,++\n");

  const auto dir = scratch_dir("csv");
  t.write(dir / "t.csv");
  const auto data = io::read_csv(dir / "t.csv");
  CHECK(data.columns == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(data.rows.size() == 1);
  CHECK(data.rows[0][data.column("c")] == "++");
  CHECK_THROWS_AS(data.column("d"), std::out_of_range);
}

TEST_CASE("schemas consumed by the plotting scripts", "[io]") {
  Diagnostics<double> d;
  d.time = 0.5;
  d.charge = 2.0;
  const auto traj = io::trajectory_table({d, d});
  CHECK(traj.columns() == std::vector<std::string>{"time", "charge", "psi_norm_h_minus_l", "phi_norm_h_k",
                                                   "phi_t_norm_h_k_minus_1", "reality_residue",
                                                   "projection_residue"});
  CHECK(traj.rows() == 2);

  ProbeResult<double> r;
  r.config.pair = {Sign::Plus, Sign::Minus};
  r.samples.push_back({3, Sign::Minus, 1.0, 4.0, 0.25});
  const auto probe = io::probe_table({r});
  CHECK(probe.columns() == std::vector<std::string>{"l", "k", "eps", "pair", "phi_sign", "grid_n", "grid_nt",
                                                    "trial", "lhs", "rhs", "ratio"});
  const std::string text = probe.str();
  CHECK(text.find(",+-,-,64,64,3,") != std::string::npos);

  CHECK(io::kConvergenceColumns.back() == "observed_order");
  CHECK(io::kConvergenceColumns[1] == "dt");
  CHECK(io::kConvergenceColumns[3] == "error");
}

TEST_CASE("snapshots round trip exactly", "[io]") {
  const auto grid = make_grid(32);
  const Params<double> params{.M = 0.5, .m = 1.5, .g = -0.25};
  auto d = to_diagonal(random_initial_data(grid, DataSpec<double>{.l = 0.1, .k = 0.2, .seed = 9}), params);
  d.time = 0.3125;
  const auto dir = scratch_dir("snapshot");
  io::save_snapshot(dir / "s.json", d, params);
  const auto back = io::load_snapshot(dir / "s.json");
  CHECK(back.state.time == d.time);
  CHECK(back.params.M == params.M);
  CHECK(back.params.m == params.m);
  CHECK(back.params.g == params.g);
  CHECK(back.state.grid() == grid);
  CHECK((back.state.psi_plus.coefficients() - d.psi_plus.coefficients()).norm() == 0.0);
  CHECK((back.state.psi_minus.coefficients() - d.psi_minus.coefficients()).norm() == 0.0);
  CHECK((back.state.phi_plus.coefficients() - d.phi_plus.coefficients()).norm() == 0.0);
  CHECK((back.state.phi_minus.coefficients() - d.phi_minus.coefficients()).norm() == 0.0);

  auto j = io::snapshot_json(d, params);
  CHECK(j["format"] == "dkg-snapshot");
  CHECK(j["version"] == 1);
  j["version"] = 2;
  CHECK_THROWS(io::snapshot_from_json(j));
  j["version"] = 1;
  j["fields"]["phi_plus"][0].erase(0);
  CHECK_THROWS(io::snapshot_from_json(j));
  CHECK_THROWS(io::snapshot_from_json(io::Json{{"format", "other"}}));
}
