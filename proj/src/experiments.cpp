#include "dkg/experiments.hpp"

#include "dkg/estimates.hpp"
#include "dkg/nonlinearity.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#ifndef DKG_LAB_VERSION
#define DKG_LAB_VERSION "unknown"
#endif

namespace dkg {

namespace {

struct ExperimentName {
  Experiment id;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::Simulate, "simulate"},
    {Experiment::Picard, "picard"},
    {Experiment::Converge, "converge"},
    {Experiment::NullCheck, "null-check"},
    {Experiment::ProbeNullForm, "probe-star2"},
    {Experiment::ProbeDual, "probe-star3"},
    {Experiment::InequalityScan, "inequality-scan"},
    {Experiment::ProductCheck, "product-check"},
    {Experiment::Gronwall, "gronwall"},
};

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& x : kExperiments)
    if (x.id == e) return x.name;
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& x : kExperiments)
    if (name == x.name) return x.id;
  std::string known;
  for (const auto& x : kExperiments) known += (known.empty() ? "" : ", ") + std::string(x.name);
  throw std::invalid_argument("unknown experiment '" + name + "' (expected one of " + known + ")");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& x : kExperiments) v.emplace_back(x.name);
    return v;
  }();
  return names;
}

// ---------------------------------------------------------------------------------------
// configuration

io::Json ExperimentConfig::to_json() const {
  io::Json j;
  j["experiment"] = experiment ? to_string(*experiment) : std::string();
  j["n"] = n;
  j["length"] = length;
  j["n_t"] = n_t;
  j["t_box"] = t_box;
  j["M"] = M;
  j["m"] = m;
  j["g"] = g;
  j["l"] = l;
  j["k"] = k;
  j["seed"] = seed;
  j["amplitude"] = amplitude;
  j["smoothing"] = smoothing;
  j["scheme"] = to_string(scheme);
  j["dt"] = dt;
  j["final_time"] = final_time;
  j["save_every"] = save_every;
  j["dt_levels"] = dt_levels;
  j["picard_interval"] = picard_interval;
  j["picard_nodes"] = picard_nodes;
  j["picard_iterations"] = picard_iterations;
  j["eps"] = eps;
  j["trials"] = trials;
  j["decay"] = decay;
  j["doublings"] = doublings;
  j["pairs"] = pairs;
  j["samples"] = samples;
  j["range"] = range;
  j["slack"] = slack;
  j["threads"] = threads;
  j["out"] = out.string();
  j["override_admissibility"] = override_admissibility;
  return j;
}

namespace {

int line_at(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

/// Keys of the outermost object with the line each appears on, in document order.
std::vector<std::pair<std::string, int>> top_level_keys(const std::string& text) {
  std::vector<std::pair<std::string, int>> keys;
  int depth = 0, line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    else if (c == '{' || c == '[') ++depth;
    else if (c == '}' || c == ']') --depth;
    else if (c == '"') {
      std::string s;
      std::size_t j = i + 1;
      for (; j < text.size() && text[j] != '"'; ++j) {
        if (text[j] == '\\' && j + 1 < text.size()) ++j;
        s += text[j];
      }
      std::size_t after = j + 1;
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (depth == 1 && after < text.size() && text[after] == ':') keys.emplace_back(s, line);
      i = j;
    }
  }
  return keys;
}

class Reader {
 public:
  Reader(const io::Json& doc, std::map<std::string, int> lines) : doc_(doc), lines_(std::move(lines)) {}

  int line(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("'" + key + "' " + what, line(key));
  }
  bool has(const std::string& key) const { return doc_.contains(key); }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(key, "must be finite");
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) const {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (!v.is_number()) fail(key, "must be an integer");
    const double x = v.get<double>();
    if (x != std::floor(x) || std::abs(x) > 9.0e15) fail(key, "must be an integer");
    if constexpr (std::is_unsigned_v<Int>)
      if (x < 0) fail(key, "must be non-negative");
    out = v.is_number_unsigned() ? static_cast<Int>(v.get<std::uint64_t>())
                                 : v.is_number_integer() ? static_cast<Int>(v.get<std::int64_t>())
                                                         : static_cast<Int>(x);
  }
  void string(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!doc_.at(key).is_string()) fail(key, "must be a string");
    out = doc_.at(key).get<std::string>();
  }
  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    if (!doc_.at(key).is_boolean()) fail(key, "must be true or false");
    out = doc_.at(key).get<bool>();
  }
  void numbers(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (!v.is_array()) fail(key, "must be an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "must be an array of numbers");
      out.push_back(x.get<double>());
    }
  }
  void strings(const std::string& key, std::vector<std::string>& out) const {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (!v.is_array()) fail(key, "must be an array of strings");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "must be an array of strings");
      out.push_back(x.get<std::string>());
    }
  }

 private:
  const io::Json& doc_;
  std::map<std::string, int> lines_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment", "description", "n", "length", "n_t", "t_box", "M", "m", "g", "l", "k", "seed", "amplitude",
      "smoothing", "scheme", "dt", "final_time", "save_every", "dt_levels", "picard_interval", "picard_nodes",
      "picard_iterations", "eps", "trials", "decay", "doublings", "pairs", "samples", "range", "slack", "threads",
      "out", "override_admissibility"};
  return keys;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  io::Json doc;
  try {
    doc = io::Json::parse(text);
  } catch (const io::Json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError("invalid JSON: " + msg, line_at(text, byte));
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object", line_at(text, 0));

  std::map<std::string, int> lines;
  for (const auto& [key, line] : top_level_keys(text)) {
    if (lines.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'", line);
    lines[key] = line;
  }
  const Reader r(doc, lines);

  ExperimentConfig c;
  std::string s;
  r.string("experiment", s);
  if (!s.empty()) {
    try {
      c.experiment = parse_experiment(s);
    } catch (const std::invalid_argument& e) {
      r.fail("experiment", e.what() + std::string());
    }
  }
  if (r.has("description")) {
    std::string ignored;
    r.string("description", ignored);
  }
  r.integer("n", c.n);
  r.number("length", c.length);
  r.integer("n_t", c.n_t);
  r.number("t_box", c.t_box);
  r.number("M", c.M);
  r.number("m", c.m);
  r.number("g", c.g);
  r.number("l", c.l);
  r.number("k", c.k);
  r.integer("seed", c.seed);
  r.number("amplitude", c.amplitude);
  r.number("smoothing", c.smoothing);
  s.clear();
  r.string("scheme", s);
  if (!s.empty()) {
    try {
      c.scheme = parse_scheme(s);
    } catch (const std::invalid_argument& e) {
      r.fail("scheme", e.what() + std::string());
    }
  }
  r.number("dt", c.dt);
  r.number("final_time", c.final_time);
  r.integer("save_every", c.save_every);
  r.numbers("dt_levels", c.dt_levels);
  r.number("picard_interval", c.picard_interval);
  r.integer("picard_nodes", c.picard_nodes);
  r.integer("picard_iterations", c.picard_iterations);
  r.number("eps", c.eps);
  r.integer("trials", c.trials);
  r.number("decay", c.decay);
  r.integer("doublings", c.doublings);
  r.strings("pairs", c.pairs);
  r.integer("samples", c.samples);
  r.number("range", c.range);
  r.number("slack", c.slack);
  r.integer("threads", c.threads);
  s = c.out.string();
  r.string("out", s);
  c.out = s;
  r.boolean("override_admissibility", c.override_admissibility);

  for (const auto& p : c.pairs)
    if (p.size() != 2 || (p[0] != '+' && p[0] != '-') || (p[1] != '+' && p[1] != '-'))
      r.fail("pairs", "entries must be one of \"++\", \"+-\", \"-+\", \"--\"");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read configuration file " + path.string(), 0);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

namespace {
SignPair parse_pair(const std::string& p) {
  auto sign = [](char c) { return c == '+' ? Sign::Plus : Sign::Minus; };
  return {sign(p[0]), sign(p[1])};
}

void check(std::vector<Violation>& v, bool ok, const std::string& clause) {
  if (!ok) v.push_back({clause, "configuration"});
}

void append(std::vector<Violation>& to, const std::vector<Violation>& from) { to.insert(to.end(), from.begin(), from.end()); }
}  // namespace

std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> v;
  if (!c.experiment) {
    check(v, false, "experiment is set");
    return v;
  }
  const Experiment e = *c.experiment;
  const bool time_stepping = e == Experiment::Simulate || e == Experiment::Converge || e == Experiment::Gronwall;
  const bool space_time = e == Experiment::ProbeNullForm || e == Experiment::ProbeDual;

  check(v, c.n >= 8 && c.n % 2 == 0, "n even and >= 8");
  check(v, c.length > 0, "length > 0");
  check(v, c.m > 0, "m > 0");
  if (space_time) {
    check(v, c.n_t >= 8 && c.n_t % 2 == 0, "n_t even and >= 8");
    check(v, c.t_box > 0, "t_box > 0");
    check(v, c.eps > 0 && c.eps <= 0.1, "0 < eps <= 0.1");
    check(v, c.trials >= 1, "trials >= 1");
    check(v, c.decay > 0, "decay > 0");
    check(v, c.doublings >= 0 && c.doublings <= 4, "0 <= doublings <= 4");
    check(v, !c.pairs.empty(), "pairs is not empty");
  }
  if (time_stepping) {
    check(v, c.scheme != Scheme::Picard, "scheme is lawson-rk4 or strang");
    check(v, c.dt > 0, "dt > 0");
    check(v, c.final_time >= c.dt, "final_time >= dt");
    check(v, c.save_every >= 1, "save_every >= 1");
  }
  if (e == Experiment::Converge) {
    check(v, c.dt_levels.size() >= 2, "at least two dt_levels");
    for (double d : c.dt_levels) check(v, d > 0 && d <= c.final_time, "every dt level in (0, final_time]");
  }
  if (e == Experiment::Picard) {
    check(v, c.picard_interval > 0, "picard_interval > 0");
    check(v, c.picard_nodes >= 3, "picard_nodes >= 3");
    check(v, c.picard_iterations >= 1, "picard_iterations >= 1");
  }
  if (e == Experiment::InequalityScan) {
    check(v, c.samples >= 1, "samples >= 1");
    check(v, c.range > 0, "range > 0");
  }
  if (e == Experiment::ProductCheck) check(v, c.trials >= 1, "trials >= 1");
  if (e == Experiment::Gronwall) check(v, c.slack >= 1, "slack >= 1");

  switch (e) {
    case Experiment::Simulate:
    case Experiment::Picard:
    case Experiment::Converge: append(v, local_violations(c.l, c.k)); break;
    case Experiment::Gronwall:
      if (c.l != 0) v.push_back({"l = 0", kGlobalWellPosedness});
      append(v, global_violations(c.k));
      break;
    case Experiment::ProbeNullForm:
      if (!c.override_admissibility) append(v, null_form_estimate_violations(c.l, c.k));
      break;
    case Experiment::ProbeDual:
      if (!c.override_admissibility) append(v, dual_estimate_violations(c.l, c.k));
      break;
    case Experiment::ProductCheck:
      check(v, c.k > 0, "k > 0");
      if (!c.override_admissibility) append(v, global_violations(c.k));
      break;
    case Experiment::NullCheck:
    case Experiment::InequalityScan: break;
  }
  return v;
}

// ---------------------------------------------------------------------------------------
// experiments

namespace {

using Clock = std::chrono::steady_clock;
using io::Json;

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path prefix;
  RunResult& result;

  std::filesystem::path artifact(const std::string& suffix) {
    std::filesystem::path p = prefix;
    p += suffix;
    result.artifacts.push_back(p);
    return p;
  }

  SpectralGrid<double> grid() const { return make_grid(cfg.n, cfg.length); }
  Params<double> params() const { return {cfg.M, cfg.m, cfg.g}; }
  DiagonalState<double> initial_state() const {
    const DataSpec<double> spec{cfg.l, cfg.k, cfg.seed, cfg.amplitude, cfg.smoothing, true};
    return to_diagonal(random_initial_data(grid(), spec), params());
  }
  SchemeConfig<double> scheme(double dt) const {
    SchemeConfig<double> s;
    s.scheme = cfg.scheme;
    s.dt = dt;
    s.final_time = cfg.final_time;
    s.picard = {cfg.picard_interval, cfg.picard_nodes, cfg.picard_iterations};
    return s;
  }
};

/// NaN and infinities become JSON null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json evolve_and_record(Context& ctx, const Trajectory<double>& traj) {
  io::trajectory_table(traj.diagnostics).write(ctx.artifact(".trajectory.csv"));
  io::save_snapshot(ctx.artifact(".final.json"), traj.snapshots.back(), ctx.params());
  const double q0 = traj.diagnostics.front().charge;
  double drift = 0;
  for (const auto& d : traj.diagnostics) drift = std::max(drift, std::abs(d.charge - q0) / q0);
  return {{"charge_initial", q0},
          {"charge_final", traj.diagnostics.back().charge},
          {"max_relative_charge_drift", number(drift)},
          {"max_projection_residue", traj.max_projection_residue},
          {"max_reality_residue", traj.max_reality_residue},
          {"snapshots", traj.snapshots.size()}};
}

Json run_simulate(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto traj = evolve(ctx.initial_state(), ctx.params(), ctx.scheme(c.dt), DiagnosticsSpec<double>{c.l, c.k},
                           c.save_every);
  return evolve_and_record(ctx, traj);
}

Json run_gronwall(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto traj = evolve(ctx.initial_state(), ctx.params(), ctx.scheme(c.dt), DiagnosticsSpec<double>{c.l, c.k},
                           c.save_every);
  Json out = evolve_and_record(ctx, traj);
  const auto report = gronwall_monitor(traj, ctx.params(), c.k, c.slack);
  io::CsvTable t(io::kGronwallColumns);
  for (const auto& p : report.points) t.add_row({p.time, p.value, p.bound, std::int64_t(p.holds)});
  t.write(ctx.artifact(".gronwall.csv"));
  out["product_constant"] = report.constant;
  out["slack"] = c.slack;
  out["worst_fraction_of_bound"] = report.worst_fraction;
  out["holds"] = report.holds();
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Json run_converge(Context& ctx) {
  const auto& c = ctx.cfg;
  auto levels = c.dt_levels;
  std::sort(levels.rbegin(), levels.rend());
  const auto d0 = ctx.initial_state();
  auto final_state = [&](double dt) {
    return evolve(d0, ctx.params(), ctx.scheme(dt), {}, std::numeric_limits<Index>::max()).snapshots.back();
  };
  const double dt_ref = levels.back() / 4;
  const auto reference = final_state(dt_ref);

  io::CsvTable t(io::kConvergenceColumns);
  std::vector<double> log_dt, log_err, errors;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double err = l2_norm(final_state(levels[i]) - reference);
    errors.push_back(err);
    log_dt.push_back(std::log(levels[i]));
    log_err.push_back(std::log(err));
    const double observed = i ? std::log(errors[i - 1] / err) / std::log(levels[i - 1] / levels[i])
                              : std::numeric_limits<double>::quiet_NaN();
    const auto steps = static_cast<std::int64_t>(std::ceil(c.final_time / levels[i] * (1 - 1e-12)));
    t.add_row({to_string(c.scheme), levels[i], steps, err, observed});
  }
  t.write(ctx.artifact(".convergence.csv"));
  return {{"scheme", to_string(c.scheme)},
          {"reference_dt", dt_ref},
          {"errors", errors},
          {"order", number(least_squares_slope(log_dt, log_err))}};
}

Json run_picard(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto d0 = ctx.initial_state();
  const auto sc = ctx.scheme(c.picard_interval / double(c.picard_nodes - 1));
  const auto result = picard_solve(d0, ctx.params(), sc);

  io::CsvTable t(io::kPicardColumns);
  for (std::size_t j = 0; j < result.differences.size(); ++j) {
    const double ratio = j ? result.ratios[j - 1] : std::numeric_limits<double>::quiet_NaN();
    const double dratio = j ? result.dirac_ratios[j - 1] : std::numeric_limits<double>::quiet_NaN();
    t.add_row({std::int64_t(j + 1), result.differences[j], ratio, result.dirac_differences[j], dratio});
  }
  t.write(ctx.artifact(".picard.csv"));

  // limit against a fine Lawson run, and the trapezoid error estimated from half the nodes
  SchemeConfig<double> lawson = sc;
  lawson.scheme = Scheme::LawsonRK4;
  lawson.final_time = c.picard_interval;
  lawson.dt = c.picard_interval / 256;
  const auto fine = evolve(d0, ctx.params(), lawson, {}, std::numeric_limits<Index>::max()).snapshots.back();
  auto coarse_cfg = sc;
  coarse_cfg.picard.nodes = (c.picard_nodes - 1) / 2 + 1;
  const auto coarse = picard_solve(d0, ctx.params(), coarse_cfg);
  const double scale = l2_norm(d0);
  Json ratios = Json::array();
  for (double r : result.ratios) ratios.push_back(number(r));
  return {{"iterations", result.differences.size()},
          {"converged", result.converged},
          {"differences", result.differences},
          {"ratios", ratios},
          {"max_ratio", result.ratios.empty() ? Json(nullptr)
                                              : number(*std::max_element(result.ratios.begin(), result.ratios.end()))},
          {"limit_vs_lawson", l2_norm(result.limit() - fine) / scale},
          {"quadrature_error_estimate", l2_norm(result.limit() - coarse.limit()) / scale}};
}

/// Random spinor with modes |k| <= n/4 whose sign (sgn xi, with sgn 0 = +1) equals `side`.
SpinorField<double> one_sided_spinor(const SpectralGrid<double>& grid, Sign side, std::uint64_t key) {
  SpinorField<double> f(grid);
  for (Index s = 0; s < grid.size(); ++s) {
    const Index k = grid.wavenumber(s);
    if (std::abs(k) > grid.size() / 4 || sign_of(grid.frequency(s)) != side) continue;
    for (int comp = 0; comp < 2; ++comp) f.coefficients()(s, comp) = complex_gaussian(counter_key(key, {comp, k}));
  }
  return f;
}

Json run_null_check(Context& ctx) {
  const auto grid = ctx.grid();
  io::CsvTable t(io::kNullCheckColumns);
  Json cases = Json::array();
  double worst = 0;
  int index = 0;
  for (const auto& cell : GammaTable<double>::zero_cells()) {
    // the second argument is read at eta = -xi2, so sgn xi2 = s means eta on the side -s
    const auto key = counter_key(ctx.cfg.seed, {index++});
    const auto psi = one_sided_spinor(grid, cell.sgn1, counter_key(key, {1}));
    const Sign eta_side = cell.sgn2 == Sign::Plus ? Sign::Minus : Sign::Plus;
    const auto chi = one_sided_spinor(grid, eta_side, counter_key(key, {2}));
    const double direct = nullform_projected(psi, chi, cell.pair).coefficients().cwiseAbs().maxCoeff();
    const double spectral = nullform_projected_spectral(psi, chi, cell.pair).coefficients().cwiseAbs().maxCoeff();
    worst = std::max({worst, direct, spectral});
    t.add_row({cell.pair.label(), std::string(1, to_char(cell.sgn1)), std::string(1, to_char(cell.sgn2)), direct,
               spectral});
    cases.push_back({{"pair", cell.pair.label()},
                     {"sgn1", std::string(1, to_char(cell.sgn1))},
                     {"sgn2", std::string(1, to_char(cell.sgn2))},
                     {"max_abs", std::max(direct, spectral)}});
  }
  t.write(ctx.artifact(".null-check.csv"));
  return {{"cases", cases}, {"max_abs", worst}, {"all_zero", worst <= 1e-12}};
}

Json run_probe(Context& ctx, Estimate estimate) {
  const auto& c = ctx.cfg;
  std::vector<ProbeResult<double>> all;
  Json configs = Json::array();
  for (const auto& label : c.pairs) {
    ProbeConfig<double> pc;
    pc.estimate = estimate;
    pc.l = c.l;
    pc.k = c.k;
    pc.eps = c.eps;
    pc.pair = parse_pair(label);
    pc.n = c.n;
    pc.n_t = c.n_t;
    pc.length = c.length;
    pc.period = c.t_box;
    pc.trials = c.trials;
    pc.seed = c.seed;
    pc.decay = c.decay;
    pc.threads = c.threads;
    pc.override_admissibility = c.override_admissibility;
    const auto report = probe_refinement(pc, c.doublings);
    for (Sign phi : kSigns) {
      Json levels = Json::array();
      for (const auto& lv : report.levels) {
        const auto& st = lv.stats_for(phi);
        levels.push_back({{"grid_n", lv.config.n},
                          {"grid_nt", lv.config.n_t},
                          {"max_ratio", st.max_ratio},
                          {"mean_ratio", st.mean_ratio},
                          {"argmax_trial", st.argmax_trial},
                          {"evaluated", st.evaluated},
                          {"skipped", lv.skipped}});
      }
      configs.push_back({{"pair", label},
                         {"phi_sign", std::string(1, to_char(phi))},
                         {"levels", levels},
                         {"growth", report.growth(phi)}});
    }
    all.insert(all.end(), report.levels.begin(), report.levels.end());
  }
  io::probe_table(all).write(ctx.artifact(".probe.csv"));

  const auto violations = estimate == Estimate::NullForm ? null_form_estimate_violations(c.l, c.k)
                                                         : dual_estimate_violations(c.l, c.k);
  Json v = Json::array();
  for (const auto& x : violations) v.push_back(x.clause);
  double worst_change = 0;
  for (const auto& cfg : configs)
    for (const auto& g : cfg["growth"]) worst_change = std::max(worst_change, std::abs(g.get<double>() - 1));
  return {{"estimate", to_string(estimate)},
          {"admissible", violations.empty()},
          {"violations", v},
          {"configurations", configs},
          {"max_relative_change", worst_change}};
}

Json run_inequality(Context& ctx) {
  const auto& c = ctx.cfg;
  io::CsvTable t(io::kInequalityColumns);
  long long total = 0, violations = 0;
  Json cases = Json::array();
  for (const auto& ic : inequality_cases()) {
    const auto scan = scan_inequality(ic, c.samples, c.seed, c.range);
    total += scan.samples;
    violations += scan.violations;
    t.add_row({ic.pair.label(), std::string(1, to_char(ic.phi_sign)), std::int64_t(scan.samples),
               std::int64_t(scan.violations), std::int64_t(scan.tight), scan.min_slack});
    cases.push_back({{"case", ic.label()},
                     {"violations", scan.violations},
                     {"min_slack", scan.min_slack},
                     {"worst", {scan.worst.xi1, scan.worst.xi2, scan.worst.tau1, scan.worst.tau2}}});
  }
  t.write(ctx.artifact(".inequality.csv"));
  return {{"samples", total}, {"violations", violations}, {"cases", cases}};
}

Json run_product(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto grid = ctx.grid();
  const bool large = c.k >= 0.5;
  io::CsvTable t(io::kProductColumns);
  double worst = 0;
  for (int trial = 0; trial < c.trials; ++trial) {
    const auto key = counter_key(c.seed, {trial});
    // rough L^2 data: flat spectrum on the whole grid
    ScalarField<double> u(grid), v(grid);
    for (Index s = 0; s < grid.size(); ++s) {
      u.coefficients()(s) = complex_gaussian(counter_key(key, {0, s}));
      v.coefficients()(s) = complex_gaussian(counter_key(key, {1, s}));
    }
    const auto r = product_estimate_check(u, v, c.k, large);
    worst = std::max(worst, r.ratio);
    t.add_row({std::int64_t(trial), c.k, r.lhs, r.rhs, r.ratio});
  }
  t.write(ctx.artifact(".product.csv"));
  ScalarField<double> one(grid, true);
  one.coefficients()(0) = 1.0;
  const auto unit = product_estimate_check(one, one, c.k, large);
  return {{"constant", product_constant(grid, c.k)},
          {"constant_diverges", large},
          {"max_ratio", worst},
          {"unit_product_norm", unit.lhs},
          {"unit_product_norm_expected", std::sqrt(c.length)}};
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  RunResult result;
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    result.exit_code = kExitConfig;
    result.message = "invalid configuration: " + describe(violations);
    return result;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec || !std::filesystem::is_directory(cfg.out)) {
    result.exit_code = kExitConfig;
    result.message = "cannot create output directory " + cfg.out.string();
    return result;
  }

  Json echo = cfg.to_json();
  Json hashed = echo;
  hashed.erase("out");
  hashed.erase("threads");
  const std::string hash = io::config_hash(hashed);
  const std::string name = to_string(*cfg.experiment);
  Context ctx{cfg, cfg.out / (name + "-" + hash), result};

  const auto start = Clock::now();
  Json results;
  try {
    switch (*cfg.experiment) {
      case Experiment::Simulate: results = run_simulate(ctx); break;
      case Experiment::Picard: results = run_picard(ctx); break;
      case Experiment::Converge: results = run_converge(ctx); break;
      case Experiment::NullCheck: results = run_null_check(ctx); break;
      case Experiment::ProbeNullForm: results = run_probe(ctx, Estimate::NullForm); break;
      case Experiment::ProbeDual: results = run_probe(ctx, Estimate::Dual); break;
      case Experiment::InequalityScan: results = run_inequality(ctx); break;
      case Experiment::ProductCheck: results = run_product(ctx); break;
      case Experiment::Gronwall: results = run_gronwall(ctx); break;
    }
  } catch (const EvolutionError<double>& e) {
    result.exit_code = kExitNumerical;
    result.message = std::string("numerical failure: ") + e.what();
    const auto path = ctx.artifact(".last-good.json");
    io::save_snapshot(path, e.last_good(), ctx.params());
    if (!e.partial().diagnostics.empty())
      io::trajectory_table(e.partial().diagnostics).write(ctx.artifact(".trajectory.csv"));
    results = {{"last_good_time", e.last_good().time}, {"last_good_snapshot", path.filename().string()}};
  } catch (const NumericalError& e) {
    result.exit_code = kExitNumerical;
    result.message = std::string("numerical failure: ") + e.what();
  }

  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  Json artifacts = Json::array();
  for (const auto& a : result.artifacts) artifacts.push_back(a.filename().string());
  result.summary = {{"experiment", name},
                    {"version", DKG_LAB_VERSION},
                    {"config", echo},
                    {"config_hash", hash},
                    {"status", result.exit_code == kExitOk ? "ok" : "numerical-failure"},
                    {"wall_time_seconds", wall},
                    {"results", results},
                    {"artifacts", artifacts}};
  if (!result.message.empty()) result.summary["message"] = result.message;
  const auto summary_path = ctx.artifact(".summary.json");
  io::write_json(summary_path, result.summary);
  if (result.exit_code == kExitOk) result.message = "wrote " + summary_path.string();
  return result;
}

}  // namespace dkg
