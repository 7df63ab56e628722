#include "hybridns/scenarios.hpp"

#include "hybridns/error.hpp"
#include "hybridns/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace hybridns {

// ---------------------------------------------------------------------------
// Config parsing

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
  return d;
}

long parse_long(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long i = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
  return i;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "order_k") return "k";
  if (key == "order_m") return "m";
  if (key == "order_kbar") return "kbar";
  if (key == "order_mbar") return "mbar";
  if (key == "seed") return "seeds";
  return key;
}

}  // namespace

std::vector<std::string> scenario_names() { return {"stokes-mms", "kovasznay", "backstep", "chaotic"}; }

SpaceSpec ScenarioConfig::spec_for(int k) const {
  const int mm = m.value_or(k);
  return SpaceSpec{k, kbar.value_or(k), mm, mbar.value_or(std::max(mm, 1))};
}

Params ScenarioConfig::params_for(int k) const {
  Params p;
  p.nu = nu.value_or(1.0);
  p.alpha = alpha.value_or(6.0 * k * k);
  p.beta = beta;
  p.chi = chi;
  p.theta = theta;
  p.dt = dt;
  return p;
}

ScenarioConfig make_config(const std::string& scenario, const ConfigMap& values) {
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "stokes-mms") {
    c.resolutions = {8, 16, 32, 64};
    c.orders = {1};
  } else if (scenario == "kovasznay") {
    c.resolutions = {8, 16, 32, 64};
    c.orders = {1};
    c.re = {40.0};
    c.tol = 1e-4;
  } else if (scenario == "backstep") {
    c.nx = 300;
    c.ny = 30;
    c.orders = {1};
    c.re = {100, 200, 300, 400, 500, 600, 700, 800};
    c.tol = 1e-6;
  } else if (scenario == "chaotic") {
    c.resolutions = {31};
    c.orders = {1};
  } else {
    throw ConfigError("unknown scenario '" + scenario + "'");
  }

  for (const auto& [raw_key, v] : values) {
    const std::string key = normalize_key(raw_key);
    if (key == "scenario") {
      if (v != scenario) throw ConfigError("config names scenario '" + v + "' but '" + scenario + "' was requested");
    } else if (key == "resolutions") {
      c.resolutions.clear();
      for (const auto& s : split_list(v)) c.resolutions.push_back(static_cast<int>(parse_long(key, s)));
    } else if (key == "nx") {
      c.nx = static_cast<int>(parse_long(key, v));
    } else if (key == "ny") {
      c.ny = static_cast<int>(parse_long(key, v));
    } else if (key == "diagonal") {
      if (v == "right") {
        c.diagonal = Diagonal::right;
      } else if (v == "left") {
        c.diagonal = Diagonal::left;
      } else {
        throw ConfigError("config key 'diagonal': expected right or left");
      }
    } else if (key == "k") {
      c.orders.clear();
      for (const auto& s : split_list(v)) c.orders.push_back(static_cast<int>(parse_long(key, s)));
    } else if (key == "kbar") {
      c.kbar = static_cast<int>(parse_long(key, v));
    } else if (key == "m") {
      c.m = static_cast<int>(parse_long(key, v));
    } else if (key == "mbar") {
      c.mbar = static_cast<int>(parse_long(key, v));
    } else if (key == "alpha") {
      c.alpha = parse_double(key, v);
    } else if (key == "beta") {
      c.beta = parse_double(key, v);
    } else if (key == "chi") {
      c.chi = parse_double(key, v);
    } else if (key == "theta") {
      c.theta = parse_double(key, v);
    } else if (key == "dt") {
      c.dt = parse_double(key, v);
    } else if (key == "re") {
      c.re.clear();
      for (const auto& s : split_list(v)) c.re.push_back(parse_double(key, s));
    } else if (key == "nu") {
      c.nu = parse_double(key, v);
    } else if (key == "steps") {
      c.steps = static_cast<int>(parse_long(key, v));
    } else if (key == "startup_steps") {
      c.startup_steps = static_cast<int>(parse_long(key, v));
    } else if (key == "startup_nu") {
      c.startup_nu = parse_double(key, v);
    } else if (key == "seeds") {
      c.seeds.clear();
      for (const auto& s : split_list(v)) {
        const long seed = parse_long(key, s);
        if (seed < 0) throw ConfigError("config key 'seeds': seeds must be non-negative");
        c.seeds.push_back(static_cast<std::uint64_t>(seed));
      }
    } else if (key == "tol") {
      c.tol = parse_double(key, v);
    } else if (key == "max_iters") {
      c.max_iters = static_cast<int>(parse_long(key, v));
    } else if (key == "relaxation") {
      c.relaxation = parse_double(key, v);
    } else if (key == "retry_relaxation") {
      c.retry_relaxation = parse_double(key, v);
    } else if (key == "out") {
      c.out = v;
    } else if (key == "dump_fields") {
      c.dump_fields = parse_bool(key, v);
    } else if (key == "execution") {
      if (v == "serial") {
        c.exec = Execution::serial;
      } else if (v == "parallel") {
        c.exec = Execution::parallel;
      } else {
        throw ConfigError("config key 'execution': expected serial or parallel");
      }
    } else {
      throw ConfigError("unknown config key '" + raw_key + "'");
    }
  }

  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(!c.orders.empty(), "order list is empty");
  for (int k : c.orders) require(k >= 1 && k <= kMaxBasisOrder, "order k must lie in 1..8");
  require(!c.kbar || (*c.kbar >= 1 && *c.kbar <= kMaxBasisOrder), "kbar must lie in 1..8");
  require(!c.m || (*c.m >= 0 && *c.m <= kMaxBasisOrder), "m must lie in 0..8");
  require(!c.mbar || (*c.mbar >= 1 && *c.mbar <= kMaxBasisOrder), "mbar must lie in 1..8");
  require(!c.alpha || *c.alpha > 0.0, "alpha must be > 0");
  require(c.beta >= 0.0, "beta must be >= 0");
  require(c.chi >= 0.0 && c.chi <= 1.0, "chi must lie in [0, 1]");
  require(c.theta >= 0.0 && c.theta <= 1.0, "theta must lie in [0, 1]");
  require(c.dt > 0.0, "dt must be > 0");
  require(!c.nu || *c.nu >= 0.0, "nu must be >= 0");
  for (double r : c.re) require(r > 0.0, "Reynolds numbers must be > 0");
  require(c.max_iters >= 1, "max_iters must be >= 1");
  require(c.relaxation > 0.0 && c.relaxation <= 1.0, "relaxation must lie in (0, 1]");
  require(c.retry_relaxation > 0.0 && c.retry_relaxation <= 1.0, "retry_relaxation must lie in (0, 1]");
  if (scenario == "backstep") {
    require(c.nx >= 1 && c.ny >= 1, "nx and ny must be >= 1");
  } else {
    require(!c.resolutions.empty(), "resolution list is empty");
    for (int n : c.resolutions) require(n >= 1, "resolutions must be >= 1");
  }
  if (scenario == "kovasznay" || scenario == "backstep") {
    require(!c.re.empty(), "Reynolds number list is empty");
    require(c.tol > 0.0, "tol must be > 0");
  }
  if (scenario == "chaotic") {
    require(c.steps >= 1, "steps must be >= 1");
    require(c.startup_steps >= 0, "startup_steps must be >= 0");
    require(!c.seeds.empty(), "seed list is empty");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Analytic solutions

namespace stokes_mms {

namespace {
// q(s) = s^2 (1 - s)^2 and its derivatives.
struct Quartic {
  double v, d1, d2, d3;
  explicit Quartic(double s)
      : v(s * s * (1 - s) * (1 - s)),
        d1(2 * s - 6 * s * s + 4 * s * s * s),
        d2(2 - 12 * s + 12 * s * s),
        d3(-12 + 24 * s) {}
};
}  // namespace

Vec2 velocity(const Vec2& x) {
  const Quartic X(x.x()), Y(x.y());
  return {X.v * Y.d1, -X.d1 * Y.v};
}

double pressure(const Vec2& x) { return x.x() * (1.0 - x.x()); }

Vec2 forcing(const Vec2& x, double nu) {
  const Quartic X(x.x()), Y(x.y());
  return {(1.0 - 2.0 * x.x()) - nu * (X.d2 * Y.d1 + X.v * Y.d3), nu * (X.d3 * Y.v + X.d1 * Y.d2)};
}

}  // namespace stokes_mms

namespace kovasznay {

double lambda(double re) { return re / 2.0 - std::sqrt(re * re / 4.0 + 4.0 * std::numbers::pi * std::numbers::pi); }

Vec2 velocity(const Vec2& x, double re) {
  const double l = lambda(re);
  const double e = std::exp(l * x.x());
  const double a = 2.0 * std::numbers::pi * x.y();
  return {1.0 - e * std::cos(a), l / (2.0 * std::numbers::pi) * e * std::sin(a)};
}

double pressure(const Vec2& x, double re) { return 0.5 * (1.0 - std::exp(2.0 * lambda(re) * x.x())); }

}  // namespace kovasznay

int nearest_facet_pressure_dof(const Mesh& mesh, const DofMap& dofs, const Vec2& point) {
  const auto& space = dofs.facet_pressure_space();
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int node = 0; node < space.num_nodes(); ++node) {
    const double d = (space.node_coordinate(mesh, node) - point).squaredNorm();
    if (d < best_d - 1e-14) {
      best_d = d;
      best = node;
    }
  }
  return dofs.facet_pressure_offset() + best;
}

// ---------------------------------------------------------------------------
// Runners

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_norm(const std::vector<Vec2>& v) {
  double m = 0.0;
  for (const Vec2& x : v) m = std::max(m, x.lpNorm<Eigen::Infinity>());
  return m;
}

bool momentum_conserving(const SpaceSpec& s) { return s.m >= s.k && s.mbar >= s.kbar; }

void maybe_dump(const ScenarioConfig& cfg, const RunRecord& r, const Mesh& mesh, const DofMap& dofs,
                const State& s) {
  if (!cfg.dump_fields) return;
  std::filesystem::create_directories(cfg.out);
  write_field_csv((std::filesystem::path(cfg.out) / ("field_" + r.run_id + ".csv")).string(), mesh, dofs, s);
}

RunRecord base_record(const ScenarioConfig& cfg, const std::string& id, int nx, int ny, const Mesh& mesh,
                      const SpaceSpec& spec, const Params& params) {
  RunRecord r;
  r.scenario = cfg.scenario;
  r.run_id = id;
  r.nx = nx;
  r.ny = ny;
  r.h = mesh.cell_size(0);
  r.spec = spec;
  r.params = params;
  return r;
}

}  // namespace

Report run_stokes_mms(const ScenarioConfig& cfg) {
  Report report;
  for (int k : cfg.orders) {
    const SpaceSpec spec = cfg.spec_for(k);
    Params params = cfg.params_for(k);
    for (int n : cfg.resolutions) {
      const auto t0 = Clock::now();
      const Mesh mesh = build_rect_mesh(n, n, Rect{0, 1, 0, 1}, cfg.diagonal);
      const DofMap dofs(mesh, spec);
      const ReferenceTables tables(dofs);
      const double nu = params.nu;
      Physics physics{params, FlowModel::stokes,
                      Forcing::analytic([nu](const Vec2& x, double) { return stokes_mms::forcing(x, nu); }), {}};
      const Problem problem{mesh, dofs, tables, physics, Constraints::from_mask(dofs),
                            PressureConstraint::mean(1.0 / 6.0), cfg.exec};
      const State s = solve_stokes(problem);

      RunRecord r = base_record(cfg, "k" + std::to_string(k) + "_n" + std::to_string(n), n, n, mesh, spec, params);
      r.pressure_constraint = "mean=1/6";
      r.iterations = 1;
      const int deg = 2 * k + 6;
      r.l2_u = l2_error_velocity(mesh, dofs, s, stokes_mms::velocity, deg);
      r.l2_p = l2_error_pressure(mesh, dofs, s, stokes_mms::pressure, deg);
      r.e_div = divergence_error(mesh, dofs, s);
      r.max_mass_residual = max_abs(local_mass_residual(mesh, dofs, tables, s, params));
      r.max_momentum_residual =
          max_norm(local_momentum_residual(mesh, dofs, tables, s, s, physics, StepKind{false}));
      r.runtime_s = seconds_since(t0);
      maybe_dump(cfg, r, mesh, dofs, s);
      report.runs.push_back(std::move(r));
    }
  }
  return report;
}

Report run_kovasznay(const ScenarioConfig& cfg) {
  Report report;
  for (double re : cfg.re) {
    for (int k : cfg.orders) {
      const SpaceSpec spec = cfg.spec_for(k);
      Params params = cfg.params_for(k);
      params.nu = cfg.nu.value_or(1.0 / re);
      for (int n : cfg.resolutions) {
        const auto t0 = Clock::now();
        const Mesh mesh = build_rect_mesh(n, n, Rect{-0.5, 1.0, -0.5, 1.5}, cfg.diagonal);
        const DofMap dofs(mesh, spec);
        const ReferenceTables tables(dofs);
        Constraints bc = Constraints::from_mask(dofs);
        const auto exact_u = [re](const Vec2& x) { return kovasznay::velocity(x, re); };
        const auto exact_p = [re](const Vec2& x) { return kovasznay::pressure(x, re); };
        bc.set_velocity(mesh, dofs, exact_u);
        const Vec2 corner(-0.5, -0.5);
        const int pin = nearest_facet_pressure_dof(mesh, dofs, corner);
        const Physics physics{params, FlowModel::navier_stokes, Forcing{}, {}};
        const Problem problem{mesh, dofs, tables, physics, bc, PressureConstraint::pin(pin, exact_p(corner)),
                              cfg.exec};

        const int deg = 2 * k + 6;
        PicardOptions opt;
        opt.stopping = PicardOptions::Stopping::error_based;
        opt.tol = cfg.tol;
        opt.max_iters = cfg.max_iters;
        opt.relaxation = cfg.relaxation;
        opt.error = [&](const State& s) { return l2_error_velocity(mesh, dofs, s, exact_u, deg); };
        const PicardResult res = solve_stationary_ns(problem, solve_stokes(problem), opt);
        const State& s = res.state;

        std::ostringstream id;
        id << "re" << re << "_k" << k << "_n" << n;
        RunRecord r = base_record(cfg, id.str(), n, n, mesh, spec, params);
        r.re = re;
        r.pressure_constraint = "pin(-0.5,-0.5)";
        r.iterations = res.iterations;
        r.picard_history = res.history;
        r.l2_u = l2_error_velocity(mesh, dofs, s, exact_u, deg);
        r.l2_p = l2_error_pressure(mesh, dofs, s, exact_p, deg, true);
        r.e_div = divergence_error(mesh, dofs, s);
        r.max_mass_residual = max_abs(local_mass_residual(mesh, dofs, tables, s, params));
        r.runtime_s = seconds_since(t0);
        maybe_dump(cfg, r, mesh, dofs, s);
        report.runs.push_back(std::move(r));
      }
    }
  }
  return report;
}

Report run_backstep(const ScenarioConfig& cfg) {
  constexpr double step_height = 0.5;
  Report report;
  for (int k : cfg.orders) {
    const SpaceSpec spec = cfg.spec_for(k);
    Mesh mesh = build_rect_mesh(cfg.nx, cfg.ny, Rect{0, 15, 0, 1}, cfg.diagonal);
    mesh.tag_boundary([](const Vec2& x) { return std::abs(x.x() - 15.0) < 1e-12; }, BoundaryTag::neumann);
    const DofMap dofs(mesh, spec);
    const ReferenceTables tables(dofs);
    Constraints bc = Constraints::from_mask(dofs);
    bc.set_velocity(mesh, dofs, [](const Vec2& x) {
      if (std::abs(x.x()) < 1e-12 && x.y() >= 0.5) return Vec2(16.0 * (x.y() - 0.5) * (1.0 - x.y()), 0.0);
      return Vec2(0.0, 0.0);
    });
    const int pin = nearest_facet_pressure_dof(mesh, dofs, Vec2(0.0, 0.0));

    for (double re : cfg.re) {
      const auto t0 = Clock::now();
      Params params = cfg.params_for(k);
      params.nu = cfg.nu.value_or((2.0 / 3.0) / re);
      const Physics physics{params, FlowModel::navier_stokes, Forcing{}, {}};
      const Problem problem{mesh, dofs, tables, physics, bc, PressureConstraint::pin(pin, 0.0), cfg.exec};

      PicardOptions opt;
      opt.stopping = PicardOptions::Stopping::norm_based;
      opt.tol = cfg.tol;
      opt.max_iters = cfg.max_iters;
      opt.relaxation = cfg.relaxation;
      const State initial = solve_stokes(problem);
      PicardResult res;
      try {
        res = solve_stationary_ns(problem, initial, opt);
      } catch (const DivergenceError&) {
        if (cfg.retry_relaxation >= opt.relaxation) throw;
        opt.relaxation = cfg.retry_relaxation;
        res = solve_stationary_ns(problem, initial, opt);
      }
      const State& s = res.state;

      std::ostringstream id;
      id << "re" << re << "_k" << k;
      RunRecord r = base_record(cfg, id.str(), cfg.nx, cfg.ny, mesh, spec, params);
      r.params.theta = 1.0;
      r.re = re;
      r.pressure_constraint = "pin(0,0)";
      r.iterations = res.iterations;
      r.picard_history = res.history;
      r.e_div = divergence_error(mesh, dofs, s);
      r.max_mass_residual = max_abs(local_mass_residual(mesh, dofs, tables, s, params));
      if (const auto xl = reattachment_point(mesh, dofs, s, 0.0)) r.reattachment = *xl / step_height;
      double longest = 0.0;
      for (const auto& [a, b] : positive_shear_intervals(mesh, dofs, s, 1.0)) {
        if (b - a > longest) {
          longest = b - a;
          r.bubble_start = a / step_height;
          r.bubble_end = b / step_height;
        }
      }
      if (opt.relaxation != cfg.relaxation) r.status = "ok(relaxation=" + std::to_string(opt.relaxation) + ")";
      r.runtime_s = seconds_since(t0);
      maybe_dump(cfg, r, mesh, dofs, s);
      report.runs.push_back(std::move(r));
    }
  }
  return report;
}

Report run_chaotic(const ScenarioConfig& cfg) {
  Report report;
  for (int k : cfg.orders) {
    const SpaceSpec spec = cfg.spec_for(k);
    for (int n : cfg.resolutions) {
      Mesh mesh = build_rect_mesh(n, n, Rect{0, 1, 0, 1}, cfg.diagonal);
      mesh.tag_boundary([](const Vec2&) { return true; }, BoundaryTag::slip);
      const DofMap dofs(mesh, spec);
      const ReferenceTables tables(dofs);
      const Constraints bc = Constraints::from_mask(dofs);
      const int pin = nearest_facet_pressure_dof(mesh, dofs, Vec2(0.5, 0.5));
      const bool conserving = momentum_conserving(spec);

      for (std::uint64_t seed : cfg.seeds) {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<Vec2> fv(mesh.num_vertices());
        for (Vec2& f : fv) {
          const double fx = uni(rng);
          f = Vec2(fx, uni(rng));
        }
        const Forcing random_forcing = Forcing::vertex_values(std::move(fv));

        const Params base = cfg.params_for(k);
        RunRecord r = base_record(cfg, "k" + std::to_string(k) + "_n" + std::to_string(n) + "_seed" +
                                           std::to_string(seed),
                                  n, n, mesh, spec, base);
        r.params.nu = 0.0;
        r.seed = seed;
        r.pressure_constraint = "pin(nearest centre)";

        State s = State::zero(dofs);
        double max_mass = 0.0, max_mom = conserving ? 0.0 : -1.0;
        for (int step = 1; step <= cfg.steps; ++step) {
          Physics physics;
          physics.params = base;
          physics.params.nu = step == 1 ? cfg.startup_nu : 0.0;
          physics.params.theta = step <= cfg.startup_steps ? 1.0 : cfg.theta;
          physics.model = FlowModel::navier_stokes;
          if (step == 1) physics.forcing = random_forcing;
          const Problem problem{mesh, dofs, tables, physics, bc, PressureConstraint::pin(pin, 0.0), cfg.exec};
          State next = step_transient(problem, s);
          max_mass = std::max(max_mass, max_abs(local_mass_residual(mesh, dofs, tables, next, physics.params)));
          if (conserving) {
            max_mom = std::max(max_mom, max_norm(local_momentum_residual(mesh, dofs, tables, s, next, physics,
                                                                         StepKind{true})));
          }
          s = std::move(next);
          r.ke_history.push_back(kinetic_energy(mesh, dofs, s));
        }
        r.iterations = cfg.steps;
        r.max_mass_residual = max_mass;
        r.max_momentum_residual = max_mom;
        r.e_div = divergence_error(mesh, dofs, s);
        r.runtime_s = seconds_since(t0);
        maybe_dump(cfg, r, mesh, dofs, s);
        report.runs.push_back(std::move(r));
      }
    }
  }
  return report;
}

Report run_scenario(const ScenarioConfig& config) {
  if (config.scenario == "stokes-mms") return run_stokes_mms(config);
  if (config.scenario == "kovasznay") return run_kovasznay(config);
  if (config.scenario == "backstep") return run_backstep(config);
  if (config.scenario == "chaotic") return run_chaotic(config);
  throw ConfigError("unknown scenario '" + config.scenario + "'");
}

}  // namespace hybridns
