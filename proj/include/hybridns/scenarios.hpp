#pragma once

#include "hybridns/condense.hpp"
#include "hybridns/diagnostics.hpp"
#include "hybridns/forms.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hybridns {

using ConfigMap = std::map<std::string, std::string>;

/// Reads a flat key=value file. Blank lines and lines starting with '#' are
/// skipped. Throws ConfigError on malformed lines.
[[nodiscard]] ConfigMap read_config_file(const std::string& path);
[[nodiscard]] ConfigMap parse_config_text(const std::string& text);

/// Parsed scenario settings. Unset optionals take scenario defaults.
struct ScenarioConfig {
  std::string scenario;                // stokes-mms | kovasznay | backstep | chaotic
  std::vector<int> resolutions;        // cells per direction
  int nx = 0;                          // backstep mesh
  int ny = 0;
  Diagonal diagonal = Diagonal::right;
  std::vector<int> orders;             // k values
  std::optional<int> kbar, m, mbar;    // default kbar = k, m = k, mbar = m
  std::optional<double> alpha;         // default 6 k^2
  double beta = 1e-4;
  double chi = 0.5;
  double theta = 0.5;                  // chaotic: after the startup steps
  double dt = 0.2;
  std::vector<double> re;
  std::optional<double> nu;
  int steps = 40;
  int startup_steps = 5;
  double startup_nu = 1e-5;
  std::vector<std::uint64_t> seeds{1};
  double tol = 0.0;                    // default per scenario
  int max_iters = 200;
  double relaxation = 1.0;
  double retry_relaxation = 0.7;
  std::string out = "out";
  bool dump_fields = false;
  Execution exec = Execution::parallel;

  [[nodiscard]] SpaceSpec spec_for(int k) const;
  [[nodiscard]] Params params_for(int k) const;
};

[[nodiscard]] std::vector<std::string> scenario_names();

/// Scenario defaults overridden by `values`. Throws ConfigError on unknown
/// keys, unparsable values or values violating invariants.
[[nodiscard]] ScenarioConfig make_config(const std::string& scenario, const ConfigMap& values);

/// Analytic data of the manufactured Stokes solution on the unit square.
namespace stokes_mms {
[[nodiscard]] Vec2 velocity(const Vec2& x);
[[nodiscard]] double pressure(const Vec2& x);
/// grad p - nu lap u.
[[nodiscard]] Vec2 forcing(const Vec2& x, double nu);
}  // namespace stokes_mms

/// Kovasznay flow data.
namespace kovasznay {
[[nodiscard]] double lambda(double re);
[[nodiscard]] Vec2 velocity(const Vec2& x, double re);
[[nodiscard]] double pressure(const Vec2& x, double re);
}  // namespace kovasznay

/// Facet-pressure dof whose node is closest to `point` (lowest index on ties).
[[nodiscard]] int nearest_facet_pressure_dof(const Mesh& mesh, const DofMap& dofs, const Vec2& point);

[[nodiscard]] Report run_stokes_mms(const ScenarioConfig& config);
[[nodiscard]] Report run_kovasznay(const ScenarioConfig& config);
[[nodiscard]] Report run_backstep(const ScenarioConfig& config);
[[nodiscard]] Report run_chaotic(const ScenarioConfig& config);

/// Dispatches on config.scenario.
[[nodiscard]] Report run_scenario(const ScenarioConfig& config);

}  // namespace hybridns
