#pragma once

#include "hybridns/forms.hpp"
#include "hybridns/spaces.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hybridns {

// Field evaluation on one cell at a reference point.
[[nodiscard]] Vec2 eval_velocity(const DofMap& dofs, const State& s, int c, const Vec2& xi);
[[nodiscard]] double eval_pressure(const DofMap& dofs, const State& s, int c, const Vec2& xi);
/// Physical velocity gradient, [G]_ij = d u_i / d x_j.
[[nodiscard]] Mat2 eval_velocity_gradient(const Mesh& mesh, const DofMap& dofs, const State& s, int c,
                                          const Vec2& xi);

/// sqrt(sum_K int_K |u_h - u|^2).
[[nodiscard]] double l2_error_velocity(const Mesh& mesh, const DofMap& dofs, const State& s,
                                       const VectorFunction& exact, int degree);
/// Pressure L2 error; with `mean_adjusted` the mean of p_h - p is removed first.
[[nodiscard]] double l2_error_pressure(const Mesh& mesh, const DofMap& dofs, const State& s,
                                       const ScalarFunction& exact, int degree, bool mean_adjusted = false);
[[nodiscard]] double velocity_l2_norm(const Mesh& mesh, const DofMap& dofs, const State& s);
/// int_Omega p_h.
[[nodiscard]] double pressure_integral(const Mesh& mesh, const DofMap& dofs, const State& s);

/// sqrt(sum_K int_K (div u_h)^2).
[[nodiscard]] double divergence_error(const Mesh& mesh, const DofMap& dofs, const State& s);

/// Per cell: oint_{dK} uhat . n.
[[nodiscard]] std::vector<double> local_mass_residual(const Mesh& mesh, const DofMap& dofs,
                                                      const ReferenceTables& tables, const State& s,
                                                      const Params& params);

/// Per cell: int_K (u_{n+1} - u_n) / dt + oint sigmahat_{n+theta} n - int_K f_{n+theta},
/// evaluated from the pointwise flux functions with uhat and lambda taken
/// from state_n. Stationary steps drop the time derivative and use theta = 1.
[[nodiscard]] std::vector<Vec2> local_momentum_residual(const Mesh& mesh, const DofMap& dofs,
                                                        const ReferenceTables& tables,
                                                        const State& state_n, const State& state_np1,
                                                        const Physics& physics, StepKind step);

/// int_Omega |u_h|^2.
[[nodiscard]] double kinetic_energy(const Mesh& mesh, const DofMap& dofs, const State& s);

/// oint_{dOmega} ubar . n.
[[nodiscard]] double boundary_mass_flux(const Mesh& mesh, const DofMap& dofs, const State& s);

/// Terms of the discrete energy balance of one theta step with chi = 1/2,
/// no forcing and homogeneous boundary data:
/// kinetic + upwind + viscous + penalty + adjoint + stabilization = 0.
struct EnergyBudget {
  double kinetic = 0.0;        // (|u_{n+1}|^2/2 - |u_n|^2/2 + (theta - 1/2)|u_{n+1} - u_n|^2) / dt
  double upwind = 0.0;         // oint |uhat_n . n| |ubar - u|^2 / 2
  double viscous = 0.0;        // int 2 nu |sym grad u|^2
  double penalty = 0.0;        // oint (alpha / h) 2 nu |ubar - u|^2
  double adjoint = 0.0;        // 2 oint 2 nu (ubar - u) . sym(grad u) n
  double stabilization = 0.0;  // oint beta h / (nu + 1) |pbar - p|^2

  [[nodiscard]] double dissipation() const { return upwind + viscous + penalty + adjoint + stabilization; }
  [[nodiscard]] double total() const { return kinetic + dissipation(); }
};

/// Dissipation terms evaluated at U_{n+theta} with the upwind flux of
/// `frozen`; `kinetic` is filled only when `state_np1` is given.
[[nodiscard]] EnergyBudget energy_budget(const Mesh& mesh, const DofMap& dofs,
                                         const ReferenceTables& tables, const State& state_n,
                                         const State& state_np1, const Params& params,
                                         StepKind step);

/// Wall shear d u_x / d y sampled on the boundary facets of the horizontal
/// wall y = wall_y, `per_facet` points per facet, ordered by x.
struct ShearSample {
  double x;
  double shear;
  int cell;
  double xi_s;  // facet parameter in global orientation
  int local_facet;
};
[[nodiscard]] std::vector<ShearSample> sample_wall_shear(const Mesh& mesh, const DofMap& dofs,
                                                         const State& s, double wall_y,
                                                         int per_facet = 20);

/// Downstream end of the longest negative-shear interval on y = wall_y that
/// closes with a negative-to-positive sign change: the reattachment point of
/// the main recirculation. Short sign flips from the corner singularity are
/// skipped this way. nullopt when the shear never turns positive again.
[[nodiscard]] std::optional<double> reattachment_point(const Mesh& mesh, const DofMap& dofs,
                                                       const State& s, double wall_y);

/// Maximal x-intervals on y = wall_y where the shear is positive.
[[nodiscard]] std::vector<std::pair<double, double>> positive_shear_intervals(const Mesh& mesh,
                                                                              const DofMap& dofs,
                                                                              const State& s,
                                                                              double wall_y);

// ---------------------------------------------------------------------------

/// One solver run.
struct RunRecord {
  std::string scenario;
  std::string run_id;
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  SpaceSpec spec;
  Params params;
  double re = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double l2_u = -1.0;
  double l2_p = -1.0;
  double e_div = -1.0;
  double max_mass_residual = -1.0;
  double max_momentum_residual = -1.0;
  double reattachment = -1.0;  // x / S, -1 when not reattached or not applicable
  double bubble_start = -1.0;
  double bubble_end = -1.0;
  double runtime_s = 0.0;
  std::string pressure_constraint;
  std::vector<double> ke_history;
  std::vector<double> picard_history;
  std::string status = "ok";
};

struct Report {
  std::vector<RunRecord> runs;

  /// Fixed column set, one row per run.
  void write_csv(const std::string& path) const;
  /// Full records including histories.
  void write_json(const std::string& path) const;
};

[[nodiscard]] const std::vector<std::string>& report_csv_columns();

/// x, y, u_x, u_y, p at the velocity lattice points of every cell.
void write_field_csv(const std::string& path, const Mesh& mesh, const DofMap& dofs, const State& s);

}  // namespace hybridns
