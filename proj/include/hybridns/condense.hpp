#pragma once

#include "hybridns/forms.hpp"
#include "hybridns/linalg.hpp"
#include "hybridns/spaces.hpp"

#include <Eigen/Core>

#include <vector>

namespace hybridns {

/// Schur complement of one cell onto its facet unknowns, with the data
/// needed to recover the cell unknowns: local = y - x * facet_local.
struct CellCondensation {
  Eigen::MatrixXd schur;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd x;  // ll^-1 lg
  Eigen::VectorXd y;  // ll^-1 rhs_l
};

/// Eliminates the ll block. A singular ll raises CondensationError tagged
/// with `cell`.
[[nodiscard]] CellCondensation condense(const LocalSystem& local, int cell = -1);

/// Local unknowns from facet values.
[[nodiscard]] Eigen::VectorXd recover(const CellCondensation& cond, const Eigen::VectorXd& facet_local);

/// How the pressure constant is fixed.
struct PressureConstraint {
  enum class Kind { none, mean_value, pin };
  Kind kind = Kind::none;
  double value = 0.0;  // mean value of the cell pressure, or the pinned facet pressure
  int pin_dof = -1;    // global facet dof for Kind::pin

  [[nodiscard]] static PressureConstraint none() { return {}; }
  [[nodiscard]] static PressureConstraint mean(double c) { return {Kind::mean_value, c, -1}; }
  [[nodiscard]] static PressureConstraint pin(int dof, double v) { return {Kind::pin, v, dof}; }
};

/// Adds the multiplier for int_Omega p = c to a cell system: one extra
/// facet-side unknown coupled to the pressure rows through int_K phi_p, and
/// the share c |K| / |Omega| of the constraint right-hand side.
void augment_mean_pressure(LocalSystem& local, const LocalLayout& layout,
                           const Eigen::VectorXd& pressure_integrals, double rhs_share);

enum class Execution { serial, parallel };

/// Global facet system after condensation and elimination of fixed dofs.
/// Extended facet numbering: the DofMap facet dofs, then the multiplier.
struct CondensedSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<int> reduced_index;   // extended facet dof -> row, or -1 when fixed
  std::vector<double> fixed_value;  // extended facet dof -> prescribed value
  bool has_multiplier = false;
  std::vector<CellCondensation> cells;

  [[nodiscard]] int size() const { return matrix.rows(); }
  /// Extended facet vector from a solution of the reduced system.
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
};

/// Everything needed to build the linear system of one solve.
struct AssemblyInput {
  const Mesh& mesh;
  const DofMap& dofs;
  const ReferenceTables& tables;
  const Physics& physics;
  StepKind step;
  const State& frozen;  // advective state and, for transient steps, U_n
  const Constraints& constraints;
  PressureConstraint pressure;
};

[[nodiscard]] CondensedSystem assemble_condensed(const AssemblyInput& in,
                                                 Execution exec = Execution::parallel);

/// Cell unknowns from the extended facet solution.
[[nodiscard]] State recover_state(const CondensedSystem& sys, const DofMap& dofs,
                                  const Eigen::VectorXd& facet_ext, double t);

/// Integrals of the cell pressure basis functions over cell c.
[[nodiscard]] Eigen::VectorXd pressure_basis_integrals(const Mesh& mesh, const ReferenceTables& tables,
                                                       int c);

/// Total area of the mesh.
[[nodiscard]] double mesh_area(const Mesh& mesh);

}  // namespace hybridns
