#pragma once

// Reference assembler for the uncondensed system: every cell and facet
// unknown stays in one global matrix. Used as an oracle for static
// condensation, Dirichlet elimination and the multiplier border.

#include "hybridns/condense.hpp"
#include "hybridns/forms.hpp"
#include "hybridns/solver.hpp"

#include <Eigen/SparseCore>

namespace hybridns::testing {

/// Global ordering: cell blocks [u_c; p_c] for c = 0..C-1, then the facet
/// vector [ubar; pbar], then the multiplier when present.
struct Monolithic {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  int cell_size = 0;   // total cell unknowns
  int facet_size = 0;  // total facet unknowns
  bool multiplier = false;

  [[nodiscard]] int size() const { return static_cast<int>(rhs.size()); }
};

/// Raw operator and load (no constraints applied).
[[nodiscard]] Monolithic assemble_monolithic(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables,
                                             const Physics& physics, const State& frozen, StepKind step,
                                             bool mean_multiplier = false);

[[nodiscard]] Eigen::VectorXd stack(const DofMap& dofs, const State& s);
[[nodiscard]] State unstack(const DofMap& dofs, const Eigen::VectorXd& x, double t);

/// Solves the problem's linear step monolithically with constraints imposed
/// as identity rows.
[[nodiscard]] State solve_monolithic(const Problem& problem, const State& frozen, StepKind step);

/// Same mesh, spaces and tables bundle used by many tests.
struct Discretization {
  Mesh mesh;
  DofMap dofs;
  ReferenceTables tables;

  Discretization(Mesh m, SpaceSpec spec) : mesh(std::move(m)), dofs(mesh, spec), tables(dofs) {}
};

}  // namespace hybridns::testing
