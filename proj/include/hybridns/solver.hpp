#pragma once

#include "hybridns/condense.hpp"
#include "hybridns/forms.hpp"
#include "hybridns/spaces.hpp"

#include <functional>
#include <vector>

namespace hybridns {

/// A discrete problem: mesh, spaces, physics and boundary data.
struct Problem {
  const Mesh& mesh;
  const DofMap& dofs;
  const ReferenceTables& tables;
  Physics physics;
  Constraints constraints;
  PressureConstraint pressure;
  Execution exec = Execution::parallel;
};

/// One linear solve for the unknowns at the new level, with advective
/// velocity and upwinding frozen at `frozen`. The returned state has time
/// frozen.t (+ dt for transient steps).
[[nodiscard]] State solve_linear(const Problem& problem, const State& frozen, StepKind step);

/// Stationary Stokes solve (advection dropped regardless of the model).
/// Throws SingularMatrix when no boundary flux, multiplier or pin fixes the
/// pressure constant.
[[nodiscard]] State solve_stokes(const Problem& problem);

struct PicardOptions {
  enum class Stopping {
    error_based,  // |e_{i+1} - e_i| / (e_{i+1} + e_i) with e the L2 error from `error`
    norm_based,   // |n_{i+1} - n_i| / (n_{i+1} + n_i) with n the L2 norm of u
    increment,    // |U_{i+1} - U_i| / |U_{i+1}| over all coefficients
  };
  Stopping stopping = Stopping::norm_based;
  double tol = 1e-6;
  int max_iters = 200;
  double relaxation = 1.0;  // 1: no under-relaxation
  std::function<double(const State&)> error;  // required for error_based
};

struct PicardResult {
  State state;
  int iterations = 0;
  std::vector<double> history;  // criterion value per iteration
};

/// Fixed-point iteration for stationary Navier-Stokes starting from
/// `initial`. Throws DivergenceError after max_iters.
[[nodiscard]] PicardResult solve_stationary_ns(const Problem& problem, const State& initial,
                                               const PicardOptions& options);

/// One theta-scheme step from `state_n`.
[[nodiscard]] State step_transient(const Problem& problem, const State& state_n);

}  // namespace hybridns
