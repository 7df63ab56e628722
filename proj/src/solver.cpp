#include "hybridns/solver.hpp"

#include "hybridns/diagnostics.hpp"
#include "hybridns/error.hpp"

#include <cmath>
#include <string>

namespace hybridns {

State solve_linear(const Problem& problem, const State& frozen, StepKind step) {
  const AssemblyInput in{problem.mesh,  problem.dofs,        problem.tables,  problem.physics,
                         step,          frozen,              problem.constraints, problem.pressure};
  const CondensedSystem sys = assemble_condensed(in, problem.exec);
  const Eigen::VectorXd x = sparse_lu_solve(sys.matrix, sys.rhs);
  const double t = step.transient ? frozen.t + problem.physics.params.dt : frozen.t;
  return recover_state(sys, problem.dofs, sys.expand(x), t);
}

State solve_stokes(const Problem& problem) {
  if (problem.pressure.kind == PressureConstraint::Kind::none) {
    bool has_flux_boundary = false;
    for (int f = 0; f < problem.mesh.num_facets() && !has_flux_boundary; ++f) {
      has_flux_boundary = problem.mesh.boundary_tag(f) == BoundaryTag::neumann;
    }
    if (!has_flux_boundary) {
      throw SingularMatrix("solve_stokes: pressure is determined only up to a constant; "
                           "add a mean-value constraint or a pin",
                           -1);
    }
  }
  Problem stokes = problem;
  stokes.physics.model = FlowModel::stokes;
  return solve_linear(stokes, State::zero(problem.dofs), StepKind{false});
}

PicardResult solve_stationary_ns(const Problem& problem, const State& initial, const PicardOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_stationary_ns: tol must be > 0");
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) {
    throw InvalidArgument("solve_stationary_ns: relaxation must lie in (0, 1]");
  }
  const bool error_based = options.stopping == PicardOptions::Stopping::error_based;
  if (error_based && !options.error) throw InvalidArgument("solve_stationary_ns: error-based stopping needs an error function");

  const auto metric = [&](const State& s) {
    return error_based ? options.error(s) : velocity_l2_norm(problem.mesh, problem.dofs, s);
  };
  const auto coefficients = [](const State& s) {
    Eigen::VectorXd v(s.u.size() + s.p.size() + s.ubar.size() + s.pbar.size());
    v << s.u, s.p, s.ubar, s.pbar;
    return v;
  };
  const bool increment = options.stopping == PicardOptions::Stopping::increment;
  PicardResult result;
  result.state = initial;
  double m_prev = increment ? 0.0 : metric(initial);
  for (int it = 1; it <= options.max_iters; ++it) {
    State next = solve_linear(problem, result.state, StepKind{false});
    if (options.relaxation != 1.0) {
      const double w = options.relaxation;
      next.u = w * next.u + (1.0 - w) * result.state.u;
      next.p = w * next.p + (1.0 - w) * result.state.p;
      next.ubar = w * next.ubar + (1.0 - w) * result.state.ubar;
      next.pbar = w * next.pbar + (1.0 - w) * result.state.pbar;
    }
    double crit = 0.0;
    double m = 0.0;
    if (increment) {
      const Eigen::VectorXd x = coefficients(next);
      const double dx = (x - coefficients(result.state)).norm();
      crit = x.norm() > 0.0 ? dx / x.norm() : dx;
    } else {
      m = metric(next);
      const double denom = m + m_prev;
      crit = denom > 0.0 ? std::abs(m - m_prev) / denom : 0.0;
    }
    result.history.push_back(crit);
    result.state = std::move(next);
    result.iterations = it;
    if (!std::isfinite(crit)) break;
    if (crit <= options.tol) return result;
    m_prev = m;
  }
  throw DivergenceError("solve_stationary_ns: no convergence after " + std::to_string(result.iterations) +
                            " iterations",
                        result.history);
}

State step_transient(const Problem& problem, const State& state_n) {
  return solve_linear(problem, state_n, StepKind{true});
}

}  // namespace hybridns
