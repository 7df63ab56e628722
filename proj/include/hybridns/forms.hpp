#pragma once

#include "hybridns/basis.hpp"
#include "hybridns/mesh.hpp"
#include "hybridns/spaces.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace hybridns {

using Mat2 = Eigen::Matrix2d;

/// Scheme constants.
struct Params {
  double nu = 1.0;     // viscosity
  double alpha = 6.0;  // interior penalty
  double beta = 1e-4;  // pressure stabilization in the mass flux
  double chi = 0.5;    // 1: conservative advection, 0: advective form
  double theta = 1.0;  // time-scheme weight
  double dt = 1.0;     // time step

  void validate() const;
};

enum class FlowModel { stokes, navier_stokes };

// ---------------------------------------------------------------------------
// Pointwise numerical fluxes. Tensors follow [a (x) b]_ij = a_i b_j and
// [grad u]_ij = d u_i / d x_j.

/// Pressure-stabilization coefficient beta h / (nu + 1).
[[nodiscard]] inline double stabilization_coefficient(double h, const Params& params) {
  return params.beta * h / (params.nu + 1.0);
}

/// u - beta h / (nu + 1) (pbar - p) n.
[[nodiscard]] Vec2 mass_flux(const Vec2& u, double p, double pbar, const Vec2& n, double h,
                             const Params& params);

/// 1 on inflow (uhat.n < 0), 0 otherwise.
[[nodiscard]] inline int upwind_switch(double uhat_n) { return uhat_n < 0.0 ? 1 : 0; }

/// u (x) uhat + (ubar - u) (x) lambda uhat.
[[nodiscard]] Mat2 advective_flux(const Vec2& u, const Vec2& ubar, const Vec2& uhat, int lambda);

/// pbar I - 2 nu sym(grad u) - (alpha / h) 2 nu (ubar - u) (x) n.
[[nodiscard]] Mat2 diffusive_flux(const Mat2& grad_u, const Vec2& u, const Vec2& ubar, double pbar,
                                  const Vec2& n, double h, const Params& params);

/// Exact momentum flux p I - 2 nu sym(grad u) + u (x) u.
[[nodiscard]] Mat2 momentum_flux(const Mat2& grad_u, const Vec2& u, double p, const Params& params);

// ---------------------------------------------------------------------------

/// Body force: zero, an analytic field f(x, t), or a P1 field given by
/// vertex values (time independent).
class Forcing {
public:
  using Analytic = std::function<Vec2(const Vec2& x, double t)>;

  Forcing() = default;
  [[nodiscard]] static Forcing analytic(Analytic f);
  [[nodiscard]] static Forcing vertex_values(std::vector<Vec2> values);

  [[nodiscard]] bool is_zero() const { return !analytic_ && vertex_.empty(); }
  /// Value at reference point xi of cell c (physical point x) and time t.
  [[nodiscard]] Vec2 eval(const Mesh& mesh, int c, const Vec2& xi, const Vec2& x, double t) const;

private:
  Analytic analytic_;
  std::vector<Vec2> vertex_;
};

/// Prescribed boundary flux h(x, n, t) on neumann facets. Empty means zero.
using Traction = std::function<Vec2(const Vec2& x, const Vec2& n, double t)>;

/// Everything that defines the continuous problem apart from the mesh and
/// boundary data on dirichlet facets.
struct Physics {
  Params params;
  FlowModel model = FlowModel::navier_stokes;
  Forcing forcing;
  Traction traction;
};

// ---------------------------------------------------------------------------

/// Basis values and reference gradients at the cell and facet quadrature
/// points, shared by all cells of a DofMap.
class ReferenceTables {
public:
  explicit ReferenceTables(const DofMap& dofs);

  [[nodiscard]] int degree() const { return degree_; }

  // Cell quadrature: rule, velocity basis values and gradients, pressure values.
  QuadratureRule cell_rule;
  Eigen::MatrixXd u_val, u_dx, u_dy;  // nk x nq
  Eigen::MatrixXd p_val;              // nm x nq

  // Facet quadrature on [0, 1] in global facet orientation.
  QuadratureRule facet_rule;
  Eigen::MatrixXd ubar_val;  // (kbar + 1) x nqf
  Eigen::MatrixXd pbar_val;  // (mbar + 1) x nqf

  /// Cell basis traces on local facet lf, orientation `aligned`.
  struct Trace {
    Eigen::MatrixXd u_val, u_dx, u_dy, p_val;
    std::vector<Vec2> points;
  };
  [[nodiscard]] const Trace& trace(int lf, bool aligned) const { return traces_[2 * lf + (aligned ? 1 : 0)]; }

private:
  int degree_;
  std::vector<Trace> traces_;
};

/// Affine geometry of one cell: physical gradient = inv_jt * reference gradient.
struct CellGeometry {
  Vec2 x0;
  Mat2 jacobian;
  Mat2 inv_jt;
  double det = 0.0;

  CellGeometry(const Mesh& mesh, int c);
  [[nodiscard]] Vec2 map(const Vec2& xi) const { return x0 + jacobian * xi; }
};

/// Local unknowns of one cell in the order [u | p | ubar | pbar]; u and ubar
/// interleave components per node.
struct LocalLayout {
  int nu = 0;   // 2 * cell velocity nodes
  int np = 0;   // cell pressure nodes
  int nub = 0;  // 2 * facet velocity nodes of the cell
  int npb = 0;  // facet pressure nodes of the cell

  explicit LocalLayout(const DofMap& dofs);
  [[nodiscard]] int nl() const { return nu + np; }
  [[nodiscard]] int ng() const { return nub + npb; }
  [[nodiscard]] int size() const { return nl() + ng(); }
};

/// The frozen state's local coefficients, used for the advective velocity,
/// the upwind switch and the time-lagged terms.
struct LocalState {
  Eigen::VectorXd cell;   // [u; p]
  Eigen::VectorXd facet;  // [ubar; pbar]
  double t = 0.0;

  [[nodiscard]] static LocalState from(const State& s, const DofMap& dofs, int c);
  [[nodiscard]] Eigen::VectorXd stacked() const;
};

/// Split cell operator, all over the full local vector [u | p | ubar | pbar].
/// momentum: rows of v and (negated) vbar; continuity: rows of q and qbar;
/// mass: velocity mass matrix; load: forcing and neumann data at the
/// evaluation time. The facet-velocity rows carry the opposite sign of the
/// weak form so that the Stokes operator is symmetric.
struct CellOperator {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd momentum;
  Eigen::MatrixXd continuity;
  Eigen::VectorXd load;
};

/// Time discretization of one linear solve. Stationary solves drop the mass
/// matrix and take theta = 1.
struct StepKind {
  bool transient = false;

  [[nodiscard]] double theta(const Params& p) const { return transient ? p.theta : 1.0; }
  /// Time at which forcing and boundary fluxes are evaluated.
  [[nodiscard]] double eval_time(const Params& p, double t_n) const {
    return transient ? t_n + p.theta * p.dt : t_n;
  }
};

[[nodiscard]] CellOperator cell_operator(const Mesh& mesh, const DofMap& dofs,
                                         const ReferenceTables& tables, int c,
                                         const LocalState& frozen, const Physics& physics,
                                         double t_eval);

/// Condensation blocks of one cell and its right-hand side.
struct LocalSystem {
  Eigen::MatrixXd ll, lg, gl, gg;
  Eigen::VectorXd rhs_l, rhs_g;
};

/// Builds the linear system for U_{n+1} from the split operator:
/// M / dt + theta A_m + A_c on the left, load + M u_n / dt - (1 - theta) A_m U_n
/// on the right.
[[nodiscard]] LocalSystem make_local_system(const CellOperator& op, const LocalLayout& layout,
                                            const LocalState& state_n, const Params& params,
                                            StepKind step);

/// cell_operator followed by make_local_system.
[[nodiscard]] LocalSystem cell_tensors(const Mesh& mesh, const DofMap& dofs,
                                       const ReferenceTables& tables, int c, const LocalState& frozen,
                                       const Physics& physics, StepKind step);

}  // namespace hybridns
