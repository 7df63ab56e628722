#include "monolithic.hpp"

#include "hybridns/basis.hpp"

#include <Eigen/SparseLU>

#include <stdexcept>

namespace hybridns::testing {

Eigen::VectorXd stack(const DofMap& dofs, const State& s) {
  const int nl = dofs.cell_local_size();
  Eigen::VectorXd x(dofs.num_cells() * nl + dofs.num_facet_dofs());
  for (int c = 0; c < dofs.num_cells(); ++c) x.segment(c * nl, nl) = s.cell_local(dofs, c);
  x.tail(dofs.num_facet_dofs()) = s.facet_vector();
  return x;
}

State unstack(const DofMap& dofs, const Eigen::VectorXd& x, double t) {
  State s = State::zero(dofs, t);
  const int nl = dofs.cell_local_size();
  const int nu = dofs.cell_velocity_size();
  const int np = dofs.cell_pressure_size();
  for (int c = 0; c < dofs.num_cells(); ++c) {
    s.u.segment(c * nu, nu) = x.segment(c * nl, nu);
    s.p.segment(c * np, np) = x.segment(c * nl + nu, np);
  }
  s.set_facet_vector(dofs, x.segment(dofs.num_cells() * nl, dofs.num_facet_dofs()));
  return s;
}

Monolithic assemble_monolithic(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables,
                               const Physics& physics, const State& frozen, StepKind step, bool mean_multiplier) {
  Monolithic out;
  const int nl = dofs.cell_local_size();
  out.cell_size = dofs.num_cells() * nl;
  out.facet_size = dofs.num_facet_dofs();
  out.multiplier = mean_multiplier;
  const int n = out.cell_size + out.facet_size + (mean_multiplier ? 1 : 0);
  out.rhs = Eigen::VectorXd::Zero(n);

  // Own quadrature for the pressure mean: exact for the basis.
  const LagrangeBasis& pb = dofs.pressure_basis();
  const QuadratureRule rule = make_quadrature(RefElement::triangle, std::max(pb.order(), 1));
  const Eigen::MatrixXd pv = pb.tabulate(rule.points);

  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < dofs.num_cells(); ++c) {
    const LocalSystem ls = cell_tensors(mesh, dofs, tables, c, LocalState::from(frozen, dofs, c), physics, step);
    std::vector<int> ids;
    for (int i = 0; i < nl; ++i) ids.push_back(c * nl + i);
    for (int g : dofs.cell_facet_dofs(c)) ids.push_back(out.cell_size + g);
    const int ng = static_cast<int>(ids.size()) - nl;
    Eigen::MatrixXd k(nl + ng, nl + ng);
    k << ls.ll, ls.lg, ls.gl, ls.gg;
    Eigen::VectorXd r(nl + ng);
    r << ls.rhs_l, ls.rhs_g;
    for (int i = 0; i < nl + ng; ++i) {
      out.rhs[ids[i]] += r[i];
      for (int j = 0; j < nl + ng; ++j) {
        if (k(i, j) != 0.0) trip.emplace_back(ids[i], ids[j], k(i, j));
      }
    }
    if (mean_multiplier) {
      const int mrow = n - 1;
      const double jac = 2.0 * mesh.signed_area(c);
      for (int a = 0; a < pb.size(); ++a) {
        double integral = 0.0;
        for (int q = 0; q < rule.size(); ++q) integral += rule.weights[q] * jac * pv(a, q);
        const int col = c * nl + dofs.cell_velocity_size() + a;
        trip.emplace_back(mrow, col, integral);
        trip.emplace_back(col, mrow, integral);
      }
    }
  }
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  return out;
}

State solve_monolithic(const Problem& problem, const State& frozen, StepKind step) {
  const bool mean = problem.pressure.kind == PressureConstraint::Kind::mean_value;
  Monolithic sys = assemble_monolithic(problem.mesh, problem.dofs, problem.tables, problem.physics, frozen, step,
                                       mean);
  const int n = sys.size();
  if (mean) sys.rhs[n - 1] = problem.pressure.value;
  std::vector<char> fixed(n, 0);
  std::vector<double> value(n, 0.0);
  for (int g = 0; g < sys.facet_size; ++g) {
    if (problem.constraints.fixed[g]) {
      fixed[sys.cell_size + g] = 1;
      value[sys.cell_size + g] = problem.constraints.value[g];
    }
  }
  if (problem.pressure.kind == PressureConstraint::Kind::pin) {
    fixed[sys.cell_size + problem.pressure.pin_dof] = 1;
    value[sys.cell_size + problem.pressure.pin_dof] = problem.pressure.value;
  }
  // Identity rows for fixed unknowns; their columns stay (values are known
  // and enter through the identity rows).
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < n; ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, col); it; ++it) {
      if (!fixed[it.row()]) trip.emplace_back(static_cast<int>(it.row()), col, it.value());
    }
  }
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      trip.emplace_back(i, i, 1.0);
      sys.rhs[i] = value[i];
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve_monolithic: factorization failed");
  const Eigen::VectorXd x = lu.solve(sys.rhs);
  const double t = step.transient ? frozen.t + problem.physics.params.dt : frozen.t;
  return unstack(problem.dofs, x.head(sys.cell_size + sys.facet_size), t);
}

}  // namespace hybridns::testing
