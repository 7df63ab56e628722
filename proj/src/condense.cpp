#include "hybridns/condense.hpp"

#include "hybridns/error.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace hybridns {

CellCondensation condense(const LocalSystem& local, int cell) {
  DenseLU lu;
  try {
    lu.compute(local.ll);
  } catch (const SingularMatrix& e) {
    throw CondensationError("condense: singular cell block on cell " + std::to_string(cell) + " (" +
                                e.what() + ")",
                            cell);
  }
  CellCondensation out;
  out.x = lu.solve(local.lg);
  out.y = lu.solve(local.rhs_l);
  out.schur = local.gg - local.gl * out.x;
  out.rhs = local.rhs_g - local.gl * out.y;
  return out;
}

Eigen::VectorXd recover(const CellCondensation& cond, const Eigen::VectorXd& facet_local) {
  return cond.y - cond.x * facet_local;
}

void augment_mean_pressure(LocalSystem& local, const LocalLayout& layout,
                           const Eigen::VectorXd& pressure_integrals, double rhs_share) {
  const int ng = static_cast<int>(local.gg.rows());
  local.lg.conservativeResize(Eigen::NoChange, ng + 1);
  local.lg.col(ng).setZero();
  local.lg.col(ng).segment(layout.nu, layout.np) = pressure_integrals;
  local.gl.conservativeResize(ng + 1, Eigen::NoChange);
  local.gl.row(ng).setZero();
  local.gl.row(ng).segment(layout.nu, layout.np) = pressure_integrals.transpose();
  local.gg.conservativeResize(ng + 1, ng + 1);
  local.gg.row(ng).setZero();
  local.gg.col(ng).setZero();
  local.rhs_g.conservativeResize(ng + 1);
  local.rhs_g[ng] = rhs_share;
}

Eigen::VectorXd pressure_basis_integrals(const Mesh& mesh, const ReferenceTables& tables, int c) {
  const double jac = 2.0 * mesh.signed_area(c);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(tables.p_val.rows());
  for (int q = 0; q < tables.cell_rule.size(); ++q) out += tables.cell_rule.weights[q] * jac * tables.p_val.col(q);
  return out;
}

double mesh_area(const Mesh& mesh) {
  double a = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) a += mesh.signed_area(c);
  return a;
}

Eigen::VectorXd CondensedSystem::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(reduced_index.size()));
  for (std::size_t i = 0; i < reduced_index.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = reduced_index[i] >= 0 ? reduced[reduced_index[i]] : fixed_value[i];
  }
  return out;
}

namespace {

struct Scatter {
  const CondensedSystem& sys;
  std::vector<Triplet>& triplets;
  Eigen::VectorXd& rhs;

  void add(const std::vector<int>& ids, const CellCondensation& cc) const {
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      const int ri = sys.reduced_index[ids[i]];
      if (ri < 0) continue;
      rhs[ri] += cc.rhs[i];
      for (int j = 0; j < n; ++j) {
        const int rj = sys.reduced_index[ids[j]];
        if (rj >= 0) {
          triplets.push_back({ri, rj, cc.schur(i, j)});
        } else {
          rhs[ri] -= cc.schur(i, j) * sys.fixed_value[ids[j]];
        }
      }
    }
  }
};

}  // namespace

CondensedSystem assemble_condensed(const AssemblyInput& in, Execution exec) {
  const Mesh& mesh = in.mesh;
  const DofMap& dofs = in.dofs;
  const int nc = mesh.num_cells();
  const int nf = dofs.num_facet_dofs();
  if (static_cast<int>(in.constraints.fixed.size()) != nf) {
    throw InvalidArgument("assemble_condensed: constraint vector does not match the facet dofs");
  }
  in.physics.params.validate();

  CondensedSystem sys;
  sys.has_multiplier = in.pressure.kind == PressureConstraint::Kind::mean_value;
  const int next = nf + (sys.has_multiplier ? 1 : 0);
  std::vector<char> fixed(in.constraints.fixed.begin(), in.constraints.fixed.end());
  sys.fixed_value.assign(in.constraints.value.begin(), in.constraints.value.end());
  fixed.resize(next, 0);
  sys.fixed_value.resize(next, 0.0);
  if (in.pressure.kind == PressureConstraint::Kind::pin) {
    if (in.pressure.pin_dof < dofs.facet_pressure_offset() || in.pressure.pin_dof >= nf) {
      throw InvalidArgument("assemble_condensed: pinned dof is not a facet pressure dof");
    }
    fixed[in.pressure.pin_dof] = 1;
    sys.fixed_value[in.pressure.pin_dof] = in.pressure.value;
  }
  sys.reduced_index.assign(next, -1);
  int nfree = 0;
  for (int i = 0; i < next; ++i) {
    if (!fixed[i]) sys.reduced_index[i] = nfree++;
  }

  const LocalLayout layout(dofs);
  const double area = sys.has_multiplier ? mesh_area(mesh) : 1.0;
  const auto local_system = [&](int c) {
    LocalSystem ls = cell_tensors(mesh, dofs, in.tables, c, LocalState::from(in.frozen, dofs, c),
                                  in.physics, in.step);
    if (sys.has_multiplier) {
      augment_mean_pressure(ls, layout, pressure_basis_integrals(mesh, in.tables, c),
                            in.pressure.value * mesh.signed_area(c) / area);
    }
    return condense(ls, c);
  };
  const auto cell_ids = [&](int c) {
    const auto span = dofs.cell_facet_dofs(c);
    std::vector<int> ids(span.begin(), span.end());
    if (sys.has_multiplier) ids.push_back(nf);
    return ids;
  };

  std::vector<Triplet> triplets;
  const std::size_t ng = static_cast<std::size_t>(layout.ng() + (sys.has_multiplier ? 1 : 0));
  triplets.reserve(static_cast<std::size_t>(nc) * ng * ng);
  sys.rhs = Eigen::VectorXd::Zero(nfree);
  const Scatter scatter{sys, triplets, sys.rhs};
  sys.cells.resize(nc);

  if (exec == Execution::serial) {
    for (int c = 0; c < nc; ++c) {
      sys.cells[c] = local_system(c);
      scatter.add(cell_ids(c), sys.cells[c]);
    }
  } else {
    std::vector<std::exception_ptr> errors(nc);
#pragma omp parallel for schedule(dynamic, 16)
    for (int c = 0; c < nc; ++c) {
      try {
        sys.cells[c] = local_system(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
    for (int c = 0; c < nc; ++c) {
      if (errors[c]) std::rethrow_exception(errors[c]);
    }
    for (int c = 0; c < nc; ++c) scatter.add(cell_ids(c), sys.cells[c]);
  }

  sys.matrix = SparseMatrix::from_triplets(nfree, nfree, triplets);
  return sys;
}

State recover_state(const CondensedSystem& sys, const DofMap& dofs, const Eigen::VectorXd& facet_ext,
                    double t) {
  State s = State::zero(dofs, t);
  const int nf = dofs.num_facet_dofs();
  s.set_facet_vector(dofs, facet_ext.head(nf));
  const int nu = dofs.cell_velocity_size();
  const int np = dofs.cell_pressure_size();
  for (int c = 0; c < dofs.num_cells(); ++c) {
    Eigen::VectorXd g = s.facet_local(dofs, c);
    if (sys.has_multiplier) {
      g.conservativeResize(g.size() + 1);
      g[g.size() - 1] = facet_ext[nf];
    }
    const Eigen::VectorXd local = recover(sys.cells[c], g);
    s.u.segment(static_cast<Eigen::Index>(c) * nu, nu) = local.head(nu);
    s.p.segment(static_cast<Eigen::Index>(c) * np, np) = local.tail(np);
  }
  return s;
}

}  // namespace hybridns
