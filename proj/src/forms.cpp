#include "hybridns/forms.hpp"

#include "hybridns/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace hybridns {

void Params::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidArgument("Params: " + what); };
  if (!(nu >= 0.0)) fail("nu must be >= 0");
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  if (!(beta >= 0.0)) fail("beta must be >= 0");
  if (!(chi >= 0.0 && chi <= 1.0)) fail("chi must lie in [0, 1]");
  if (!(theta >= 0.0 && theta <= 1.0)) fail("theta must lie in [0, 1]");
  if (!(dt > 0.0)) fail("dt must be > 0");
}

Vec2 mass_flux(const Vec2& u, double p, double pbar, const Vec2& n, double h, const Params& params) {
  return u - stabilization_coefficient(h, params) * (pbar - p) * n;
}

Mat2 advective_flux(const Vec2& u, const Vec2& ubar, const Vec2& uhat, int lambda) {
  return u * uhat.transpose() + static_cast<double>(lambda) * (ubar - u) * uhat.transpose();
}

Mat2 diffusive_flux(const Mat2& grad_u, const Vec2& u, const Vec2& ubar, double pbar, const Vec2& n,
                    double h, const Params& params) {
  const Mat2 sym = 0.5 * (grad_u + grad_u.transpose());
  return pbar * Mat2::Identity() - 2.0 * params.nu * sym -
         (params.alpha / h) * 2.0 * params.nu * (ubar - u) * n.transpose();
}

Mat2 momentum_flux(const Mat2& grad_u, const Vec2& u, double p, const Params& params) {
  const Mat2 sym = 0.5 * (grad_u + grad_u.transpose());
  return p * Mat2::Identity() - 2.0 * params.nu * sym + u * u.transpose();
}

// ---------------------------------------------------------------------------

Forcing Forcing::analytic(Analytic f) {
  Forcing out;
  out.analytic_ = std::move(f);
  return out;
}

Forcing Forcing::vertex_values(std::vector<Vec2> values) {
  Forcing out;
  out.vertex_ = std::move(values);
  return out;
}

Vec2 Forcing::eval(const Mesh& mesh, int c, const Vec2& xi, const Vec2& x, double t) const {
  if (analytic_) return analytic_(x, t);
  if (vertex_.empty()) return Vec2::Zero();
  const auto& cv = mesh.cell(c);
  return (1.0 - xi.x() - xi.y()) * vertex_[cv[0]] + xi.x() * vertex_[cv[1]] + xi.y() * vertex_[cv[2]];
}

// ---------------------------------------------------------------------------

ReferenceTables::ReferenceTables(const DofMap& dofs) {
  const SpaceSpec& s = dofs.spec();
  degree_ = std::min(kMaxQuadratureDegree, 3 * std::max({s.k, s.m, s.kbar, s.mbar}) + 1);

  cell_rule = make_quadrature(RefElement::triangle, degree_);
  u_val = dofs.velocity_basis().tabulate(cell_rule.points);
  std::tie(u_dx, u_dy) = dofs.velocity_basis().tabulate_grad(cell_rule.points);
  p_val = dofs.pressure_basis().tabulate(cell_rule.points);

  facet_rule = make_quadrature(RefElement::interval, degree_);
  ubar_val = dofs.facet_velocity_basis().tabulate(facet_rule.points);
  pbar_val = dofs.facet_pressure_basis().tabulate(facet_rule.points);

  traces_.resize(6);
  for (int lf = 0; lf < 3; ++lf) {
    for (int aligned = 0; aligned < 2; ++aligned) {
      Trace& tr = traces_[2 * lf + aligned];
      for (const Vec2& s_pt : facet_rule.points) tr.points.push_back(trace_point(lf, aligned != 0, s_pt.x()));
      tr.u_val = dofs.velocity_basis().tabulate(tr.points);
      std::tie(tr.u_dx, tr.u_dy) = dofs.velocity_basis().tabulate_grad(tr.points);
      tr.p_val = dofs.pressure_basis().tabulate(tr.points);
    }
  }
}

CellGeometry::CellGeometry(const Mesh& mesh, int c) {
  const auto& cv = mesh.cell(c);
  x0 = mesh.vertex(cv[0]);
  jacobian.col(0) = mesh.vertex(cv[1]) - x0;
  jacobian.col(1) = mesh.vertex(cv[2]) - x0;
  det = jacobian.determinant();
  inv_jt = jacobian.inverse().transpose();
}

LocalLayout::LocalLayout(const DofMap& dofs)
    : nu(dofs.cell_velocity_size()),
      np(dofs.cell_pressure_size()),
      nub(2 * dofs.facet_velocity_space().nodes_per_cell()),
      npb(dofs.facet_pressure_space().nodes_per_cell()) {}

LocalState LocalState::from(const State& s, const DofMap& dofs, int c) {
  return {s.cell_local(dofs, c), s.facet_local(dofs, c), s.t};
}

Eigen::VectorXd LocalState::stacked() const {
  Eigen::VectorXd x(cell.size() + facet.size());
  x << cell, facet;
  return x;
}

// ---------------------------------------------------------------------------

CellOperator cell_operator(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables,
                           int c, const LocalState& frozen, const Physics& physics, double t_eval) {
  const Params& prm = physics.params;
  const bool advect = physics.model == FlowModel::navier_stokes;
  const LocalLayout L(dofs);
  const int nk = L.nu / 2;
  const int nm = L.np;
  const int nl = L.nl();
  const int n = L.size();
  const double nu = prm.nu;
  const double chi = prm.chi;

  const auto iu = [](int a, int comp) { return 2 * a + comp; };
  const auto ip = [&](int b) { return L.nu + b; };
  const auto iub = [&](int j, int comp) { return nl + 2 * j + comp; };
  const auto ipb = [&](int j) { return nl + L.nub + j; };

  CellOperator op;
  op.mass = Eigen::MatrixXd::Zero(n, n);
  op.momentum = Eigen::MatrixXd::Zero(n, n);
  op.continuity = Eigen::MatrixXd::Zero(n, n);
  op.load = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd& M = op.mass;
  Eigen::MatrixXd& A = op.momentum;
  Eigen::MatrixXd& C = op.continuity;
  Eigen::VectorXd& b = op.load;

  const CellGeometry geo(mesh, c);
  const double jac = std::abs(geo.det);
  Eigen::MatrixX2d grad(nk, 2);

  // Cell integrals.
  for (int q = 0; q < tables.cell_rule.size(); ++q) {
    const double w = tables.cell_rule.weights[q] * jac;
    const auto phi = tables.u_val.col(q);
    const auto phip = tables.p_val.col(q);
    for (int a = 0; a < nk; ++a) {
      grad.row(a) = (geo.inv_jt * Vec2(tables.u_dx(a, q), tables.u_dy(a, q))).transpose();
    }
    Vec2 wq = Vec2::Zero();
    for (int a = 0; a < nk; ++a) wq += phi[a] * Vec2(frozen.cell[iu(a, 0)], frozen.cell[iu(a, 1)]);
    const Vec2& xi = tables.cell_rule.points[q];
    const Vec2 f = physics.forcing.eval(mesh, c, xi, geo.map(xi), t_eval);

    for (int a = 0; a < nk; ++a) {
      const Vec2 ga = grad.row(a).transpose();
      const double wga = wq.dot(ga);
      for (int cc = 0; cc < 2; ++cc) b[iu(a, cc)] += w * f[cc] * phi[a];
      for (int bb = 0; bb < nk; ++bb) {
        const Vec2 gb = grad.row(bb).transpose();
        const double mass = w * phi[a] * phi[bb];
        double adv = 0.0;
        if (advect) adv = -chi * phi[bb] * wga + (1.0 - chi) * wq.dot(gb) * phi[a];
        const double lap = ga.dot(gb);
        for (int cc = 0; cc < 2; ++cc) {
          M(iu(a, cc), iu(bb, cc)) += mass;
          A(iu(a, cc), iu(bb, cc)) += w * (adv + nu * lap);
          for (int d = 0; d < 2; ++d) A(iu(a, cc), iu(bb, d)) += w * nu * gb[cc] * ga[d];
        }
      }
      for (int bb = 0; bb < nm; ++bb) {
        for (int cc = 0; cc < 2; ++cc) {
          A(iu(a, cc), ip(bb)) -= w * phip[bb] * ga[cc];
          C(ip(bb), iu(a, cc)) -= w * phip[bb] * ga[cc];
        }
      }
    }
  }
  // The q rows hold -q div(u), which equals u . grad q - oint q u.n; the
  // facet part of the q rows below only carries the stabilization of uhat.

  // Facet integrals.
  const int nfq = tables.facet_rule.size();
  const int nub_nodes = tables.ubar_val.rows();
  const int npb_nodes = tables.pbar_val.rows();
  std::vector<Vec2> eps_a(2 * nk);  // eps_a[2a + comp] = sym(grad(phi_a e_comp)) n
  for (int lf = 0; lf < 3; ++lf) {
    const int f = mesh.cell_facets(c)[lf];
    const auto& tr = tables.trace(lf, mesh.facet_aligned(c, lf));
    const auto upos = dofs.facet_velocity_positions(c, lf);
    const auto ppos = dofs.facet_pressure_positions(c, lf);
    const Vec2 nrm = mesh.outward_normal(c, lf);
    const double h = mesh.facet_size(f);
    const double gamma = stabilization_coefficient(h, prm);
    const double pen = prm.alpha / h * 2.0 * nu;
    const double length = mesh.facet_length(f);
    const BoundaryTag tag = mesh.boundary_tag(f);
    const auto& fv = mesh.facet(f);

    for (int q = 0; q < nfq; ++q) {
      const double w = tables.facet_rule.weights[q] * length;
      const auto phi = tr.u_val.col(q);
      const auto phip = tr.p_val.col(q);
      const auto psi = tables.ubar_val.col(q);
      const auto psip = tables.pbar_val.col(q);
      for (int a = 0; a < nk; ++a) {
        grad.row(a) = (geo.inv_jt * Vec2(tr.u_dx(a, q), tr.u_dy(a, q))).transpose();
      }
      for (int a = 0; a < nk; ++a) {
        const Vec2 ga = grad.row(a).transpose();
        const double gn = ga.dot(nrm);
        for (int cc = 0; cc < 2; ++cc) {
          Vec2 e;
          for (int i = 0; i < 2; ++i) e[i] = 0.5 * ((i == cc ? gn : 0.0) + ga[i] * nrm[cc]);
          eps_a[iu(a, cc)] = e;
        }
      }

      double uhat_n = 0.0;
      int lam = 0;
      double ubar_n_n = 0.0;
      if (advect) {
        Vec2 un = Vec2::Zero();
        for (int a = 0; a < nk; ++a) un += phi[a] * Vec2(frozen.cell[iu(a, 0)], frozen.cell[iu(a, 1)]);
        double pn = 0.0;
        for (int a = 0; a < nm; ++a) pn += phip[a] * frozen.cell[ip(a)];
        Vec2 ubn = Vec2::Zero();
        for (int t = 0; t < nub_nodes; ++t) {
          ubn += psi[t] * Vec2(frozen.facet[2 * upos[t]], frozen.facet[2 * upos[t] + 1]);
        }
        double pbn = 0.0;
        for (int t = 0; t < npb_nodes; ++t) pbn += psip[t] * frozen.facet[L.nub + ppos[t]];
        uhat_n = mass_flux(un, pn, pbn, nrm, h, prm).dot(nrm);
        lam = upwind_switch(uhat_n);
        ubar_n_n = ubn.dot(nrm);
      }

      // v rows.
      for (int a = 0; a < nk; ++a) {
        for (int cc = 0; cc < 2; ++cc) {
          const int row = iu(a, cc);
          const Vec2& ea = eps_a[row];
          for (int bb = 0; bb < nk; ++bb) {
            for (int d = 0; d < 2; ++d) {
              double v = -2.0 * nu * eps_a[iu(bb, d)][cc] * phi[a] - 2.0 * nu * phi[bb] * ea[d];
              if (cc == d) v += ((chi - lam) * uhat_n + pen) * phi[a] * phi[bb];
              A(row, iu(bb, d)) += w * v;
            }
          }
          for (int t = 0; t < nub_nodes; ++t) {
            for (int d = 0; d < 2; ++d) {
              double v = 2.0 * nu * psi[t] * ea[d];
              if (cc == d) v += (lam * uhat_n - pen) * phi[a] * psi[t];
              A(row, iub(upos[t], d)) += w * v;
            }
          }
          for (int t = 0; t < npb_nodes; ++t) A(row, ipb(ppos[t])) += w * psip[t] * nrm[cc] * phi[a];
        }
      }

      // vbar rows, stored negated.
      for (int s = 0; s < nub_nodes; ++s) {
        for (int cc = 0; cc < 2; ++cc) {
          const int row = iub(upos[s], cc);
          for (int bb = 0; bb < nk; ++bb) {
            for (int d = 0; d < 2; ++d) {
              double v = -2.0 * nu * eps_a[iu(bb, d)][cc] * psi[s];
              if (cc == d) v += (uhat_n * (1 - lam) + pen) * psi[s] * phi[bb];
              A(row, iu(bb, d)) -= w * v;
            }
          }
          for (int t = 0; t < nub_nodes; ++t) {
            A(row, iub(upos[t], cc)) -= w * ((lam - (1.0 - chi)) * uhat_n - pen) * psi[s] * psi[t];
          }
          for (int t = 0; t < npb_nodes; ++t) A(row, ipb(ppos[t])) -= w * psip[t] * nrm[cc] * psi[s];
        }
      }

      // q rows: the stabilization part of -oint uhat.n q.
      for (int a = 0; a < nm; ++a) {
        for (int bb = 0; bb < nm; ++bb) C(ip(a), ip(bb)) -= w * gamma * phip[a] * phip[bb];
        for (int t = 0; t < npb_nodes; ++t) C(ip(a), ipb(ppos[t])) += w * gamma * phip[a] * psip[t];
      }

      // qbar rows: oint uhat.n qbar - oint ubar.n qbar (the latter cancels on
      // interior facets and leaves the domain-boundary integral).
      for (int s = 0; s < npb_nodes; ++s) {
        const int row = ipb(ppos[s]);
        for (int bb = 0; bb < nk; ++bb) {
          for (int d = 0; d < 2; ++d) C(row, iu(bb, d)) += w * psip[s] * nrm[d] * phi[bb];
        }
        for (int t = 0; t < nub_nodes; ++t) {
          for (int d = 0; d < 2; ++d) C(row, iub(upos[t], d)) -= w * psip[s] * nrm[d] * psi[t];
        }
        for (int bb = 0; bb < nm; ++bb) C(row, ip(bb)) += w * gamma * psip[s] * phip[bb];
        for (int t = 0; t < npb_nodes; ++t) C(row, ipb(ppos[t])) -= w * gamma * psip[s] * psip[t];
      }

      if (tag == BoundaryTag::neumann) {
        const Vec2 x = (1.0 - tables.facet_rule.points[q].x()) * mesh.vertex(fv[0]) +
                       tables.facet_rule.points[q].x() * mesh.vertex(fv[1]);
        const Vec2 hval = physics.traction ? physics.traction(x, nrm, t_eval) : Vec2::Zero();
        const int lam_b = upwind_switch(ubar_n_n);
        for (int s = 0; s < nub_nodes; ++s) {
          for (int cc = 0; cc < 2; ++cc) {
            const int row = iub(upos[s], cc);
            b[row] -= w * hval[cc] * psi[s];
            if (!advect) continue;
            for (int t = 0; t < nub_nodes; ++t) {
              A(row, iub(upos[t], cc)) += w * (chi - lam_b) * ubar_n_n * psi[s] * psi[t];
            }
          }
        }
      }
    }
  }
  return op;
}

LocalSystem make_local_system(const CellOperator& op, const LocalLayout& layout,
                              const LocalState& state_n, const Params& params, StepKind step) {
  const double theta = step.theta(params);
  Eigen::MatrixXd K = theta * op.momentum + op.continuity;
  Eigen::VectorXd r = op.load;
  if (step.transient) {
    const Eigen::VectorXd xn = state_n.stacked();
    K += op.mass / params.dt;
    r += op.mass * xn / params.dt;
    if (theta != 1.0) r -= (1.0 - theta) * (op.momentum * xn);
  }
  const int nl = layout.nl();
  const int ng = layout.ng();
  LocalSystem ls;
  ls.ll = K.topLeftCorner(nl, nl);
  ls.lg = K.topRightCorner(nl, ng);
  ls.gl = K.bottomLeftCorner(ng, nl);
  ls.gg = K.bottomRightCorner(ng, ng);
  ls.rhs_l = r.head(nl);
  ls.rhs_g = r.tail(ng);
  return ls;
}

LocalSystem cell_tensors(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables, int c,
                         const LocalState& frozen, const Physics& physics, StepKind step) {
  const double t_eval = step.eval_time(physics.params, frozen.t);
  const CellOperator op = cell_operator(mesh, dofs, tables, c, frozen, physics, t_eval);
  return make_local_system(op, LocalLayout(dofs), frozen, physics.params, step);
}

}  // namespace hybridns
