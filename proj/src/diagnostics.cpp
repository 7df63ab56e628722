#include "hybridns/diagnostics.hpp"

#include "hybridns/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace hybridns {

namespace {

Vec2 velocity_at(const Eigen::Ref<const Eigen::VectorXd>& phi, const State& s, Eigen::Index offset) {
  Vec2 u = Vec2::Zero();
  for (Eigen::Index a = 0; a < phi.size(); ++a) u += phi[a] * Vec2(s.u[offset + 2 * a], s.u[offset + 2 * a + 1]);
  return u;
}

double pressure_at(const Eigen::Ref<const Eigen::VectorXd>& phi, const State& s, Eigen::Index offset) {
  return phi.dot(s.p.segment(offset, phi.size()));
}

Mat2 gradient_at(const Mat2& inv_jt, const Eigen::Ref<const Eigen::VectorXd>& dx,
                 const Eigen::Ref<const Eigen::VectorXd>& dy, const State& s, Eigen::Index offset) {
  Mat2 g = Mat2::Zero();
  for (Eigen::Index a = 0; a < dx.size(); ++a) {
    const Vec2 ga = inv_jt * Vec2(dx[a], dy[a]);
    g.row(0) += s.u[offset + 2 * a] * ga.transpose();
    g.row(1) += s.u[offset + 2 * a + 1] * ga.transpose();
  }
  return g;
}

Eigen::Index u_offset(const DofMap& dofs, int c) { return static_cast<Eigen::Index>(c) * dofs.cell_velocity_size(); }
Eigen::Index p_offset(const DofMap& dofs, int c) { return static_cast<Eigen::Index>(c) * dofs.cell_pressure_size(); }

// Facet values of ubar and pbar at one facet quadrature point.
Vec2 facet_velocity_at(const DofMap& dofs, const State& s, const Mesh& mesh, int f,
                       const Eigen::Ref<const Eigen::VectorXd>& psi) {
  const auto& space = dofs.facet_velocity_space();
  Vec2 u = Vec2::Zero();
  for (int t = 0; t < psi.size(); ++t) {
    const int node = space.facet_node(mesh, f, t);
    u += psi[t] * Vec2(s.ubar[2 * node], s.ubar[2 * node + 1]);
  }
  return u;
}

double facet_pressure_at(const DofMap& dofs, const State& s, const Mesh& mesh, int f,
                         const Eigen::Ref<const Eigen::VectorXd>& psi) {
  const auto& space = dofs.facet_pressure_space();
  double p = 0.0;
  for (int t = 0; t < psi.size(); ++t) p += psi[t] * s.pbar[space.facet_node(mesh, f, t)];
  return p;
}

State blend(const State& a, const State& b, double theta) {
  State s;
  s.u = (1.0 - theta) * a.u + theta * b.u;
  s.p = (1.0 - theta) * a.p + theta * b.p;
  s.ubar = (1.0 - theta) * a.ubar + theta * b.ubar;
  s.pbar = (1.0 - theta) * a.pbar + theta * b.pbar;
  s.t = (1.0 - theta) * a.t + theta * b.t;
  return s;
}

struct CellQuadrature {
  QuadratureRule rule;
  Eigen::MatrixXd u_val, u_dx, u_dy, p_val;

  CellQuadrature(const DofMap& dofs, int degree)
      : rule(make_quadrature(RefElement::triangle, std::min(degree, kMaxQuadratureDegree))) {
    u_val = dofs.velocity_basis().tabulate(rule.points);
    std::tie(u_dx, u_dy) = dofs.velocity_basis().tabulate_grad(rule.points);
    p_val = dofs.pressure_basis().tabulate(rule.points);
  }
};

}  // namespace

Vec2 eval_velocity(const DofMap& dofs, const State& s, int c, const Vec2& xi) {
  Eigen::VectorXd phi(dofs.velocity_basis().size());
  dofs.velocity_basis().eval(xi, phi);
  return velocity_at(phi, s, u_offset(dofs, c));
}

double eval_pressure(const DofMap& dofs, const State& s, int c, const Vec2& xi) {
  Eigen::VectorXd phi(dofs.pressure_basis().size());
  dofs.pressure_basis().eval(xi, phi);
  return pressure_at(phi, s, p_offset(dofs, c));
}

Mat2 eval_velocity_gradient(const Mesh& mesh, const DofMap& dofs, const State& s, int c, const Vec2& xi) {
  Eigen::MatrixX2d g(dofs.velocity_basis().size(), 2);
  dofs.velocity_basis().eval_grad(xi, g);
  const CellGeometry geo(mesh, c);
  return gradient_at(geo.inv_jt, g.col(0), g.col(1), s, u_offset(dofs, c));
}

double l2_error_velocity(const Mesh& mesh, const DofMap& dofs, const State& s, const VectorFunction& exact,
                         int degree) {
  const CellQuadrature cq(dofs, degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    const double jac = std::abs(geo.det);
    for (int q = 0; q < cq.rule.size(); ++q) {
      const Vec2 e = velocity_at(cq.u_val.col(q), s, u_offset(dofs, c)) - exact(geo.map(cq.rule.points[q]));
      sum += cq.rule.weights[q] * jac * e.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double l2_error_pressure(const Mesh& mesh, const DofMap& dofs, const State& s, const ScalarFunction& exact,
                         int degree, bool mean_adjusted) {
  const CellQuadrature cq(dofs, degree);
  double sum = 0.0, sum_e = 0.0, area = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    const double jac = std::abs(geo.det);
    for (int q = 0; q < cq.rule.size(); ++q) {
      const double e = pressure_at(cq.p_val.col(q), s, p_offset(dofs, c)) - exact(geo.map(cq.rule.points[q]));
      const double w = cq.rule.weights[q] * jac;
      sum += w * e * e;
      sum_e += w * e;
      area += w;
    }
  }
  if (mean_adjusted) sum -= sum_e * sum_e / area;
  return std::sqrt(std::max(sum, 0.0));
}

double velocity_l2_norm(const Mesh& mesh, const DofMap& dofs, const State& s) {
  return std::sqrt(kinetic_energy(mesh, dofs, s));
}

double pressure_integral(const Mesh& mesh, const DofMap& dofs, const State& s) {
  const CellQuadrature cq(dofs, 2 * dofs.spec().m);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double jac = 2.0 * mesh.signed_area(c);
    for (int q = 0; q < cq.rule.size(); ++q) {
      sum += cq.rule.weights[q] * jac * pressure_at(cq.p_val.col(q), s, p_offset(dofs, c));
    }
  }
  return sum;
}

double divergence_error(const Mesh& mesh, const DofMap& dofs, const State& s) {
  const CellQuadrature cq(dofs, 2 * dofs.spec().k);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    const double jac = std::abs(geo.det);
    for (int q = 0; q < cq.rule.size(); ++q) {
      const Mat2 g = gradient_at(geo.inv_jt, cq.u_dx.col(q), cq.u_dy.col(q), s, u_offset(dofs, c));
      sum += cq.rule.weights[q] * jac * g.trace() * g.trace();
    }
  }
  return std::sqrt(sum);
}

double kinetic_energy(const Mesh& mesh, const DofMap& dofs, const State& s) {
  const CellQuadrature cq(dofs, 2 * dofs.spec().k);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double jac = 2.0 * mesh.signed_area(c);
    for (int q = 0; q < cq.rule.size(); ++q) {
      sum += cq.rule.weights[q] * jac * velocity_at(cq.u_val.col(q), s, u_offset(dofs, c)).squaredNorm();
    }
  }
  return sum;
}

double boundary_mass_flux(const Mesh& mesh, const DofMap& dofs, const State& s) {
  const QuadratureRule rule = make_quadrature(RefElement::interval, dofs.spec().kbar + 1);
  const Eigen::MatrixXd psi = dofs.facet_velocity_basis().tabulate(rule.points);
  double sum = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.is_boundary(f)) continue;
    const auto& side = mesh.facet_sides(f)[0];
    const Vec2 n = mesh.outward_normal(side.cell, side.local_facet);
    const double len = mesh.facet_length(f);
    for (int q = 0; q < rule.size(); ++q) {
      sum += rule.weights[q] * len * facet_velocity_at(dofs, s, mesh, f, psi.col(q)).dot(n);
    }
  }
  return sum;
}

std::vector<double> local_mass_residual(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables,
                                        const State& s, const Params& params) {
  std::vector<double> out(mesh.num_cells(), 0.0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int lf = 0; lf < 3; ++lf) {
      const int f = mesh.cell_facets(c)[lf];
      const auto& tr = tables.trace(lf, mesh.facet_aligned(c, lf));
      const Vec2 n = mesh.outward_normal(c, lf);
      const double h = mesh.facet_size(f);
      const double len = mesh.facet_length(f);
      for (int q = 0; q < tables.facet_rule.size(); ++q) {
        const Vec2 u = velocity_at(tr.u_val.col(q), s, u_offset(dofs, c));
        const double p = pressure_at(tr.p_val.col(q), s, p_offset(dofs, c));
        const double pb = facet_pressure_at(dofs, s, mesh, f, tables.pbar_val.col(q));
        out[c] += tables.facet_rule.weights[q] * len * mass_flux(u, p, pb, n, h, params).dot(n);
      }
    }
  }
  return out;
}

std::vector<Vec2> local_momentum_residual(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables,
                                          const State& state_n, const State& state_np1,
                                          const Physics& physics, StepKind step) {
  const Params& prm = physics.params;
  const double theta = step.theta(prm);
  const double t_eval = step.eval_time(prm, state_n.t);
  const bool advect = physics.model == FlowModel::navier_stokes;
  const State mid = blend(state_n, state_np1, theta);
  std::vector<Vec2> out(mesh.num_cells(), Vec2::Zero());

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    const double jac = std::abs(geo.det);
    Vec2 r = Vec2::Zero();
    for (int q = 0; q < tables.cell_rule.size(); ++q) {
      const double w = tables.cell_rule.weights[q] * jac;
      const Vec2& xi = tables.cell_rule.points[q];
      if (step.transient) {
        const Vec2 du = velocity_at(tables.u_val.col(q), state_np1, u_offset(dofs, c)) -
                        velocity_at(tables.u_val.col(q), state_n, u_offset(dofs, c));
        r += w * du / prm.dt;
      }
      r -= w * physics.forcing.eval(mesh, c, xi, geo.map(xi), t_eval);
    }
    for (int lf = 0; lf < 3; ++lf) {
      const int f = mesh.cell_facets(c)[lf];
      const auto& tr = tables.trace(lf, mesh.facet_aligned(c, lf));
      const Vec2 n = mesh.outward_normal(c, lf);
      const double h = mesh.facet_size(f);
      const double len = mesh.facet_length(f);
      for (int q = 0; q < tables.facet_rule.size(); ++q) {
        const double w = tables.facet_rule.weights[q] * len;
        const auto psi = tables.ubar_val.col(q);
        const auto psip = tables.pbar_val.col(q);
        const Vec2 u = velocity_at(tr.u_val.col(q), mid, u_offset(dofs, c));
        const Mat2 g = gradient_at(geo.inv_jt, tr.u_dx.col(q), tr.u_dy.col(q), mid, u_offset(dofs, c));
        const Vec2 ub = facet_velocity_at(dofs, mid, mesh, f, psi);
        const double pb = facet_pressure_at(dofs, mid, mesh, f, psip);
        Mat2 sigma = diffusive_flux(g, u, ub, pb, n, h, prm);
        if (advect) {
          const Vec2 uhat_n = mass_flux(velocity_at(tr.u_val.col(q), state_n, u_offset(dofs, c)),
                                        pressure_at(tr.p_val.col(q), state_n, p_offset(dofs, c)),
                                        facet_pressure_at(dofs, state_n, mesh, f, psip), n, h, prm);
          sigma += advective_flux(u, ub, uhat_n, upwind_switch(uhat_n.dot(n)));
        }
        r += w * sigma * n;
      }
    }
    out[c] = r;
  }
  return out;
}

EnergyBudget energy_budget(const Mesh& mesh, const DofMap& dofs, const ReferenceTables& tables,
                           const State& state_n, const State& state_np1, const Params& prm, StepKind step) {
  const double theta = step.theta(prm);
  const State mid = blend(state_n, state_np1, theta);
  EnergyBudget b;
  if (step.transient) {
    State diff = state_np1;
    diff.u -= state_n.u;
    b.kinetic = (0.5 * kinetic_energy(mesh, dofs, state_np1) - 0.5 * kinetic_energy(mesh, dofs, state_n) +
                 (theta - 0.5) * kinetic_energy(mesh, dofs, diff)) /
                prm.dt;
  }
  const double nu = prm.nu;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo(mesh, c);
    const double jac = std::abs(geo.det);
    for (int q = 0; q < tables.cell_rule.size(); ++q) {
      const Mat2 g = gradient_at(geo.inv_jt, tables.u_dx.col(q), tables.u_dy.col(q), mid, u_offset(dofs, c));
      const Mat2 sym = 0.5 * (g + g.transpose());
      b.viscous += tables.cell_rule.weights[q] * jac * 2.0 * nu * sym.squaredNorm();
    }
    for (int lf = 0; lf < 3; ++lf) {
      const int f = mesh.cell_facets(c)[lf];
      const auto& tr = tables.trace(lf, mesh.facet_aligned(c, lf));
      const Vec2 n = mesh.outward_normal(c, lf);
      const double h = mesh.facet_size(f);
      const double len = mesh.facet_length(f);
      const double gamma = stabilization_coefficient(h, prm);
      for (int q = 0; q < tables.facet_rule.size(); ++q) {
        const double w = tables.facet_rule.weights[q] * len;
        const auto psi = tables.ubar_val.col(q);
        const auto psip = tables.pbar_val.col(q);
        const Vec2 u = velocity_at(tr.u_val.col(q), mid, u_offset(dofs, c));
        const double p = pressure_at(tr.p_val.col(q), mid, p_offset(dofs, c));
        const Mat2 g = gradient_at(geo.inv_jt, tr.u_dx.col(q), tr.u_dy.col(q), mid, u_offset(dofs, c));
        const Vec2 jump = facet_velocity_at(dofs, mid, mesh, f, psi) - u;
        const double pjump = facet_pressure_at(dofs, mid, mesh, f, psip) - p;
        const Vec2 uhat_n = mass_flux(velocity_at(tr.u_val.col(q), state_n, u_offset(dofs, c)),
                                      pressure_at(tr.p_val.col(q), state_n, p_offset(dofs, c)),
                                      facet_pressure_at(dofs, state_n, mesh, f, psip), n, h, prm);
        b.upwind += w * 0.5 * std::abs(uhat_n.dot(n)) * jump.squaredNorm();
        b.penalty += w * prm.alpha / h * 2.0 * nu * jump.squaredNorm();
        b.adjoint += w * 2.0 * 2.0 * nu * jump.dot(0.5 * (g + g.transpose()) * n);
        b.stabilization += w * gamma * pjump * pjump;
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------------------

std::vector<ShearSample> sample_wall_shear(const Mesh& mesh, const DofMap& dofs, const State& s, double wall_y,
                                           int per_facet) {
  std::vector<ShearSample> out;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.is_boundary(f)) continue;
    const Vec2& a = mesh.vertex(mesh.facet(f)[0]);
    const Vec2& b = mesh.vertex(mesh.facet(f)[1]);
    if (std::abs(a.y() - wall_y) > 1e-12 || std::abs(b.y() - wall_y) > 1e-12) continue;
    const auto& side = mesh.facet_sides(f)[0];
    const bool aligned = mesh.facet_aligned(side.cell, side.local_facet);
    for (int i = 0; i < per_facet; ++i) {
      const double t = (i + 0.5) / per_facet;
      const Vec2 xi = trace_point(side.local_facet, aligned, t);
      const double shear = eval_velocity_gradient(mesh, dofs, s, side.cell, xi)(0, 1);
      out.push_back({(1.0 - t) * a.x() + t * b.x(), shear, side.cell, t, side.local_facet});
    }
  }
  std::sort(out.begin(), out.end(), [](const ShearSample& l, const ShearSample& r) { return l.x < r.x; });
  return out;
}

namespace {

// Wall shear of one facet side as a function of the global facet parameter.
struct FacetShear {
  const Mesh& mesh;
  const DofMap& dofs;
  const State& s;
  int cell, local_facet;

  [[nodiscard]] Vec2 end(int which) const {
    const int f = mesh.cell_facets(cell)[local_facet];
    return mesh.vertex(mesh.facet(f)[which]);
  }
  [[nodiscard]] double x_at(double t) const { return (1.0 - t) * end(0).x() + t * end(1).x(); }
  [[nodiscard]] double operator()(double t) const {
    const bool aligned = mesh.facet_aligned(cell, local_facet);
    return eval_velocity_gradient(mesh, dofs, s, cell, trace_point(local_facet, aligned, t))(0, 1);
  }
  /// Facet parameter of the facet end lying in direction `dir` (+1: larger x).
  [[nodiscard]] double end_toward(double dir) const { return (end(1).x() - end(0).x()) * dir > 0.0 ? 1.0 : 0.0; }

  /// Bisection for the sign change in [t0, t1]; shear(t0) and shear(t1)
  /// must differ in sign.
  [[nodiscard]] double root(double t0, double t1) const {
    const bool s0 = (*this)(t0) > 0.0;
    for (int it = 0; it < 60; ++it) {
      const double tm = 0.5 * (t0 + t1);
      if (((*this)(tm) > 0.0) == s0) {
        t0 = tm;
      } else {
        t1 = tm;
      }
    }
    return x_at(0.5 * (t0 + t1));
  }
};

// Location of the sign change between two consecutive samples. Within one
// facet the cell polynomial is bisected; across facets the change lies in
// the left facet, in the right facet, or at the shared vertex where the
// broken shear jumps.
double shear_root(const Mesh& mesh, const DofMap& dofs, const State& s, const ShearSample& l,
                  const ShearSample& r) {
  const FacetShear fl{mesh, dofs, s, l.cell, l.local_facet};
  if (l.cell == r.cell && l.local_facet == r.local_facet) return fl.root(l.xi_s, r.xi_s);
  const bool left_positive = l.shear > 0.0;
  const double tl = fl.end_toward(1.0);
  if ((fl(tl) > 0.0) != left_positive) return fl.root(l.xi_s, tl);
  const FacetShear fr{mesh, dofs, s, r.cell, r.local_facet};
  const double tr = fr.end_toward(-1.0);
  if ((fr(tr) > 0.0) == left_positive) return fr.root(tr, r.xi_s);
  return fl.x_at(tl);
}

// Maximal intervals where sign * shear > 0. `closed` marks intervals whose
// right end is a sign change rather than the end of the wall.
struct SignedInterval {
  double a, b;
  bool closed;
};

std::vector<SignedInterval> shear_intervals(const Mesh& mesh, const DofMap& dofs, const State& s,
                                            double wall_y, double sign) {
  const auto samples = sample_wall_shear(mesh, dofs, s, wall_y);
  std::vector<SignedInterval> out;
  if (samples.empty()) return out;
  double x_min = samples.front().x, x_max = samples.back().x;
  for (const auto& p : samples) {
    const FacetShear f{mesh, dofs, s, p.cell, p.local_facet};
    x_min = std::min({x_min, f.end(0).x(), f.end(1).x()});
    x_max = std::max({x_max, f.end(0).x(), f.end(1).x()});
  }
  double start = x_min;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const bool in0 = sign * samples[i].shear > 0.0;
    const bool in1 = sign * samples[i + 1].shear > 0.0;
    if (in0 == in1) continue;
    const double x = shear_root(mesh, dofs, s, samples[i], samples[i + 1]);
    if (in1) {
      start = x;
    } else {
      out.push_back({start, x, true});
    }
  }
  if (sign * samples.back().shear > 0.0) out.push_back({start, x_max, false});
  return out;
}

}  // namespace

std::optional<double> reattachment_point(const Mesh& mesh, const DofMap& dofs, const State& s,
                                         double wall_y) {
  std::optional<double> best;
  double longest = 0.0;
  for (const auto& iv : shear_intervals(mesh, dofs, s, wall_y, -1.0)) {
    if (iv.closed && iv.b - iv.a > longest) {
      longest = iv.b - iv.a;
      best = iv.b;
    }
  }
  return best;
}

std::vector<std::pair<double, double>> positive_shear_intervals(const Mesh& mesh, const DofMap& dofs,
                                                                const State& s, double wall_y) {
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : shear_intervals(mesh, dofs, s, wall_y, 1.0)) out.emplace_back(iv.a, iv.b);
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> cols{
      "scenario", "run_id", "nx", "ny", "h", "k", "kbar", "m", "mbar", "nu", "alpha", "beta", "chi",
      "theta", "dt", "re", "seed", "pressure_constraint", "iterations", "l2_u", "l2_p", "e_div",
      "max_mass_residual", "max_momentum_residual", "reattachment", "bubble_start", "bubble_end",
      "ke_final", "runtime_s", "status"};
  return cols;
}

namespace {
// RFC 4180 quoting for free-text fields.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}
}  // namespace

void Report::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("Report::write_csv: cannot open " + path);
  const auto& cols = report_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n' << std::setprecision(12);
  for (const RunRecord& r : runs) {
    const double ke = r.ke_history.empty() ? -1.0 : r.ke_history.back();
    os << csv_field(r.scenario) << ',' << csv_field(r.run_id) << ',' << r.nx << ',' << r.ny << ',' << r.h << ',' << r.spec.k << ','
       << r.spec.kbar << ',' << r.spec.m << ',' << r.spec.mbar << ',' << r.params.nu << ',' << r.params.alpha
       << ',' << r.params.beta << ',' << r.params.chi << ',' << r.params.theta << ',' << r.params.dt << ','
       << r.re << ',' << r.seed << ',' << csv_field(r.pressure_constraint) << ',' << r.iterations << ',' << r.l2_u << ','
       << r.l2_p << ',' << r.e_div << ',' << r.max_mass_residual << ',' << r.max_momentum_residual << ','
       << r.reattachment << ',' << r.bubble_start << ',' << r.bubble_end << ',' << ke << ',' << r.runtime_s
       << ',' << csv_field(r.status) << '\n';
  }
}

void Report::write_json(const std::string& path) const {
  nlohmann::json j;
  j["columns_version"] = 1;
  j["runs"] = nlohmann::json::array();
  for (const RunRecord& r : runs) {
    nlohmann::json o;
    o["scenario"] = r.scenario;
    o["run_id"] = r.run_id;
    o["nx"] = r.nx;
    o["ny"] = r.ny;
    o["h"] = r.h;
    o["orders"] = {{"k", r.spec.k}, {"kbar", r.spec.kbar}, {"m", r.spec.m}, {"mbar", r.spec.mbar}};
    o["params"] = {{"nu", r.params.nu},   {"alpha", r.params.alpha}, {"beta", r.params.beta},
                   {"chi", r.params.chi}, {"theta", r.params.theta}, {"dt", r.params.dt}};
    o["re"] = r.re;
    o["seed"] = r.seed;
    o["pressure_constraint"] = r.pressure_constraint;
    o["iterations"] = r.iterations;
    o["l2_u"] = r.l2_u;
    o["l2_p"] = r.l2_p;
    o["e_div"] = r.e_div;
    o["max_mass_residual"] = r.max_mass_residual;
    o["max_momentum_residual"] = r.max_momentum_residual;
    o["reattachment"] = r.reattachment;
    o["bubble"] = {r.bubble_start, r.bubble_end};
    o["runtime_s"] = r.runtime_s;
    o["ke_history"] = r.ke_history;
    o["picard_history"] = r.picard_history;
    o["status"] = r.status;
    j["runs"].push_back(std::move(o));
  }
  std::ofstream os(path);
  if (!os) throw InvalidArgument("Report::write_json: cannot open " + path);
  os << j.dump(2) << '\n';
}

void write_field_csv(const std::string& path, const Mesh& mesh, const DofMap& dofs, const State& s) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("write_field_csv: cannot open " + path);
  os << "x,y,u_x,u_y,p\n" << std::setprecision(12);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (const Vec2& xi : dofs.velocity_basis().nodes()) {
      const Vec2 x = map_to_physical(mesh, c, xi);
      const Vec2 u = eval_velocity(dofs, s, c, xi);
      os << x.x() << ',' << x.y() << ',' << u.x() << ',' << u.y() << ',' << eval_pressure(dofs, s, c, xi) << '\n';
    }
  }
}

}  // namespace hybridns
