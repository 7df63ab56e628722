#include "hybridns/spaces.hpp"

#include "hybridns/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hybridns {

void SpaceSpec::validate() const {
  const auto check = [](int order, int lo, const char* name) {
    if (order < lo || order > kMaxBasisOrder) {
      throw InvalidArgument(std::string("SpaceSpec: order ") + name + " = " + std::to_string(order) +
                            " outside " + std::to_string(lo) + ".." + std::to_string(kMaxBasisOrder));
    }
  };
  check(k, 1, "k");
  check(kbar, 1, "kbar");
  check(m, 0, "m");
  check(mbar, 1, "mbar");
}

// ---------------------------------------------------------------------------

SkeletonSpace::SkeletonSpace(const Mesh& mesh, int order)
    : order_(order),
      num_vertices_(mesh.num_vertices()),
      num_nodes_(mesh.num_vertices() + mesh.num_facets() * (order - 1)) {
  if (order < 1) throw InvalidArgument("SkeletonSpace: continuous facet spaces need order >= 1");
}

int SkeletonSpace::facet_node(const Mesh& mesh, int f, int t) const {
  if (t == 0) return mesh.facet(f)[0];
  if (t == order_) return mesh.facet(f)[1];
  return num_vertices_ + f * (order_ - 1) + (t - 1);
}

Vec2 SkeletonSpace::node_coordinate(const Mesh& mesh, int node) const {
  if (node < num_vertices_) return mesh.vertex(node);
  const int f = (node - num_vertices_) / (order_ - 1);
  const int t = (node - num_vertices_) % (order_ - 1) + 1;
  const double s = static_cast<double>(t) / order_;
  return (1.0 - s) * mesh.vertex(mesh.facet(f)[0]) + s * mesh.vertex(mesh.facet(f)[1]);
}

std::vector<int> SkeletonSpace::cell_nodes(const Mesh& mesh, int c) const {
  std::vector<int> nodes(mesh.cell(c).begin(), mesh.cell(c).end());
  nodes.reserve(nodes_per_cell());
  for (int lf = 0; lf < 3; ++lf) {
    const int f = mesh.cell_facets(c)[lf];
    for (int t = 1; t < order_; ++t) nodes.push_back(facet_node(mesh, f, t));
  }
  return nodes;
}

std::vector<int> SkeletonSpace::local_facet_positions(const Mesh& mesh, int c, int lf) const {
  const auto& cv = mesh.cell(c);
  const auto& fv = mesh.facet(mesh.cell_facets(c)[lf]);
  const auto local_vertex = [&cv](int v) {
    return static_cast<int>(std::find(cv.begin(), cv.end(), v) - cv.begin());
  };
  std::vector<int> pos(order_ + 1);
  pos[0] = local_vertex(fv[0]);
  pos[order_] = local_vertex(fv[1]);
  for (int t = 1; t < order_; ++t) pos[t] = 3 + lf * (order_ - 1) + (t - 1);
  return pos;
}

// ---------------------------------------------------------------------------

DofMap::DofMap(const Mesh& mesh, SpaceSpec spec)
    : spec_((spec.validate(), spec)),
      num_cells_(mesh.num_cells()),
      u_basis_(RefElement::triangle, spec.k),
      p_basis_(RefElement::triangle, spec.m),
      ubar_basis_(RefElement::interval, spec.kbar),
      pbar_basis_(RefElement::interval, spec.mbar),
      ubar_space_(mesh, spec.kbar),
      pbar_space_(mesh, spec.mbar) {
  const int nfs = cell_facet_size();
  facet_dofs_.resize(static_cast<std::size_t>(num_cells_) * nfs);
  ubar_positions_.resize(static_cast<std::size_t>(num_cells_) * 3 * (spec.kbar + 1));
  pbar_positions_.resize(static_cast<std::size_t>(num_cells_) * 3 * (spec.mbar + 1));

  for (int c = 0; c < num_cells_; ++c) {
    int* out = facet_dofs_.data() + static_cast<std::size_t>(c) * nfs;
    for (int node : ubar_space_.cell_nodes(mesh, c)) {
      *out++ = 2 * node;
      *out++ = 2 * node + 1;
    }
    for (int node : pbar_space_.cell_nodes(mesh, c)) *out++ = facet_pressure_offset() + node;

    for (int lf = 0; lf < 3; ++lf) {
      const auto up = ubar_space_.local_facet_positions(mesh, c, lf);
      std::copy(up.begin(), up.end(),
                ubar_positions_.begin() + (static_cast<std::ptrdiff_t>(c) * 3 + lf) * (spec.kbar + 1));
      const auto pp = pbar_space_.local_facet_positions(mesh, c, lf);
      std::copy(pp.begin(), pp.end(),
                pbar_positions_.begin() + (static_cast<std::ptrdiff_t>(c) * 3 + lf) * (spec.mbar + 1));
    }
  }

  dirichlet_mask_.assign(num_facet_dofs(), 0);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryTag tag = mesh.boundary_tag(f);
    if (tag != BoundaryTag::dirichlet && tag != BoundaryTag::slip) continue;
    std::array<bool, 2> comps{true, true};
    if (tag == BoundaryTag::slip) {
      const Vec2 n = mesh.outward_normal(mesh.facet_sides(f)[0].cell, mesh.facet_sides(f)[0].local_facet);
      if (std::abs(std::abs(n.x()) - 1.0) < 1e-12) {
        comps = {true, false};
      } else if (std::abs(std::abs(n.y()) - 1.0) < 1e-12) {
        comps = {false, true};
      } else {
        throw InvalidArgument("DofMap: slip boundary facet " + std::to_string(f) + " is not axis-aligned");
      }
    }
    for (int t = 0; t <= spec.kbar; ++t) {
      const int node = ubar_space_.facet_node(mesh, f, t);
      for (int d = 0; d < 2; ++d) {
        if (comps[d]) dirichlet_mask_[2 * node + d] = 1;
      }
    }
  }
}

std::span<const int> DofMap::facet_velocity_positions(int c, int lf) const {
  const int n = spec_.kbar + 1;
  return {ubar_positions_.data() + (static_cast<std::size_t>(c) * 3 + lf) * n, static_cast<std::size_t>(n)};
}

std::span<const int> DofMap::facet_pressure_positions(int c, int lf) const {
  const int n = spec_.mbar + 1;
  return {pbar_positions_.data() + (static_cast<std::size_t>(c) * 3 + lf) * n, static_cast<std::size_t>(n)};
}

Vec2 DofMap::facet_dof_coordinate(const Mesh& mesh, int dof) const {
  if (dof < facet_pressure_offset()) return ubar_space_.node_coordinate(mesh, dof / 2);
  return pbar_space_.node_coordinate(mesh, dof - facet_pressure_offset());
}

// ---------------------------------------------------------------------------

Constraints Constraints::from_mask(const DofMap& dofs) {
  Constraints c;
  c.fixed = dofs.dirichlet_mask();
  c.value.assign(c.fixed.size(), 0.0);
  return c;
}

void Constraints::set_velocity(const Mesh& mesh, const DofMap& dofs, const VectorFunction& g) {
  for (int dof = 0; dof < dofs.num_facet_velocity_dofs(); ++dof) {
    if (fixed[dof]) value[dof] = g(dofs.facet_dof_coordinate(mesh, dof))[dof % 2];
  }
}

void Constraints::pin(int dof, double v) {
  if (dof < 0 || dof >= static_cast<int>(fixed.size())) throw InvalidArgument("Constraints::pin: dof out of range");
  fixed[dof] = 1;
  value[dof] = v;
}

int Constraints::num_free() const {
  return static_cast<int>(std::count(fixed.begin(), fixed.end(), char{0}));
}

// ---------------------------------------------------------------------------

State State::zero(const DofMap& dofs, double t) {
  State s;
  s.u = Eigen::VectorXd::Zero(dofs.num_cell_velocity_dofs());
  s.p = Eigen::VectorXd::Zero(dofs.num_cell_pressure_dofs());
  s.ubar = Eigen::VectorXd::Zero(dofs.num_facet_velocity_dofs());
  s.pbar = Eigen::VectorXd::Zero(dofs.num_facet_pressure_dofs());
  s.t = t;
  return s;
}

Eigen::VectorXd State::facet_vector() const {
  Eigen::VectorXd x(ubar.size() + pbar.size());
  x << ubar, pbar;
  return x;
}

void State::set_facet_vector(const DofMap& dofs, const Eigen::VectorXd& x) {
  ubar = x.head(dofs.num_facet_velocity_dofs());
  pbar = x.segment(dofs.num_facet_velocity_dofs(), dofs.num_facet_pressure_dofs());
}

Eigen::VectorXd State::cell_local(const DofMap& dofs, int c) const {
  const int nu = dofs.cell_velocity_size();
  const int np = dofs.cell_pressure_size();
  Eigen::VectorXd x(nu + np);
  x << u.segment(static_cast<Eigen::Index>(c) * nu, nu), p.segment(static_cast<Eigen::Index>(c) * np, np);
  return x;
}

Eigen::VectorXd State::facet_local(const DofMap& dofs, int c) const {
  const auto ids = dofs.cell_facet_dofs(c);
  const int off = dofs.facet_pressure_offset();
  Eigen::VectorXd x(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = ids[i] < off ? ubar[ids[i]] : pbar[ids[i] - off];
  }
  return x;
}

// ---------------------------------------------------------------------------

Vec2 map_to_physical(const Mesh& mesh, int c, const Vec2& xi) {
  const auto& cv = mesh.cell(c);
  const Vec2& x0 = mesh.vertex(cv[0]);
  return x0 + xi.x() * (mesh.vertex(cv[1]) - x0) + xi.y() * (mesh.vertex(cv[2]) - x0);
}

std::vector<Vec2> cell_node_coordinates(const Mesh& mesh, int c, const LagrangeBasis& basis) {
  std::vector<Vec2> out;
  out.reserve(basis.size());
  for (const auto& xi : basis.nodes()) out.push_back(map_to_physical(mesh, c, xi));
  return out;
}

Eigen::VectorXd interpolate_cell_velocity(const Mesh& mesh, const DofMap& dofs, const VectorFunction& g) {
  Eigen::VectorXd out(dofs.num_cell_velocity_dofs());
  const int nu = dofs.cell_velocity_size();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = cell_node_coordinates(mesh, c, dofs.velocity_basis());
    for (std::size_t a = 0; a < pts.size(); ++a) {
      const Vec2 v = g(pts[a]);
      out[static_cast<Eigen::Index>(c) * nu + 2 * a] = v.x();
      out[static_cast<Eigen::Index>(c) * nu + 2 * a + 1] = v.y();
    }
  }
  return out;
}

Eigen::VectorXd interpolate_cell_pressure(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& g) {
  Eigen::VectorXd out(dofs.num_cell_pressure_dofs());
  const int np = dofs.cell_pressure_size();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = cell_node_coordinates(mesh, c, dofs.pressure_basis());
    for (std::size_t a = 0; a < pts.size(); ++a) out[static_cast<Eigen::Index>(c) * np + a] = g(pts[a]);
  }
  return out;
}

Eigen::VectorXd interpolate_facet_velocity(const Mesh& mesh, const DofMap& dofs, const VectorFunction& g) {
  const auto& space = dofs.facet_velocity_space();
  Eigen::VectorXd out(dofs.num_facet_velocity_dofs());
  for (int node = 0; node < space.num_nodes(); ++node) {
    const Vec2 v = g(space.node_coordinate(mesh, node));
    out[2 * node] = v.x();
    out[2 * node + 1] = v.y();
  }
  return out;
}

Eigen::VectorXd interpolate_facet_pressure(const Mesh& mesh, const DofMap& dofs, const ScalarFunction& g) {
  const auto& space = dofs.facet_pressure_space();
  Eigen::VectorXd out(dofs.num_facet_pressure_dofs());
  for (int node = 0; node < space.num_nodes(); ++node) out[node] = g(space.node_coordinate(mesh, node));
  return out;
}

State interpolate_state(const Mesh& mesh, const DofMap& dofs, const VectorFunction& u,
                        const ScalarFunction& p, double t) {
  State s;
  s.u = interpolate_cell_velocity(mesh, dofs, u);
  s.p = interpolate_cell_pressure(mesh, dofs, p);
  s.ubar = interpolate_facet_velocity(mesh, dofs, u);
  s.pbar = interpolate_facet_pressure(mesh, dofs, p);
  s.t = t;
  return s;
}

}  // namespace hybridns
