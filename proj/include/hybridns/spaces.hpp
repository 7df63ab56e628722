#pragma once

#include "hybridns/basis.hpp"
#include "hybridns/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace hybridns {

/// Polynomial orders of the four spaces: broken cell velocity (k) and
/// pressure (m), continuous facet velocity (kbar) and pressure (mbar).
struct SpaceSpec {
  int k = 1;
  int kbar = 1;
  int m = 1;
  int mbar = 1;

  [[nodiscard]] static SpaceSpec equal_order(int k) { return {k, k, k, k}; }
  void validate() const;
};

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Lattice numbering of a continuous Lagrange space of order r >= 1 on the
/// facet skeleton. Vertex nodes take the vertex index; the r-1 interior
/// nodes of facet f follow as num_vertices + f (r-1) + t, in the facet's
/// global orientation.
class SkeletonSpace {
public:
  SkeletonSpace(const Mesh& mesh, int order);

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int num_nodes() const { return num_nodes_; }
  /// Nodes per cell boundary: 3 vertices then r-1 per local facet.
  [[nodiscard]] int nodes_per_cell() const { return 3 * order_; }
  [[nodiscard]] Vec2 node_coordinate(const Mesh& mesh, int node) const;

  /// Global node of parameter index t (0..r) on facet f.
  [[nodiscard]] int facet_node(const Mesh& mesh, int f, int t) const;
  /// Global nodes of cell c in cell-local order.
  [[nodiscard]] std::vector<int> cell_nodes(const Mesh& mesh, int c) const;
  /// Positions in `cell_nodes` of the facet nodes t = 0..r of local facet lf.
  [[nodiscard]] std::vector<int> local_facet_positions(const Mesh& mesh, int c, int lf) const;

private:
  int order_;
  int num_vertices_;
  int num_nodes_;
};

/// Global numbering of the unknowns.
///
/// Cell unknowns are stored cell-blocked: cell c owns velocity coefficients
/// [c * 2 nk, (c + 1) * 2 nk) with components interleaved per node, and
/// pressure coefficients [c * nm, (c + 1) * nm). Facet unknowns form one
/// vector: velocity node j has dofs 2j, 2j+1; pressure node j has dof
/// 2 * num_velocity_nodes + j.
class DofMap {
public:
  DofMap(const Mesh& mesh, SpaceSpec spec);

  [[nodiscard]] const SpaceSpec& spec() const { return spec_; }
  [[nodiscard]] const LagrangeBasis& velocity_basis() const { return u_basis_; }
  [[nodiscard]] const LagrangeBasis& pressure_basis() const { return p_basis_; }
  [[nodiscard]] const LagrangeBasis& facet_velocity_basis() const { return ubar_basis_; }
  [[nodiscard]] const LagrangeBasis& facet_pressure_basis() const { return pbar_basis_; }
  [[nodiscard]] const SkeletonSpace& facet_velocity_space() const { return ubar_space_; }
  [[nodiscard]] const SkeletonSpace& facet_pressure_space() const { return pbar_space_; }

  [[nodiscard]] int num_cells() const { return num_cells_; }
  [[nodiscard]] int cell_velocity_size() const { return 2 * u_basis_.size(); }
  [[nodiscard]] int cell_pressure_size() const { return p_basis_.size(); }
  /// Cell-local unknowns per cell (velocity then pressure).
  [[nodiscard]] int cell_local_size() const { return cell_velocity_size() + cell_pressure_size(); }
  /// Facet unknowns touching one cell (facet velocity then facet pressure).
  [[nodiscard]] int cell_facet_size() const {
    return 2 * ubar_space_.nodes_per_cell() + pbar_space_.nodes_per_cell();
  }

  [[nodiscard]] int num_cell_velocity_dofs() const { return num_cells_ * cell_velocity_size(); }
  [[nodiscard]] int num_cell_pressure_dofs() const { return num_cells_ * cell_pressure_size(); }
  [[nodiscard]] int num_facet_velocity_dofs() const { return 2 * ubar_space_.num_nodes(); }
  [[nodiscard]] int num_facet_pressure_dofs() const { return pbar_space_.num_nodes(); }
  [[nodiscard]] int num_facet_dofs() const {
    return num_facet_velocity_dofs() + num_facet_pressure_dofs();
  }
  [[nodiscard]] int facet_pressure_offset() const { return num_facet_velocity_dofs(); }

  /// Global facet dofs of cell c in LocalSystem order: velocity node pairs
  /// then pressure nodes.
  [[nodiscard]] std::span<const int> cell_facet_dofs(int c) const {
    return {facet_dofs_.data() + static_cast<std::size_t>(c) * cell_facet_size(),
            static_cast<std::size_t>(cell_facet_size())};
  }
  /// For local facet lf of cell c: positions of its velocity nodes (t = 0..kbar)
  /// within the cell's facet velocity node list.
  [[nodiscard]] std::span<const int> facet_velocity_positions(int c, int lf) const;
  [[nodiscard]] std::span<const int> facet_pressure_positions(int c, int lf) const;

  /// Facet dofs constrained by the boundary tags: both velocity components
  /// on dirichlet facets, the normal component on slip facets (which must be
  /// axis-aligned).
  [[nodiscard]] const std::vector<char>& dirichlet_mask() const { return dirichlet_mask_; }

  /// Physical coordinate of a facet dof's node.
  [[nodiscard]] Vec2 facet_dof_coordinate(const Mesh& mesh, int dof) const;

private:
  SpaceSpec spec_;
  int num_cells_;
  LagrangeBasis u_basis_, p_basis_, ubar_basis_, pbar_basis_;
  SkeletonSpace ubar_space_, pbar_space_;
  std::vector<int> facet_dofs_;
  std::vector<int> ubar_positions_;  // per cell, per local facet, kbar + 1 entries
  std::vector<int> pbar_positions_;  // per cell, per local facet, mbar + 1 entries
  std::vector<char> dirichlet_mask_;
};

/// Fixed values on facet dofs: eliminated from the global system.
struct Constraints {
  std::vector<char> fixed;
  std::vector<double> value;

  [[nodiscard]] static Constraints from_mask(const DofMap& dofs);
  /// Sets constrained velocity dofs from `g` evaluated at their nodes.
  void set_velocity(const Mesh& mesh, const DofMap& dofs, const VectorFunction& g);
  void pin(int dof, double v);
  [[nodiscard]] int num_free() const;
};

/// Coefficients of U = (u, p, ubar, pbar) at time t.
struct State {
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  Eigen::VectorXd ubar;
  Eigen::VectorXd pbar;
  double t = 0.0;

  [[nodiscard]] static State zero(const DofMap& dofs, double t = 0.0);
  /// Facet vector [ubar; pbar] in DofMap facet numbering.
  [[nodiscard]] Eigen::VectorXd facet_vector() const;
  void set_facet_vector(const DofMap& dofs, const Eigen::VectorXd& x);
  /// Cell-local vector [u_c; p_c] of cell c.
  [[nodiscard]] Eigen::VectorXd cell_local(const DofMap& dofs, int c) const;
  /// Facet-local vector of cell c in cell_facet_dofs order.
  [[nodiscard]] Eigen::VectorXd facet_local(const DofMap& dofs, int c) const;
};

/// Physical node coordinates of a cell basis on cell c.
[[nodiscard]] std::vector<Vec2> cell_node_coordinates(const Mesh& mesh, int c,
                                                      const LagrangeBasis& basis);
/// Affine map from reference coordinates of cell c to physical space.
[[nodiscard]] Vec2 map_to_physical(const Mesh& mesh, int c, const Vec2& xi);

[[nodiscard]] Eigen::VectorXd interpolate_cell_velocity(const Mesh& mesh, const DofMap& dofs,
                                                        const VectorFunction& g);
[[nodiscard]] Eigen::VectorXd interpolate_cell_pressure(const Mesh& mesh, const DofMap& dofs,
                                                        const ScalarFunction& g);
[[nodiscard]] Eigen::VectorXd interpolate_facet_velocity(const Mesh& mesh, const DofMap& dofs,
                                                         const VectorFunction& g);
[[nodiscard]] Eigen::VectorXd interpolate_facet_pressure(const Mesh& mesh, const DofMap& dofs,
                                                         const ScalarFunction& g);
/// Interpolates all four fields (facet fields take the traces).
[[nodiscard]] State interpolate_state(const Mesh& mesh, const DofMap& dofs,
                                      const VectorFunction& u, const ScalarFunction& p,
                                      double t = 0.0);

}  // namespace hybridns
