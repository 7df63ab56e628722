#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

namespace hybridns {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  [[nodiscard]] double width() const { return x1 - x0; }
  [[nodiscard]] double height() const { return y1 - y0; }
  [[nodiscard]] double area() const { return width() * height(); }
};

/// Boundary condition class of a boundary facet. Interior facets carry `none`.
enum class BoundaryTag : unsigned char {
  none,
  dirichlet,  // velocity prescribed (facet velocity constrained)
  neumann,    // diffusive momentum flux prescribed
  slip,       // normal velocity zero, tangential traction zero
};

[[nodiscard]] const char* to_string(BoundaryTag tag);

/// One side of a facet: the owning cell and the facet's local index in it.
struct FacetSide {
  int cell = -1;
  int local_facet = -1;
};

/// Conforming triangulation with facet topology.
///
/// Local facet f of a cell joins local vertices (f+1)%3 and (f+2)%3, i.e. it
/// is the edge opposite local vertex f. Facets store their vertices in
/// ascending global index order; that order fixes the facet parameterization
/// shared by both adjacent cells. Immutable after construction apart from
/// boundary tagging.
class Mesh {
public:
  /// Builds topology from vertices and counterclockwise triangles.
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells);

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_facets() const { return static_cast<int>(facets_.size()); }

  [[nodiscard]] const Vec2& vertex(int v) const { return vertices_[v]; }
  [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
  [[nodiscard]] const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  [[nodiscard]] const std::array<int, 2>& facet(int f) const { return facets_[f]; }
  [[nodiscard]] const std::array<int, 3>& cell_facets(int c) const { return cell_facets_[c]; }

  /// Adjacent cells of a facet; `sides[1].cell == -1` on the boundary.
  [[nodiscard]] const std::array<FacetSide, 2>& facet_sides(int f) const { return facet_sides_[f]; }
  [[nodiscard]] bool is_boundary(int f) const { return facet_sides_[f][1].cell < 0; }
  [[nodiscard]] BoundaryTag boundary_tag(int f) const { return tags_[f]; }

  /// Global vertex indices of local facet `lf` of cell `c`, in local order.
  [[nodiscard]] std::array<int, 2> local_facet_vertices(int c, int lf) const;
  /// True when local vertex (lf+1)%3 is the facet's lower-index vertex.
  [[nodiscard]] bool facet_aligned(int c, int lf) const;

  [[nodiscard]] double signed_area(int c) const;
  [[nodiscard]] Vec2 outward_normal(int c, int lf) const;
  [[nodiscard]] double facet_length(int f) const;
  [[nodiscard]] Vec2 facet_midpoint(int f) const;
  [[nodiscard]] Vec2 cell_centroid(int c) const;

  /// Cell diameter (longest edge).
  [[nodiscard]] double cell_size(int c) const;
  /// Adjacent cell size on the boundary, mean of the two cell sizes inside.
  [[nodiscard]] double facet_size(int f) const;

  /// Retags every boundary facet whose midpoint satisfies `pred`.
  void tag_boundary(const std::function<bool(const Vec2&)>& pred, BoundaryTag tag);

  /// Plain-text dump: "v x y" per vertex, "c i j k" per cell.
  void write_text(std::ostream& os) const;

private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> facets_;
  std::vector<std::array<FacetSide, 2>> facet_sides_;
  std::vector<std::array<int, 3>> cell_facets_;
  std::vector<BoundaryTag> tags_;
};

/// Quad split direction: `right` joins lower-left and upper-right corners,
/// `left` joins lower-right and upper-left.
enum class Diagonal { right, left };

/// Uniform triangulation of `box` with nx x ny quads, each split along
/// `diagonal`. All boundary facets start as dirichlet.
[[nodiscard]] Mesh build_rect_mesh(int nx, int ny, const Rect& box, Diagonal diagonal = Diagonal::right);

}  // namespace hybridns
