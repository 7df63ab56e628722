#include "hybridns/mesh.hpp"

#include "hybridns/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

namespace hybridns {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::none: return "none";
    case BoundaryTag::dirichlet: return "dirichlet";
    case BoundaryTag::neumann: return "neumann";
    case BoundaryTag::slip: return "slip";
  }
  return "unknown";
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = num_vertices();
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int v : cells_[c]) {
      if (v < 0 || v >= nv) {
        throw InvalidArgument("Mesh: cell " + std::to_string(c) + " references vertex " +
                              std::to_string(v) + " out of range");
      }
    }
    if (!(signed_area(static_cast<int>(c)) > 0.0)) {
      throw InvalidArgument("Mesh: cell " + std::to_string(c) + " is not counterclockwise");
    }
  }

  std::map<std::pair<int, int>, int> lookup;
  cell_facets_.resize(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    for (int lf = 0; lf < 3; ++lf) {
      const auto [a, b] = local_facet_vertices(c, lf);
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        const int f = num_facets();
        lookup.emplace(key, f);
        facets_.push_back({key.first, key.second});
        facet_sides_.push_back({FacetSide{c, lf}, FacetSide{}});
        cell_facets_[c][lf] = f;
      } else {
        auto& sides = facet_sides_[it->second];
        if (sides[1].cell >= 0) {
          throw InvalidArgument("Mesh: facet shared by more than two cells");
        }
        sides[1] = FacetSide{c, lf};
        cell_facets_[c][lf] = it->second;
      }
    }
  }

  tags_.assign(facets_.size(), BoundaryTag::none);
  for (int f = 0; f < num_facets(); ++f) {
    if (is_boundary(f)) tags_[f] = BoundaryTag::dirichlet;
  }
}

std::array<int, 2> Mesh::local_facet_vertices(int c, int lf) const {
  const auto& cv = cells_[c];
  return {cv[(lf + 1) % 3], cv[(lf + 2) % 3]};
}

bool Mesh::facet_aligned(int c, int lf) const {
  const auto [a, b] = local_facet_vertices(c, lf);
  return a < b;
}

double Mesh::signed_area(int c) const {
  const auto& cv = cells_[c];
  const Vec2 e1 = vertices_[cv[1]] - vertices_[cv[0]];
  const Vec2 e2 = vertices_[cv[2]] - vertices_[cv[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

Vec2 Mesh::outward_normal(int c, int lf) const {
  // Counterclockwise cells: the outward normal of edge a->b is the tangent
  // rotated clockwise.
  const auto [a, b] = local_facet_vertices(c, lf);
  const Vec2 t = vertices_[b] - vertices_[a];
  return Vec2(t.y(), -t.x()).normalized();
}

double Mesh::facet_length(int f) const {
  return (vertices_[facets_[f][1]] - vertices_[facets_[f][0]]).norm();
}

Vec2 Mesh::facet_midpoint(int f) const {
  return 0.5 * (vertices_[facets_[f][0]] + vertices_[facets_[f][1]]);
}

Vec2 Mesh::cell_centroid(int c) const {
  const auto& cv = cells_[c];
  return (vertices_[cv[0]] + vertices_[cv[1]] + vertices_[cv[2]]) / 3.0;
}

double Mesh::cell_size(int c) const {
  double h = 0.0;
  for (int lf = 0; lf < 3; ++lf) h = std::max(h, facet_length(cell_facets_[c][lf]));
  return h;
}

double Mesh::facet_size(int f) const {
  const auto& s = facet_sides_[f];
  if (s[1].cell < 0) return cell_size(s[0].cell);
  return 0.5 * (cell_size(s[0].cell) + cell_size(s[1].cell));
}

void Mesh::tag_boundary(const std::function<bool(const Vec2&)>& pred, BoundaryTag tag) {
  for (int f = 0; f < num_facets(); ++f) {
    if (is_boundary(f) && pred(facet_midpoint(f))) tags_[f] = tag;
  }
}

void Mesh::write_text(std::ostream& os) const {
  const auto precision = os.precision(17);
  for (const auto& v : vertices_) os << "v " << v.x() << ' ' << v.y() << '\n';
  for (const auto& c : cells_) os << "c " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  os.precision(precision);
}

Mesh build_rect_mesh(int nx, int ny, const Rect& box, Diagonal diagonal) {
  if (nx < 1 || ny < 1) {
    throw InvalidArgument("build_rect_mesh: cell counts must be >= 1, got " + std::to_string(nx) +
                          " x " + std::to_string(ny));
  }
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw InvalidArgument("build_rect_mesh: degenerate bounding box");
  }

  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = j == ny ? box.y1 : box.y0 + box.height() * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? box.x1 : box.x0 + box.width() * i / nx;
      vertices.emplace_back(x, y);
    }
  }

  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      if (diagonal == Diagonal::right) {
        cells.push_back({v00, v10, v11});
        cells.push_back({v00, v11, v01});
      } else {
        cells.push_back({v00, v10, v01});
        cells.push_back({v10, v11, v01});
      }
    }
  }
  return Mesh(std::move(vertices), std::move(cells));
}

}  // namespace hybridns
