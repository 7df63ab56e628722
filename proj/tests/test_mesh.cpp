#include "hybridns/error.hpp"
#include "hybridns/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace hybridns;

namespace {

struct Counts {
  int vertices, facets, cells, boundary;
};

// Structured grid counts, derived by hand.
Counts grid_counts(int nx, int ny) {
  return {(nx + 1) * (ny + 1), nx * (ny + 1) + ny * (nx + 1) + nx * ny, 2 * nx * ny, 2 * (nx + ny)};
}

}  // namespace

class RectMeshCounts : public ::testing::TestWithParam<std::tuple<int, int, Diagonal>> {};

TEST_P(RectMeshCounts, MatchesGridFormulaAndEuler) {
  const auto [nx, ny, diag] = GetParam();
  const Mesh mesh = build_rect_mesh(nx, ny, Rect{-1.0, 2.0, 0.5, 1.0}, diag);
  const Counts expect = grid_counts(nx, ny);
  EXPECT_EQ(mesh.num_vertices(), expect.vertices);
  EXPECT_EQ(mesh.num_facets(), expect.facets);
  EXPECT_EQ(mesh.num_cells(), expect.cells);
  EXPECT_EQ(mesh.num_vertices() - mesh.num_facets() + mesh.num_cells(), 1);
  int boundary = 0;
  for (int f = 0; f < mesh.num_facets(); ++f) boundary += mesh.is_boundary(f) ? 1 : 0;
  EXPECT_EQ(boundary, expect.boundary);
}

INSTANTIATE_TEST_SUITE_P(Grids, RectMeshCounts,
                         ::testing::Combine(::testing::Values(1, 2, 5), ::testing::Values(1, 3, 4),
                                            ::testing::Values(Diagonal::right, Diagonal::left)));

TEST(Mesh, AreasSumToBoxAndAreCounterclockwise) {
  for (Diagonal d : {Diagonal::right, Diagonal::left}) {
    const Mesh mesh = build_rect_mesh(7, 3, Rect{0.0, 15.0, 0.0, 1.0}, d);
    double total = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      EXPECT_GT(mesh.signed_area(c), 0.0);
      total += mesh.signed_area(c);
    }
    EXPECT_NEAR(total, 15.0, 1e-12);
  }
}

TEST(Mesh, OutwardNormalsPointAwayFromCentroid) {
  const Mesh mesh = build_rect_mesh(4, 4, Rect{});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int lf = 0; lf < 3; ++lf) {
      const Vec2 n = mesh.outward_normal(c, lf);
      EXPECT_NEAR(n.norm(), 1.0, 1e-14);
      const Vec2 mid = mesh.facet_midpoint(mesh.cell_facets(c)[lf]);
      EXPECT_GT(n.dot(mid - mesh.cell_centroid(c)), 0.0);
    }
  }
}

TEST(Mesh, SharedFacetsHaveOpposingNormalsAndCommonOrientation) {
  const Mesh mesh = build_rect_mesh(3, 2, Rect{});
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.is_boundary(f)) continue;
    const auto& s = mesh.facet_sides(f);
    const Vec2 n0 = mesh.outward_normal(s[0].cell, s[0].local_facet);
    const Vec2 n1 = mesh.outward_normal(s[1].cell, s[1].local_facet);
    EXPECT_NEAR((n0 + n1).norm(), 0.0, 1e-14);
    // Neighbours traverse the edge in opposite directions.
    EXPECT_NE(mesh.facet_aligned(s[0].cell, s[0].local_facet), mesh.facet_aligned(s[1].cell, s[1].local_facet));
    EXPECT_LT(mesh.facet(f)[0], mesh.facet(f)[1]);
  }
}

TEST(Mesh, LocalFacetIsOppositeLocalVertex) {
  const Mesh mesh = build_rect_mesh(1, 1, Rect{});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int lf = 0; lf < 3; ++lf) {
      const auto fv = mesh.local_facet_vertices(c, lf);
      const int opposite = mesh.cell(c)[lf];
      EXPECT_NE(fv[0], opposite);
      EXPECT_NE(fv[1], opposite);
    }
  }
}

TEST(Mesh, CellAndFacetSizes) {
  const Mesh mesh = build_rect_mesh(2, 4, Rect{0.0, 1.0, 0.0, 1.0});
  const double diag = std::hypot(0.5, 0.25);
  for (int c = 0; c < mesh.num_cells(); ++c) EXPECT_NEAR(mesh.cell_size(c), diag, 1e-14);
  for (int f = 0; f < mesh.num_facets(); ++f) EXPECT_NEAR(mesh.facet_size(f), diag, 1e-14);
}

TEST(Mesh, BoundaryTaggingByMidpoint) {
  Mesh mesh = build_rect_mesh(4, 2, Rect{0.0, 2.0, 0.0, 1.0});
  mesh.tag_boundary([](const Vec2& x) { return std::abs(x.x() - 2.0) < 1e-12; }, BoundaryTag::neumann);
  int neumann = 0, dirichlet = 0, interior = 0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    switch (mesh.boundary_tag(f)) {
      case BoundaryTag::neumann: ++neumann; break;
      case BoundaryTag::dirichlet: ++dirichlet; break;
      case BoundaryTag::none: ++interior; break;
      default: break;
    }
  }
  EXPECT_EQ(neumann, 2);
  EXPECT_EQ(dirichlet, 2 * (4 + 2) - 2);
  EXPECT_EQ(interior, mesh.num_facets() - 12);
  EXPECT_STREQ(to_string(BoundaryTag::slip), "slip");
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW((void)build_rect_mesh(0, 3, Rect{}), InvalidArgument);
  EXPECT_THROW((void)build_rect_mesh(2, 2, Rect{1.0, 1.0, 0.0, 1.0}), InvalidArgument);
  std::vector<Vec2> v{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  EXPECT_THROW(Mesh(v, {{0, 2, 1}}), InvalidArgument);  // clockwise
  EXPECT_THROW(Mesh(v, {{0, 1, 5}}), InvalidArgument);  // bad vertex
  std::vector<Vec2> w{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0, -1), Vec2(1, 1)};
  EXPECT_THROW(Mesh(w, {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}), InvalidArgument);  // non-manifold
}

TEST(Mesh, TextDumpListsVerticesAndCells) {
  const Mesh mesh = build_rect_mesh(1, 1, Rect{});
  std::ostringstream os;
  mesh.write_text(os);
  std::istringstream is(os.str());
  std::string tag;
  int v = 0, c = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("c ", 0) == 0) ++c;
  }
  EXPECT_EQ(v, 4);
  EXPECT_EQ(c, 2);
}
