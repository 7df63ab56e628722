#pragma once

#include "hybridns/mesh.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace hybridns {

enum class RefElement { interval, triangle };

inline constexpr int kMaxBasisOrder = 8;
inline constexpr int kMaxQuadratureDegree = 40;

/// Equispaced Lagrange basis on the reference interval [0, 1] or the
/// reference triangle with vertices (0,0), (1,0), (0,1).
///
/// Triangle nodes are the lattice points (i/k, j/k), i + j <= k, ordered with
/// j as the slow index. Interval points use only the x coordinate.
class LagrangeBasis {
public:
  LagrangeBasis(RefElement element, int order);

  [[nodiscard]] RefElement element() const { return element_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const std::vector<Vec2>& nodes() const { return nodes_; }

  /// Values of all basis functions at one reference point.
  void eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values) const;
  /// Reference gradients at one point: row i holds (d/dx, d/dy) of basis i.
  /// For intervals the second column is zero.
  void eval_grad(const Vec2& xi, Eigen::Ref<Eigen::MatrixX2d> grads) const;

  /// Value table, size() x points.size().
  [[nodiscard]] Eigen::MatrixXd tabulate(std::span<const Vec2> points) const;
  /// Gradient tables (d/dx, d/dy), each size() x points.size().
  [[nodiscard]] std::pair<Eigen::MatrixXd, Eigen::MatrixXd> tabulate_grad(
      std::span<const Vec2> points) const;

private:
  RefElement element_;
  int order_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> lattice_;  // barycentric lattice indices
};

struct QuadratureRule {
  RefElement element = RefElement::triangle;
  int degree = 0;
  std::vector<Vec2> points;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule with n points on [0, 1].
[[nodiscard]] QuadratureRule gauss_legendre(int n);

/// Positive-weight rule exact for polynomials of total degree <= `degree`.
/// Triangle rules are collapsed (Duffy) tensor products of Gauss-Legendre.
[[nodiscard]] QuadratureRule make_quadrature(RefElement element, int degree);

/// Maps facet parameters s in [0, 1] (global facet orientation, from the
/// lower-index vertex to the higher) to reference coordinates of cell `c`.
[[nodiscard]] std::vector<Vec2> trace_points(const Mesh& mesh, int c, int local_facet,
                                             std::span<const double> s);

/// Same map from the local data alone: reference point of parameter s on
/// local facet `local_facet`, oriented by `aligned` (see Mesh::facet_aligned).
[[nodiscard]] Vec2 trace_point(int local_facet, bool aligned, double s);

}  // namespace hybridns
