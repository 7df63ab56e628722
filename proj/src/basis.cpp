#include "hybridns/basis.hpp"

#include "hybridns/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hybridns {

namespace {

// Silvester's factor P_a(t) = prod_{q<a} (k t - q) / (q + 1) and its derivative.
void silvester(int k, int a, double t, double& value, double& deriv) {
  value = 1.0;
  deriv = 0.0;
  for (int q = 0; q < a; ++q) {
    const double factor = (k * t - q) / (q + 1);
    deriv = deriv * factor + value * k / (q + 1);
    value *= factor;
  }
}

const std::array<Vec2, 3> kRefVertices{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

bool inside(RefElement element, const Vec2& p) {
  constexpr double tol = 1e-12;
  if (element == RefElement::interval) return p.x() >= -tol && p.x() <= 1.0 + tol;
  return p.x() >= -tol && p.y() >= -tol && p.x() + p.y() <= 1.0 + tol;
}

}  // namespace

LagrangeBasis::LagrangeBasis(RefElement element, int order) : element_(element), order_(order) {
  if (order < 0 || order > kMaxBasisOrder) {
    throw UnsupportedOrder("LagrangeBasis: order " + std::to_string(order) +
                           " outside supported range 0.." + std::to_string(kMaxBasisOrder));
  }
  if (element == RefElement::interval) {
    if (order == 0) {
      nodes_.emplace_back(0.5, 0.0);
    } else {
      for (int i = 0; i <= order; ++i) nodes_.emplace_back(static_cast<double>(i) / order, 0.0);
    }
    return;
  }
  if (order == 0) {
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    lattice_.push_back({0, 0, 0});
    return;
  }
  for (int j = 0; j <= order; ++j) {
    for (int i = 0; i + j <= order; ++i) {
      nodes_.emplace_back(static_cast<double>(i) / order, static_cast<double>(j) / order);
      lattice_.push_back({order - i - j, i, j});
    }
  }
}

void LagrangeBasis::eval(const Vec2& xi, Eigen::Ref<Eigen::VectorXd> values) const {
  if (element_ == RefElement::interval) {
    const double s = xi.x();
    for (int i = 0; i < size(); ++i) {
      double v = 1.0;
      for (int j = 0; j < size(); ++j) {
        if (j != i) v *= (s - nodes_[j].x()) / (nodes_[i].x() - nodes_[j].x());
      }
      values[i] = v;
    }
    return;
  }
  const std::array<double, 3> bary{1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
  for (int n = 0; n < size(); ++n) {
    double v = 1.0;
    for (int d = 0; d < 3; ++d) {
      double pv = 0.0, pd = 0.0;
      silvester(order_, lattice_[n][d], bary[d], pv, pd);
      v *= pv;
    }
    values[n] = v;
  }
}

void LagrangeBasis::eval_grad(const Vec2& xi, Eigen::Ref<Eigen::MatrixX2d> grads) const {
  if (element_ == RefElement::interval) {
    const double s = xi.x();
    for (int i = 0; i < size(); ++i) {
      double d = 0.0;
      for (int m = 0; m < size(); ++m) {
        if (m == i) continue;
        double term = 1.0 / (nodes_[i].x() - nodes_[m].x());
        for (int j = 0; j < size(); ++j) {
          if (j != i && j != m) term *= (s - nodes_[j].x()) / (nodes_[i].x() - nodes_[j].x());
        }
        d += term;
      }
      grads(i, 0) = d;
      grads(i, 1) = 0.0;
    }
    return;
  }
  // d(lambda)/dx = (-1, 1, 0), d(lambda)/dy = (-1, 0, 1).
  static constexpr std::array<double, 3> dx{-1.0, 1.0, 0.0};
  static constexpr std::array<double, 3> dy{-1.0, 0.0, 1.0};
  const std::array<double, 3> bary{1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
  for (int n = 0; n < size(); ++n) {
    std::array<double, 3> pv{}, pd{};
    for (int d = 0; d < 3; ++d) silvester(order_, lattice_[n][d], bary[d], pv[d], pd[d]);
    const double d0 = pd[0] * pv[1] * pv[2];
    const double d1 = pv[0] * pd[1] * pv[2];
    const double d2 = pv[0] * pv[1] * pd[2];
    grads(n, 0) = d0 * dx[0] + d1 * dx[1] + d2 * dx[2];
    grads(n, 1) = d0 * dy[0] + d1 * dy[1] + d2 * dy[2];
  }
}

Eigen::MatrixXd LagrangeBasis::tabulate(std::span<const Vec2> points) const {
  Eigen::MatrixXd table(size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t q = 0; q < points.size(); ++q) {
    if (!inside(element_, points[q])) {
      throw InvalidArgument("LagrangeBasis::tabulate: point outside reference element");
    }
    eval(points[q], table.col(static_cast<Eigen::Index>(q)));
  }
  return table;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> LagrangeBasis::tabulate_grad(
    std::span<const Vec2> points) const {
  Eigen::MatrixXd gx(size(), static_cast<Eigen::Index>(points.size()));
  Eigen::MatrixXd gy(size(), static_cast<Eigen::Index>(points.size()));
  Eigen::MatrixX2d g(size(), 2);
  for (std::size_t q = 0; q < points.size(); ++q) {
    if (!inside(element_, points[q])) {
      throw InvalidArgument("LagrangeBasis::tabulate_grad: point outside reference element");
    }
    eval_grad(points[q], g);
    gx.col(static_cast<Eigen::Index>(q)) = g.col(0);
    gy.col(static_cast<Eigen::Index>(q)) = g.col(1);
  }
  return {std::move(gx), std::move(gy)};
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: need at least one point");
  // Returns (P_n(x), P_n'(x)).
  const auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    return std::pair{p1, dp};
  };
  QuadratureRule rule;
  rule.element = RefElement::interval;
  rule.degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    rule.points[n - 1 - i] = Vec2(0.5 * (x + 1.0), 0.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule make_quadrature(RefElement element, int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree) {
    throw UnsupportedOrder("make_quadrature: degree " + std::to_string(degree) +
                           " outside supported range 0.." + std::to_string(kMaxQuadratureDegree));
  }
  if (element == RefElement::interval) {
    QuadratureRule rule = gauss_legendre(std::max(1, (degree + 2) / 2));
    rule.degree = degree;
    return rule;
  }
  if (degree <= 1) {
    return QuadratureRule{RefElement::triangle, degree, {Vec2(1.0 / 3.0, 1.0 / 3.0)}, {0.5}};
  }
  // x = u, y = v (1 - u); the Jacobian (1 - u) raises the degree in u by one.
  const QuadratureRule gu = gauss_legendre((degree + 3) / 2);
  const QuadratureRule gv = gauss_legendre((degree + 2) / 2);
  QuadratureRule rule;
  rule.element = RefElement::triangle;
  rule.degree = degree;
  for (int a = 0; a < gu.size(); ++a) {
    const double u = gu.points[a].x();
    for (int b = 0; b < gv.size(); ++b) {
      const double v = gv.points[b].x();
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(gu.weights[a] * gv.weights[b] * (1.0 - u));
    }
  }
  return rule;
}

Vec2 trace_point(int local_facet, bool aligned, double s) {
  const Vec2& a = kRefVertices[(local_facet + 1) % 3];
  const Vec2& b = kRefVertices[(local_facet + 2) % 3];
  return aligned ? Vec2((1.0 - s) * a + s * b) : Vec2((1.0 - s) * b + s * a);
}

std::vector<Vec2> trace_points(const Mesh& mesh, int c, int local_facet,
                               std::span<const double> s) {
  if (local_facet < 0 || local_facet > 2) throw InvalidArgument("trace_points: local facet out of range");
  const bool aligned = mesh.facet_aligned(c, local_facet);
  std::vector<Vec2> out;
  out.reserve(s.size());
  for (double t : s) out.push_back(trace_point(local_facet, aligned, t));
  return out;
}

}  // namespace hybridns
