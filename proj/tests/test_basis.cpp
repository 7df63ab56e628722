#include "hybridns/basis.hpp"
#include "hybridns/error.hpp"

#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

using namespace hybridns;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

std::vector<Vec2> random_points(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> out;
  while (static_cast<int>(out.size()) < n) {
    const Vec2 p(u(rng), u(rng));
    if (p.sum() <= 1.0) out.push_back(p);
  }
  return out;
}

}  // namespace

class TriangleBasis : public ::testing::TestWithParam<int> {};

TEST_P(TriangleBasis, KroneckerAtNodes) {
  const LagrangeBasis b(RefElement::triangle, GetParam());
  EXPECT_EQ(b.size(), (GetParam() + 1) * (GetParam() + 2) / 2);
  const Eigen::MatrixXd t = b.tabulate(b.nodes());
  EXPECT_LT((t - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 1e-11);
}

TEST_P(TriangleBasis, PartitionOfUnityAndZeroGradientSum) {
  const LagrangeBasis b(RefElement::triangle, GetParam());
  const auto pts = random_points(20, 3);
  const Eigen::MatrixXd t = b.tabulate(pts);
  const auto [gx, gy] = b.tabulate_grad(pts);
  for (int q = 0; q < t.cols(); ++q) {
    EXPECT_NEAR(t.col(q).sum(), 1.0, 1e-11);
    EXPECT_NEAR(gx.col(q).sum(), 0.0, 1e-9);
    EXPECT_NEAR(gy.col(q).sum(), 0.0, 1e-9);
  }
}

TEST_P(TriangleBasis, GradientMatchesCentralDifferences) {
  const LagrangeBasis b(RefElement::triangle, GetParam());
  const double eps = 1e-6;
  for (const Vec2& p : random_points(10, 7)) {
    const Vec2 q = 0.8 * p + Vec2(0.05, 0.05);  // keep the stencil inside
    Eigen::MatrixX2d g(b.size(), 2);
    b.eval_grad(q, g);
    Eigen::VectorXd fp(b.size()), fm(b.size());
    for (int d = 0; d < 2; ++d) {
      Vec2 e = Vec2::Zero();
      e[d] = eps;
      b.eval(q + e, fp);
      b.eval(q - e, fm);
      const Eigen::VectorXd fd = (fp - fm) / (2 * eps);
      EXPECT_LT((fd - g.col(d)).cwiseAbs().maxCoeff(), 1e-6 * std::pow(3.0, GetParam()));
    }
  }
}

TEST_P(TriangleBasis, ReproducesPolynomialsOfItsOrder) {
  const int k = GetParam();
  const LagrangeBasis b(RefElement::triangle, k);
  const auto f = [k](const Vec2& x) { return std::pow(x.x(), k) - 2.0 * std::pow(x.y(), k) + x.x() * 0.5 + 1.0; };
  Eigen::VectorXd coef(b.size());
  for (int i = 0; i < b.size(); ++i) coef[i] = f(b.nodes()[i]);
  for (const Vec2& p : random_points(15, 11)) {
    Eigen::VectorXd v(b.size());
    b.eval(p, v);
    EXPECT_NEAR(coef.dot(v), f(p), 1e-11);
  }
}

TEST_P(TriangleBasis, MassMatrixIsSymmetricPositiveDefinite) {
  const LagrangeBasis b(RefElement::triangle, GetParam());
  const QuadratureRule rule = make_quadrature(RefElement::triangle, 2 * GetParam());
  const Eigen::MatrixXd t = b.tabulate(rule.points);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (int q = 0; q < rule.size(); ++q) m += rule.weights[q] * t.col(q) * t.col(q).transpose();
  EXPECT_LT((m - m.transpose()).norm(), 1e-14);
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  EXPECT_EQ(llt.info(), Eigen::Success);
}

INSTANTIATE_TEST_SUITE_P(Orders, TriangleBasis, ::testing::Range(1, 6));

TEST(Basis, OrderZeroIsConstant) {
  const LagrangeBasis b(RefElement::triangle, 0);
  ASSERT_EQ(b.size(), 1);
  Eigen::VectorXd v(1);
  b.eval(Vec2(0.2, 0.3), v);
  EXPECT_DOUBLE_EQ(v[0], 1.0);
}

TEST(Basis, IntervalBasisInterpolatesAndDifferentiates) {
  for (int k = 1; k <= 5; ++k) {
    const LagrangeBasis b(RefElement::interval, k);
    EXPECT_EQ(b.size(), k + 1);
    Eigen::VectorXd coef(b.size());
    for (int i = 0; i < b.size(); ++i) coef[i] = std::pow(b.nodes()[i].x(), k);
    Eigen::VectorXd v(b.size());
    Eigen::MatrixX2d g(b.size(), 2);
    b.eval(Vec2(0.37, 0.0), v);
    b.eval_grad(Vec2(0.37, 0.0), g);
    EXPECT_NEAR(coef.dot(v), std::pow(0.37, k), 1e-12);
    EXPECT_NEAR(coef.dot(g.col(0)), k * std::pow(0.37, k - 1), 1e-10);
  }
}

TEST(Basis, UnsupportedOrdersAndOutsidePointsThrow) {
  EXPECT_THROW(LagrangeBasis(RefElement::triangle, kMaxBasisOrder + 1), UnsupportedOrder);
  EXPECT_THROW(LagrangeBasis(RefElement::triangle, -1), UnsupportedOrder);
  const LagrangeBasis b(RefElement::triangle, 1);
  const std::vector<Vec2> outside{Vec2(0.8, 0.8)};
  EXPECT_THROW((void)b.tabulate(outside), InvalidArgument);
  EXPECT_THROW((void)make_quadrature(RefElement::triangle, kMaxQuadratureDegree + 1), UnsupportedOrder);
}

class TriangleQuadrature : public ::testing::TestWithParam<int> {};

TEST_P(TriangleQuadrature, IntegratesMonomialsExactly) {
  const int deg = GetParam();
  const QuadratureRule rule = make_quadrature(RefElement::triangle, deg);
  for (int a = 0; a <= deg; ++a) {
    for (int b = 0; a + b <= deg; ++b) {
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q) {
        s += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
      }
      EXPECT_NEAR(s, triangle_monomial(a, b), 1e-14) << "x^" << a << " y^" << b;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, TriangleQuadrature, ::testing::Values(0, 1, 2, 3, 4, 7, 10, 16, 25, 40));

TEST(Quadrature, GaussLegendreExactness) {
  for (int n = 1; n <= 12; ++n) {
    const QuadratureRule rule = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q].x(), p);
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << n << " points, x^" << p;
    }
  }
}

TEST(Quadrature, IntervalRuleOfRequestedDegree) {
  for (int deg = 0; deg <= 40; ++deg) {
    const QuadratureRule rule = make_quadrature(RefElement::interval, deg);
    double s = 0.0;
    for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q].x(), deg);
    EXPECT_NEAR(s, 1.0 / (deg + 1), 1e-14);
  }
}

TEST(Quadrature, TracePointsRunAlongTheLocalFacet) {
  // Local facet 0 joins reference vertices 1 and 2.
  EXPECT_TRUE(trace_point(0, true, 0.0).isApprox(Vec2(1.0, 0.0)));
  EXPECT_TRUE(trace_point(0, true, 1.0).isApprox(Vec2(0.0, 1.0)));
  EXPECT_TRUE(trace_point(0, false, 0.0).isApprox(Vec2(0.0, 1.0)));
  // Local facet 1 joins vertices 2 and 0.
  EXPECT_TRUE(trace_point(1, true, 0.25).isApprox(Vec2(0.0, 0.75)));
  // Local facet 2 joins vertices 0 and 1.
  EXPECT_TRUE(trace_point(2, true, 0.25).isApprox(Vec2(0.25, 0.0)));
}
