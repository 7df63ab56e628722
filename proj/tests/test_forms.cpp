#include "hybridns/diagnostics.hpp"
#include "hybridns/error.hpp"
#include "hybridns/forms.hpp"
#include "hybridns/solver.hpp"

#include "support/monolithic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hybridns;
using hybridns::testing::assemble_monolithic;
using hybridns::testing::Discretization;
using hybridns::testing::stack;

namespace {

Mat2 outer(const Vec2& a, const Vec2& b) { return a * b.transpose(); }

// Divergence-free quadratic velocity and linear pressure on the unit square.
Vec2 poly_u(const Vec2& x) { return {x.x() * x.x(), -2.0 * x.x() * x.y()}; }
double poly_p(const Vec2& x) { return x.x() - x.y(); }
Mat2 poly_grad(const Vec2& x) {
  Mat2 g;
  g << 2.0 * x.x(), 0.0, -2.0 * x.y(), -2.0 * x.x();
  return g;
}
// grad p - nu lap u (+ u . grad u for Navier-Stokes).
Vec2 poly_f(const Vec2& x, double nu, bool advection) {
  Vec2 f(1.0 - 2.0 * nu, -1.0);
  if (advection) f += poly_grad(x) * poly_u(x);
  return f;
}
// Prescribed boundary flux: p n - 2 nu sym(grad u) n + min(u.n, 0) u.
Vec2 poly_h(const Vec2& x, const Vec2& n, double nu, bool advection) {
  const Mat2 g = poly_grad(x);
  Vec2 h = poly_p(x) * n - nu * (g + g.transpose()) * n;
  if (advection) h += std::min(poly_u(x).dot(n), 0.0) * poly_u(x);
  return h;
}

double rel_asymmetry(const Eigen::SparseMatrix<double>& a) {
  const Eigen::MatrixXd d(a);
  return (d - d.transpose()).cwiseAbs().maxCoeff() / d.cwiseAbs().maxCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// Pointwise fluxes

TEST(Fluxes, MassFluxExamples) {
  Params p;
  EXPECT_TRUE(mass_flux(Vec2(1, 2), 0.3, 0.3, Vec2(1, 0), 0.1, p).isApprox(Vec2(1, 2)));
  Params nobeta;
  nobeta.beta = 0.0;
  EXPECT_EQ(mass_flux(Vec2(1, 2), 0.3, 7.0, Vec2(0, 1), 0.1, nobeta), Vec2(1, 2));
  const Vec2 u = mass_flux(Vec2(1, 0), 2.0, 3.0, Vec2(0, 1), 0.1, p);
  EXPECT_DOUBLE_EQ(u.x(), 1.0);
  EXPECT_NEAR(u.y(), -5e-6, 1e-20);
  EXPECT_DOUBLE_EQ(stabilization_coefficient(0.1, p), 1e-4 * 0.1 / 2.0);
}

TEST(Fluxes, UpwindSwitch) {
  EXPECT_EQ(upwind_switch(-0.3), 1);
  EXPECT_EQ(upwind_switch(0.0), 0);
  EXPECT_EQ(upwind_switch(0.7), 0);
}

TEST(Fluxes, AdvectiveFluxCases) {
  const Vec2 u(1, 2), ub(-1, 0.5), uh(0.3, -0.7);
  EXPECT_TRUE(advective_flux(u, ub, uh, 0).isApprox(outer(u, uh)));
  EXPECT_TRUE(advective_flux(u, ub, uh, 1).isApprox(outer(ub, uh)));
  EXPECT_TRUE(advective_flux(u, u, uh, 1).isApprox(outer(u, uh)));
}

TEST(Fluxes, DiffusiveFluxCases) {
  Params p;
  p.nu = 0.0;
  Mat2 g;
  g << 1, 2, 3, 4;
  EXPECT_TRUE(diffusive_flux(g, Vec2(1, 0), Vec2(0, 1), 2.5, Vec2(1, 0), 0.3, p).isApprox(2.5 * Mat2::Identity()));
  p.nu = 0.7;
  EXPECT_TRUE(diffusive_flux(Mat2::Zero(), Vec2(1, 1), Vec2(1, 1), -1.0, Vec2(0, 1), 0.3, p)
                  .isApprox(-1.0 * Mat2::Identity()));
  p.nu = 1.0;
  p.alpha = 6.0;
  Mat2 expect = Mat2::Zero();
  expect(0, 0) = -24.0;
  EXPECT_TRUE(diffusive_flux(Mat2::Zero(), Vec2(0, 0), Vec2(1, 0), 0.0, Vec2(1, 0), 0.5, p).isApprox(expect));
}

// With ubar = u and pbar = p the numerical fluxes reduce to the exact flux.
TEST(Fluxes, ConsistencyOverRandomSamples) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> pos(0.01, 2.0);
  for (int i = 0; i < 1000; ++i) {
    Params prm;
    prm.nu = pos(rng);
    prm.alpha = pos(rng) * 10;
    prm.beta = pos(rng);
    prm.chi = std::abs(u(rng)) / 3.0;
    const Vec2 vel(u(rng), u(rng));
    const double p = u(rng);
    const double ang = u(rng);
    const Vec2 n(std::cos(ang), std::sin(ang));
    const double h = pos(rng);
    Mat2 g;
    g << u(rng), u(rng), u(rng), u(rng);

    const Vec2 uhat = mass_flux(vel, p, p, n, h, prm);
    EXPECT_LE((uhat - vel).norm(), 1e-14);
    const Mat2 sigma = p * Mat2::Identity() - prm.nu * (g + g.transpose()) + outer(vel, vel);
    const Mat2 numerical =
        advective_flux(vel, vel, uhat, upwind_switch(uhat.dot(n))) + diffusive_flux(g, vel, vel, p, n, h, prm);
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    EXPECT_LE((numerical - sigma).cwiseAbs().maxCoeff(), 1e-14 * scale) << "sample " << i;
    EXPECT_LE((momentum_flux(g, vel, p, prm) - sigma).cwiseAbs().maxCoeff(), 1e-14 * scale);
  }
}

TEST(Params, Validation) {
  Params p;
  EXPECT_NO_THROW(p.validate());
  const auto bad = [](auto edit) {
    Params q;
    edit(q);
    EXPECT_THROW(q.validate(), InvalidArgument);
  };
  bad([](Params& q) { q.nu = -1.0; });
  bad([](Params& q) { q.alpha = 0.0; });
  bad([](Params& q) { q.beta = -1e-3; });
  bad([](Params& q) { q.chi = 1.5; });
  bad([](Params& q) { q.theta = -0.1; });
  bad([](Params& q) { q.dt = 0.0; });
}

TEST(Forcing, VertexValuesInterpolateLinearly) {
  const Mesh mesh = build_rect_mesh(2, 2, Rect{});
  std::vector<Vec2> values;
  for (const Vec2& v : mesh.vertices()) values.push_back(Vec2(2.0 * v.x() - v.y(), 1.0));
  const Forcing f = Forcing::vertex_values(values);
  EXPECT_FALSE(f.is_zero());
  EXPECT_TRUE(Forcing{}.is_zero());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec2 xi(0.2, 0.3);
    const Vec2 x = map_to_physical(mesh, c, xi);
    EXPECT_NEAR((f.eval(mesh, c, xi, x, 0.0) - Vec2(2.0 * x.x() - x.y(), 1.0)).norm(), 0.0, 1e-14);
  }
  const Forcing a = Forcing::analytic([](const Vec2& x, double t) { return Vec2(x.x() * t, 0.0); });
  EXPECT_DOUBLE_EQ(a.eval(mesh, 0, Vec2(0, 0), Vec2(0.5, 0), 4.0).x(), 2.0);
}

// ---------------------------------------------------------------------------
// Assembled operator

TEST(CellOperator, ZeroStateAndZeroDataGiveZeroLoad) {
  Mesh mesh = build_rect_mesh(2, 2, Rect{});
  mesh.tag_boundary([](const Vec2& x) { return x.x() > 1.0 - 1e-12; }, BoundaryTag::neumann);
  const Discretization d(std::move(mesh), SpaceSpec::equal_order(2));
  Physics physics;
  const State zero = State::zero(d.dofs);
  for (bool transient : {false, true}) {
    const auto sys = assemble_monolithic(d.mesh, d.dofs, d.tables, physics, zero, StepKind{transient});
    EXPECT_EQ(sys.rhs.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(CellOperator, StokesOperatorIsSymmetric) {
  Mesh mesh = build_rect_mesh(3, 2, Rect{0.0, 1.5, 0.0, 1.0});
  mesh.tag_boundary([](const Vec2& x) { return x.y() > 1.0 - 1e-12; }, BoundaryTag::neumann);
  for (int k = 1; k <= 3; ++k) {
    for (double beta : {0.0, 1e-2}) {
      const Discretization d(mesh, SpaceSpec{k, k, k - 1 + (beta > 0 ? 1 : 0), k});
      Physics physics;
      physics.model = FlowModel::stokes;
      physics.params.nu = 0.3;
      physics.params.alpha = 6.0 * k * k;
      physics.params.beta = beta;
      const auto sys =
          assemble_monolithic(d.mesh, d.dofs, d.tables, physics, State::zero(d.dofs), StepKind{false});
      EXPECT_LT(rel_asymmetry(sys.matrix), 1e-12) << "k=" << k << " beta=" << beta;
    }
  }
}

TEST(CellOperator, AdvectionBreaksSymmetry) {
  const Discretization d(build_rect_mesh(2, 2, Rect{}), SpaceSpec::equal_order(1));
  Physics physics;
  const State frozen =
      interpolate_state(d.mesh, d.dofs, [](const Vec2& x) { return Vec2(1.0 + x.y(), 0.5); },
                        [](const Vec2&) { return 0.0; });
  const auto sys = assemble_monolithic(d.mesh, d.dofs, d.tables, physics, frozen, StepKind{false});
  EXPECT_GT(rel_asymmetry(sys.matrix), 1e-3);
}

// A velocity/pressure pair inside the discrete spaces satisfies the discrete
// equations exactly: the residual at its interpolant vanishes for every chi,
// including the prescribed boundary flux on inflow and outflow boundaries.
class PolynomialConsistency : public ::testing::TestWithParam<std::tuple<FlowModel, double>> {};

TEST_P(PolynomialConsistency, ResidualVanishesAtInterpolant) {
  const auto [model, chi] = GetParam();
  const bool advection = model == FlowModel::navier_stokes;
  Mesh mesh = build_rect_mesh(3, 3, Rect{});
  // x = 1 is outflow, y = 1 inflow for this field.
  mesh.tag_boundary([](const Vec2& x) { return x.x() > 1.0 - 1e-12 || x.y() > 1.0 - 1e-12; },
                    BoundaryTag::neumann);
  const Discretization d(std::move(mesh), SpaceSpec::equal_order(2));
  Physics physics;
  physics.model = model;
  physics.params.nu = 0.05;
  physics.params.alpha = 24.0;
  physics.params.chi = chi;
  const double nu = physics.params.nu;
  physics.forcing = Forcing::analytic([nu, advection](const Vec2& x, double) { return poly_f(x, nu, advection); });
  physics.traction = [nu, advection](const Vec2& x, const Vec2& n, double) { return poly_h(x, n, nu, advection); };

  const State exact = interpolate_state(d.mesh, d.dofs, poly_u, poly_p);
  const auto sys = assemble_monolithic(d.mesh, d.dofs, d.tables, physics, exact, StepKind{false});
  Eigen::VectorXd r = sys.matrix * stack(d.dofs, exact) - sys.rhs;
  // Rows of fixed facet velocity dofs are replaced by boundary data in a solve.
  for (int g = 0; g < d.dofs.num_facet_dofs(); ++g) {
    if (d.dofs.dirichlet_mask()[g]) r[sys.cell_size + g] = 0.0;
  }
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-11 * std::max(1.0, sys.rhs.cwiseAbs().maxCoeff()));

  // And a solve with frozen = exact returns the exact solution.
  Constraints bc = Constraints::from_mask(d.dofs);
  bc.set_velocity(d.mesh, d.dofs, poly_u);
  const Problem problem{d.mesh, d.dofs, d.tables, physics, bc, PressureConstraint::none(), Execution::serial};
  const State s = solve_linear(problem, exact, StepKind{false});
  EXPECT_LT(l2_error_velocity(d.mesh, d.dofs, s, poly_u, 8), 1e-10);
  EXPECT_LT(l2_error_pressure(d.mesh, d.dofs, s, poly_p, 8), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Models, PolynomialConsistency,
                         ::testing::Combine(::testing::Values(FlowModel::stokes, FlowModel::navier_stokes),
                                            ::testing::Values(0.0, 0.5, 1.0)));

// With chi = 1/2 the operator tested against (u, p, ubar, pbar) with the
// pressure rows sign-flipped reproduces the dissipation terms of the energy
// balance, computed independently from pointwise fluxes.
class EnergyForm : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(EnergyForm, QuadraticFormEqualsDissipation) {
  const auto [k, nu] = GetParam();
  const Discretization d(build_rect_mesh(3, 3, Rect{}), SpaceSpec::equal_order(k));
  const int nf = d.dofs.num_facet_dofs();

  // Frozen advective state satisfying the continuity equations.
  Physics stokes;
  stokes.model = FlowModel::stokes;
  stokes.params.alpha = 6.0 * k * k;
  stokes.forcing = Forcing::analytic(
      [](const Vec2& x, double) { return Vec2(std::sin(6.0 * x.y()), std::cos(5.0 * x.x())) * 3.0; });
  const Problem sp{d.mesh, d.dofs, d.tables, stokes, Constraints::from_mask(d.dofs),
                   PressureConstraint::pin(d.dofs.facet_pressure_offset(), 0.0), Execution::serial};
  const State frozen = solve_stokes(sp);

  Physics physics;
  physics.params.nu = nu;
  physics.params.alpha = 6.0 * k * k;
  physics.params.beta = 1e-2;
  physics.params.chi = 0.5;
  const auto sys = assemble_monolithic(d.mesh, d.dofs, d.tables, physics, frozen, StepKind{false});

  std::mt19937_64 rng(k);
  std::normal_distribution<double> normal;
  State w = State::zero(d.dofs);
  for (auto* v : {&w.u, &w.p, &w.ubar, &w.pbar}) {
    for (int i = 0; i < v->size(); ++i) (*v)[i] = normal(rng);
  }
  for (int g = 0; g < d.dofs.num_facet_velocity_dofs(); ++g) {
    if (d.dofs.dirichlet_mask()[g]) w.ubar[g] = 0.0;
  }
  const Eigen::VectorXd x = stack(d.dofs, w);
  Eigen::VectorXd sx = x;
  const int nl = d.dofs.cell_local_size();
  const int nu_c = d.dofs.cell_velocity_size();
  for (int c = 0; c < d.mesh.num_cells(); ++c) sx.segment(c * nl + nu_c, nl - nu_c) *= -1.0;
  sx.segment(sys.cell_size + d.dofs.facet_pressure_offset(), nf - d.dofs.facet_pressure_offset()) *= -1.0;
  const double form = sx.dot(sys.matrix * x);

  const EnergyBudget b = energy_budget(d.mesh, d.dofs, d.tables, frozen, w, physics.params, StepKind{false});
  EXPECT_NEAR(form, b.dissipation(), 1e-10 * std::max(1.0, std::abs(form)));
  if (nu == 0.0) {
    EXPECT_GE(form, 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, EnergyForm,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(0.0, 0.1)));
