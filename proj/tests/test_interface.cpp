#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vortexflow/interface.hpp"

using namespace vortexflow;
using vftest::grid;

namespace {

FluidInterface<2> interface_from(const GridSpec<2>& s, auto&& phi, double rho1, double rho2, double eps_cells = 2.0) {
  FluidInterface<2> f;
  f.phi = ScalarField<2>::from_function(s, phi);
  f.rho1 = rho1;
  f.rho2 = rho2;
  f.epsilon = eps_cells * s.h;
  return f;
}

double circle_distance(const Vec<2>& x, const Vec<2>& c, double r) { return std::hypot(x[0] - c[0], x[1] - c[1]) - r; }

}  // namespace

TEST(Materials, DensityAndViscosityBlend) {
  const auto s = grid<2>(64, 1.0, Boundary::kDirichlet);
  auto f = interface_from(s, [](const Vec<2>& x) { return x[1] - 0.5; }, 1000.0, 1.0);
  f.nu1 = 1e-6;
  f.nu2 = 1.5e-5;
  const auto rho = density_field(f);
  const auto nu = viscosity_field(f);
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    const double y = s.position(idx)[1];
    if (y < 0.5 - f.epsilon) {
      EXPECT_EQ(rho[lin], 1000.0);
      EXPECT_EQ(nu[lin], 1e-6);
    } else if (y > 0.5 + f.epsilon) {
      EXPECT_EQ(rho[lin], 1.0);
      EXPECT_EQ(nu[lin], 1.5e-5);
    } else {
      EXPECT_GE(rho[lin], 1.0);
      EXPECT_LE(rho[lin], 1000.0);
    }
  });
  FluidInterface<2> on;
  on.phi = ScalarField<2>(s, 0.0);
  on.rho1 = 3.0;
  on.rho2 = 1.0;
  on.epsilon = 0.1;
  EXPECT_DOUBLE_EQ(density_field(on)[0], 2.0);
}

TEST(Materials, DensityGradientMatchesFiniteDifferences) {
  const auto s = grid<2>(256);
  auto f = interface_from(s, [](const Vec<2>& x) { return circle_distance(x, {0.5, 0.5}, 0.25); }, 2.0, 1.0, 8.0);
  const auto analytic = density_gradient(f);
  const auto fd = gradient(density_field(f));
  const double peak = fd.max_norm();
  for (int a = 0; a < 2; ++a)
    for (std::size_t i = 0; i < fd.size(); ++i) EXPECT_NEAR(analytic[a][i], fd[a][i], 0.03 * peak);
  // heavy fluid inside: density falls outward
  const auto idx = Index<2>{192, 128};
  EXPECT_LT(analytic[0][s.linear(idx)], 0.0);
}

TEST(Buoyancy, EqualsTheDiscreteCurlOfRhoG) {
  const auto s = grid<2>(64);
  auto f = interface_from(s, [](const Vec<2>& x) { return circle_distance(x, {0.4, 0.55}, 0.2); }, 2.0, 1.0);
  const Vec<2> g{0.3, -1.0};
  const auto src = buoyancy_curl(f, g);
  const auto rho = density_field(f);
  VectorField<2> rho_g(s);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho_g[0][i] = rho[i] * g[0];
    rho_g[1][i] = rho[i] * g[1];
  }
  const auto oracle = curl(rho_g);
  for (std::size_t i = 0; i < src.size(); ++i) EXPECT_NEAR(src[0][i], oracle[0][i], 1e-12);
}

TEST(Buoyancy, HeavyFluidOnTheLeftTurnsCounterClockwise) {
  auto s = grid<2>(64);
  s.bc[0] = Boundary::kDirichlet;
  auto f = interface_from(s, [](const Vec<2>& x) { return x[0] - 0.5; }, 2.0, 1.0);
  const auto src = buoyancy_curl(f, Vec<2>{0.0, -1.0});
  EXPECT_GT(src[0].at({32, 10}), 0.0);
  double lo = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) lo = std::min(lo, src[0][i]);
  EXPECT_GE(lo, -1e-12);
}

TEST(Buoyancy, PeakMatchesSharpProfileWhenResolved) {
  // eps = 8h: the smoothed step spans 16 cells and the discrete curl
  // reproduces (rho1 - rho2) g zeta(0) / eps at the interface.
  auto s = grid<2>(256);
  s.bc[0] = Boundary::kDirichlet;
  auto f = interface_from(s, [](const Vec<2>& x) { return x[0] - 0.5 - 0.5 / 256; }, 2.0, 1.0, 8.0);
  const auto src = buoyancy_curl(f, Vec<2>{0.0, -1.0});
  const double analytic = (2.0 - 1.0) * 1.0 * smoothing_delta(0.0) / f.epsilon;
  EXPECT_NEAR(src[0].max_abs(), analytic, 0.03 * analytic);
}

TEST(Sources, CreateNoNetCirculationOnPeriodicGrids) {
  const auto s = grid<2>(96);
  auto f = interface_from(s, [](const Vec<2>& x) {
    return circle_distance(x, {0.45, 0.5}, 0.2) + 0.03 * std::sin(5 * std::atan2(x[1] - 0.5, x[0] - 0.45));
  }, 3.0, 1.0);
  f.tau = 0.01;
  const auto b = buoyancy_curl(f, Vec<2>{0.2, -1.0});
  const auto st = surface_tension_source(f);
  EXPECT_GT(b.max_norm(), 1.0);
  EXPECT_GT(st.max_norm(), 0.0);
  EXPECT_NEAR(b[0].sum(), 0.0, 1e-10 * b.max_norm() * b.size());
  EXPECT_NEAR(st[0].sum(), 0.0, 1e-10 * st.max_norm() * st.size());
}

TEST(SurfaceTension, FlatInterfaceAndCircleAreQuiet) {
  const auto s = grid<2>(128);
  auto flat = interface_from(s, [](const Vec<2>& x) { return x[1] - 0.5 - 0.25 / 128; }, 1.0, 1.0);
  flat.tau = 0.1;
  EXPECT_LT(surface_tension_source(flat).max_norm(), 1e-9);

  auto circle = interface_from(s, [](const Vec<2>& x) { return circle_distance(x, {0.5, 0.5}, 0.25); }, 1.0, 1.0);
  auto ellipse = interface_from(s, [](const Vec<2>& x) {
    const double dx = (x[0] - 0.5) / 1.3, dy = (x[1] - 0.5) / 0.77;
    return (std::hypot(dx, dy) - 0.25) * 0.9;
  }, 1.0, 1.0);
  circle.tau = ellipse.tau = 0.1;
  EXPECT_LT(surface_tension_source(circle).max_norm(), 0.1 * surface_tension_source(ellipse).max_norm());
  FluidInterface<2> none = circle;
  none.tau = 0.0;
  EXPECT_EQ(surface_tension_source(none).max_norm(), 0.0);
}

TEST(Reinitialize, RestoresUnitGradientAndKeepsTheZeroLevel) {
  const auto s = grid<2>(96);
  const Vec<2> c{0.5, 0.5};
  const double r = 0.25;
  const auto stretched =
      ScalarField<2>::from_function(s, [&](const Vec<2>& x) { return 3.0 * circle_distance(x, c, r) * (1.2 + x[0]); });
  const auto phi = reinitialize(stretched, 150);
  const auto g = gradient(phi);
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    const double d = circle_distance(s.position(idx), c, r);
    if (std::abs(d) < 5 * s.h) {
      EXPECT_NEAR(std::hypot(g[0][lin], g[1][lin]), 1.0, 0.1);
      EXPECT_NEAR(phi[lin], d, 0.5 * s.h);
    }
    if (std::abs(d) > s.h) EXPECT_EQ(std::signbit(phi[lin]), std::signbit(d));
  });
}

TEST(Reinitialize, SignedDistanceIsAlmostAFixedPoint) {
  const auto s = grid<2>(64, 1.0, Boundary::kDirichlet);
  const auto d = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return x[1] - 0.4 + 0.1 * x[0]; });
  const auto phi = reinitialize(d, 20);
  const double slope = std::hypot(1.0, 0.1);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(phi[i], d[i] / slope, 0.02);
}

TEST(Transport, UniformTranslationShiftsTheField) {
  const auto s = grid<2>(64);
  const auto phi = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return std::sin(2 * kPi * x[0]); });
  VectorField<2> u(s);
  u[0].fill(1.0);
  const auto moved = advect_phi_semi_lagrangian(phi, u, s.h);  // exactly one cell
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    const double x = s.position(idx)[0] - s.h;
    EXPECT_NEAR(moved[lin], std::sin(2 * kPi * x), 1e-12);
  });
}

TEST(Transport, RotatedCircleKeepsItsArea) {
  const int n = 128;
  const auto s = grid<2>(n, 1.0, Boundary::kDirichlet);
  const double eps = 2 * s.h;
  const Vec<2> c0{0.5, 0.75};
  const double r = 0.15;
  auto phi = ScalarField<2>::from_function(s, [&](const Vec<2>& x) { return circle_distance(x, c0, r); });
  VectorField<2> u(s);
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    const auto x = s.position(idx);
    u[0][lin] = -(x[1] - 0.5);
    u[1][lin] = x[0] - 0.5;
  });
  const double area0 = liquid_volume(phi, eps);
  EXPECT_NEAR(area0, kPi * r * r, 0.01 * kPi * r * r);
  const int steps = 400;
  for (int k = 0; k < steps; ++k) phi = advect_phi_semi_lagrangian(phi, u, 2 * kPi / steps);
  const double drift = std::abs(liquid_volume(phi, eps) - area0) / area0;
  EXPECT_LT(drift, 0.05);
  // back where it started
  EXPECT_LT(phi.at({64, 96}), 0.0);
  EXPECT_GT(phi.at({64, 32}), 0.0);
}

TEST(Interface, ValidationAndSinglePhase) {
  FluidInterface<2> f;
  f.epsilon = 0.1;
  EXPECT_NO_THROW(f.validate());
  EXPECT_TRUE(f.single_phase());
  f.tau = 0.1;
  EXPECT_FALSE(f.single_phase());
  f.rho1 = 0.0;
  EXPECT_THROW(f.validate(), Error);
  f.rho1 = 1.0;
  f.epsilon = 0.0;
  EXPECT_THROW(f.validate(), Error);
}

TEST(Interface, LiquidVolumeOfAHalfSpace) {
  const auto s = grid<2>(64);
  const auto phi = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return x[1] - 0.5 + 0.5 / 64; });
  EXPECT_NEAR(liquid_volume(phi, 2 * s.h), 0.5, 1e-12);
}
