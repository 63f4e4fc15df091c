#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "vortexflow/grid.hpp"
#include "vortexflow/smoothing.hpp"
#include "vortexflow/stencil.hpp"

using namespace vortexflow;
using vftest::grid;

TEST(GridSpec, LinearIndexRoundTrip) {
  GridSpec<3> s;
  s.n = {8, 9, 10};
  s.h = 0.1;
  for (std::size_t lin = 0; lin < s.node_count(); ++lin) EXPECT_EQ(s.linear(s.unravel(lin)), lin);
  EXPECT_EQ(s.node_count(), 720u);
  EXPECT_EQ(s.stride(0), 1);
  EXPECT_EQ(s.stride(2), 72);
}

TEST(GridSpec, RejectsTooFewNodesAndBadSpacing) {
  auto s = grid<2>(16);
  s.n[1] = 4;
  EXPECT_THROW(s.validate(), Error);
  auto t = grid<2>(16);
  t.h = 0.0;
  EXPECT_THROW(t.validate(), Error);
}

TEST(GridSpec, PositionsStartAtOrigin) {
  auto s = grid<2>(10, 2.0);
  s.origin = {-1.0, 0.5};
  const auto x = s.position({3, 4});
  EXPECT_DOUBLE_EQ(x[0], -1.0 + 3 * 0.2);
  EXPECT_DOUBLE_EQ(x[1], 0.5 + 4 * 0.2);
}

TEST(Fields, MismatchedGridsAreRejected) {
  ScalarField<2> a(grid<2>(16)), b(grid<2>(32));
  EXPECT_THROW(a += b, Error);
}

TEST(Fields, ForEachNodeVisitsEveryNodeOnce) {
  const auto s = grid<3>(9);
  std::vector<int> hits(s.node_count(), 0);
  for_each_node(s, [&](std::size_t lin, const Index<3>& idx) {
    ++hits[lin];
    EXPECT_EQ(s.linear(idx), lin);
  });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Fields, MinimumImageDisplacementOnPeriodicAxes) {
  auto s = grid<2>(16);
  s.bc[1] = Boundary::kDirichlet;
  const auto d = displacement(s, Vec<2>{0.95, 0.95}, Vec<2>{0.05, 0.05});
  EXPECT_NEAR(d[0], -0.1, 1e-14);
  EXPECT_NEAR(d[1], 0.9, 1e-14);
}

TEST(Fields, SampleLinearIsExactForAffineFunctions) {
  auto s = grid<2>(16, 1.0, Boundary::kDirichlet);
  const auto f = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return 1.0 + 2.0 * x[0] - 3.0 * x[1]; });
  for (int k = 0; k < 50; ++k) {
    const Vec<2> x{vftest::uniform(0.0, 15.0 / 16), vftest::uniform(0.0, 15.0 / 16)};
    EXPECT_NEAR(sample_linear(f, x), 1.0 + 2.0 * x[0] - 3.0 * x[1], 1e-13);
  }
}

TEST(Fields, SampleLinearWrapsPeriodicAxes) {
  const auto s = grid<2>(16);
  const auto f = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return std::sin(2 * kPi * x[0]); });
  EXPECT_NEAR(sample_linear(f, Vec<2>{0.25, 0.3}), sample_linear(f, Vec<2>{1.25, -0.7}), 1e-14);
}

TEST(Smoothing, HeavisideReferenceValue) {
  // (1 - x - sin(pi x) / pi) / 2 at x = 0.5
  EXPECT_NEAR(smoothed_heaviside(0.5), 0.5 * (0.5 - 1.0 / kPi), 1e-15);
  EXPECT_NEAR(smoothed_heaviside(0.5), 0.090845057, 1e-9);
  EXPECT_EQ(smoothed_heaviside(-1.0), 1.0);
  EXPECT_EQ(smoothed_heaviside(1.0), 0.0);
  EXPECT_EQ(smoothed_heaviside(-3.0), 1.0);
  EXPECT_DOUBLE_EQ(smoothed_heaviside(0.0), 0.5);
}

TEST(Smoothing, HeavisideIsMonotoneAndDeltaIsItsNegativeDerivative) {
  double prev = 1.0;
  for (double x = -1.2; x <= 1.2; x += 0.01) {
    const double H = smoothed_heaviside(x);
    EXPECT_LE(H, prev + 1e-15);
    prev = H;
    const double d = 1e-6;
    if (std::abs(std::abs(x) - 1.0) > 2 * d) {
      const double fd = -(smoothed_heaviside(x + d) - smoothed_heaviside(x - d)) / (2 * d);
      EXPECT_NEAR(smoothing_delta(x), fd, 1e-8);
    }
  }
}

TEST(Smoothing, DeltaIntegratesToOne) {
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + (i + 0.5) * 2.0 / n;
    sum += smoothing_delta(x) * 2.0 / n;
  }
  EXPECT_NEAR(sum, 1.0, 1e-8);
}

TEST(Stencils, CurlOfSolidRotationIsTwo) {
  const auto s = grid<2>(32, 1.0, Boundary::kDirichlet);
  VectorField<2> v(s);
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    const auto x = s.position(idx);
    v[0][lin] = -x[1];
    v[1][lin] = x[0];
  });
  const auto w = curl(v);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[0][i], 2.0, 1e-12);
}

double shear_curl_error(int n) {
  const auto s = grid<2>(n);
  VectorField<2> v(s);
  v[0] = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return std::sin(2 * kPi * x[1]); });
  const auto w = curl(v);
  double err = 0.0;
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    const double exact = -2 * kPi * std::cos(2 * kPi * s.position(idx)[1]);
    err = std::max(err, std::abs(w[0][lin] - exact));
  });
  return err;
}

TEST(Stencils, CurlConvergesAtSecondOrder) {
  const double e1 = shear_curl_error(32), e2 = shear_curl_error(64);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(Stencils, LaplacianOfQuadraticIsExactIncludingWallNodes) {
  const auto s = grid<2>(16, 1.0, Boundary::kDirichlet);
  const auto f = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return x[0] * x[0]; });
  const auto L = laplacian(f);
  for (std::size_t i = 0; i < L.size(); ++i) EXPECT_NEAR(L[i], 2.0, 1e-9);
}

TEST(Stencils, DivergenceOfGradientMatchesLaplacianForQuadratics) {
  auto s = grid<3>(10, 1.0, Boundary::kDirichlet);
  for (int trial = 0; trial < 5; ++trial) {
    std::array<double, 10> c{};
    for (auto& v : c) v = vftest::uniform(-1.0, 1.0);
    const auto f = ScalarField<3>::from_function(s, [&](const Vec<3>& x) {
      return c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2] + c[4] * x[0] * x[0] + c[5] * x[1] * x[1] +
             c[6] * x[2] * x[2] + c[7] * x[0] * x[1] + c[8] * x[1] * x[2] + c[9] * x[0] * x[2];
    });
    const auto a = divergence(gradient(f));
    const auto b = laplacian(f);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
  }
}

TEST(Stencils, DiffusionConservesTheNodeSum) {
  for (auto bc : {Boundary::kPeriodic, Boundary::kDirichlet}) {
    const auto s = grid<2>(24, 1.0, bc);
    ScalarField<2> f(s), nu(s);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = vftest::uniform(-1.0, 1.0);
      nu[i] = vftest::uniform(0.1, 2.0);
    }
    const auto d = diffusion(f, nu);
    EXPECT_NEAR(d.sum(), 0.0, 1e-9 * d.max_abs() * d.size());
  }
}

TEST(Stencils, DiffusionWithConstantViscosityIsTheLaplacian) {
  const auto s = grid<2>(16);
  const auto f = ScalarField<2>::from_function(s, [](const Vec<2>& x) { return std::sin(2 * kPi * x[0]) * std::cos(4 * kPi * x[1]); });
  const auto d = diffusion(f, ScalarField<2>(s, 0.5));
  const auto L = laplacian(f);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], 0.5 * L[i], 1e-9);
}

template <int Dim>
double max_curvature_error(double radius, double expected) {
  auto s = grid<Dim>(Dim == 2 ? 128 : 64);
  const auto phi = ScalarField<Dim>::from_function(s, [&](const Vec<Dim>& x) {
    Vec<Dim> c{};
    c.fill(0.5);
    return norm(x - c) - radius;
  });
  const auto k = curvature(phi);
  double err = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (std::abs(phi[i]) < 0.5 * s.h) err = std::max(err, std::abs(k[i] - expected) / expected);
  return err;
}

TEST(Stencils, CurvatureOfCircleAndSphere) {
  EXPECT_LT(max_curvature_error<2>(0.25, 4.0), 0.05);
  EXPECT_LT(max_curvature_error<3>(0.25, 8.0), 0.05);
}

TEST(Stencils, CurvatureOfFlatFieldIsZero) {
  const auto s = grid<2>(16);
  const auto k = curvature(ScalarField<2>(s, 3.0));
  EXPECT_EQ(k.max_abs(), 0.0);
}
