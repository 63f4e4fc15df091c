#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "support.hpp"
#include "vortexflow/vortexflow.hpp"

using namespace vortexflow;
namespace fs = std::filesystem;

TEST(Cylinder, ParametersFollowTheResolution) {
  EXPECT_DOUBLE_EQ(cylinder_scene(128).numerics.dt, 0.01);
  EXPECT_DOUBLE_EQ(cylinder_scene(256).numerics.dt, 0.0038);
  EXPECT_DOUBLE_EQ(cylinder_scene(300).numerics.dt, 0.0027);
  EXPECT_DOUBLE_EQ(cylinder_band(256).lo, -0.52);
  EXPECT_DOUBLE_EQ(cylinder_band(256).hi, -0.42);
  EXPECT_DOUBLE_EQ(cylinder_band(128).lo, -0.55);
  EXPECT_DOUBLE_EQ(cylinder_band(128).hi, -0.38);
}

TEST(Cylinder, CoarseRunFallsIntoTheBand) {
  const auto dir = fs::path(vftest::temp_dir("cylinder128"));
  const auto r = run_falling_cylinder(128, {dir.string(), 2.0});
  EXPECT_EQ(r.steps, 250);
  EXPECT_EQ(r.vy.size(), 250u);
  EXPECT_TRUE(r.pass) << format_validation_report(r);
  EXPECT_LT(r.symmetry_defect, 0.05);
  EXPECT_GE(r.near_body_enstrophy, 0.9);
  EXPECT_LT(r.relaxation_defect, 1e-10);
  // starts from rest and is still speeding up at the end
  EXPECT_GT(r.vy.front(), -1e-3);
  EXPECT_LT(r.vy.back(), r.vy[r.vy.size() / 4]);
  const auto series = read_diagnostics((dir / "cylinder_128.csv").string());
  EXPECT_EQ(series.rows.size(), 250u);
  EXPECT_EQ(read_diagnostics((dir / "diagnostics.csv").string()).rows.size(), 250u);
  EXPECT_TRUE(fs::exists(dir / "frame_000050.vtk"));
  EXPECT_TRUE(fs::exists(dir / "frame_000250.vtk"));
}

TEST(Cylinder, NeutralBodyDoesNotMove) {
  const auto r = run_falling_cylinder(128, {"", 1.0});
  EXPECT_LT(std::abs(r.plateau), 0.01);
  EXPECT_FALSE(r.pass);
}

TEST(Stratified, VorticityStaysAtTheInterface) {
  auto config = stratified_scene();
  auto sim = build_simulation<2>(config);
  ASSERT_EQ(config.step_count(), 20);
  const double band = 4.0 * sim.epsilon();
  std::vector<double> fractions;
  auto observe = [&](const SimulationState<2>& s) {
    if (s.step_index == 0) return;
    const auto& phi = s.iface.phi;
    fractions.push_back(enstrophy_fraction(s.omega, [&](std::size_t i) { return std::abs(phi[i]) <= band; }));
  };
  run_simulation(sim, config, StepObserver<2>(observe));
  ASSERT_EQ(fractions.size(), 20u);
  for (std::size_t k = 0; k < fractions.size(); ++k) EXPECT_GE(fractions[k], 0.9) << "step " << k + 1;
  EXPECT_GT(enstrophy(sim.state().omega), 0.0);
}

TEST(Smoke, TwoSpheresSink) {
  const auto s = run_scene_smoke("two_spheres_small");
  EXPECT_EQ(s.steps, 100);
  for (const auto& c : s.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  ASSERT_EQ(s.displacement.size(), 2u);
  EXPECT_LT(s.displacement[0][2], 0.0);
  EXPECT_LT(s.displacement[1][2], 0.0);
  EXPECT_LT(s.volume_drift, 0.05);
  double total = 0.0;
  for (double p : s.times.percentages()) total += p;
  EXPECT_NEAR(total, 100.0, 0.5);
}

TEST(Smoke, WaterWallKeepsItsVolume) {
  const auto s = run_scene_smoke("water_wall_small");
  EXPECT_TRUE(s.pass());
  EXPECT_TRUE(std::isfinite(s.max_speed));
  EXPECT_GT(s.max_speed, 0.0);
  EXPECT_LT(s.volume_drift, 0.05);
  // the blocks are fixed
  for (const auto& d : s.displacement) EXPECT_EQ(d[0] * d[0] + d[1] * d[1] + d[2] * d[2], 0.0);
}

TEST(Smoke, CupAtRestWithoutDriving) {
  auto config = falling_cup_scene(true);
  config.gravity = {0.0, 0.0, 0.0};
  config.fluids.rho1 = config.fluids.rho2 = config.bodies[0].density;
  const auto s = run_smoke_config("cup_small_still", config, false);
  EXPECT_TRUE(s.pass());
  ASSERT_EQ(s.displacement.size(), 1u);
  const auto& d = s.displacement[0];
  EXPECT_LT(std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]), 1e-6);
}

TEST(Smoke, RejectsUnknownScenes) {
  EXPECT_THROW(run_scene_smoke("stratified"), Error);
  EXPECT_THROW(builtin_scene("nope"), Error);
}
