#pragma once

// Built-in scenes, the falling-cylinder validation and the 3D smoke runs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "vortexflow/io.hpp"
#include "vortexflow/runner.hpp"
#include "vortexflow/scene.hpp"

namespace vortexflow {

// ---------------------------------------------------------------------------
// Scenes

inline double cylinder_dt(int resolution) {
  switch (resolution) {
    case 128: return 0.01;
    case 256: return 0.0038;
    case 300: return 0.0027;
    default: throw Error("cylinder: resolution must be 128, 256 or 300");
  }
}

/// Disk of radius 0.1 and density 2 released at the centre of a periodic unit
/// square filled with fluid of density 1, nu = 0.001, g = (0, -1).
inline SceneConfig cylinder_scene(int resolution, double body_density = 2.0) {
  SceneConfig c;
  c.domain = {2, {resolution, resolution}, {1.0, 1.0}, {0.0, 0.0}, {Boundary::kPeriodic, Boundary::kPeriodic}};
  c.fluids.rho1 = c.fluids.rho2 = 1.0;
  c.fluids.nu1 = c.fluids.nu2 = 0.001;
  c.gravity = {0.0, -1.0};
  BodyConfig disk;
  disk.shape = "disk";
  disk.radius = 0.1;
  disk.density = body_density;
  disk.center = {0.5, 0.5};
  c.bodies.push_back(disk);
  c.numerics.dt = cylinder_dt(resolution);
  c.numerics.duration = 2.5;
  return c;
}

namespace detail {

// Shared 3D fluid parameters: water (fluid 1) under air, g = -10 e_z.
inline void water_and_air(SceneConfig& c, double tau) {
  c.fluids.rho1 = 1.0;
  c.fluids.rho2 = 0.001;
  c.fluids.nu1 = 1.0e-6;
  c.fluids.nu2 = 0.82e-6;
  c.fluids.tau = tau;
  c.gravity = {0.0, 0.0, -10.0};
}

inline DomainConfig tank(int nx, int ny, int nz, double h) {
  return {3, {nx, ny, nz}, {nx * h, ny * h, nz * h}, {0.0, 0.0, 0.0},
          {Boundary::kDirichlet, Boundary::kDirichlet, Boundary::kDirichlet}};
}

inline PhiConfig water_below(double level) {
  PhiConfig p;
  p.kind = "half_space";
  p.point = {0.0, 0.0, level};
  p.normal = {0.0, 0.0, 1.0};
  return p;
}

inline BodyConfig sphere(double radius, double density, std::vector<double> center) {
  BodyConfig b;
  b.shape = "sphere";
  b.radius = radius;
  b.density = density;
  b.center = std::move(center);
  b.axis = {0.0, 0.0, 1.0};
  return b;
}

inline BodyConfig block(std::vector<double> half, std::vector<double> center) {
  BodyConfig b;
  b.shape = "box";
  b.half_extents = std::move(half);
  b.center = std::move(center);
  b.axis = {0.0, 0.0, 1.0};
  b.fixed = true;
  return b;
}

}  // namespace detail

/// Two spheres released one above the other in a water tank.
inline SceneConfig two_spheres_scene(bool small) {
  SceneConfig c;
  constexpr double h = 0.01;
  detail::water_and_air(c, 0.0);
  if (small) {
    c.domain = detail::tank(68, 24, 64, h);
    c.fluids.phi = detail::water_below(0.55);
    c.bodies = {detail::sphere(0.05, 2.0, {0.34, 0.12, 0.42}), detail::sphere(0.05, 2.0, {0.35, 0.12, 0.28})};
    c.numerics.dt = 0.002;
    c.numerics.duration = 0.2;
  } else {
    c.domain = detail::tank(68, 24, 292, h);
    c.fluids.phi = detail::water_below(2.6);
    c.bodies = {detail::sphere(0.05, 2.0, {0.34, 0.12, 2.3}), detail::sphere(0.05, 2.0, {0.35, 0.12, 2.12})};
    c.numerics.dt = 0.01;
    c.numerics.duration = 4.0;
  }
  return c;
}

/// A column of water collapsing onto a fixed pyramid of blocks standing in a
/// shallow pool.
inline SceneConfig water_wall_scene(bool small) {
  SceneConfig c;
  detail::water_and_air(c, 7.28e-5);
  const int n = small ? 40 : 80;
  const double h = 0.8 / n;
  c.domain = detail::tank(n, n, n, h);
  c.fluids.phi.kind = "column";
  c.fluids.phi.lo = {-1.0, -1.0, -1.0};
  c.fluids.phi.hi = {0.2, 0.9, 0.5};
  c.fluids.phi.pool_depth = 0.1;
  const std::vector<double> half = {0.04, 0.04, 0.04};
  const double x = 0.6;
  for (double y : {0.25, 0.4, 0.55}) c.bodies.push_back(detail::block(half, {x, y, 0.06}));
  for (double y : {0.325, 0.475}) c.bodies.push_back(detail::block(half, {x, y, 0.16}));
  c.bodies.push_back(detail::block(half, {x, 0.4, 0.26}));
  c.numerics.dt = small ? 0.002 : 0.005;
  c.numerics.duration = small ? 0.2 : 3.0;
  return c;
}

/// A tilted cup dropped onto a water surface.
inline SceneConfig falling_cup_scene(bool small) {
  SceneConfig c;
  detail::water_and_air(c, 7.28e-5);
  BodyConfig cup;
  cup.shape = "cup";
  cup.density = 1.5;
  cup.axis = {1.0, 0.0, 0.0};
  cup.angle = 0.3;
  if (small) {
    c.domain = detail::tank(48, 48, 48, 0.02);
    c.fluids.phi = detail::water_below(0.4);
    cup.radius = 0.12;
    cup.height = 0.14;
    cup.wall = 0.04;
    cup.center = {0.48, 0.48, 0.58};
    c.numerics.dt = 0.002;
    c.numerics.duration = 0.2;
  } else {
    c.domain = detail::tank(100, 100, 100, 0.01);
    c.fluids.phi = detail::water_below(0.45);
    cup.radius = 0.1;
    cup.height = 0.12;
    cup.wall = 0.02;
    cup.center = {0.5, 0.5, 0.7};
    c.numerics.dt = 10.0 / 1300.0;
    c.numerics.duration = 10.0;
  }
  c.bodies.push_back(cup);
  return c;
}

/// Heavy fluid above light fluid with a cosine perturbation of the interface,
/// walls at the bottom and top.
inline SceneConfig stratified_scene(int n = 128) {
  SceneConfig c;
  c.domain = {2, {n, n}, {1.0, 1.0}, {0.0, 0.0}, {Boundary::kPeriodic, Boundary::kDirichlet}};
  c.fluids.rho1 = 1.0;
  c.fluids.rho2 = 2.0;
  c.fluids.nu1 = c.fluids.nu2 = 0.001;
  c.fluids.phi.kind = "half_space";
  c.fluids.phi.point = {0.0, 0.5};
  c.fluids.phi.normal = {0.0, 1.0};
  c.fluids.phi.amplitude = 0.02;
  c.fluids.phi.wavelength = 1.0;
  c.gravity = {0.0, -1.0};
  c.numerics.dt = 0.005;
  c.numerics.duration = 0.1;
  return c;
}

/// Heavy drop with surface tension falling through lighter fluid in a fully
/// periodic square.
inline SceneConfig periodic_drop_scene(int n = 128) {
  SceneConfig c;
  c.domain = {2, {n, n}, {1.0, 1.0}, {0.0, 0.0}, {Boundary::kPeriodic, Boundary::kPeriodic}};
  c.fluids.rho1 = 2.0;
  c.fluids.rho2 = 1.0;
  c.fluids.nu1 = c.fluids.nu2 = 0.001;
  c.fluids.tau = 0.001;
  c.fluids.phi.kind = "circle";
  c.fluids.phi.center = {0.5, 0.6};
  c.fluids.phi.radius = 0.15;
  c.gravity = {0.0, -1.0};
  c.numerics.dt = 0.005;
  c.numerics.duration = 0.5;
  return c;
}

/// Names accepted by builtin_scene(); the shipped scenes/ files are these
/// configurations printed with print_scene().
inline std::vector<std::string> builtin_scene_names() {
  return {"cylinder_128",      "cylinder_256",       "cylinder_300",       "two_spheres",
          "two_spheres_small", "water_wall_pyramid", "water_wall_small",   "falling_cup",
          "cup_small",         "stratified",         "periodic_drop"};
}

inline SceneConfig builtin_scene(const std::string& name) {
  if (name == "cylinder_128") return cylinder_scene(128);
  if (name == "cylinder_256") return cylinder_scene(256);
  if (name == "cylinder_300") return cylinder_scene(300);
  if (name == "two_spheres") return two_spheres_scene(false);
  if (name == "two_spheres_small") return two_spheres_scene(true);
  if (name == "water_wall_pyramid") return water_wall_scene(false);
  if (name == "water_wall_small") return water_wall_scene(true);
  if (name == "falling_cup") return falling_cup_scene(false);
  if (name == "cup_small") return falling_cup_scene(true);
  if (name == "stratified") return stratified_scene();
  if (name == "periodic_drop") return periodic_drop_scene();
  throw Error("unknown built-in scene '" + name + "'");
}

// ---------------------------------------------------------------------------
// Falling cylinder

struct CylinderBand {
  double lo = 0.0, hi = 0.0;
};

inline CylinderBand cylinder_band(int resolution) {
  if (resolution == 128) return {-0.55, -0.38};
  return {-0.52, -0.42};
}

struct ValidationResult {
  int resolution = 0;
  std::vector<double> t;
  std::vector<double> vy;
  /// Mean v_y over the final 20% of the run.
  double plateau = 0.0;
  CylinderBand band;
  bool pass = false;
  /// max over t <= 0.5 of max|omega(x) + omega(mirror x)| / max|omega|.
  double symmetry_defect = 0.0;
  /// Share of the enstrophy within 0.3 of the body surface at t = 0.5.
  double near_body_enstrophy = 0.0;
  /// Largest penalization relaxation defect over all steps.
  double relaxation_defect = 0.0;
  long steps = 0;
};

/// Mirror defect about the vertical line x = axis_x.
inline double mirror_defect(const VorticityField<2>& omega, double axis_x) {
  const auto& s = omega.spec();
  const double peak = omega.max_norm();
  if (peak == 0.0) return 0.0;
  const int n = s.n[0];
  const long shift = std::lround(2.0 * (axis_x - s.origin[0]) / s.h);
  double worst = 0.0;
  for (int j = 0; j < s.n[1]; ++j)
    for (int i = 0; i < n; ++i) {
      const int m = static_cast<int>(((shift - i) % n + n) % n);
      worst = std::max(worst, std::abs(omega[0].at({i, j}) + omega[0].at({m, j})));
    }
  return worst / peak;
}

/// Fraction of the enstrophy at nodes where `inside(lin)` holds.
template <int Dim, class Pred>
double enstrophy_fraction(const VorticityField<Dim>& omega, Pred&& inside) {
  double in = 0.0, total = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    double e = 0.0;
    for (int c = 0; c < kVorticityComponents<Dim>; ++c) e += omega[c][i] * omega[c][i];
    total += e;
    if (inside(i)) in += e;
  }
  return total == 0.0 ? 1.0 : in / total;
}

struct CylinderOptions {
  /// Writes diagnostics, the v_y series, a text report and frames at t = 0.5
  /// and t = 2.5 when non-empty.
  std::string out_dir;
  double body_density = 2.0;
};

inline std::string format_validation_report(const ValidationResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "falling cylinder, resolution %d\n"
                "steps                 %ld\n"
                "plateau v_y           %.6f\n"
                "acceptance band       [%.2f, %.2f]\n"
                "symmetry defect       %.3e (t <= 0.5)\n"
                "near-body enstrophy   %.4f (t = 0.5)\n"
                "relaxation defect     %.3e\n"
                "result                %s\n",
                r.resolution, r.steps, r.plateau, r.band.lo, r.band.hi, r.symmetry_defect, r.near_body_enstrophy,
                r.relaxation_defect, r.pass ? "PASS" : "FAIL");
  return buf;
}

inline ValidationResult run_falling_cylinder(int resolution, const CylinderOptions& options = {}) {
  SceneConfig config = cylinder_scene(resolution, options.body_density);
  auto sim = build_simulation<2>(config);
  const double dt = config.numerics.dt;
  const long snapshot_step = std::lround(0.5 / dt);
  const double axis_x = config.bodies[0].center[0];
  const bool write = !options.out_dir.empty();
  const std::filesystem::path dir(options.out_dir);

  ValidationResult r;
  r.resolution = resolution;
  r.band = cylinder_band(resolution);
  auto observe = [&](const SimulationState<2>& s) {
    if (s.step_index > 0) {
      r.t.push_back(s.t);
      r.vy.push_back(s.bodies[0].velocity[1]);
      r.relaxation_defect = std::max(r.relaxation_defect, s.relaxation_defect);
    }
    if (s.t <= 0.5 + 1e-9) r.symmetry_defect = std::max(r.symmetry_defect, mirror_defect(s.omega, axis_x));
    if (s.step_index == snapshot_step) {
      const auto& phi_s = s.body_phi[0];
      r.near_body_enstrophy = enstrophy_fraction(s.omega, [&](std::size_t i) { return phi_s[i] <= 0.3; });
    }
    const bool final = s.step_index == config.step_count();
    if (write && (s.step_index == snapshot_step || final))
      write_frame(state_frame(s, {"omega", "u", "phi_s"}), (dir / frame_name("frame", s.step_index, ".vtk")).string());
  };
  const auto run = run_simulation(sim, config, StepObserver<2>(observe));
  r.steps = run.steps;

  const double t_end = config.numerics.duration;
  double sum = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < r.t.size(); ++i)
    if (r.t[i] >= 0.8 * t_end - 1e-9) {
      sum += r.vy[i];
      ++count;
    }
  r.plateau = count > 0 ? sum / static_cast<double>(count) : 0.0;
  r.pass = std::isfinite(r.plateau) && r.plateau >= r.band.lo && r.plateau <= r.band.hi;

  if (write) {
    write_diagnostics(run.diagnostics, (dir / "diagnostics.csv").string());
    Diagnostics series{{"t", "vy"}, {}};
    for (std::size_t i = 0; i < r.t.size(); ++i) series.rows.push_back({r.t[i], r.vy[i]});
    write_diagnostics(series, (dir / ("cylinder_" + std::to_string(resolution) + ".csv")).string());
    detail::write_file((dir / ("cylinder_" + std::to_string(resolution) + ".txt")).string(),
                       format_validation_report(r));
    detail::write_file((dir / "timing.txt").string(), format_timing_report(run.times));
  }
  return r;
}

// ---------------------------------------------------------------------------
// 3D smoke runs

struct SmokeCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SmokeSummary {
  std::string scene;
  long steps = 0;
  std::vector<SmokeCheck> checks;
  double volume_drift = 0.0;
  double max_speed = 0.0;
  double final_enstrophy = 0.0;
  /// Final minus initial body centre, per body.
  std::vector<Vec<3>> displacement;
  StageTimes times;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const SmokeCheck& c) { return c.pass; });
  }
};

/// Runs `config` (at least 100 steps) and evaluates the smoke checks.
/// `require_sinking` adds the check that every moving body ends lower than it
/// started.
inline SmokeSummary run_smoke_config(const std::string& name, SceneConfig config, bool require_sinking) {
  SmokeSummary out;
  out.scene = name;
  if (config.domain.dim != 3) throw Error("smoke runs are 3D");
  config.numerics.duration = std::max(config.numerics.duration, 100.0 * config.numerics.dt);
  config.output.directory.clear();
  apply_threads(config);

  double volume0 = 0.0;
  std::vector<Vec<3>> start;
  try {
    auto sim = build_simulation<3>(config);
    const auto& s0 = sim.state();
    volume0 = liquid_volume(s0.iface.phi, s0.iface.epsilon);
    for (const auto& b : s0.bodies) start.push_back(b.center);
    auto observe = [&](const SimulationState<3>& s) { out.max_speed = std::max(out.max_speed, s.u.max_norm()); };
    const auto run = run_simulation(sim, config, StepObserver<3>(observe));
    const auto& s = sim.state();
    out.steps = run.steps;
    out.times = run.times;
    out.checks.push_back({"no NaN", true, std::to_string(run.steps) + " steps"});
    out.final_enstrophy = enstrophy(s.omega);
    out.checks.push_back({"enstrophy finite", std::isfinite(out.final_enstrophy), std::to_string(out.final_enstrophy)});
    out.checks.push_back({"max |u| finite", std::isfinite(out.max_speed), std::to_string(out.max_speed)});
    const double volume = liquid_volume(s.iface.phi, s.iface.epsilon);
    out.volume_drift = std::abs(volume - volume0) / volume0;
    out.checks.push_back({"liquid volume drift < 5%", out.volume_drift < 0.05, std::to_string(out.volume_drift)});
    for (std::size_t k = 0; k < s.bodies.size(); ++k) {
      out.displacement.push_back(s.bodies[k].center - start[k]);
      if (require_sinking && !s.bodies[k].fixed) {
        const double dz = out.displacement.back()[2];
        out.checks.push_back({"body " + std::to_string(k) + " sinks", dz < 0.0, "dz = " + std::to_string(dz)});
      }
    }
  } catch (const Error& e) {
    out.checks.push_back({"no NaN", false, e.what()});
  }
  return out;
}

inline SmokeSummary run_scene_smoke(const std::string& name) {
  if (name != "two_spheres_small" && name != "water_wall_small" && name != "cup_small")
    throw Error("smoke scenes are two_spheres_small, water_wall_small and cup_small");
  return run_smoke_config(name, builtin_scene(name), name == "two_spheres_small");
}

}  // namespace vortexflow
