#pragma once

// Runs a scene: steps to the requested duration, writes frames, particle
// dumps, diagnostics and the per-stage timing report.
//
// Output directory layout:
//   diagnostics.csv           one row per step
//   frame_<step:06>.vtk       at step 0 and every dump_every steps
//   particles_<step:06>.csv   same schedule when output.particles is set
//   timing.txt                per-stage share of the wall time

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "vortexflow/io.hpp"
#include "vortexflow/parallel.hpp"
#include "vortexflow/scene.hpp"
#include "vortexflow/solver.hpp"

namespace vortexflow {

struct RunResult {
  long steps = 0;
  Diagnostics diagnostics;
  StageTimes times;
  std::vector<std::string> frames;
};

inline std::string frame_name(const std::string& stem, long step, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06ld", step);
  return stem + buf + ext;
}

inline std::string format_timing_report(const StageTimes& t) {
  std::string out = "stage            seconds       percent\n";
  const auto pct = t.percentages();
  for (int i = 0; i < kStageCount; ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-16s %-13.6f %6.2f\n", kStageNames[i], t.seconds[i], pct[i]);
    out += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "total            %.6f\n", t.total());
  return out + buf;
}

/// Union of all body level sets (min), or a large positive value without bodies.
template <int Dim>
ScalarField<Dim> solid_level_set(const SimulationState<Dim>& s) {
  ScalarField<Dim> out(s.spec, 1e300);
  for (const auto& phi : s.body_phi)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], phi[i]);
  if (s.body_phi.empty()) out.fill(1.0);
  return out;
}

template <int Dim>
ScalarField<Dim> total_density(const SimulationState<Dim>& s) {
  ScalarField<Dim> rho = density_field(s.iface);
  for (std::size_t k = 0; k < s.bodies.size(); ++k) compose_body_density(rho, s.bodies[k], s.body_phi[k], s.iface.epsilon);
  return rho;
}

template <int Dim>
Frame state_frame(const SimulationState<Dim>& s, const std::vector<std::string>& fields) {
  char title[96];
  std::snprintf(title, sizeof title, "vortexflow frame step %ld t %.17g", s.step_index, s.t);
  Frame f = make_frame(s.spec, title);
  for (const auto& name : fields) {
    if (name == "omega") {
      if constexpr (Dim == 2) {
        add_scalar(f, "omega", s.omega[0]);
      } else {
        add_vector(f, "omega", s.omega);
      }
    } else if (name == "psi") {
      if constexpr (Dim == 2) {
        add_scalar(f, "psi", s.psi[0]);
      } else {
        add_vector(f, "psi", s.psi);
      }
    } else if (name == "u") {
      add_vector(f, "u", s.u);
    } else if (name == "phi") {
      add_scalar(f, "phi", s.iface.phi);
    } else if (name == "phi_s") {
      add_scalar(f, "phi_s", solid_level_set(s));
    } else if (name == "rho") {
      add_scalar(f, "rho", total_density(s));
    } else {
      throw Error("unknown output field '" + name + "'");
    }
  }
  return f;
}

/// Called after every step (and once with the initial state).
template <int Dim>
using StepObserver = std::function<void(const SimulationState<Dim>&)>;

template <int Dim>
RunResult run_simulation(Simulation<Dim>& sim, const SceneConfig& config, const StepObserver<Dim>& observer = {}) {
  RunResult result;
  const auto& out = config.output;
  const bool write = !out.directory.empty();
  const std::filesystem::path dir(out.directory);
  auto dump = [&](const SimulationState<Dim>& s) {
    if (!write) return;
    const auto path = (dir / frame_name("frame", s.step_index, ".vtk")).string();
    write_frame(state_frame(s, out.fields), path);
    result.frames.push_back(path);
    if (out.particles) write_particles(s.particles, (dir / frame_name("particles", s.step_index, ".csv")).string());
  };

  result.diagnostics.columns = diagnostics_columns(sim.state(), out.timing_columns);
  if (observer) observer(sim.state());
  dump(sim.state());
  const long steps = config.step_count();
  for (long n = 0; n < steps; ++n) {
    sim.step();
    const auto& s = sim.state();
    result.diagnostics.rows.push_back(diagnostics_row(s, out.timing_columns));
    if (observer) observer(s);
    if (out.dump_every > 0 && s.step_index % out.dump_every == 0) dump(s);
  }
  result.steps = steps;
  result.times = sim.state().timers;
  if (write) {
    write_diagnostics(result.diagnostics, (dir / "diagnostics.csv").string());
    detail::write_file((dir / "timing.txt").string(), format_timing_report(result.times));
  }
  return result;
}

/// Applies the scene's thread count (0 keeps the current setting).
inline void apply_threads(const SceneConfig& config) {
  if (config.numerics.threads > 0) set_thread_count(config.numerics.threads);
}

inline RunResult run_scene(const SceneConfig& config, const std::string& base_dir = "") {
  validate_scene(config);
  apply_threads(config);
  if (config.domain.dim == 2) {
    auto sim = build_simulation<2>(config, base_dir);
    return run_simulation(sim, config);
  }
  auto sim = build_simulation<3>(config, base_dir);
  return run_simulation(sim, config);
}

}  // namespace vortexflow
