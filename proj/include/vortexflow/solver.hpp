#pragma once

// One vortex-in-cell time step with bi-phase and rigid-body coupling.
//
// Stage order (names as recorded in SimulationState::trace):
//   stream_function   Laplacian(psi) = -omega
//   velocity          u_tilde = curl(psi)
//   rigid_coupling    per body: projection, penalization source, blending
//   stretching        (omega . grad) u (3D) + buoyancy + surface tension + penalization
//   interpolate       seed particles where the source lives without a particle
//   advance           RK particle update; level-set transport (+ reinitialize); bodies
//   remesh            particles -> grid
//   diffusion         explicit div(nu grad omega) on the grid
//   create_particles  fresh particles from the grid

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vortexflow/grid.hpp"
#include "vortexflow/interface.hpp"
#include "vortexflow/particles.hpp"
#include "vortexflow/poisson.hpp"
#include "vortexflow/rigid.hpp"
#include "vortexflow/stencil.hpp"

namespace vortexflow {

/// Timing categories of the performance breakdown.
enum class Stage : int {
  kStreamSolve,
  kParticles,
  kGrid,
  kLevelSet,
  kRigidCoupling,
  kRigidSolver,
  kSurfaceTension,
  kOther,
};

inline constexpr int kStageCount = 8;
inline constexpr std::array<const char*, kStageCount> kStageNames = {
    "stream_solve", "particles", "grid", "level_set", "rigid_coupling", "rigid_solver", "surface_tension", "other"};

struct StageTimes {
  std::array<double, kStageCount> seconds{};

  double& operator[](Stage s) { return seconds[static_cast<int>(s)]; }
  double operator[](Stage s) const { return seconds[static_cast<int>(s)]; }

  double total() const {
    double t = 0.0;
    for (double s : seconds) t += s;
    return t;
  }

  /// Share of each category in percent; sums to 100 when total() > 0.
  std::array<double, kStageCount> percentages() const {
    std::array<double, kStageCount> p{};
    const double t = total();
    if (t <= 0.0) return p;
    for (int i = 0; i < kStageCount; ++i) p[i] = 100.0 * seconds[i] / t;
    return p;
  }

  StageTimes& operator+=(const StageTimes& o) {
    for (int i = 0; i < kStageCount; ++i) seconds[i] += o.seconds[i];
    return *this;
  }
};

struct StabilityReport {
  /// h^2 / (2 dim nu_max); +inf for inviscid flow.
  double diffusion_limit = std::numeric_limits<double>::infinity();
  /// h / max|u|, informational only (particle advection has no CFL limit).
  double advection_cfl = std::numeric_limits<double>::infinity();
  bool dt_ok = true;
};

inline StabilityReport check_stability(int dim, double h, double nu_max, double dt, double max_speed = 0.0) {
  StabilityReport r;
  if (nu_max > 0.0) r.diffusion_limit = h * h / (2.0 * dim * nu_max);
  if (max_speed > 0.0) r.advection_cfl = h / max_speed;
  r.dt_ok = dt <= r.diffusion_limit;
  return r;
}

template <int Dim>
struct SolverSettings {
  Vec<Dim> gravity{};
  int rk_order = 2;
  double creation_threshold_rel = 1e-5;
  int reinit_every = 10;
  int reinit_iterations = 20;
  bool record_trace = false;
};

template <int Dim>
struct SimulationState {
  GridSpec<Dim> spec;
  ParticleSet<Dim> particles;
  /// Grid vorticity: remeshed particles plus the grid-resident part.
  VorticityField<Dim> omega;
  /// Vorticity at nodes below the creation threshold. It stays on the grid
  /// (diffused, not advected) instead of being discarded.
  VorticityField<Dim> residual;
  VorticityField<Dim> psi;
  /// Blended velocity of the last step.
  VectorField<Dim> u;
  FluidInterface<Dim> iface;
  std::vector<RigidBody<Dim>> bodies;
  std::vector<ScalarField<Dim>> body_phi;
  double t = 0.0;
  long step_index = 0;
  double dt = 0.0;
  StageTimes timers;
  StageTimes last_step_times;
  std::array<double, kVorticityComponents<Dim>> subtracted_mean{};
  /// max |omega_tilde + dt * penalization - omegabar| over fully solid nodes.
  double relaxation_defect = 0.0;
  std::vector<std::string> trace;
};

template <int Dim>
Vorticity<Dim> circulation(const VorticityField<Dim>& omega) {
  Vorticity<Dim> c{};
  for (int q = 0; q < kVorticityComponents<Dim>; ++q) c[q] = omega[q].sum() * omega.spec().cell_volume();
  return c;
}

template <int Dim>
double enstrophy(const VorticityField<Dim>& omega) {
  double e = 0.0;
  for (int q = 0; q < kVorticityComponents<Dim>; ++q)
    for (std::size_t i = 0; i < omega.size(); ++i) e += omega[q][i] * omega[q][i];
  return e * omega.spec().cell_volume();
}

/// Vortex stretching (omega . grad) u on the grid (3D).
inline VectorField<3> stretching(const VectorField<3>& omega, const VectorField<3>& u) {
  const auto& s = u.spec();
  VectorField<3> out(s);
  for_each_node(s, [&](std::size_t lin, const Index<3>& idx) {
    for (int i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += omega[j][lin] * detail::first_difference(u[i].values(), s, idx, lin, j);
      out[i][lin] = acc;
    }
  });
  return out;
}

template <int Dim>
class Simulation {
 public:
  static constexpr int C = kVorticityComponents<Dim>;

  Simulation(const GridSpec<Dim>& spec, FluidInterface<Dim> iface, std::vector<RigidBody<Dim>> bodies, double dt,
             SolverSettings<Dim> settings, const VorticityField<Dim>* initial_omega = nullptr)
      : plan_((spec.validate(), spec)), settings_(settings) {
    iface.validate();
    iface.phi.require_same(ScalarField<Dim>(spec));
    if (!(dt > 0.0)) throw Error("simulation: dt must be positive");
    if (settings_.rk_order != 2 && settings_.rk_order != 4) throw Error("simulation: rk_order must be 2 or 4");
    if (settings_.creation_threshold_rel < 0.0) throw Error("simulation: creation threshold must be non-negative");
    if (settings_.reinit_every < 0 || settings_.reinit_iterations < 0)
      throw Error("simulation: reinitialization schedule must be non-negative");

    auto& s = state_;
    s.spec = spec;
    s.dt = dt;
    s.iface = std::move(iface);
    s.bodies = std::move(bodies);
    s.omega = initial_omega != nullptr ? *initial_omega : VorticityField<Dim>(spec);
    s.omega.require_consistent();
    if (!(s.omega.spec() == spec)) throw Error("simulation: initial vorticity grid mismatch");
    s.psi = VorticityField<Dim>(spec);
    s.u = VectorField<Dim>(spec);
    for (const auto& b : s.bodies) {
      if (!(b.density > 0.0)) throw Error("simulation: body density must be positive");
      s.body_phi.push_back(body_level_set(b, spec));
    }
    require_no_overlap();

    const auto report = check_stability();
    if (!report.dt_ok)
      throw Error("simulation: dt = " + format_number(dt) + " exceeds the diffusion stability limit " +
                  format_number(report.diffusion_limit));
    split_into_particles();
  }

  const SimulationState<Dim>& state() const { return state_; }
  const SolverSettings<Dim>& settings() const { return settings_; }
  double epsilon() const { return state_.iface.epsilon; }

  StabilityReport check_stability() const {
    const auto& s = state_;
    double nu_max = std::max(s.iface.nu1, s.iface.nu2);
    if (!s.iface.single_phase()) nu_max = viscosity_field(s.iface).max_abs();
    return vortexflow::check_stability(Dim, s.spec.h, nu_max, s.dt, s.u.max_norm());
  }

  void step() {
    using Clock = std::chrono::steady_clock;
    auto& s = state_;
    const auto& spec = s.spec;
    const double dt = s.dt;
    const auto step_start = Clock::now();
    StageTimes times;
    auto timed = [&](Stage stage, auto&& fn) {
      const auto t0 = Clock::now();
      fn();
      times[stage] += std::chrono::duration<double>(Clock::now() - t0).count();
    };
    s.trace.clear();

    // 1. stream function
    mark("stream_function");
    timed(Stage::kStreamSolve, [&] {
      auto sol = solve_stream(s.omega, plan_);
      s.psi = std::move(sol.psi);
      s.subtracted_mean = sol.subtracted_mean;
    });
    require_finite(s.psi, "stream_function");

    // 2. velocity
    mark("velocity");
    VectorField<Dim> u_tilde;
    timed(Stage::kGrid, [&] { u_tilde = velocity_from_stream(s.psi); });
    require_finite(u_tilde, "velocity");

    VectorField<Dim> u = u_tilde;
    VorticityField<Dim> omega = s.omega;
    VorticityField<Dim> rhs(spec);
    s.relaxation_defect = 0.0;
    if (!s.bodies.empty()) {
      mark("rigid_coupling");
      timed(Stage::kRigidCoupling, [&] { couple_bodies(u_tilde, u, omega, rhs); });
      require_finite(rhs, "rigid_coupling");
    }

    // 3. stretching and the other strength sources, frozen for the step
    mark("stretching");
    timed(Stage::kGrid, [&] {
      if constexpr (Dim == 3) rhs += stretching(omega, u);
      if (needs_buoyancy()) rhs += buoyancy_curl(current_density(), settings_.gravity);
    });
    if (s.iface.tau > 0.0) timed(Stage::kSurfaceTension, [&] { rhs += surface_tension_source(s.iface); });
    require_finite(rhs, "stretching");

    // 4. particles for every node carrying a source
    mark("interpolate");
    timed(Stage::kParticles, [&] { seed_source_particles(rhs); });

    // 5. advance particles, level set and bodies
    mark("advance");
    timed(Stage::kParticles, [&] {
      auto velocity = [&](std::span<const Vec<Dim>> x) { return interpolate_to_particles(u, x); };
      auto source = [&](std::span<const Vec<Dim>> x) { return interpolate_to_particles(rhs, x); };
      s.particles = settings_.rk_order == 2
                        ? advect_rk2(s.particles, spec, velocity, source, dt, RhsSampling::kStepStart)
                        : advect_rk4(s.particles, spec, velocity, source, dt, RhsSampling::kStepStart);
    });
    if (!s.iface.single_phase()) {
      timed(Stage::kLevelSet, [&] { s.iface.phi = advect_phi_semi_lagrangian(s.iface.phi, u, dt); });
      if (settings_.reinit_every > 0 && (s.step_index + 1) % settings_.reinit_every == 0) {
        mark("reinitialize");
        timed(Stage::kLevelSet, [&] { s.iface.phi = reinitialize(s.iface.phi, settings_.reinit_iterations); });
      }
      require_finite(s.iface.phi, "advance");
    }
    if (!s.bodies.empty()) {
      timed(Stage::kRigidSolver, [&] {
        for (std::size_t k = 0; k < s.bodies.size(); ++k) {
          auto& b = s.bodies[k];
          if (b.fixed) continue;
          b = advance_body(b, b.velocity, b.angular_velocity, dt);
          s.body_phi[k] = body_level_set(b, spec);
        }
      });
      require_no_overlap();
    }

    // 6. remesh
    mark("remesh");
    timed(Stage::kParticles, [&] {
      s.omega = remesh(s.particles, spec);
      s.omega += s.residual;
    });
    require_finite(s.omega, "remesh");

    // 7. diffusion
    mark("diffusion");
    timed(Stage::kGrid, [&] {
      const double nu_max = std::max(s.iface.nu1, s.iface.nu2);
      if (nu_max == 0.0) return;
      const ScalarField<Dim> nu = s.iface.single_phase() ? ScalarField<Dim>(spec, s.iface.nu1) : viscosity_field(s.iface);
      for (int c = 0; c < C; ++c) s.omega[c].add_scaled(dt, diffusion(s.omega[c], nu));
    });
    require_finite(s.omega, "diffusion");

    // 8. fresh particles
    mark("create_particles");
    timed(Stage::kParticles, [&] { split_into_particles(); });

    s.u = std::move(u);
    ++s.step_index;
    s.t = static_cast<double>(s.step_index) * dt;

    const double wall = std::chrono::duration<double>(Clock::now() - step_start).count();
    times[Stage::kOther] += std::max(0.0, wall - times.total());
    s.last_step_times = times;
    s.timers += times;
  }

 private:
  static std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  void mark(const char* stage) {
    if (settings_.record_trace) state_.trace.emplace_back(stage);
  }

  template <class F>
  void require_finite(const F& field, const char* stage) const {
    if (!field.all_finite())
      throw Error("step " + std::to_string(state_.step_index) + ": non-finite values after stage '" + stage + "'");
  }

  void require_no_overlap() const {
    const auto& phis = state_.body_phi;
    for (std::size_t a = 0; a < phis.size(); ++a)
      for (std::size_t b = a + 1; b < phis.size(); ++b)
        if (solids_overlap(phis[a], phis[b]))
          throw Error("simulation: bodies " + std::to_string(a) + " and " + std::to_string(b) +
                      " overlap; contact is not modelled");
  }

  bool needs_buoyancy() const {
    const auto& s = state_;
    if (settings_.gravity == Vec<Dim>{}) return false;
    if (s.iface.rho1 != s.iface.rho2) return true;
    return std::any_of(s.bodies.begin(), s.bodies.end(), [](const RigidBody<Dim>& b) { return !b.fixed; });
  }

  ScalarField<Dim> current_density() const {
    const auto& s = state_;
    ScalarField<Dim> rho = s.iface.rho1 == s.iface.rho2 ? ScalarField<Dim>(s.spec, s.iface.rho1) : density_field(s.iface);
    for (std::size_t k = 0; k < s.bodies.size(); ++k) compose_body_density(rho, s.bodies[k], s.body_phi[k], epsilon());
    return rho;
  }

  // Rigid projection, penalization and blending for every body. The
  // penalization acts on the fluid fields (u_tilde, omega_tilde); blending is
  // cumulative over bodies in declaration order.
  void couple_bodies(const VectorField<Dim>& u_tilde, VectorField<Dim>& u, VorticityField<Dim>& omega,
                     VorticityField<Dim>& rhs) {
    auto& s = state_;
    const double eps = epsilon();
    const double lambda = 1.0 / s.dt;
    for (std::size_t k = 0; k < s.bodies.size(); ++k) {
      auto& body = s.bodies[k];
      const auto& phi_s = s.body_phi[k];
      Vorticity<Dim> omega_bar{};
      if (body.fixed) {
        body.velocity = {};
        body.angular_velocity = {};
      } else {
        const auto proj = project_rigid(u_tilde, s.omega, phi_s, eps);
        body.velocity = proj.velocity;
        body.angular_velocity = proj.angular_velocity;
        omega_bar = proj.mean_vorticity;
      }
      const auto u_bar = rigid_velocity_field(body, s.spec);
      const auto source = penalization_source(u_tilde, u_bar, s.omega, omega_bar, phi_s, eps, lambda);
      for (std::size_t i = 0; i < phi_s.size(); ++i) {
        if (smoothed_heaviside(phi_s[i] / eps) != 1.0) continue;
        const auto relaxed = s.omega.node(i) + s.dt * source.node(i);
        s.relaxation_defect = std::max(s.relaxation_defect, norm(relaxed - omega_bar));
      }
      rhs += source;
      auto blended = blend_fields(u, omega, body, phi_s, eps);
      u = std::move(blended.velocity);
      omega = std::move(blended.vorticity);
    }
  }

  void seed_source_particles(const VorticityField<Dim>& rhs) {
    auto& s = state_;
    for (std::size_t lin = 0; lin < rhs.size(); ++lin) {
      if (occupied_[lin]) continue;
      const auto w = rhs.node(lin);
      if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) continue;
      s.particles.push_back(s.spec.position(s.spec.unravel(lin)), Vorticity<Dim>{});
      occupied_[lin] = true;
    }
  }

  // Particles where |omega| exceeds the threshold, the rest stays on the grid.
  void split_into_particles() {
    auto& s = state_;
    s.particles = create_particles(s.omega, settings_.creation_threshold_rel);
    s.particles.volume = s.spec.cell_volume();
    s.residual = VorticityField<Dim>(s.spec);
    occupied_.assign(s.omega.size(), false);
    const double peak = s.omega.max_norm();
    const double cut = settings_.creation_threshold_rel * peak;
    for (std::size_t lin = 0; lin < s.omega.size(); ++lin) {
      const auto w = s.omega.node(lin);
      if (peak > 0.0 && norm(w) > cut) {
        occupied_[lin] = true;
      } else {
        s.residual.set_node(lin, w);
      }
    }
  }

  PoissonPlan<Dim> plan_;
  SolverSettings<Dim> settings_;
  SimulationState<Dim> state_;
  std::vector<bool> occupied_;
};

}  // namespace vortexflow
