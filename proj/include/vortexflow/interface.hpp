#pragma once

// Liquid/gas interface: level-set transport and redistancing, smoothed
// material fields and the bi-phase vorticity sources.
//
// Convention: phi < 0 in fluid 1, phi > 0 in fluid 2, so H(phi / eps) is the
// fluid-1 indicator and grad H = -zeta(phi / eps) grad phi / eps.

#include <algorithm>
#include <cmath>

#include "vortexflow/grid.hpp"
#include "vortexflow/smoothing.hpp"
#include "vortexflow/stencil.hpp"

namespace vortexflow {

template <int Dim>
struct FluidInterface {
  ScalarField<Dim> phi;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;

  void validate() const {
    if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw Error("interface: densities must be positive");
    if (nu1 < 0.0 || nu2 < 0.0) throw Error("interface: viscosities must be non-negative");
    if (tau < 0.0) throw Error("interface: surface tension must be non-negative");
    if (!(epsilon > 0.0)) throw Error("interface: epsilon must be positive");
  }

  /// Both phases identical and no surface tension: phi is inert.
  bool single_phase() const { return rho1 == rho2 && nu1 == nu2 && tau == 0.0; }
};

/// Semi-Lagrangian transport of phi by u over dt: midpoint backtrace from each
/// node, clamped cubic sampling of the old field at the departure point.
template <int Dim>
ScalarField<Dim> advect_phi_semi_lagrangian(const ScalarField<Dim>& phi, const VectorField<Dim>& u, double dt) {
  phi.require_same(u[0]);
  const auto& s = phi.spec();
  ScalarField<Dim> out(s);
  for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
    const Vec<Dim> x = s.position(idx);
    const Vec<Dim> mid = x - (0.5 * dt) * u.node(lin);
    const Vec<Dim> departure = x - dt * sample_linear(u, mid);
    out[lin] = sample_cubic(phi, departure);
  });
  return out;
}

/// Pseudo-time redistancing d phi / d tau = S(phi0) (1 - |grad phi|) with
/// Godunov upwinding, S(phi0) = phi0 / sqrt(phi0^2 + h^2), d tau = 0.3 h.
/// Dirichlet boundaries extrapolate linearly.
template <int Dim>
ScalarField<Dim> reinitialize(const ScalarField<Dim>& phi0, int iterations) {
  const auto& s = phi0.spec();
  const double h = s.h;
  const double dtau = 0.3 * h;
  ScalarField<Dim> sign(s);
  for (std::size_t i = 0; i < phi0.size(); ++i) sign[i] = phi0[i] / std::sqrt(phi0[i] * phi0[i] + h * h);

  ScalarField<Dim> cur = phi0;
  ScalarField<Dim> next(s);
  for (int it = 0; it < iterations; ++it) {
    for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
      const auto L = static_cast<std::ptrdiff_t>(lin);
      const double f = cur[lin];
      const double sg = sign[lin];
      double grad2 = 0.0;
      for (int a = 0; a < Dim; ++a) {
        const int i = idx[a];
        const int n = s.n[a];
        const std::ptrdiff_t st = s.stride(a);
        double up, dn;
        if (s.periodic(a)) {
          up = cur[i + 1 < n ? L + st : L + st - n * st];
          dn = cur[i > 0 ? L - st : L - st + n * st];
        } else {
          up = i + 1 < n ? cur[L + st] : 2.0 * f - cur[L - st];
          dn = i > 0 ? cur[L - st] : 2.0 * f - cur[L + st];
        }
        const double back = (f - dn) / h;
        const double fwd = (up - f) / h;
        if (sg > 0.0) {
          const double bp = std::max(back, 0.0), fm = std::min(fwd, 0.0);
          grad2 += std::max(bp * bp, fm * fm);
        } else {
          const double bm = std::min(back, 0.0), fp = std::max(fwd, 0.0);
          grad2 += std::max(bm * bm, fp * fp);
        }
      }
      next[lin] = f - dtau * sg * (std::sqrt(grad2) - 1.0);
    });
    std::swap(cur, next);
  }
  return cur;
}

template <int Dim>
ScalarField<Dim> density_field(const FluidInterface<Dim>& iface) {
  const auto& s = iface.phi.spec();
  ScalarField<Dim> rho(s);
  for_each_node(s, [&](std::size_t lin, const Index<Dim>&) {
    const double H = smoothed_heaviside(iface.phi[lin] / iface.epsilon);
    rho[lin] = iface.rho1 * H + iface.rho2 * (1.0 - H);
  });
  return rho;
}

template <int Dim>
ScalarField<Dim> viscosity_field(const FluidInterface<Dim>& iface) {
  const auto& s = iface.phi.spec();
  ScalarField<Dim> nu(s);
  for_each_node(s, [&](std::size_t lin, const Index<Dim>&) {
    const double H = smoothed_heaviside(iface.phi[lin] / iface.epsilon);
    nu[lin] = iface.nu1 * H + iface.nu2 * (1.0 - H);
  });
  return nu;
}

/// Pointwise grad rho = -(rho1 - rho2) zeta(phi / eps) grad phi / eps.
template <int Dim>
VectorField<Dim> density_gradient(const FluidInterface<Dim>& iface) {
  const auto& s = iface.phi.spec();
  const auto g = gradient(iface.phi);
  VectorField<Dim> out(s);
  const double scale = -(iface.rho1 - iface.rho2) / iface.epsilon;
  for_each_node(s, [&](std::size_t lin, const Index<Dim>&) {
    const double z = smoothing_delta(iface.phi[lin] / iface.epsilon);
    if (z == 0.0) return;
    for (int a = 0; a < Dim; ++a) out[a][lin] = scale * z * g[a][lin];
  });
  return out;
}

/// Boussinesq baroclinic source curl(rho g) for constant g, taken as the
/// discrete curl of the density field so that its node sum telescopes to zero
/// on periodic grids (circulation is not created).
template <int Dim>
VorticityField<Dim> buoyancy_curl(const ScalarField<Dim>& rho, const Vec<Dim>& g) {
  const auto& s = rho.spec();
  VorticityField<Dim> out(s);
  const auto r = rho.values();
  for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
    Vec<Dim> grad{};
    for (int a = 0; a < Dim; ++a)
      if (g != Vec<Dim>{}) grad[a] = detail::first_difference(r, s, idx, lin, a);
    out.set_node(lin, vorticity_cross(grad, g));
  });
  return out;
}

template <int Dim>
VorticityField<Dim> buoyancy_curl(const FluidInterface<Dim>& iface, const Vec<Dim>& g) {
  return buoyancy_curl(density_field(iface), g);
}

/// Vorticity source of the capillary force F = -tau kappa zeta(phi / eps)
/// grad phi / eps = tau kappa grad H(phi / eps), i.e. curl(F). The gradient of
/// the smoothed Heaviside is taken on the grid so that a constant curvature
/// gives an exactly curl-free force. F points into fluid 1 where kappa > 0.
template <int Dim>
VorticityField<Dim> surface_tension_source(const FluidInterface<Dim>& iface) {
  const auto& s = iface.phi.spec();
  if (iface.tau == 0.0) return VorticityField<Dim>(s);
  const auto kappa = curvature(iface.phi);
  ScalarField<Dim> H(s);
  for (std::size_t i = 0; i < H.size(); ++i) H[i] = smoothed_heaviside(iface.phi[i] / iface.epsilon);
  VectorField<Dim> force = gradient(H);
  for (int a = 0; a < Dim; ++a)
    for (std::size_t i = 0; i < H.size(); ++i) force[a][i] *= iface.tau * kappa[i];
  return curl(force);
}

/// Liquid-volume proxy sum H(phi / eps) h^Dim.
template <int Dim>
double liquid_volume(const ScalarField<Dim>& phi, double epsilon) {
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += smoothed_heaviside(phi[i] / epsilon);
  return sum * phi.spec().cell_volume();
}

}  // namespace vortexflow
