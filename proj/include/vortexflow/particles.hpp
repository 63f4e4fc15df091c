#pragma once

// Vortex particles and their coupling to the grid through the M4' kernel.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vortexflow/grid.hpp"

namespace vortexflow {

/// M4' interpolation kernel: W(0) = 1, zero at every other integer, partition
/// of unity and exact reproduction of polynomials up to degree 2.
inline double m4prime(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0 - 2.5 * a * a + 1.5 * a * a * a;
  if (a <= 2.0) return 0.5 * (2.0 - a) * (2.0 - a) * (1.0 - a);
  return 0.0;
}

/// 1D M4' stencil of a point with grid coordinate s: nodes floor(s)-1 ..
/// floor(s)+2 (before wrapping) and their weights.
struct KernelStencil {
  int base = 0;
  std::array<double, 4> weight{};
};

inline KernelStencil kernel_stencil(double s) {
  const double f = std::floor(s);
  const double t = s - f;
  return {static_cast<int>(f) - 1, {m4prime(t + 1.0), m4prime(t), m4prime(1.0 - t), m4prime(2.0 - t)}};
}

template <int Dim>
struct ParticleSet {
  std::vector<Vec<Dim>> positions;
  std::vector<Vorticity<Dim>> strengths;
  /// h^Dim for every particle.
  double volume = 0.0;
  /// Number of positions clamped onto a dirichlet boundary by the last advection.
  std::size_t clamped = 0;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  void push_back(const Vec<Dim>& x, const Vorticity<Dim>& w) {
    positions.push_back(x);
    strengths.push_back(w);
  }
};

/// Wraps x onto periodic axes and clamps it onto dirichlet axes. Returns true
/// when clamping moved the point.
template <int Dim>
bool wrap_position(const GridSpec<Dim>& spec, Vec<Dim>& x) {
  bool clamped = false;
  for (int a = 0; a < Dim; ++a) {
    const double L = spec.extent(a);
    if (spec.periodic(a)) {
      double r = x[a] - spec.origin[a];
      r -= L * std::floor(r / L);
      if (r >= L) r = 0.0;
      x[a] = spec.origin[a] + r;
    } else {
      const double hi = spec.origin[a] + (spec.n[a] - 1) * spec.h;
      if (x[a] < spec.origin[a] || x[a] > hi) {
        x[a] = std::clamp(x[a], spec.origin[a], hi);
        clamped = true;
      }
    }
  }
  return clamped;
}

namespace detail {

// Tensor-product M4' weights at x. Calls visit(linear_node, weight) for every
// in-domain stencil node; out-of-domain nodes on dirichlet axes are skipped.
template <int Dim, class Visit>
void for_each_kernel_node(const GridSpec<Dim>& spec, const Vec<Dim>& x, Visit&& visit) {
  std::array<KernelStencil, Dim> st;
  for (int a = 0; a < Dim; ++a) st[a] = kernel_stencil((x[a] - spec.origin[a]) / spec.h);
  std::array<std::array<std::ptrdiff_t, 4>, Dim> node{};
  for (int a = 0; a < Dim; ++a) {
    const int n = spec.n[a];
    for (int m = 0; m < 4; ++m) {
      int j = st[a].base + m;
      if (spec.periodic(a)) {
        j %= n;
        if (j < 0) j += n;
      } else if (j < 0 || j >= n) {
        j = -1;
      }
      node[a][m] = j;
    }
  }
  constexpr int kCount = Dim == 2 ? 16 : 64;
  for (int c = 0; c < kCount; ++c) {
    double w = 1.0;
    std::ptrdiff_t lin = 0;
    bool inside = true;
    for (int a = Dim - 1; a >= 0; --a) {
      const int m = (c >> (2 * a)) & 3;
      if (node[a][m] < 0) {
        inside = false;
        break;
      }
      w *= st[a].weight[m];
      lin = lin * spec.n[a] + node[a][m];
    }
    if (inside && w != 0.0) visit(static_cast<std::size_t>(lin), w);
  }
}

}  // namespace detail

template <int Dim>
void require_finite_positions(std::span<const Vec<Dim>> positions, const char* op) {
  for (std::size_t p = 0; p < positions.size(); ++p)
    if (!all_finite(positions[p])) throw Error(std::string(op) + ": non-finite position for particle " + std::to_string(p));
}

/// Interpolates every component of `field` at `positions` with the M4' kernel.
template <int Dim, int Comps>
std::vector<std::array<double, Comps>> interpolate_to_particles(const VectorField<Dim, Comps>& field,
                                                                std::span<const Vec<Dim>> positions) {
  require_finite_positions<Dim>(positions, "interpolate_to_particles");
  const auto& spec = field.spec();
  std::vector<std::array<double, Comps>> out(positions.size());
  parallel_for(static_cast<std::ptrdiff_t>(positions.size()), [&](std::ptrdiff_t p) {
    std::array<double, Comps> acc{};
    detail::for_each_kernel_node(spec, positions[p], [&](std::size_t lin, double w) {
      for (int c = 0; c < Comps; ++c) acc[c] += w * field[c][lin];
    });
    out[p] = acc;
  });
  return out;
}

template <int Dim>
std::vector<double> interpolate_to_particles(const ScalarField<Dim>& field, std::span<const Vec<Dim>> positions) {
  require_finite_positions<Dim>(positions, "interpolate_to_particles");
  const auto& spec = field.spec();
  std::vector<double> out(positions.size());
  parallel_for(static_cast<std::ptrdiff_t>(positions.size()), [&](std::ptrdiff_t p) {
    double acc = 0.0;
    detail::for_each_kernel_node(spec, positions[p], [&](std::size_t lin, double w) { acc += w * field[lin]; });
    out[p] = acc;
  });
  return out;
}

/// Distributes particle strengths onto the grid: omega(node) = sum_p omega_p
/// W(node - x_p), the transpose of interpolate_to_particles.
///
/// Implemented as a gather: particles are counting-sorted by the cell holding
/// them, then every node sums the particles of its 4^Dim contributing cells in
/// a fixed order. The result does not depend on the number of threads.
template <int Dim>
VorticityField<Dim> remesh(const ParticleSet<Dim>& particles, const GridSpec<Dim>& spec) {
  constexpr int C = kVorticityComponents<Dim>;
  VorticityField<Dim> out(spec);
  if (particles.empty()) return out;
  require_finite_positions<Dim>(particles.positions, "remesh");

  const std::size_t np = particles.size();
  const std::size_t cells = spec.node_count();
  std::vector<std::size_t> cell_of(np);
  std::vector<Vec<Dim>> frac(np);
  for (std::size_t p = 0; p < np; ++p) {
    Index<Dim> base{};
    for (int a = 0; a < Dim; ++a) {
      const int n = spec.n[a];
      const double s = (particles.positions[p][a] - spec.origin[a]) / spec.h;
      double f = std::floor(s);
      frac[p][a] = s - f;
      int b = static_cast<int>(f);
      if (spec.periodic(a)) {
        b %= n;
        if (b < 0) b += n;
      } else if (b < 0 || b >= n) {
        throw Error("remesh: particle " + std::to_string(p) + " lies outside the dirichlet domain");
      }
      base[a] = b;
    }
    cell_of[p] = spec.linear(base);
  }
  std::vector<std::size_t> start(cells + 1, 0);
  for (std::size_t p = 0; p < np; ++p) ++start[cell_of[p] + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::size_t> order(np);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t p = 0; p < np; ++p) order[fill[cell_of[p]]++] = p;
  }

  // Node j receives from cells f = j + 1 - m, m = 0..3, with weight
  // W(t + 1 - m) where t is the particle's offset inside cell f.
  for_each_node(spec, [&](std::size_t lin, const Index<Dim>& idx) {
    std::array<double, C> acc{};
    constexpr int kCount = Dim == 2 ? 16 : 64;
    for (int c = 0; c < kCount; ++c) {
      Index<Dim> cell{};
      std::array<int, Dim> m{};
      bool inside = true;
      for (int a = 0; a < Dim; ++a) {
        m[a] = (c >> (2 * a)) & 3;
        int f = idx[a] + 1 - m[a];
        const int n = spec.n[a];
        if (spec.periodic(a)) {
          if (f < 0) f += n;
          if (f >= n) f -= n;
        } else if (f < 0 || f >= n) {
          inside = false;
          break;
        }
        cell[a] = f;
      }
      if (!inside) continue;
      const std::size_t cl = spec.linear(cell);
      for (std::size_t k = start[cl]; k < start[cl + 1]; ++k) {
        const std::size_t p = order[k];
        double w = 1.0;
        for (int a = 0; a < Dim; ++a) w *= m4prime(frac[p][a] + 1.0 - m[a]);
        if (w == 0.0) continue;
        for (int q = 0; q < C; ++q) acc[q] += w * particles.strengths[p][q];
      }
    }
    out.set_node(lin, acc);
  });
  return out;
}

/// Where a frozen strength right-hand side is sampled during a step.
enum class RhsSampling {
  kMidpoint,   ///< at the RK midpoint position (classic midpoint rule)
  kStepStart,  ///< at the start-of-step position (explicit Euler for frozen sources)
};

namespace detail {

template <class T>
void require_finite_samples(const std::vector<T>& v, const char* what) {
  for (std::size_t p = 0; p < v.size(); ++p)
    if (!all_finite(v[p])) throw Error(std::string("advect: non-finite ") + what + " sample at particle " + std::to_string(p));
}

template <int Dim>
std::vector<Vec<Dim>> displaced(const GridSpec<Dim>& spec, const std::vector<Vec<Dim>>& x,
                                const std::vector<Vec<Dim>>& u, double dt, std::size_t* clamped) {
  std::vector<Vec<Dim>> out(x.size());
  std::size_t count = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    out[p] = x[p] + dt * u[p];
    if (wrap_position(spec, out[p])) ++count;
  }
  if (clamped != nullptr) *clamped = count;
  return out;
}

}  // namespace detail

/// Midpoint (RK2) update of positions and strengths.
///
/// `velocity(positions)` returns one Vec<Dim> per position and
/// `strength_rhs(positions)` one Vorticity<Dim> per position.
template <int Dim, class VelocitySampler, class RhsSampler>
ParticleSet<Dim> advect_rk2(const ParticleSet<Dim>& particles, const GridSpec<Dim>& spec, VelocitySampler&& velocity,
                            RhsSampler&& strength_rhs, double dt, RhsSampling sampling = RhsSampling::kMidpoint) {
  ParticleSet<Dim> out;
  out.volume = particles.volume;
  if (particles.empty()) return out;
  const std::vector<Vec<Dim>> u0 = velocity(std::span<const Vec<Dim>>(particles.positions));
  detail::require_finite_samples(u0, "velocity");
  const auto mid = detail::displaced(spec, particles.positions, u0, 0.5 * dt, nullptr);
  const std::vector<Vec<Dim>> u1 = velocity(std::span<const Vec<Dim>>(mid));
  detail::require_finite_samples(u1, "velocity");
  const std::vector<Vorticity<Dim>> rhs =
      strength_rhs(std::span<const Vec<Dim>>(sampling == RhsSampling::kMidpoint ? mid : particles.positions));
  detail::require_finite_samples(rhs, "strength right-hand side");

  out.positions = detail::displaced(spec, particles.positions, u1, dt, &out.clamped);
  out.strengths.resize(particles.size());
  for (std::size_t p = 0; p < particles.size(); ++p) out.strengths[p] = particles.strengths[p] + dt * rhs[p];
  return out;
}

/// Classic RK4 variant with the same contract as advect_rk2.
template <int Dim, class VelocitySampler, class RhsSampler>
ParticleSet<Dim> advect_rk4(const ParticleSet<Dim>& particles, const GridSpec<Dim>& spec, VelocitySampler&& velocity,
                            RhsSampler&& strength_rhs, double dt, RhsSampling sampling = RhsSampling::kMidpoint) {
  ParticleSet<Dim> out;
  out.volume = particles.volume;
  if (particles.empty()) return out;
  const auto& x0 = particles.positions;
  auto sample = [&](const std::vector<Vec<Dim>>& x) {
    auto u = velocity(std::span<const Vec<Dim>>(x));
    detail::require_finite_samples(u, "velocity");
    return u;
  };
  auto strength = [&](const std::vector<Vec<Dim>>& x) {
    auto r = strength_rhs(std::span<const Vec<Dim>>(x));
    detail::require_finite_samples(r, "strength right-hand side");
    return r;
  };
  const auto k1 = sample(x0);
  const auto x1 = detail::displaced(spec, x0, k1, 0.5 * dt, nullptr);
  const auto k2 = sample(x1);
  const auto x2 = detail::displaced(spec, x0, k2, 0.5 * dt, nullptr);
  const auto k3 = sample(x2);
  const auto x3 = detail::displaced(spec, x0, k3, dt, nullptr);
  const auto k4 = sample(x3);

  std::vector<Vec<Dim>> slope(x0.size());
  for (std::size_t p = 0; p < x0.size(); ++p) slope[p] = (1.0 / 6.0) * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  out.positions = detail::displaced(spec, x0, slope, dt, &out.clamped);

  out.strengths.resize(x0.size());
  if (sampling == RhsSampling::kStepStart) {
    const auto r = strength(x0);
    for (std::size_t p = 0; p < x0.size(); ++p) out.strengths[p] = particles.strengths[p] + dt * r[p];
  } else {
    const auto r1 = strength(x0), r2 = strength(x1), r3 = strength(x2), r4 = strength(x3);
    for (std::size_t p = 0; p < x0.size(); ++p)
      out.strengths[p] = particles.strengths[p] + (dt / 6.0) * (r1[p] + 2.0 * r2[p] + 2.0 * r3[p] + r4[p]);
  }
  return out;
}

/// One particle per node with |omega| > threshold_rel * max |omega|, placed on
/// the node and carrying the node value. Empty when omega vanishes.
template <int Dim>
ParticleSet<Dim> create_particles(const VorticityField<Dim>& omega, double threshold_rel) {
  const auto& spec = omega.spec();
  ParticleSet<Dim> out;
  out.volume = spec.cell_volume();
  const double peak = omega.max_norm();
  if (peak == 0.0) return out;
  const double cut = threshold_rel * peak;
  for (std::size_t lin = 0; lin < omega.size(); ++lin) {
    const auto w = omega.node(lin);
    if (norm(w) > cut) out.push_back(spec.position(spec.unravel(lin)), w);
  }
  return out;
}

}  // namespace vortexflow
