#pragma once

// Second-order finite differences on node-centered fields. Periodic axes wrap;
// dirichlet axes switch to one-sided second-order stencils on the first and
// last node.

#include <algorithm>
#include <cmath>
#include <span>

#include "vortexflow/grid.hpp"

namespace vortexflow {

namespace detail {

template <int Dim>
inline double first_difference(std::span<const double> f, const GridSpec<Dim>& s, const Index<Dim>& idx,
                               std::size_t lin, int axis) {
  const int i = idx[axis];
  const int n = s.n[axis];
  const std::ptrdiff_t st = s.stride(axis);
  const auto L = static_cast<std::ptrdiff_t>(lin);
  const double inv2h = 0.5 / s.h;
  if (s.periodic(axis)) {
    const std::ptrdiff_t up = i + 1 < n ? L + st : L + st - n * st;
    const std::ptrdiff_t dn = i > 0 ? L - st : L - st + n * st;
    return (f[up] - f[dn]) * inv2h;
  }
  if (i == 0) return (-3.0 * f[L] + 4.0 * f[L + st] - f[L + 2 * st]) * inv2h;
  if (i == n - 1) return (3.0 * f[L] - 4.0 * f[L - st] + f[L - 2 * st]) * inv2h;
  return (f[L + st] - f[L - st]) * inv2h;
}

template <int Dim>
inline double second_difference(std::span<const double> f, const GridSpec<Dim>& s, const Index<Dim>& idx,
                                std::size_t lin, int axis) {
  const int i = idx[axis];
  const int n = s.n[axis];
  const std::ptrdiff_t st = s.stride(axis);
  const auto L = static_cast<std::ptrdiff_t>(lin);
  const double inv_h2 = 1.0 / (s.h * s.h);
  if (s.periodic(axis)) {
    const std::ptrdiff_t up = i + 1 < n ? L + st : L + st - n * st;
    const std::ptrdiff_t dn = i > 0 ? L - st : L - st + n * st;
    return (f[up] - 2.0 * f[L] + f[dn]) * inv_h2;
  }
  if (i == 0) return (2.0 * f[L] - 5.0 * f[L + st] + 4.0 * f[L + 2 * st] - f[L + 3 * st]) * inv_h2;
  if (i == n - 1) return (2.0 * f[L] - 5.0 * f[L - st] + 4.0 * f[L - 2 * st] - f[L - 3 * st]) * inv_h2;
  return (f[L + st] - 2.0 * f[L] + f[L - st]) * inv_h2;
}

}  // namespace detail

template <int Dim>
ScalarField<Dim> derivative(const ScalarField<Dim>& f, int axis) {
  ScalarField<Dim> out(f.spec());
  const auto& s = f.spec();
  const auto in = f.values();
  for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
    out[lin] = detail::first_difference(in, s, idx, lin, axis);
  });
  return out;
}

template <int Dim>
VectorField<Dim> gradient(const ScalarField<Dim>& f) {
  VectorField<Dim> out;
  for (int a = 0; a < Dim; ++a) out[a] = derivative(f, a);
  return out;
}

template <int Dim>
ScalarField<Dim> divergence(const VectorField<Dim>& v) {
  v.require_consistent();
  const auto& s = v.spec();
  ScalarField<Dim> out(s);
  for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
    double d = 0.0;
    for (int a = 0; a < Dim; ++a) d += detail::first_difference(v[a].values(), s, idx, lin, a);
    out[lin] = d;
  });
  return out;
}

template <int Dim>
ScalarField<Dim> laplacian(const ScalarField<Dim>& f) {
  const auto& s = f.spec();
  ScalarField<Dim> out(s);
  const auto in = f.values();
  for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
    double d = 0.0;
    for (int a = 0; a < Dim; ++a) d += detail::second_difference(in, s, idx, lin, a);
    out[lin] = d;
  });
  return out;
}

/// 2D curl: the scalar dv_y/dx - dv_x/dy, stored as a one-component field.
inline VorticityField<2> curl(const VectorField<2>& v) {
  v.require_consistent();
  const auto& s = v.spec();
  VorticityField<2> out(s);
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    out[0][lin] = detail::first_difference(v[1].values(), s, idx, lin, 0) -
                  detail::first_difference(v[0].values(), s, idx, lin, 1);
  });
  return out;
}

inline VectorField<3> curl(const VectorField<3>& v) {
  v.require_consistent();
  const auto& s = v.spec();
  VectorField<3> out(s);
  for_each_node(s, [&](std::size_t lin, const Index<3>& idx) {
    auto d = [&](int c, int axis) { return detail::first_difference(v[c].values(), s, idx, lin, axis); };
    out[0][lin] = d(2, 1) - d(1, 2);
    out[1][lin] = d(0, 2) - d(2, 0);
    out[2][lin] = d(1, 0) - d(0, 1);
  });
  return out;
}

/// Conservative variable-coefficient diffusion div(nu grad f). Face
/// coefficients are arithmetic means of the adjacent nodes; dirichlet walls
/// carry no flux, so the node sum of the result telescopes to zero.
template <int Dim>
ScalarField<Dim> diffusion(const ScalarField<Dim>& f, const ScalarField<Dim>& nu) {
  f.require_same(nu);
  const auto& s = f.spec();
  ScalarField<Dim> out(s);
  const double inv_h2 = 1.0 / (s.h * s.h);
  for_each_node(s, [&](std::size_t lin, const Index<Dim>& idx) {
    const auto L = static_cast<std::ptrdiff_t>(lin);
    double acc = 0.0;
    for (int a = 0; a < Dim; ++a) {
      const int i = idx[a];
      const int n = s.n[a];
      const std::ptrdiff_t st = s.stride(a);
      const bool periodic = s.periodic(a);
      if (i + 1 < n || periodic) {
        const std::ptrdiff_t up = i + 1 < n ? L + st : L + st - n * st;
        acc += 0.5 * (nu[L] + nu[up]) * (f[up] - f[L]);
      }
      if (i > 0 || periodic) {
        const std::ptrdiff_t dn = i > 0 ? L - st : L - st + n * st;
        acc -= 0.5 * (nu[L] + nu[dn]) * (f[L] - f[dn]);
      }
    }
    out[lin] = acc * inv_h2;
  });
  return out;
}

/// Mean curvature div(grad phi / |grad phi|) with centered differences.
/// Nodes with |grad phi| < 1e-8 get 0; the result is clamped to |kappa| <= 1/h.
template <int Dim>
ScalarField<Dim> curvature(const ScalarField<Dim>& phi) {
  constexpr double kGradientGuard = 1e-8;
  const auto& s = phi.spec();
  const auto g = gradient(phi);
  VectorField<Dim> normal(s);
  ScalarField<Dim> degenerate(s);
  for_each_node(s, [&](std::size_t lin, const Index<Dim>&) {
    const double mag = norm(g.node(lin));
    if (mag < kGradientGuard) {
      degenerate[lin] = 1.0;
      return;
    }
    for (int a = 0; a < Dim; ++a) normal[a][lin] = g[a][lin] / mag;
  });
  auto kappa = divergence(normal);
  const double limit = 1.0 / s.h;
  for_each_node(s, [&](std::size_t lin, const Index<Dim>&) {
    kappa[lin] = degenerate[lin] != 0.0 ? 0.0 : std::clamp(kappa[lin], -limit, limit);
  });
  return kappa;
}

}  // namespace vortexflow
