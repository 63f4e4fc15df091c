#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vortexflow {

/// Error raised by every module. The message names the operation (and the
/// solver stage, when raised from a time step).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = std::numbers::pi;

// The bound is written as an expression so that Dim is never deduced from a
// std::array argument (its size_t bound would not match the int parameter).
template <int Dim>
using Vec = std::array<double, static_cast<std::size_t>(Dim)>;

template <int Dim>
using Index = std::array<int, static_cast<std::size_t>(Dim)>;

/// Vorticity is a scalar in 2D and a 3-vector in 3D.
template <int Dim>
inline constexpr int kVorticityComponents = Dim == 2 ? 1 : 3;

template <int Dim>
using Vorticity = std::array<double, kVorticityComponents<Dim>>;

template <std::size_t N>
constexpr std::array<double, N> operator+(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
constexpr std::array<double, N> operator-(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}

template <std::size_t N>
constexpr std::array<double, N> operator*(double s, std::array<double, N> a) {
  for (auto& v : a) v *= s;
  return a;
}

template <std::size_t N>
constexpr double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double norm(const std::array<double, N>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t N>
bool all_finite(const std::array<double, N>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

/// Planar cross product a_x b_y - a_y b_x.
constexpr double cross(const Vec<2>& a, const Vec<2>& b) { return a[0] * b[1] - a[1] * b[0]; }

constexpr Vec<3> cross(const Vec<3>& a, const Vec<3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Rigid rotation velocity Omega x r. In 2D Omega is the out-of-plane scalar.
constexpr Vec<2> rotational_velocity(const Vorticity<2>& omega, const Vec<2>& r) {
  return {-omega[0] * r[1], omega[0] * r[0]};
}

constexpr Vec<3> rotational_velocity(const Vorticity<3>& omega, const Vec<3>& r) { return cross(omega, r); }

/// n x w where the result is a vorticity-shaped quantity.
constexpr Vorticity<2> vorticity_cross(const Vec<2>& a, const Vec<2>& b) { return {cross(a, b)}; }
constexpr Vorticity<3> vorticity_cross(const Vec<3>& a, const Vec<3>& b) { return cross(a, b); }

}  // namespace vortexflow
