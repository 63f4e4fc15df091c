#pragma once

// Uniform Cartesian grid and the node-centered fields living on it.
//
// Node (i, j[, k]) sits at origin + (i, j[, k]) * h. Storage is row-major with
// x fastest: linear = i + n_x * (j + n_y * k). On a periodic axis node n wraps
// to node 0; on a dirichlet axis the nodes -1 and n are the (virtual) walls.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vortexflow/core.hpp"
#include "vortexflow/parallel.hpp"

namespace vortexflow {

enum class Boundary { kPeriodic, kDirichlet };

inline std::string to_string(Boundary b) { return b == Boundary::kPeriodic ? "periodic" : "dirichlet"; }

template <int Dim>
struct GridSpec {
  static_assert(Dim == 2 || Dim == 3, "only 2D and 3D grids are supported");

  Index<Dim> n{};
  double h = 0.0;
  Vec<Dim> origin{};
  std::array<Boundary, Dim> bc{};

  std::size_t node_count() const {
    std::size_t total = 1;
    for (int a = 0; a < Dim; ++a) total *= static_cast<std::size_t>(n[a]);
    return total;
  }

  std::ptrdiff_t stride(int axis) const {
    std::ptrdiff_t s = 1;
    for (int a = 0; a < axis; ++a) s *= n[a];
    return s;
  }

  std::size_t linear(const Index<Dim>& idx) const {
    std::size_t lin = 0;
    for (int a = Dim - 1; a >= 0; --a) lin = lin * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>(idx[a]);
    return lin;
  }

  Index<Dim> unravel(std::size_t lin) const {
    Index<Dim> idx{};
    for (int a = 0; a < Dim; ++a) {
      idx[a] = static_cast<int>(lin % static_cast<std::size_t>(n[a]));
      lin /= static_cast<std::size_t>(n[a]);
    }
    return idx;
  }

  Vec<Dim> position(const Index<Dim>& idx) const {
    Vec<Dim> x{};
    for (int a = 0; a < Dim; ++a) x[a] = origin[a] + idx[a] * h;
    return x;
  }

  double extent(int axis) const { return n[axis] * h; }
  bool periodic(int axis) const { return bc[axis] == Boundary::kPeriodic; }

  bool all_periodic() const {
    for (int a = 0; a < Dim; ++a)
      if (!periodic(a)) return false;
    return true;
  }

  /// h^Dim, the volume attached to one node.
  double cell_volume() const { return std::pow(h, Dim); }

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("grid: spacing h must be positive and finite");
    for (int a = 0; a < Dim; ++a)
      if (n[a] < 8) throw Error("grid: every axis needs at least 8 nodes, axis " + std::to_string(a) + " has " + std::to_string(n[a]));
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

template <int Dim>
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec<Dim>& spec, double value = 0.0) : spec_(spec), data_(spec.node_count(), value) {}

  /// Samples f(position) at every node.
  template <class Fn>
  static ScalarField from_function(const GridSpec<Dim>& spec, Fn&& fn) {
    ScalarField out(spec);
    parallel_for(static_cast<std::ptrdiff_t>(out.size()),
                 [&](std::ptrdiff_t lin) { out.data_[lin] = fn(spec.position(spec.unravel(lin))); });
    return out;
  }

  const GridSpec<Dim>& spec() const { return spec_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t lin) { return data_[lin]; }
  double operator[](std::size_t lin) const { return data_[lin]; }
  double& at(const Index<Dim>& idx) { return data_[spec_.linear(idx)]; }
  double at(const Index<Dim>& idx) const { return data_[spec_.linear(idx)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  ScalarField& operator+=(const ScalarField& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  /// this += s * o
  void add_scaled(double s, const ScalarField& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  void require_same(const ScalarField& o) const {
    if (!(o.spec_ == spec_)) throw Error("field: grid spec mismatch");
  }

 private:
  GridSpec<Dim> spec_{};
  std::vector<double> data_;
};

/// Comps scalar components sharing one spec. Velocity uses Comps == Dim;
/// vorticity uses kVorticityComponents<Dim> (one component in 2D).
template <int Dim, int Comps = Dim>
struct VectorField {
  std::array<ScalarField<Dim>, Comps> comp;

  VectorField() = default;
  explicit VectorField(const GridSpec<Dim>& spec) {
    for (auto& c : comp) c = ScalarField<Dim>(spec);
  }

  static constexpr int components() { return Comps; }

  const GridSpec<Dim>& spec() const { return comp[0].spec(); }
  std::size_t size() const { return comp[0].size(); }

  ScalarField<Dim>& operator[](int c) { return comp[c]; }
  const ScalarField<Dim>& operator[](int c) const { return comp[c]; }

  std::array<double, Comps> node(std::size_t lin) const {
    std::array<double, Comps> v{};
    for (int c = 0; c < Comps; ++c) v[c] = comp[c][lin];
    return v;
  }
  void set_node(std::size_t lin, const std::array<double, Comps>& v) {
    for (int c = 0; c < Comps; ++c) comp[c][lin] = v[c];
  }

  VectorField& operator+=(const VectorField& o) {
    for (int c = 0; c < Comps; ++c) comp[c] += o.comp[c];
    return *this;
  }

  void add_scaled(double s, const VectorField& o) {
    for (int c = 0; c < Comps; ++c) comp[c].add_scaled(s, o.comp[c]);
  }

  /// Maximum over nodes of the Euclidean norm.
  double max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, norm(node(i)));
    return m;
  }

  bool all_finite() const {
    return std::all_of(comp.begin(), comp.end(), [](const ScalarField<Dim>& c) { return c.all_finite(); });
  }

  void require_consistent() const {
    for (int c = 1; c < Comps; ++c)
      if (!(comp[c].spec() == comp[0].spec())) throw Error("vector field: components have mismatched grid specs");
  }
};

template <int Dim>
using VorticityField = VectorField<Dim, kVorticityComponents<Dim>>;

/// Runs fn(linear, index) over all nodes; rows along x are distributed across
/// threads, so fn must only write to node `linear`.
template <int Dim, class Fn>
void for_each_node(const GridSpec<Dim>& spec, Fn&& fn) {
  const int nx = spec.n[0];
  const auto rows = static_cast<std::ptrdiff_t>(spec.node_count() / static_cast<std::size_t>(nx));
  parallel_for(rows, [&](std::ptrdiff_t row) {
    Index<Dim> idx{};
    std::ptrdiff_t r = row;
    for (int a = 1; a < Dim; ++a) {
      idx[a] = static_cast<int>(r % spec.n[a]);
      r /= spec.n[a];
    }
    std::size_t lin = static_cast<std::size_t>(row) * static_cast<std::size_t>(nx);
    for (int i = 0; i < nx; ++i, ++lin) {
      idx[0] = i;
      fn(lin, idx);
    }
  });
}

/// Minimum-image displacement x - c (periodic axes wrap to [-L/2, L/2)).
template <int Dim>
Vec<Dim> displacement(const GridSpec<Dim>& spec, const Vec<Dim>& x, const Vec<Dim>& c) {
  Vec<Dim> d{};
  for (int a = 0; a < Dim; ++a) {
    d[a] = x[a] - c[a];
    if (spec.periodic(a)) {
      const double L = spec.extent(a);
      d[a] -= L * std::floor(d[a] / L + 0.5);
    }
  }
  return d;
}

/// Multilinear interpolation of f at x. Periodic axes wrap; dirichlet axes
/// clamp x to the node range.
template <int Dim>
double sample_linear(const ScalarField<Dim>& f, const Vec<Dim>& x) {
  const auto& spec = f.spec();
  std::array<std::ptrdiff_t, Dim> lo{}, hi{};
  Vec<Dim> t{};
  for (int a = 0; a < Dim; ++a) {
    const int n = spec.n[a];
    double s = (x[a] - spec.origin[a]) / spec.h;
    if (spec.periodic(a)) {
      s -= n * std::floor(s / n);
      int i0 = static_cast<int>(s);
      if (i0 >= n) i0 = n - 1;
      t[a] = s - i0;
      lo[a] = i0;
      hi[a] = (i0 + 1) % n;
    } else {
      s = std::clamp(s, 0.0, static_cast<double>(n - 1));
      int i0 = std::min(static_cast<int>(s), n - 2);
      t[a] = s - i0;
      lo[a] = i0;
      hi[a] = i0 + 1;
    }
  }
  double result = 0.0;
  for (int corner = 0; corner < (1 << Dim); ++corner) {
    double w = 1.0;
    std::ptrdiff_t lin = 0;
    for (int a = Dim - 1; a >= 0; --a) {
      const bool upper = (corner >> a) & 1;
      w *= upper ? t[a] : 1.0 - t[a];
      lin = lin * spec.n[a] + (upper ? hi[a] : lo[a]);
    }
    if (w != 0.0) result += w * f[static_cast<std::size_t>(lin)];
  }
  return result;
}

/// Tensor-product Catmull-Rom interpolation of f at x, clamped to the range
/// of the 2^Dim nodes of the enclosing cell (no new extrema). Axis handling as
/// in sample_linear; stencil nodes beyond a dirichlet wall are clamped.
template <int Dim>
double sample_cubic(const ScalarField<Dim>& f, const Vec<Dim>& x) {
  const auto& spec = f.spec();
  std::array<std::array<std::ptrdiff_t, 4>, Dim> node{};
  std::array<std::array<double, 4>, Dim> weight{};
  for (int a = 0; a < Dim; ++a) {
    const int n = spec.n[a];
    double s = (x[a] - spec.origin[a]) / spec.h;
    int i0;
    if (spec.periodic(a)) {
      s -= n * std::floor(s / n);
      i0 = std::min(static_cast<int>(s), n - 1);
    } else {
      s = std::clamp(s, 0.0, static_cast<double>(n - 1));
      i0 = std::min(static_cast<int>(s), n - 2);
    }
    const double t = s - i0;
    weight[a] = {0.5 * (-t * t * t + 2 * t * t - t), 0.5 * (3 * t * t * t - 5 * t * t + 2),
                 0.5 * (-3 * t * t * t + 4 * t * t + t), 0.5 * (t * t * t - t * t)};
    for (int m = 0; m < 4; ++m) {
      int j = i0 - 1 + m;
      j = spec.periodic(a) ? ((j % n) + n) % n : std::clamp(j, 0, n - 1);
      node[a][m] = j;
    }
  }
  constexpr int kCount = 1 << (2 * Dim);
  double result = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int c = 0; c < kCount; ++c) {
    double w = 1.0;
    std::ptrdiff_t lin = 0;
    bool inner = true;
    for (int a = Dim - 1; a >= 0; --a) {
      const int m = (c >> (2 * a)) & 3;
      w *= weight[a][m];
      lin = lin * spec.n[a] + node[a][m];
      inner = inner && (m == 1 || m == 2);
    }
    const double v = f[static_cast<std::size_t>(lin)];
    result += w * v;
    if (inner) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return std::clamp(result, lo, hi);
}

template <int Dim, int Comps>
std::array<double, Comps> sample_linear(const VectorField<Dim, Comps>& f, const Vec<Dim>& x) {
  std::array<double, Comps> v{};
  for (int c = 0; c < Comps; ++c) v[c] = sample_linear(f[c], x);
  return v;
}

}  // namespace vortexflow
