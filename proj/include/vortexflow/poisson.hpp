#pragma once

// Fast Poisson solver for the stream function, Laplacian(psi) = -omega.
//
// Fully periodic grids use FFTW's real-to-complex DFT. Otherwise each axis is
// diagonalised by a real transform: a half-complex DFT (R2HC/HC2R) on
// periodic axes and a type-I sine transform (RODFT00) on dirichlet axes,
// where psi vanishes on the virtual wall nodes -1 and n. The symbol is built
// from the eigenvalues of the second-order three-point Laplacian, so the solve
// is the exact inverse of `laplacian()` on periodic and interior nodes.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "vortexflow/grid.hpp"
#include "vortexflow/stencil.hpp"

namespace vortexflow {

namespace detail {

// FFTW's planner is not thread safe; execution with new-array functions is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(double* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<double[], FftwFree>;

inline FftwBuffer make_fftw_buffer(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw Error("poisson: out of memory allocating transform buffer");
  return FftwBuffer(p);
}

}  // namespace detail

template <int Dim>
class PoissonPlan {
 public:
  explicit PoissonPlan(const GridSpec<Dim>& spec) : spec_(spec) {
    spec_.validate();
    const std::size_t total = spec_.node_count();
    complex_ = spec_.all_periodic();

    // Per-axis eigenvalues of -d2/dx2 (three-point stencil) in transform order.
    std::array<std::vector<double>, Dim> eig;
    double normalisation = 1.0;
    const double inv_h2 = 1.0 / (spec_.h * spec_.h);
    for (int a = 0; a < Dim; ++a) {
      const int n = spec_.n[a];
      eig[a].resize(n);
      if (spec_.periodic(a)) {
        for (int j = 0; j < n; ++j) {
          const int k = std::min(j, n - j);
          eig[a][j] = (2.0 - 2.0 * std::cos(2.0 * kPi * k / n)) * inv_h2;
        }
        normalisation *= n;
      } else {
        for (int j = 0; j < n; ++j) eig[a][j] = (2.0 - 2.0 * std::cos(kPi * (j + 1) / (n + 1))) * inv_h2;
        normalisation *= 2.0 * (n + 1);
      }
    }

    // Spectral layout: x fastest; with the real-to-complex transform only
    // nx / 2 + 1 x-modes are stored.
    Index<Dim> modes = spec_.n;
    if (complex_) modes[0] = spec_.n[0] / 2 + 1;
    std::size_t mode_count = 1;
    for (int a = 0; a < Dim; ++a) mode_count *= static_cast<std::size_t>(modes[a]);
    inv_symbol_.resize(mode_count);
    for (std::size_t lin = 0; lin < mode_count; ++lin) {
      std::size_t r = lin;
      double lambda = 0.0;
      for (int a = 0; a < Dim; ++a) {
        lambda += eig[a][r % static_cast<std::size_t>(modes[a])];
        r /= static_cast<std::size_t>(modes[a]);
      }
      inv_symbol_[lin] = lambda > 0.0 ? 1.0 / (lambda * normalisation) : 0.0;
    }

    // FFTW is row-major with the last dimension fastest; our x axis is fastest.
    std::array<int, Dim> dims{};
    std::array<fftw_r2r_kind, Dim> forward{}, backward{};
    for (int a = 0; a < Dim; ++a) {
      dims[Dim - 1 - a] = spec_.n[a];
      forward[Dim - 1 - a] = spec_.periodic(a) ? FFTW_R2HC : FFTW_RODFT00;
      backward[Dim - 1 - a] = spec_.periodic(a) ? FFTW_HC2R : FFTW_RODFT00;
    }
    work_ = detail::make_fftw_buffer(total);
    spectrum_ = detail::make_fftw_buffer(2 * mode_count);
    auto* buffer = work_.get();
    auto* cplx = reinterpret_cast<fftw_complex*>(spectrum_.get());
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (complex_) {
      forward_ = fftw_plan_dft_r2c(Dim, dims.data(), buffer, cplx, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_c2r(Dim, dims.data(), cplx, buffer, FFTW_ESTIMATE);
    } else {
      forward_ = fftw_plan_r2r(Dim, dims.data(), buffer, buffer, forward.data(), FFTW_ESTIMATE);
      backward_ = fftw_plan_r2r(Dim, dims.data(), buffer, buffer, backward.data(), FFTW_ESTIMATE);
    }
    if (forward_ == nullptr || backward_ == nullptr) throw Error("poisson: FFTW failed to create a plan");
  }

  ~PoissonPlan() { release(); }

  PoissonPlan(const PoissonPlan&) = delete;
  PoissonPlan& operator=(const PoissonPlan&) = delete;
  PoissonPlan(PoissonPlan&& o) noexcept
      : spec_(o.spec_),
        complex_(o.complex_),
        inv_symbol_(std::move(o.inv_symbol_)),
        work_(std::move(o.work_)),
        spectrum_(std::move(o.spectrum_)),
        forward_(std::exchange(o.forward_, nullptr)),
        backward_(std::exchange(o.backward_, nullptr)) {}
  PoissonPlan& operator=(PoissonPlan&& o) noexcept {
    if (this != &o) {
      release();
      spec_ = o.spec_;
      complex_ = o.complex_;
      inv_symbol_ = std::move(o.inv_symbol_);
      work_ = std::move(o.work_);
      spectrum_ = std::move(o.spectrum_);
      forward_ = std::exchange(o.forward_, nullptr);
      backward_ = std::exchange(o.backward_, nullptr);
    }
    return *this;
  }

  const GridSpec<Dim>& spec() const { return spec_; }

  /// Solves Laplacian(psi) = -rhs. On fully periodic grids the mean of rhs is
  /// removed first (the problem has no solution otherwise) and returned;
  /// otherwise returns 0. Uses the plan's scratch buffers, so one plan must not
  /// run concurrent solves.
  double solve(std::span<const double> rhs, std::span<double> psi) const {
    const std::size_t total = spec_.node_count();
    if (rhs.size() != total || psi.size() != total) throw Error("poisson: field size does not match the plan");
    for (double v : rhs)
      if (!std::isfinite(v)) throw Error("poisson: non-finite value in right-hand side");

    double* work = work_.get();
    double mean = 0.0;
    if (spec_.all_periodic()) {
      for (double v : rhs) mean += v;
      mean /= static_cast<double>(total);
    }
    for (std::size_t i = 0; i < total; ++i) work[i] = rhs[i] - mean;
    if (complex_) {
      const std::size_t modes = inv_symbol_.size();
      auto* cplx = reinterpret_cast<fftw_complex*>(spectrum_.get());
      fftw_execute_dft_r2c(forward_, work, cplx);
      for (std::size_t i = 0; i < modes; ++i) {
        cplx[i][0] *= inv_symbol_[i];
        cplx[i][1] *= inv_symbol_[i];
      }
      fftw_execute_dft_c2r(backward_, cplx, work);
    } else {
      fftw_execute_r2r(forward_, work, work);
      for (std::size_t i = 0; i < total; ++i) work[i] *= inv_symbol_[i];
      fftw_execute_r2r(backward_, work, work);
    }
    std::copy(work, work + total, psi.begin());
    return mean;
  }

 private:
  void release() {
    if (forward_ == nullptr && backward_ == nullptr) return;
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (backward_ != nullptr) fftw_destroy_plan(backward_);
    forward_ = backward_ = nullptr;
  }

  GridSpec<Dim> spec_;
  bool complex_ = false;
  std::vector<double> inv_symbol_;
  detail::FftwBuffer work_;
  detail::FftwBuffer spectrum_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

template <int Dim, int Comps>
struct StreamFunction {
  VectorField<Dim, Comps> psi;
  /// Mean removed from each vorticity component (fully periodic grids only).
  std::array<double, Comps> subtracted_mean{};
};

/// Stream function from vorticity, one scalar solve per component.
template <int Dim, int Comps>
StreamFunction<Dim, Comps> solve_stream(const VectorField<Dim, Comps>& omega, const PoissonPlan<Dim>& plan) {
  omega.require_consistent();
  if (!(omega.spec() == plan.spec())) throw Error("solve_stream: vorticity grid does not match the Poisson plan");
  StreamFunction<Dim, Comps> out{VectorField<Dim, Comps>(plan.spec()), {}};
  for (int c = 0; c < Comps; ++c) out.subtracted_mean[c] = plan.solve(omega[c].values(), out.psi[c].values());
  return out;
}

/// u = (d psi/dy, -d psi/dx) in 2D.
inline VectorField<2> velocity_from_stream(const VorticityField<2>& psi) {
  const auto& s = psi.spec();
  VectorField<2> u(s);
  for_each_node(s, [&](std::size_t lin, const Index<2>& idx) {
    u[0][lin] = detail::first_difference(psi[0].values(), s, idx, lin, 1);
    u[1][lin] = -detail::first_difference(psi[0].values(), s, idx, lin, 0);
  });
  return u;
}

/// u = curl(psi) in 3D.
inline VectorField<3> velocity_from_stream(const VorticityField<3>& psi) { return curl(psi); }

}  // namespace vortexflow
