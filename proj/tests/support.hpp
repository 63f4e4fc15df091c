#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "vortexflow/grid.hpp"

namespace vftest {

using vortexflow::Boundary;

template <int Dim>
vortexflow::GridSpec<Dim> grid(int n, double extent = 1.0, Boundary bc = Boundary::kPeriodic) {
  vortexflow::GridSpec<Dim> s;
  s.n.fill(n);
  s.bc.fill(bc);
  s.h = extent / n;
  return s;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

/// Fresh empty directory under the system temp dir.
inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vortexflow_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace vftest
