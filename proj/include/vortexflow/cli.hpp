#pragma once

// Command-line front end.
//
//   vortexflow run <scene> [--out DIR] [--dump-every K] [--threads T] [--deterministic]
//   vortexflow validate cylinder --resolution {128|256|300} [--out DIR] [--threads T]
//   vortexflow smoke {two_spheres_small|water_wall_small|cup_small} [--threads T]
//   vortexflow bench poisson --n N [--dim 2|3] [--repeat R]
//   vortexflow export-scenes DIR
//
// Exit codes: 0 success, 2 validation failure, 1 error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "vortexflow/experiments.hpp"
#include "vortexflow/parallel.hpp"
#include "vortexflow/poisson.hpp"
#include "vortexflow/runner.hpp"
#include "vortexflow/scene.hpp"

namespace vortexflow {

template <int Dim>
double bench_poisson_seconds(int n, int repeat) {
  GridSpec<Dim> spec;
  spec.n.fill(n);
  spec.h = 1.0 / n;
  PoissonPlan<Dim> plan(spec);
  const auto rhs = ScalarField<Dim>::from_function(spec, [](const Vec<Dim>& x) {
    double v = 1.0;
    for (double c : x) v *= std::sin(2.0 * kPi * c);
    return v;
  });
  ScalarField<Dim> psi(spec);
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeat; ++r) plan.solve(rhs.values(), psi.values());
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeat;
}

inline int cli_main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"vortexflow: vortex-in-cell bi-phase flow with rigid bodies"};
  app.require_subcommand(1);
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run a scene file");
  std::string scene_path, out_dir;
  int dump_every = -1;
  bool deterministic = false;
  run->add_option("scene", scene_path, "Scene file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  run->add_option("--dump-every", dump_every, "Frame interval in steps (overrides output.dump_every)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--threads", threads, "Worker threads (overrides VORTEXFLOW_THREADS)")->check(CLI::PositiveNumber);
  run->add_flag("--deterministic", deterministic, "Deterministic mode (always on; accepted for scripts)");

  auto* validate = app.add_subcommand("validate", "Run a built-in validation experiment");
  std::string experiment;
  int resolution = 128;
  std::string validate_out;
  validate->add_option("experiment", experiment, "Experiment name")->required()->check(CLI::IsMember({"cylinder"}));
  validate->add_option("--resolution", resolution, "Grid resolution")->check(CLI::IsMember({128, 256, 300}));
  validate->add_option("--out", validate_out, "Output directory for CSV, report and frames");
  validate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* smoke = app.add_subcommand("smoke", "Run a small 3D scene with property checks");
  std::string smoke_name;
  smoke->add_option("scene", smoke_name, "Scene name")
      ->required()
      ->check(CLI::IsMember({"two_spheres_small", "water_wall_small", "cup_small"}));
  smoke->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Micro-benchmarks");
  std::string bench_target;
  int bench_n = 128, bench_dim = 2, bench_repeat = 10;
  bench->add_option("target", bench_target, "Benchmark")->required()->check(CLI::IsMember({"poisson"}));
  bench->add_option("--n", bench_n, "Nodes per axis")->check(CLI::Range(8, 4096));
  bench->add_option("--dim", bench_dim, "Dimension")->check(CLI::IsMember({2, 3}));
  bench->add_option("--repeat", bench_repeat, "Solves to average")->check(CLI::PositiveNumber);

  auto* export_scenes = app.add_subcommand("export-scenes", "Write the built-in scenes as scene files");
  std::string export_dir;
  export_scenes->add_option("directory", export_dir, "Target directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const int env_threads = threads_from_environment();
  if (threads > 0) {
    set_thread_count(threads);
  } else if (env_threads > 0) {
    set_thread_count(env_threads);
  }

  try {
    if (*run) {
      SceneConfig config = load_scene(scene_path);
      if (!out_dir.empty()) config.output.directory = out_dir;
      if (dump_every >= 0) config.output.dump_every = dump_every;
      if (threads > 0) config.numerics.threads = threads;
      if (config.numerics.threads == 0 && env_threads > 0) config.numerics.threads = env_threads;
      const auto base = std::filesystem::path(scene_path).parent_path().string();
      const auto result = run_scene(config, base);
      out << "steps " << result.steps << "\n";
      out << format_timing_report(result.times);
      if (!config.output.directory.empty()) out << "output written to " << config.output.directory << "\n";
      return 0;
    }
    if (*validate) {
      CylinderOptions options;
      options.out_dir = validate_out;
      const auto r = run_falling_cylinder(resolution, options);
      out << format_validation_report(r);
      return r.pass ? 0 : 2;
    }
    if (*smoke) {
      const auto s = run_scene_smoke(smoke_name);
      out << "scene " << s.scene << ", steps " << s.steps << "\n";
      for (const auto& c : s.checks) out << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
      out << format_timing_report(s.times);
      return s.pass() ? 0 : 2;
    }
    if (*bench) {
      const double seconds = bench_dim == 2 ? bench_poisson_seconds<2>(bench_n, bench_repeat)
                                            : bench_poisson_seconds<3>(bench_n, bench_repeat);
      char buf[128];
      std::snprintf(buf, sizeof buf, "poisson dim %d n %d: %.6f s per solve\n", bench_dim, bench_n, seconds);
      out << buf;
      return 0;
    }
    if (*export_scenes) {
      for (const auto& name : builtin_scene_names()) {
        const auto path = (std::filesystem::path(export_dir) / (name + ".scene")).string();
        detail::write_file(path, print_scene(builtin_scene(name)));
        out << path << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace vortexflow
