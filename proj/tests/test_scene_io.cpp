#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vortexflow/cli.hpp"
#include "vortexflow/vortexflow.hpp"

using namespace vortexflow;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(format = 1
[domain]
dim = 2
n = 32 32
extent = 1 1
bc = periodic periodic
[fluids]
rho1 = 1
rho2 = 1
[gravity]
g = 0 0
[numerics]
dt = 0.01
duration = 0.1
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "vortexflow");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

// small bi-phase scene with a body, short enough to rerun a few times
SceneConfig tiny_scene() {
  SceneConfig c = builtin_scene("periodic_drop");
  c.domain.n = {32, 32};
  c.numerics.dt = 0.01;
  c.numerics.duration = 0.1;
  BodyConfig b;
  b.shape = "disk";
  b.density = 3.0;
  b.center = {0.5, 0.25};
  b.radius = 0.08;
  c.bodies.push_back(b);
  return c;
}

}  // namespace

TEST(Scene, MinimalSceneTakesDefaults) {
  const auto c = parse_scene(kMinimal);
  EXPECT_EQ(c.domain.n, (std::vector<int>{32, 32}));
  EXPECT_EQ(c.domain.origin, (std::vector<double>{0, 0}));
  EXPECT_EQ(c.fluids.phi.kind, "none");
  EXPECT_EQ(c.numerics.rk_order, 2);
  EXPECT_EQ(c.numerics.reinit_every, 10);
  EXPECT_DOUBLE_EQ(c.fluids.epsilon_factor, 2.0);
  EXPECT_TRUE(c.bodies.empty());
  EXPECT_DOUBLE_EQ(c.h(), 1.0 / 32);
}

TEST(Scene, RoundTripsEveryBuiltin) {
  for (const auto& name : builtin_scene_names()) {
    const auto c = builtin_scene(name);
    const auto text = print_scene(c);
    const auto back = parse_scene(text);
    EXPECT_EQ(back, c) << name;
    EXPECT_EQ(print_scene(back), text) << name;
  }
}

TEST(Scene, ShippedFilesMatchTheBuiltins) {
  for (const auto& name : builtin_scene_names()) {
    const fs::path p = fs::path(VORTEXFLOW_SCENE_DIR) / (name + ".scene");
    ASSERT_TRUE(fs::exists(p)) << p;
    EXPECT_EQ(slurp(p), print_scene(builtin_scene(name))) << name;
  }
}

TEST(Scene, CylinderSceneHasTheValidationParameters) {
  const auto c = load_scene((fs::path(VORTEXFLOW_SCENE_DIR) / "cylinder_128.scene").string());
  EXPECT_EQ(c.domain.n, (std::vector<int>{128, 128}));
  EXPECT_EQ(c.domain.extent, (std::vector<double>{1, 1}));
  EXPECT_EQ(c.domain.bc, (std::vector<Boundary>{Boundary::kPeriodic, Boundary::kPeriodic}));
  ASSERT_EQ(c.bodies.size(), 1u);
  EXPECT_EQ(c.bodies[0].shape, "disk");
  EXPECT_DOUBLE_EQ(c.bodies[0].radius, 0.1);
  EXPECT_DOUBLE_EQ(c.bodies[0].density, 2.0);
  EXPECT_DOUBLE_EQ(c.fluids.rho1, 1.0);
  EXPECT_DOUBLE_EQ(c.fluids.nu1, 0.001);
  EXPECT_EQ(c.gravity, (std::vector<double>{0, -1}));
  EXPECT_DOUBLE_EQ(c.numerics.dt, 0.01);
  EXPECT_EQ(c.step_count(), 250);
}

TEST(Scene, ErrorsNameTheProblem) {
  EXPECT_NE(error_of(std::string(kMinimal) + "bogus = 1\n").find("unknown key 'bogus'"), std::string::npos);
  std::string no_dt = kMinimal;
  no_dt.erase(no_dt.find("dt = 0.01"));
  EXPECT_NE(error_of(no_dt).find("missing required key 'dt'"), std::string::npos) << error_of(no_dt);
  EXPECT_NE(error_of(std::string(kMinimal) + "[nonsense]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("format = 2\n").find("unsupported format"), std::string::npos);
  std::string dup = kMinimal;
  dup += "dt = 0.02\n";
  EXPECT_NE(error_of(dup).find("duplicate key"), std::string::npos);
}

TEST(Scene, RejectsAStepAboveTheDiffusionLimit) {
  auto c = cylinder_scene(300);
  c.numerics.dt = 0.01;
  try {
    validate_scene(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("0.00277778"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(validate_scene(cylinder_scene(300)));
  EXPECT_NO_THROW(validate_scene(cylinder_scene(256)));
}

TEST(Frame, ZeroFieldOnEightByEight) {
  const auto s = vftest::grid<2>(8);
  auto f = make_frame(s, "zero");
  add_scalar(f, "omega", ScalarField<2>(s, 0.0));
  const auto path = fs::path(vftest::temp_dir("frame_zero")) / "zero.vtk";
  write_frame(f, path.string());
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_GE(lines.size(), 9u);
  EXPECT_EQ(lines[0], "# vtk DataFile Version 3.0");
  EXPECT_EQ(lines[2], "ASCII");
  EXPECT_EQ(lines[3], "DATASET STRUCTURED_POINTS");
  EXPECT_EQ(lines[4], "DIMENSIONS 8 8 1");
  EXPECT_EQ(lines[7], "POINT_DATA 64");
  EXPECT_EQ(lines[8], "SCALARS omega double 1");
  ASSERT_EQ(lines.size(), 10u + 64u);
  for (std::size_t i = 10; i < lines.size(); ++i) EXPECT_EQ(std::strtod(lines[i].c_str(), nullptr), 0.0);
}

TEST(Frame, RoundTripIsBitExact) {
  const auto s = vftest::grid<3>(6, 0.7);
    ScalarField<3> a(s);
  VectorField<3> v(s);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = vftest::uniform(-1e3, 1e3) * std::pow(10.0, vftest::uniform(-20, 20));
    for (int c = 0; c < 3; ++c) v[c][i] = vftest::uniform(-1, 1);
  }
  auto f = make_frame(s, "random");
  add_scalar(f, "a", a);
  add_vector(f, "v", v);
  const auto path = (fs::path(vftest::temp_dir("frame_rt")) / "f.vtk").string();
  write_frame(f, path);
  const auto back = read_frame(path);
  EXPECT_EQ(back.dimensions, f.dimensions);
  EXPECT_EQ(back.spacing, f.spacing);
  EXPECT_EQ(back.title, f.title);
  ASSERT_EQ(back.fields.size(), 2u);
  EXPECT_EQ(back.fields[0], f.fields[0]);
  EXPECT_EQ(back.fields[1], f.fields[1]);
}

TEST(Frame, TwoDimensionalVectorsArePadded) {
  const auto s = vftest::grid<2>(4);
  VectorField<2> u(s);
  u[0] = ScalarField<2>(s, 1.0);
  u[1] = ScalarField<2>(s, -2.0);
  auto f = make_frame(s, "");
  add_vector(f, "u", u);
  EXPECT_EQ(f.field("u").values[0], 1.0);
  EXPECT_EQ(f.field("u").values[1], -2.0);
  EXPECT_EQ(f.field("u").values[2], 0.0);
}

TEST(Run, DiagnosticsHaveAConstantColumnCount) {
  auto c = tiny_scene();
  const auto dir = fs::path(vftest::temp_dir("run_csv"));
  c.output.directory = dir.string();
  const auto r = run_scene(c);
  EXPECT_EQ(r.steps, 10);
  const auto d = read_diagnostics((dir / "diagnostics.csv").string());
  EXPECT_EQ(d.rows.size(), 10u);
  for (const auto& row : d.rows) EXPECT_EQ(row.size(), d.columns.size());
  EXPECT_EQ(d.columns.front(), "step");
  EXPECT_NO_THROW(d.column("body0_uy"));
  EXPECT_DOUBLE_EQ(d.series("t").back(), 0.1);
  EXPECT_TRUE(fs::exists(dir / "timing.txt"));
}

TEST(Run, ZeroDurationDumpsOnlyTheInitialState) {
  auto c = tiny_scene();
  c.numerics.duration = 0.0;
  c.output.dump_every = 1;
  const auto dir = fs::path(vftest::temp_dir("run_zero"));
  c.output.directory = dir.string();
  const auto r = run_scene(c);
  EXPECT_EQ(r.steps, 0);
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(fs::path(r.frames[0]).filename(), "frame_000000.vtk");
  EXPECT_TRUE(read_diagnostics((dir / "diagnostics.csv").string()).rows.empty());
}

TEST(Run, FramesFollowDumpEvery) {
  auto c = tiny_scene();
  c.output.dump_every = 5;
  c.output.particles = true;
  const auto dir = fs::path(vftest::temp_dir("run_frames"));
  c.output.directory = dir.string();
  const auto r = run_scene(c);
  ASSERT_EQ(r.frames.size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "frame_000010.vtk"));
  EXPECT_TRUE(fs::exists(dir / "particles_000005.csv"));
  const auto f = read_frame((dir / "frame_000005.vtk").string());
  for (const char* name : {"omega", "u", "phi", "phi_s", "rho"}) EXPECT_NO_THROW(f.field(name));
}

TEST(Cli, MissingSceneFails) {
  std::string err;
  EXPECT_EQ(run_cli({"run", "/nonexistent/missing.scene"}, nullptr, &err), 1);
  EXPECT_NE(err.find("missing.scene"), std::string::npos) << err;
}

TEST(Cli, UnknownFlagPrintsUsage) {
  std::string err;
  EXPECT_EQ(run_cli({"run", "x.scene", "--frobnicate"}, nullptr, &err), 1);
  EXPECT_NE(err.find("Usage"), std::string::npos) << err;
  EXPECT_EQ(run_cli({"validate", "cylinder", "--resolution", "100"}), 1);
}

TEST(Cli, BinaryExitCodes) {
  const std::string cli = VORTEXFLOW_CLI;
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " run /nonexistent.scene > /dev/null 2>&1").c_str())), 1);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " bench poisson --n 16 --repeat 2 > /dev/null 2>&1").c_str())), 0);
}

TEST(Cli, DeterministicRerunsGiveIdenticalBytes) {
  const auto dir = fs::path(vftest::temp_dir("cli_det"));
  const auto scene = dir / "tiny.scene";
  detail::write_file(scene.string(), print_scene(tiny_scene()));
  const auto a = dir / "a", b = dir / "b";
  ASSERT_EQ(run_cli({"run", scene.string(), "--out", a.string(), "--deterministic", "--dump-every", "5"}), 0);
  ASSERT_EQ(run_cli({"run", scene.string(), "--out", b.string(), "--deterministic", "--dump-every", "5"}), 0);
  EXPECT_EQ(slurp(a / "diagnostics.csv"), slurp(b / "diagnostics.csv"));
  EXPECT_EQ(slurp(a / "frame_000010.vtk"), slurp(b / "frame_000010.vtk"));
}

TEST(Cli, ExportedScenesParse) {
  const auto dir = fs::path(vftest::temp_dir("cli_export"));
  ASSERT_EQ(run_cli({"export-scenes", dir.string()}), 0);
  for (const auto& name : builtin_scene_names()) EXPECT_NO_THROW(load_scene((dir / (name + ".scene")).string()));
}
