#pragma once

// Scene files: a sectioned `key = value` text format.
//
//   format = 1
//   [domain]     dim, n, extent, origin, bc
//   [fluids]     rho1, rho2, nu1, nu2, tau, epsilon_factor, phi, phi.*
//   [gravity]    g
//   [body.N]     shape, density, center, angle, axis, fixed and shape keys
//   [numerics]   dt, duration, rk_order, creation_threshold_rel,
//                reinit_every, reinit_iterations, deterministic, threads
//   [output]     directory, dump_every, fields, particles, timing_columns
//
// Vectors are whitespace separated, `#` starts a comment. Every key is listed
// with its default in README.md. print_scene() writes every key, so its
// output parses back to an equal SceneConfig.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vortexflow/grid.hpp"
#include "vortexflow/interface.hpp"
#include "vortexflow/rigid.hpp"
#include "vortexflow/solver.hpp"

namespace vortexflow {

struct DomainConfig {
  int dim = 2;
  std::vector<int> n;
  std::vector<double> extent;
  std::vector<double> origin;
  std::vector<Boundary> bc;
  bool operator==(const DomainConfig&) const = default;
};

/// Initial liquid (fluid 1, phi < 0) region.
///   none        no liquid: the whole domain is fluid 1
///   half_space  phi = normal . (x - point) - amplitude cos(2 pi (x0 - point0) / wavelength)
///   circle, sphere  phi = |x - center| - radius
///   box         signed distance to center +- half_extents
///   column      union of the box [lo, hi] and a pool of depth pool_depth
///               along the last axis
/// `invert` swaps the two fluids.
struct PhiConfig {
  std::string kind = "none";
  std::vector<double> point, normal, center, half_extents, lo, hi;
  double radius = 0.0;
  double amplitude = 0.0;
  double wavelength = 0.0;
  double pool_depth = 0.0;
  bool invert = false;
  bool operator==(const PhiConfig&) const = default;
};

struct FluidsConfig {
  double rho1 = 1.0, rho2 = 1.0;
  double nu1 = 0.0, nu2 = 0.0;
  double tau = 0.0;
  double epsilon_factor = 2.0;
  PhiConfig phi;
  bool operator==(const FluidsConfig&) const = default;
};

/// shape: disk (2D) / sphere (3D) with radius; box with half_extents;
/// container (solid outside center +- half_extents, must be fixed);
/// cup with radius, height, wall; mesh (3D) with an OBJ path relative to the
/// scene file.
struct BodyConfig {
  std::string shape;
  double density = 1.0;
  std::vector<double> center;
  double angle = 0.0;
  std::vector<double> axis;
  bool fixed = false;
  double radius = 0.0;
  std::vector<double> half_extents;
  double height = 0.0;
  double wall = 0.0;
  std::string mesh;
  bool operator==(const BodyConfig&) const = default;
};

struct NumericsConfig {
  double dt = 0.0;
  double duration = 0.0;
  int rk_order = 2;
  double creation_threshold_rel = 1e-5;
  int reinit_every = 10;
  int reinit_iterations = 20;
  bool deterministic = true;
  int threads = 0;
  bool operator==(const NumericsConfig&) const = default;
};

struct OutputConfig {
  std::string directory;
  int dump_every = 0;
  std::vector<std::string> fields = {"omega", "u", "phi", "phi_s", "rho"};
  bool particles = false;
  bool timing_columns = false;
  bool operator==(const OutputConfig&) const = default;
};

struct SceneConfig {
  int format = 1;
  DomainConfig domain;
  FluidsConfig fluids;
  std::vector<double> gravity;
  std::vector<BodyConfig> bodies;
  NumericsConfig numerics;
  OutputConfig output;
  bool operator==(const SceneConfig&) const = default;

  double h() const { return domain.extent.at(0) / domain.n.at(0); }
  long step_count() const { return std::lround(numerics.duration / numerics.dt); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct SceneLine {
  std::string value;
  int line = 0;
};

class SceneReader {
 public:
  SceneReader(std::string section, std::map<std::string, SceneLine> entries)
      : section_(std::move(section)), entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string where(const std::string& key) const {
    return "scene line " + std::to_string(entries_.at(key).line) + " ([" + section_ + "] " + key + ")";
  }

  std::string text(const std::string& key) {
    used_.push_back(key);
    return entries_.at(key).value;
  }

  double number(const std::string& key) {
    const std::string v = text(key);
    return parse_number(v, key);
  }

  int integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(where(key) + ": expected an integer, got '" + text(key) + "'");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key) {
    const std::string v = text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw Error(where(key) + ": expected true or false, got '" + v + "'");
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    for (const auto& w : split_words(text(key))) out.push_back(parse_number(w, key));
    return out;
  }

  std::vector<std::string> words(const std::string& key) { return split_words(text(key)); }

  void optional_number(const std::string& key, double& out) {
    if (has(key)) out = number(key);
  }
  void optional_integer(const std::string& key, int& out) {
    if (has(key)) out = integer(key);
  }
  void optional_boolean(const std::string& key, bool& out) {
    if (has(key)) out = boolean(key);
  }
  void optional_numbers(const std::string& key, std::vector<double>& out) {
    if (has(key)) out = numbers(key);
  }

  void require(const std::string& key) const {
    if (!has(key)) throw Error("scene: missing required key '" + key + "' in [" + section_ + "]");
  }

  void reject_unused() const {
    for (const auto& [key, line] : entries_)
      if (std::find(used_.begin(), used_.end(), key) == used_.end())
        throw Error("scene line " + std::to_string(line.line) + ": unknown key '" + key + "' in [" + section_ + "]");
  }

 private:
  double parse_number(const std::string& v, const std::string& key) const {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d))
      throw Error(where(key) + ": expected a finite number, got '" + v + "'");
    return d;
  }

  std::string section_;
  std::map<std::string, SceneLine> entries_;
  std::vector<std::string> used_;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(v[i]);
    } else if constexpr (std::is_same_v<T, int>) {
      out += std::to_string(v[i]);
    } else if constexpr (std::is_same_v<T, Boundary>) {
      out += to_string(v[i]);
    } else {
      out += v[i];
    }
  }
  return out;
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

inline void require_size(const std::vector<double>& v, int dim, const std::string& what) {
  if (static_cast<int>(v.size()) != dim)
    throw Error("scene: " + what + " needs " + std::to_string(dim) + " components, got " + std::to_string(v.size()));
}

}  // namespace detail

/// Largest stable dt for the scene's viscosities.
inline double scene_diffusion_limit(const SceneConfig& c) {
  double nu_max = c.fluids.nu1;
  if (c.fluids.phi.kind != "none" || c.fluids.phi.invert) nu_max = std::max(c.fluids.nu1, c.fluids.nu2);
  return check_stability(c.domain.dim, c.h(), nu_max, c.numerics.dt).diffusion_limit;
}

/// Half-width of a body along `axis` (conservative when rotated; 0 for
/// meshes, whose size is only known after loading).
inline double body_reach(const BodyConfig& b, int dim, int axis) {
  const bool rotated = b.angle != 0.0;
  if (b.shape == "disk" || b.shape == "sphere") return b.radius;
  if (b.shape == "box") {
    if (!rotated) return b.half_extents[axis];
    double r2 = 0.0;
    for (double v : b.half_extents) r2 += v * v;
    return std::sqrt(r2);
  }
  if (b.shape == "cup") {
    if (!rotated) return axis == dim - 1 ? 0.5 * b.height : b.radius;
    return std::hypot(b.radius, 0.5 * b.height);
  }
  return 0.0;
}

inline void validate_scene(const SceneConfig& c) {
  using detail::require_size;
  if (c.format != 1) throw Error("scene: unsupported format " + std::to_string(c.format) + " (expected 1)");
  const auto& d = c.domain;
  const int dim = d.dim;
  if (dim != 2 && dim != 3) throw Error("scene: domain.dim must be 2 or 3");
  if (static_cast<int>(d.n.size()) != dim) throw Error("scene: domain.n needs one entry per axis");
  if (static_cast<int>(d.bc.size()) != dim) throw Error("scene: domain.bc needs one entry per axis");
  require_size(d.extent, dim, "domain.extent");
  require_size(d.origin, dim, "domain.origin");
  for (int a = 0; a < dim; ++a) {
    if (d.n[a] < 8) throw Error("scene: domain.n must be at least 8 per axis");
    if (!(d.extent[a] > 0.0)) throw Error("scene: domain.extent must be positive");
  }
  const double h = c.h();
  for (int a = 1; a < dim; ++a)
    if (std::abs(d.extent[a] / d.n[a] - h) > 1e-12 * h)
      throw Error("scene: cells must be cubic (extent / n equal on every axis)");

  const auto& f = c.fluids;
  if (!(f.rho1 > 0.0) || !(f.rho2 > 0.0)) throw Error("scene: densities must be positive");
  if (f.nu1 < 0.0 || f.nu2 < 0.0) throw Error("scene: viscosities must be non-negative");
  if (f.tau < 0.0) throw Error("scene: tau must be non-negative");
  if (!(f.epsilon_factor > 0.0)) throw Error("scene: epsilon_factor must be positive");
  const auto& p = f.phi;
  if (p.kind == "half_space") {
    require_size(p.point, dim, "phi.point");
    require_size(p.normal, dim, "phi.normal");
    double len = 0.0;
    for (double v : p.normal) len += v * v;
    if (!(len > 0.0)) throw Error("scene: phi.normal must be non-zero");
    if (p.amplitude != 0.0 && !(p.wavelength > 0.0)) throw Error("scene: phi.wavelength must be positive");
  } else if (p.kind == "circle" || p.kind == "sphere") {
    if ((p.kind == "circle") != (dim == 2)) throw Error("scene: phi = circle is 2D only, sphere is 3D only");
    require_size(p.center, dim, "phi.center");
    if (!(p.radius > 0.0)) throw Error("scene: phi.radius must be positive");
  } else if (p.kind == "box") {
    require_size(p.center, dim, "phi.center");
    require_size(p.half_extents, dim, "phi.half_extents");
  } else if (p.kind == "column") {
    require_size(p.lo, dim, "phi.lo");
    require_size(p.hi, dim, "phi.hi");
    if (p.pool_depth < 0.0) throw Error("scene: phi.pool_depth must be non-negative");
  } else if (p.kind != "none") {
    throw Error("scene: unknown phi kind '" + p.kind + "'");
  }

  if (c.gravity.size() != static_cast<std::size_t>(dim)) throw Error("scene: gravity.g needs one entry per axis");

  for (std::size_t k = 0; k < c.bodies.size(); ++k) {
    const auto& b = c.bodies[k];
    const std::string name = "body." + std::to_string(k);
    require_size(b.center, dim, name + ".center");
    if (!(b.density > 0.0)) throw Error("scene: " + name + ".density must be positive");
    if (dim == 3 && !b.axis.empty()) require_size(b.axis, 3, name + ".axis");
    if (dim == 2 && !b.axis.empty()) throw Error("scene: " + name + ".axis is 3D only");
    if (b.shape == "disk" || b.shape == "sphere") {
      if ((b.shape == "disk") != (dim == 2)) throw Error("scene: disk is 2D only, sphere is 3D only");
      if (!(b.radius > 0.0)) throw Error("scene: " + name + ".radius must be positive");
    } else if (b.shape == "box" || b.shape == "container") {
      require_size(b.half_extents, dim, name + ".half_extents");
      for (double v : b.half_extents)
        if (!(v > 0.0)) throw Error("scene: " + name + ".half_extents must be positive");
      if (b.shape == "container" && !b.fixed) throw Error("scene: " + name + " container bodies must be fixed");
    } else if (b.shape == "cup") {
      if (!(b.radius > 0.0) || !(b.height > 0.0) || !(b.wall > 0.0) || b.wall >= b.radius || b.wall >= b.height)
        throw Error("scene: " + name + " cup needs radius, height and 0 < wall < min(radius, height)");
    } else if (b.shape == "mesh") {
      if (dim != 3) throw Error("scene: mesh bodies are 3D only");
      if (b.mesh.empty()) throw Error("scene: " + name + ".mesh path is required");
    } else {
      throw Error("scene: " + name + " has unknown shape '" + b.shape + "'");
    }
    if (b.shape == "container") continue;
    for (int a = 0; a < dim; ++a) {
      const double lo = d.origin[a], hi = d.origin[a] + d.extent[a];
      const double reach = body_reach(b, dim, a);
      if (b.center[a] < lo || b.center[a] > hi || 2.0 * reach >= d.extent[a])
        throw Error("scene: " + name + " does not fit inside the domain");
      if (d.bc[a] == Boundary::kDirichlet && (b.center[a] - reach < lo - h || b.center[a] + reach > hi))
        throw Error("scene: " + name + " crosses a domain wall");
    }
  }

  const auto& n = c.numerics;
  if (!(n.dt > 0.0)) throw Error("scene: numerics.dt must be positive");
  if (n.duration < 0.0) throw Error("scene: numerics.duration must be non-negative");
  if (n.rk_order != 2 && n.rk_order != 4) throw Error("scene: numerics.rk_order must be 2 or 4");
  if (n.creation_threshold_rel < 0.0) throw Error("scene: creation_threshold_rel must be non-negative");
  if (n.reinit_every < 0 || n.reinit_iterations < 0) throw Error("scene: reinit settings must be non-negative");
  if (n.threads < 0) throw Error("scene: numerics.threads must be non-negative");
  const double limit = scene_diffusion_limit(c);
  if (n.dt > limit)
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "scene: dt = %.6g exceeds the diffusion stability limit %.6g (h^2 / (2 dim nu_max))",
                  n.dt, limit);
    throw Error(buf);
  }

  const auto& o = c.output;
  if (o.dump_every < 0) throw Error("scene: output.dump_every must be non-negative");
  for (const auto& name : o.fields)
    if (name != "omega" && name != "u" && name != "phi" && name != "phi_s" && name != "rho" && name != "psi")
      throw Error("scene: unknown output field '" + name + "'");
}

inline SceneConfig parse_scene(const std::string& text) {
  using detail::SceneLine;
  std::map<std::string, std::map<std::string, SceneLine>> sections;
  std::vector<std::string> order;
  std::string current;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("scene line " + std::to_string(line_no) + ": malformed section header");
      current = detail::trim(line.substr(1, line.size() - 2));
      if (sections.count(current) != 0)
        throw Error("scene line " + std::to_string(line_no) + ": duplicate section [" + current + "]");
      sections[current];
      order.push_back(current);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("scene line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw Error("scene line " + std::to_string(line_no) + ": empty key");
    auto& entries = sections[current];
    if (entries.count(key) != 0) throw Error("scene line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries[key] = SceneLine{value, line_no};
  }

  SceneConfig c;
  auto reader = [&](const std::string& name) {
    auto it = sections.find(name);
    return detail::SceneReader(name.empty() ? "top level" : name,
                               it == sections.end() ? std::map<std::string, SceneLine>{} : it->second);
  };

  {
    auto top = reader("");
    top.require("format");
    c.format = top.integer("format");
    top.reject_unused();
    if (c.format != 1) throw Error("scene: unsupported format " + std::to_string(c.format) + " (expected 1)");
  }
  for (const auto& name : order) {
    const bool known = name == "domain" || name == "fluids" || name == "gravity" || name == "numerics" ||
                       name == "output" || name.rfind("body.", 0) == 0;
    if (!known) throw Error("scene: unknown section [" + name + "]");
  }

  {
    if (sections.count("domain") == 0) throw Error("scene: missing section [domain]");
    auto r = reader("domain");
    r.require("dim");
    r.require("n");
    r.require("extent");
    auto& d = c.domain;
    d.dim = r.integer("dim");
    if (d.dim != 2 && d.dim != 3) throw Error(r.where("dim") + ": dim must be 2 or 3");
    for (double v : r.numbers("n")) {
      if (v != std::floor(v) || v < 0 || v > 1e6) throw Error(r.where("n") + ": expected node counts");
      d.n.push_back(static_cast<int>(v));
    }
    d.extent = r.numbers("extent");
    d.origin.assign(d.dim, 0.0);
    r.optional_numbers("origin", d.origin);
    d.bc.assign(d.dim, Boundary::kPeriodic);
    if (r.has("bc")) {
      d.bc.clear();
      for (const auto& w : r.words("bc")) {
        if (w == "periodic") {
          d.bc.push_back(Boundary::kPeriodic);
        } else if (w == "dirichlet") {
          d.bc.push_back(Boundary::kDirichlet);
        } else {
          throw Error(r.where("bc") + ": boundary must be periodic or dirichlet");
        }
      }
    }
    r.reject_unused();
  }

  {
    if (sections.count("fluids") == 0) throw Error("scene: missing section [fluids]");
    auto r = reader("fluids");
    r.require("rho1");
    auto& f = c.fluids;
    f.rho1 = r.number("rho1");
    f.rho2 = f.rho1;
    r.optional_number("rho2", f.rho2);
    r.optional_number("nu1", f.nu1);
    f.nu2 = f.nu1;
    r.optional_number("nu2", f.nu2);
    r.optional_number("tau", f.tau);
    r.optional_number("epsilon_factor", f.epsilon_factor);
    auto& p = f.phi;
    if (r.has("phi")) p.kind = r.text("phi");
    r.optional_numbers("phi.point", p.point);
    r.optional_numbers("phi.normal", p.normal);
    r.optional_numbers("phi.center", p.center);
    r.optional_numbers("phi.half_extents", p.half_extents);
    r.optional_numbers("phi.lo", p.lo);
    r.optional_numbers("phi.hi", p.hi);
    r.optional_number("phi.radius", p.radius);
    r.optional_number("phi.amplitude", p.amplitude);
    r.optional_number("phi.wavelength", p.wavelength);
    r.optional_number("phi.pool_depth", p.pool_depth);
    r.optional_boolean("phi.invert", p.invert);
    r.reject_unused();
  }

  {
    auto r = reader("gravity");
    c.gravity.assign(c.domain.dim, 0.0);
    r.optional_numbers("g", c.gravity);
    r.reject_unused();
  }

  std::map<int, BodyConfig> bodies;
  for (const auto& name : order) {
    if (name.rfind("body.", 0) != 0) continue;
    const std::string id = name.substr(5);
    char* end = nullptr;
    const long k = std::strtol(id.c_str(), &end, 10);
    if (id.empty() || end != id.c_str() + id.size() || k < 0) throw Error("scene: bad body section [" + name + "]");
    auto r = reader(name);
    r.require("shape");
    r.require("density");
    r.require("center");
    BodyConfig b;
    b.shape = r.text("shape");
    b.density = r.number("density");
    b.center = r.numbers("center");
    r.optional_number("angle", b.angle);
    r.optional_numbers("axis", b.axis);
    r.optional_boolean("fixed", b.fixed);
    r.optional_number("radius", b.radius);
    r.optional_numbers("half_extents", b.half_extents);
    r.optional_number("height", b.height);
    r.optional_number("wall", b.wall);
    if (r.has("mesh")) b.mesh = r.text("mesh");
    r.reject_unused();
    bodies[static_cast<int>(k)] = b;
  }
  int expected = 0;
  for (auto& [k, b] : bodies) {
    if (k != expected) throw Error("scene: body sections must be numbered 0, 1, 2, ... without gaps");
    c.bodies.push_back(b);
    ++expected;
  }

  {
    if (sections.count("numerics") == 0) throw Error("scene: missing section [numerics]");
    auto r = reader("numerics");
    r.require("dt");
    r.require("duration");
    auto& n = c.numerics;
    n.dt = r.number("dt");
    n.duration = r.number("duration");
    r.optional_integer("rk_order", n.rk_order);
    r.optional_number("creation_threshold_rel", n.creation_threshold_rel);
    r.optional_integer("reinit_every", n.reinit_every);
    r.optional_integer("reinit_iterations", n.reinit_iterations);
    r.optional_boolean("deterministic", n.deterministic);
    r.optional_integer("threads", n.threads);
    r.reject_unused();
  }

  {
    auto r = reader("output");
    auto& o = c.output;
    if (r.has("directory")) o.directory = r.text("directory");
    r.optional_integer("dump_every", o.dump_every);
    if (r.has("fields")) o.fields = r.words("fields");
    r.optional_boolean("particles", o.particles);
    r.optional_boolean("timing_columns", o.timing_columns);
    r.reject_unused();
  }

  validate_scene(c);
  return c;
}

/// Canonical text form: every key, numbers with 17 significant digits.
inline std::string print_scene(const SceneConfig& c) {
  using detail::format_bool;
  using detail::format_double;
  using detail::join;
  std::ostringstream out;
  out << "format = " << c.format << "\n\n";
  out << "[domain]\n";
  out << "dim = " << c.domain.dim << "\n";
  out << "n = " << join(c.domain.n) << "\n";
  out << "extent = " << join(c.domain.extent) << "\n";
  out << "origin = " << join(c.domain.origin) << "\n";
  out << "bc = " << join(c.domain.bc) << "\n\n";

  const auto& f = c.fluids;
  out << "[fluids]\n";
  out << "rho1 = " << format_double(f.rho1) << "\n";
  out << "rho2 = " << format_double(f.rho2) << "\n";
  out << "nu1 = " << format_double(f.nu1) << "\n";
  out << "nu2 = " << format_double(f.nu2) << "\n";
  out << "tau = " << format_double(f.tau) << "\n";
  out << "epsilon_factor = " << format_double(f.epsilon_factor) << "\n";
  const auto& p = f.phi;
  out << "phi = " << p.kind << "\n";
  auto vec = [&](const char* key, const std::vector<double>& v) {
    if (!v.empty()) out << key << " = " << join(v) << "\n";
  };
  vec("phi.point", p.point);
  vec("phi.normal", p.normal);
  vec("phi.center", p.center);
  vec("phi.half_extents", p.half_extents);
  vec("phi.lo", p.lo);
  vec("phi.hi", p.hi);
  if (p.radius != 0.0) out << "phi.radius = " << format_double(p.radius) << "\n";
  if (p.amplitude != 0.0) out << "phi.amplitude = " << format_double(p.amplitude) << "\n";
  if (p.wavelength != 0.0) out << "phi.wavelength = " << format_double(p.wavelength) << "\n";
  if (p.pool_depth != 0.0) out << "phi.pool_depth = " << format_double(p.pool_depth) << "\n";
  if (p.invert) out << "phi.invert = true\n";
  out << "\n[gravity]\n";
  out << "g = " << join(c.gravity) << "\n";

  for (std::size_t k = 0; k < c.bodies.size(); ++k) {
    const auto& b = c.bodies[k];
    out << "\n[body." << k << "]\n";
    out << "shape = " << b.shape << "\n";
    out << "density = " << format_double(b.density) << "\n";
    out << "center = " << join(b.center) << "\n";
    out << "angle = " << format_double(b.angle) << "\n";
    if (!b.axis.empty()) out << "axis = " << join(b.axis) << "\n";
    out << "fixed = " << format_bool(b.fixed) << "\n";
    if (b.radius != 0.0) out << "radius = " << format_double(b.radius) << "\n";
    if (!b.half_extents.empty()) out << "half_extents = " << join(b.half_extents) << "\n";
    if (b.height != 0.0) out << "height = " << format_double(b.height) << "\n";
    if (b.wall != 0.0) out << "wall = " << format_double(b.wall) << "\n";
    if (!b.mesh.empty()) out << "mesh = " << b.mesh << "\n";
  }

  const auto& n = c.numerics;
  out << "\n[numerics]\n";
  out << "dt = " << format_double(n.dt) << "\n";
  out << "duration = " << format_double(n.duration) << "\n";
  out << "rk_order = " << n.rk_order << "\n";
  out << "creation_threshold_rel = " << format_double(n.creation_threshold_rel) << "\n";
  out << "reinit_every = " << n.reinit_every << "\n";
  out << "reinit_iterations = " << n.reinit_iterations << "\n";
  out << "deterministic = " << format_bool(n.deterministic) << "\n";
  out << "threads = " << n.threads << "\n";

  const auto& o = c.output;
  out << "\n[output]\n";
  if (!o.directory.empty()) out << "directory = " << o.directory << "\n";
  out << "dump_every = " << o.dump_every << "\n";
  out << "fields = " << join(o.fields) << "\n";
  out << "particles = " << format_bool(o.particles) << "\n";
  out << "timing_columns = " << format_bool(o.timing_columns) << "\n";
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SceneConfig load_scene(const std::string& path) {
  try {
    return parse_scene(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Building a simulation from a scene

template <int Dim>
Vec<Dim> to_vec(const std::vector<double>& v) {
  Vec<Dim> out{};
  for (int a = 0; a < Dim; ++a) out[a] = v.at(a);
  return out;
}

template <int Dim>
GridSpec<Dim> scene_grid(const SceneConfig& c) {
  if (c.domain.dim != Dim) throw Error("scene: dimension mismatch");
  GridSpec<Dim> s;
  for (int a = 0; a < Dim; ++a) {
    s.n[a] = c.domain.n[a];
    s.origin[a] = c.domain.origin[a];
    s.bc[a] = c.domain.bc[a];
  }
  s.h = c.h();
  return s;
}

/// Initial level set of the liquid (negative inside fluid 1).
template <int Dim>
ScalarField<Dim> initial_phi(const SceneConfig& c, const GridSpec<Dim>& spec) {
  const auto& p = c.fluids.phi;
  const double far = 10.0 * std::max(1.0, *std::max_element(c.domain.extent.begin(), c.domain.extent.end()));
  auto phi = ScalarField<Dim>::from_function(spec, [&](const Vec<Dim>& x) -> double {
    if (p.kind == "half_space") {
      Vec<Dim> nrm = to_vec<Dim>(p.normal);
      nrm = (1.0 / norm(nrm)) * nrm;
      const Vec<Dim> d = x - to_vec<Dim>(p.point);
      double v = dot(nrm, d);
      if (p.amplitude != 0.0) v -= p.amplitude * std::cos(2.0 * kPi * d[0] / p.wavelength);
      return v;
    }
    if (p.kind == "circle" || p.kind == "sphere") return norm(displacement(spec, x, to_vec<Dim>(p.center))) - p.radius;
    if (p.kind == "box")
      return box_distance<Dim>(displacement(spec, x, to_vec<Dim>(p.center)), to_vec<Dim>(p.half_extents));
    if (p.kind == "column") {
      const Vec<Dim> lo = to_vec<Dim>(p.lo), hi = to_vec<Dim>(p.hi);
      const Vec<Dim> center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double v = box_distance<Dim>(x - center, half);
      if (p.pool_depth > 0.0) v = std::min(v, x[Dim - 1] - (c.domain.origin[Dim - 1] + p.pool_depth));
      return v;
    }
    return -far;
  });
  if (p.invert) phi *= -1.0;
  return phi;
}

template <int Dim>
RigidBody<Dim> build_body(const BodyConfig& b, double h, const std::string& base_dir) {
  RigidBody<Dim> body;
  body.density = b.density;
  body.center = to_vec<Dim>(b.center);
  body.fixed = b.fixed;
  if constexpr (Dim == 2) {
    body.rotation = Rotation<2>{b.angle};
  } else {
    const Vec<3> axis = b.axis.empty() ? Vec<3>{0.0, 0.0, 1.0} : to_vec<3>(b.axis);
    body.rotation = Rotation<3>::from_axis_angle(axis, b.angle);
  }
  if (b.shape == "disk" || b.shape == "sphere") {
    body.shape = BallShape{b.radius};
  } else if (b.shape == "box") {
    body.shape = BoxShape<Dim>{to_vec<Dim>(b.half_extents)};
  } else if (b.shape == "container") {
    body.shape = ContainerShape<Dim>{to_vec<Dim>(b.half_extents)};
  } else if (b.shape == "cup") {
    body.shape = make_cup_shape<Dim>(b.radius, b.height, b.wall, 0.5 * h);
  } else if (b.shape == "mesh") {
    if constexpr (Dim == 3) {
      std::filesystem::path path(b.mesh);
      if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
      body.shape = make_mesh_shape(load_obj(path.string()), 0.5 * h);
    } else {
      throw Error("scene: mesh bodies are 3D only");
    }
  } else {
    throw Error("scene: unknown body shape '" + b.shape + "'");
  }
  return body;
}

template <int Dim>
SolverSettings<Dim> scene_settings(const SceneConfig& c) {
  SolverSettings<Dim> s;
  s.gravity = to_vec<Dim>(c.gravity);
  s.rk_order = c.numerics.rk_order;
  s.creation_threshold_rel = c.numerics.creation_threshold_rel;
  s.reinit_every = c.numerics.reinit_every;
  s.reinit_iterations = c.numerics.reinit_iterations;
  return s;
}

/// `base_dir` resolves relative mesh paths.
template <int Dim>
Simulation<Dim> build_simulation(const SceneConfig& c, const std::string& base_dir = "") {
  validate_scene(c);
  const auto spec = scene_grid<Dim>(c);
  FluidInterface<Dim> iface;
  iface.phi = initial_phi(c, spec);
  iface.rho1 = c.fluids.rho1;
  iface.rho2 = c.fluids.rho2;
  iface.nu1 = c.fluids.nu1;
  iface.nu2 = c.fluids.nu2;
  iface.tau = c.fluids.tau;
  iface.epsilon = c.fluids.epsilon_factor * spec.h;
  std::vector<RigidBody<Dim>> bodies;
  for (const auto& b : c.bodies) bodies.push_back(build_body<Dim>(b, spec.h, base_dir));
  return Simulation<Dim>(spec, std::move(iface), std::move(bodies), c.numerics.dt, scene_settings<Dim>(c));
}

}  // namespace vortexflow
