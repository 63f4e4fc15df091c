#pragma once

// Frame dumps (legacy VTK ASCII STRUCTURED_POINTS), a reader for them,
// particle CSV dumps and the diagnostics CSV.
//
// Frame layout, one record per line:
//   # vtk DataFile Version 3.0
//   vortexflow frame step <step> t <t>
//   ASCII
//   DATASET STRUCTURED_POINTS
//   DIMENSIONS nx ny nz          (nz = 1 in 2D)
//   ORIGIN ox oy oz
//   SPACING h h h
//   POINT_DATA nx*ny*nz
// then per field either
//   SCALARS <name> double 1
//   LOOKUP_TABLE default
//   <one value per line>
// or
//   VECTORS <name> double
//   <three values per line, z = 0 in 2D>
// Values use %.17g so float64 data round-trips exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vortexflow/grid.hpp"
#include "vortexflow/solver.hpp"

namespace vortexflow {

namespace detail {

inline void put_double(std::string& out, double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(len));
}

inline void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw Error("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace detail

/// One named field of a frame: 1 component (scalar) or 3 (vector).
struct FrameField {
  std::string name;
  int components = 1;
  std::vector<double> values;  // node-major, `components` values per node

  bool operator==(const FrameField&) const = default;
};

struct Frame {
  std::array<int, 3> dimensions{1, 1, 1};
  std::array<double, 3> origin{};
  std::array<double, 3> spacing{};
  std::string title;
  std::vector<FrameField> fields;

  const FrameField& field(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return f;
    throw Error("frame has no field '" + name + "'");
  }
};

template <int Dim>
Frame make_frame(const GridSpec<Dim>& spec, const std::string& title) {
  Frame f;
  f.title = title;
  for (int a = 0; a < Dim; ++a) {
    f.dimensions[a] = spec.n[a];
    f.origin[a] = spec.origin[a];
  }
  f.spacing = {spec.h, spec.h, spec.h};
  return f;
}

template <int Dim>
void add_scalar(Frame& frame, const std::string& name, const ScalarField<Dim>& field) {
  frame.fields.push_back({name, 1, std::vector<double>(field.values().begin(), field.values().end())});
}

/// Vector fields are padded to three components.
template <int Dim, int Comps>
void add_vector(Frame& frame, const std::string& name, const VectorField<Dim, Comps>& field) {
  static_assert(Comps <= 3);
  FrameField f{name, 3, std::vector<double>(3 * field.size(), 0.0)};
  for (std::size_t i = 0; i < field.size(); ++i)
    for (int c = 0; c < Comps; ++c) f.values[3 * i + c] = field[c][i];
  frame.fields.push_back(std::move(f));
}

inline std::string format_frame(const Frame& frame) {
  const std::size_t points =
      static_cast<std::size_t>(frame.dimensions[0]) * frame.dimensions[1] * static_cast<std::size_t>(frame.dimensions[2]);
  std::string out;
  out.reserve(points * 24 * (1 + frame.fields.size()));
  out += "# vtk DataFile Version 3.0\n";
  out += frame.title.empty() ? std::string("vortexflow frame") : frame.title;
  out += "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out += "DIMENSIONS " + std::to_string(frame.dimensions[0]) + ' ' + std::to_string(frame.dimensions[1]) + ' ' +
         std::to_string(frame.dimensions[2]) + '\n';
  auto triple = [&](const char* key, const std::array<double, 3>& v) {
    out += key;
    for (double x : v) {
      out += ' ';
      detail::put_double(out, x);
    }
    out += '\n';
  };
  triple("ORIGIN", frame.origin);
  triple("SPACING", frame.spacing);
  out += "POINT_DATA " + std::to_string(points) + '\n';
  for (const auto& f : frame.fields) {
    if (f.values.size() != points * static_cast<std::size_t>(f.components))
      throw Error("frame field '" + f.name + "' has the wrong number of values");
    if (f.components == 1) {
      out += "SCALARS " + f.name + " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) {
        detail::put_double(out, v);
        out += '\n';
      }
    } else if (f.components == 3) {
      out += "VECTORS " + f.name + " double\n";
      for (std::size_t i = 0; i < points; ++i) {
        for (int c = 0; c < 3; ++c) {
          if (c > 0) out += ' ';
          detail::put_double(out, f.values[3 * i + c]);
        }
        out += '\n';
      }
    } else {
      throw Error("frame field '" + f.name + "' must have 1 or 3 components");
    }
  }
  return out;
}

inline void write_frame(const Frame& frame, const std::string& path) { detail::write_file(path, format_frame(frame)); }

/// Reads frames written by write_frame (and other legacy ASCII
/// STRUCTURED_POINTS files restricted to SCALARS/VECTORS of one component
/// count).
inline Frame read_frame(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  auto fail = [&](const std::string& what) { return Error(path + ": " + what); };
  Frame f;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) throw fail("not a legacy VTK file");
  std::getline(in, f.title);
  if (!std::getline(in, line) || line != "ASCII") throw fail("only ASCII files are supported");
  if (!std::getline(in, line) || line != "DATASET STRUCTURED_POINTS") throw fail("expected DATASET STRUCTURED_POINTS");
  std::string key;
  std::size_t points = 0;
  while (in >> key) {
    if (key == "DIMENSIONS") {
      in >> f.dimensions[0] >> f.dimensions[1] >> f.dimensions[2];
    } else if (key == "ORIGIN") {
      in >> f.origin[0] >> f.origin[1] >> f.origin[2];
    } else if (key == "SPACING") {
      in >> f.spacing[0] >> f.spacing[1] >> f.spacing[2];
    } else if (key == "POINT_DATA") {
      in >> points;
    } else if (key == "SCALARS" || key == "VECTORS") {
      FrameField field;
      std::string type;
      in >> field.name >> type;
      field.components = 3;
      if (key == "SCALARS") {
        int comps = 1;
        std::getline(in, line);
        std::istringstream rest(line);
        if (rest >> comps && comps != 1) throw fail("multi-component SCALARS are not supported");
        field.components = 1;
        std::string lut, table;
        in >> lut >> table;
        if (lut != "LOOKUP_TABLE") throw fail("expected LOOKUP_TABLE after SCALARS " + field.name);
      }
      field.values.resize(points * static_cast<std::size_t>(field.components));
      for (auto& v : field.values) {
        std::string token;
        if (!(in >> token)) throw fail("truncated data in field " + field.name);
        v = std::strtod(token.c_str(), nullptr);
      }
      f.fields.push_back(std::move(field));
    } else {
      throw fail("unexpected keyword '" + key + "'");
    }
  }
  return f;
}

/// Particle CSV: x,y[,z],w[,wx,wy,wz] with the header on the first line.
template <int Dim>
void write_particles(const ParticleSet<Dim>& particles, const std::string& path) {
  std::string out = Dim == 2 ? "x,y,w\n" : "x,y,z,wx,wy,wz\n";
  for (std::size_t p = 0; p < particles.size(); ++p) {
    for (int a = 0; a < Dim; ++a) {
      detail::put_double(out, particles.positions[p][a]);
      out += ',';
    }
    const auto& w = particles.strengths[p];
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (c > 0) out += ',';
      detail::put_double(out, w[c]);
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

// ---------------------------------------------------------------------------
// Diagnostics

inline constexpr const char* kDiagnosticsVersionLine = "# vortexflow diagnostics v1";

struct Diagnostics {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw Error("diagnostics have no column '" + name + "'");
  }

  std::vector<double> series(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

/// Columns: step, t, circulation (per component), enstrophy, liquid_volume,
/// particles, then per body k: position, rotation (angle in 2D, quaternion
/// w x y z in 3D), velocity and angular velocity; optional per-step stage
/// times in seconds.
template <int Dim>
std::vector<std::string> diagnostics_columns(const SimulationState<Dim>& s, bool timing) {
  static constexpr const char* axes[] = {"x", "y", "z"};
  std::vector<std::string> c = {"step", "t"};
  if constexpr (Dim == 2) {
    c.push_back("circulation");
  } else {
    for (const char* a : axes) c.push_back(std::string("circulation_") + a);
  }
  c.insert(c.end(), {"enstrophy", "liquid_volume", "particles"});
  for (std::size_t k = 0; k < s.bodies.size(); ++k) {
    const std::string b = "body" + std::to_string(k) + "_";
    for (int a = 0; a < Dim; ++a) c.push_back(b + axes[a]);
    if constexpr (Dim == 2) {
      c.push_back(b + "angle");
    } else {
      for (const char* q : {"qw", "qx", "qy", "qz"}) c.push_back(b + q);
    }
    for (int a = 0; a < Dim; ++a) c.push_back(b + "u" + axes[a]);
    if constexpr (Dim == 2) {
      c.push_back(b + "omega");
    } else {
      for (const char* a : axes) c.push_back(b + "omega" + a);
    }
  }
  if (timing)
    for (const char* name : kStageNames) c.push_back(std::string("time_") + name);
  return c;
}

template <int Dim>
std::vector<double> diagnostics_row(const SimulationState<Dim>& s, bool timing) {
  std::vector<double> r = {static_cast<double>(s.step_index), s.t};
  for (double v : circulation(s.omega)) r.push_back(v);
  r.push_back(enstrophy(s.omega));
  r.push_back(liquid_volume(s.iface.phi, s.iface.epsilon));
  r.push_back(static_cast<double>(s.particles.size()));
  for (const auto& b : s.bodies) {
    for (double v : b.center) r.push_back(v);
    if constexpr (Dim == 2) {
      r.push_back(b.rotation.angle);
    } else {
      r.insert(r.end(), {b.rotation.w, b.rotation.x, b.rotation.y, b.rotation.z});
    }
    for (double v : b.velocity) r.push_back(v);
    for (double v : b.angular_velocity) r.push_back(v);
  }
  if (timing)
    for (double v : s.last_step_times.seconds) r.push_back(v);
  return r;
}

inline std::string format_diagnostics(const Diagnostics& d) {
  std::string out = kDiagnosticsVersionLine;
  out += '\n';
  for (std::size_t i = 0; i < d.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += d.columns[i];
  }
  out += '\n';
  for (const auto& row : d.rows) {
    if (row.size() != d.columns.size()) throw Error("diagnostics row has the wrong number of columns");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      detail::put_double(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_diagnostics(const Diagnostics& d, const std::string& path) {
  detail::write_file(path, format_diagnostics(d));
}

inline Diagnostics read_diagnostics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsVersionLine) throw Error(path + ": missing diagnostics version line");
  Diagnostics d;
  if (!std::getline(in, line)) throw Error(path + ": missing header");
  std::istringstream header(line);
  for (std::string col; std::getline(header, col, ',');) d.columns.push_back(col);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != d.columns.size()) throw Error(path + ": row with the wrong number of columns");
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace vortexflow
