#include "perishell/surface.hpp"

#include "perishell/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace psh {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

// Exact reduction into [0, L). fmod is exact, so translated inputs that
// are exactly representable reduce to bit-identical arguments.
double wrap(double x, double L) {
  double r = std::fmod(x, L);
  if (r < 0.0) r += L;
  if (r >= L) r = 0.0;  // fmod can return L after the negative fixup
  return r;
}

// Symmetric triangle profile on phase in [0, 1): -1 at 0, +1 at 1/2,
// kinks at phase 0 and 1/2.
double triangleProfile(double phase) {
  return 1.0 - 4.0 * std::abs(phase - 0.5);
}

struct ParamSpec {
  const char* name;
  double defaultValue;
  bool integer = false;
  double min = -std::numeric_limits<double>::infinity();
  double minExclusive = false;
};

const std::map<std::string, std::vector<ParamSpec>>& builtinParams() {
  static const std::map<std::string, std::vector<ParamSpec>> table = {
      {"plane",
       {{"L1", kTwoPi, false, 0.0, true}, {"L2", kTwoPi, false, 0.0, true}}},
      {"sine1d",
       {{"amplitude", 1.0},
        {"waves", 1.0, true, 1.0},
        {"L1", kTwoPi, false, 0.0, true},
        {"L2", kTwoPi, false, 0.0, true}}},
      {"trianglewave1d",
       {{"amplitude", 1.0},
        {"waves", 1.0, true, 1.0},
        {"L1", kTwoPi, false, 0.0, true},
        {"L2", kTwoPi, false, 0.0, true}}},
      {"sumsep",
       {{"amp_sine", 1.0},
        {"waves_sine", 1.0, true, 1.0},
        {"amp_tri", 1.0},
        {"waves_tri", 1.0, true, 1.0},
        {"L1", kTwoPi, false, 0.0, true},
        {"L2", kTwoPi, false, 0.0, true}}},
      {"eggbox_smooth",
       {{"amplitude", 1.0},
        {"waves_x", 1.0, true, 1.0},
        {"waves_y", 1.0, true, 1.0},
        {"L1", kTwoPi, false, 0.0, true},
        {"L2", kTwoPi, false, 0.0, true}}},
      {"miura",
       {{"panel_length", 1.0, false, 0.0, true},
        {"panel_width", 1.0, false, 0.0, true},
        {"panel_angle", std::numbers::pi_v<double> / 3.0, false, 0.0, true},
        {"fold_angle", std::numbers::pi_v<double> / 4.0, false, 0.0, true},
        {"replicate", 1.0, true, 1.0}}},
  };
  return table;
}

// Fills defaults and validates ranges/integrality; rejects unknown keys.
std::map<std::string, double> resolveParams(const BuiltinSpec& spec) {
  auto it = builtinParams().find(spec.name);
  if (it == builtinParams().end())
    fail(ErrorKind::InvalidArgument, "unknown builtin surface '" + spec.name + "'");
  std::map<std::string, double> out;
  for (const ParamSpec& p : it->second) out[p.name] = p.defaultValue;
  for (const auto& [key, value] : spec.params) {
    if (!out.count(key))
      fail(ErrorKind::InvalidArgument,
           "builtin '" + spec.name + "' has no parameter '" + key + "'");
    if (!std::isfinite(value))
      fail(ErrorKind::InvalidArgument,
           "parameter '" + key + "' of '" + spec.name + "' is not finite");
    out[key] = value;
  }
  for (const ParamSpec& p : it->second) {
    const double v = out[p.name];
    if (p.integer && v != std::floor(v))
      fail(ErrorKind::InvalidArgument,
           "parameter '" + std::string(p.name) + "' must be an integer");
    if (v < p.min || (p.minExclusive && v == p.min))
      fail(ErrorKind::InvalidArgument,
           "parameter '" + std::string(p.name) + "' out of range");
  }
  return out;
}

// Folded miura cell geometry derived from panel dimensions and angles:
// half-periods (L, V), row shear S and ridge height H.
struct MiuraCell {
  double L, V, S, H;
};

MiuraCell miuraCell(const std::map<std::string, double>& p) {
  const double a = p.at("panel_length");
  const double b = p.at("panel_width");
  const double gamma = p.at("panel_angle");
  const double theta = p.at("fold_angle");
  if (gamma <= 0.0 || gamma >= std::numbers::pi_v<double> / 2.0)
    fail(ErrorKind::InvalidArgument, "miura panel_angle must lie in (0, pi/2)");
  if (theta <= 0.0 || theta >= std::numbers::pi_v<double> / 2.0)
    fail(ErrorKind::InvalidArgument, "miura fold_angle must lie in (0, pi/2)");
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sg = std::sin(gamma), tg = std::tan(gamma);
  MiuraCell c;
  c.H = a * st * sg;
  c.L = a * std::sqrt(1.0 - st * st * sg * sg);
  const double denom = std::sqrt(1.0 + ct * ct * tg * tg);
  c.S = b * ct * tg / denom;
  c.V = b / denom;
  if (!(c.S < c.L))
    fail(ErrorKind::InvalidArgument,
         "miura parameters give row shear >= panel plan length; "
         "reduce fold_angle or panel_width");
  return c;
}

double evaluateBuiltin(const BuiltinSpec& spec, double x, double y) {
  const auto p = resolveParams(spec);
  if (spec.name == "miura") {
    const MiuraCell c = miuraCell(p);
    const double L1 = 2.0 * c.L, L2 = 2.0 * c.V;
    x = wrap(x, L1);
    y = wrap(y, L2);
    // Row band and shear interpolation; z is affine over each panel.
    const double tg = y / c.V;
    const int j = std::min(static_cast<int>(std::floor(tg)), 1);
    const double t = tg - j;
    const double sigma = static_cast<double>(j % 2);
    const double shear = c.S * (sigma * (1.0 - t) + (1.0 - sigma) * t);
    const double u = (x - shear) / c.L;
    const double iReal = std::floor(u);
    const double alpha = u - iReal;
    const long long i = static_cast<long long>(iReal);
    const double z0 = ((i % 2 + 2) % 2) * c.H;
    const double z1 = (((i + 1) % 2 + 2) % 2) * c.H;
    return z0 + alpha * (z1 - z0);
  }
  const double L1 = p.at("L1"), L2 = p.at("L2");
  x = wrap(x, L1);
  y = wrap(y, L2);
  if (spec.name == "plane") return 0.0;
  if (spec.name == "sine1d")
    return p.at("amplitude") * std::cos(kTwoPi * p.at("waves") * x / L1);
  if (spec.name == "trianglewave1d") {
    double ph = p.at("waves") * x / L1;
    ph -= std::floor(ph);
    return p.at("amplitude") * triangleProfile(ph);
  }
  if (spec.name == "sumsep") {
    double ph = p.at("waves_tri") * y / L2;
    ph -= std::floor(ph);
    return p.at("amp_sine") * std::cos(kTwoPi * p.at("waves_sine") * x / L1) +
           p.at("amp_tri") * triangleProfile(ph);
  }
  if (spec.name == "eggbox_smooth")
    return p.at("amplitude") * std::sin(kTwoPi * p.at("waves_x") * x / L1) *
           std::sin(kTwoPi * p.at("waves_y") * y / L2);
  fail(ErrorKind::InvalidArgument, "unknown builtin surface '" + spec.name + "'");
}

double evaluateHeightGrid(const HeightGridSpec& g, double x, double y) {
  const int n1 = static_cast<int>(g.heights.rows());
  const int n2 = static_cast<int>(g.heights.cols());
  if (n1 < 3 || n2 < 3)
    fail(ErrorKind::InvalidArgument, "heightgrid needs at least 3x3 samples");
  x = wrap(x, g.L1);
  y = wrap(y, g.L2);
  const double u = x / g.L1 * n1;
  const double v = y / g.L2 * n2;
  int i0 = std::min(static_cast<int>(std::floor(u)), n1 - 1);
  int j0 = std::min(static_cast<int>(std::floor(v)), n2 - 1);
  const double a = u - i0, b = v - j0;
  const int i1 = (i0 + 1) % n1, j1 = (j0 + 1) % n2;
  return (1 - a) * (1 - b) * g.heights(i0, j0) + a * (1 - b) * g.heights(i1, j0) +
         (1 - a) * b * g.heights(i0, j1) + a * b * g.heights(i1, j1);
}

// Rounds n up to the smallest multiple of m that is >= max(n, 3).
int snapUp(int n, int m) {
  n = std::max(n, 3);
  return ((n + m - 1) / m) * m;
}

void addQuad(PeriodicMesh& mesh, int n1, int n2, int i, int j,
             DiagonalRule rule) {
  auto corner = [&](int ii, int jj) {
    Corner c;
    c.shift = {ii == n1 ? 1 : 0, jj == n2 ? 1 : 0};
    c.vertex = (jj % n2) * n1 + (ii % n1);
    return c;
  };
  const Corner c00 = corner(i, j), c10 = corner(i + 1, j);
  const Corner c11 = corner(i + 1, j + 1), c01 = corner(i, j + 1);
  const bool flip = rule == DiagonalRule::Alternating && ((i + j) % 2 == 1);
  if (!flip) {
    mesh.triangles.push_back({{c00, c10, c11}});
    mesh.triangles.push_back({{c00, c11, c01}});
  } else {
    mesh.triangles.push_back({{c00, c10, c01}});
    mesh.triangles.push_back({{c10, c11, c01}});
  }
}

PeriodicMesh sampleGrid(const SurfaceSpec& spec, const std::string& source,
                        double L1, double L2, int n1, int n2, int req1,
                        int req2, DiagonalRule rule) {
  PeriodicMesh mesh;
  mesh.L1 = L1;
  mesh.L2 = L2;
  mesh.meta.source = source;
  mesh.meta.diagonal = toString(rule);
  mesh.meta.grid_n1 = n1;
  mesh.meta.grid_n2 = n2;
  mesh.meta.requested_n1 = req1;
  mesh.meta.requested_n2 = req2;
  mesh.vertices.reserve(static_cast<size_t>(n1) * n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const double x = i * L1 / n1;
      const double y = j * L2 / n2;
      mesh.vertices.emplace_back(x, y, evaluate(spec, x, y));
    }
  mesh.triangles.reserve(static_cast<size_t>(2) * n1 * n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) addQuad(mesh, n1, n2, i, j, rule);
  mesh.validate();
  return mesh;
}

PeriodicMesh sampleMiura(const BuiltinSpec& spec, int req1, int req2,
                         DiagonalRule rule) {
  const auto p = resolveParams(spec);
  const MiuraCell c = miuraCell(p);
  const int rep = static_cast<int>(p.at("replicate"));
  const int n1 = 2 * rep, n2 = 2 * rep;
  PeriodicMesh mesh;
  mesh.L1 = n1 * c.L;
  mesh.L2 = n2 * c.V;
  mesh.meta.source = "miura";
  mesh.meta.diagonal = toString(rule);
  mesh.meta.grid_n1 = 0;  // not a function-graph grid: columns are sheared
  mesh.meta.grid_n2 = 0;
  mesh.meta.requested_n1 = req1;
  mesh.meta.requested_n2 = req2;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const double x = i * c.L + (j % 2) * c.S;
      const double y = j * c.V;
      const double z = (i % 2) * c.H;
      mesh.vertices.emplace_back(x, y, z);
    }
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) addQuad(mesh, n1, n2, i, j, rule);
  mesh.validate();
  return mesh;
}

json specToJson(const SurfaceSpec& spec);

SurfaceSpec specFromJson(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "surface config must be a JSON object");
  const std::string variant = j.value("variant", "");
  if (variant == "builtin") {
    BuiltinSpec b;
    if (!j.contains("name") || !j["name"].is_string())
      fail(ErrorKind::Parse, "builtin surface config needs a string 'name'");
    b.name = j["name"].get<std::string>();
    if (j.contains("params")) {
      if (!j["params"].is_object())
        fail(ErrorKind::Parse, "'params' must be an object of numbers");
      for (const auto& [key, value] : j["params"].items()) {
        if (!value.is_number())
          fail(ErrorKind::Parse, "parameter '" + key + "' must be a number");
        b.params[key] = value.get<double>();
      }
    }
    resolveParams(b);  // validates name and ranges eagerly
    return SurfaceSpec{b};
  }
  if (variant == "heightgrid") {
    HeightGridSpec g;
    if (!j.contains("L1") || !j.contains("L2") || !j.contains("heights"))
      fail(ErrorKind::Parse, "heightgrid config needs 'L1', 'L2' and 'heights'");
    g.L1 = j["L1"].get<double>();
    g.L2 = j["L2"].get<double>();
    if (!(g.L1 > 0.0) || !(g.L2 > 0.0))
      fail(ErrorKind::Parse, "heightgrid periods must be positive");
    const auto& rows = j["heights"];
    if (!rows.is_array() || rows.size() < 3)
      fail(ErrorKind::Parse, "'heights' must be an array of at least 3 rows");
    const size_t n1 = rows.size();
    const size_t n2 = rows[0].is_array() ? rows[0].size() : 0;
    if (n2 < 3) fail(ErrorKind::Parse, "'heights' rows need at least 3 values");
    g.heights.resize(static_cast<long>(n1), static_cast<long>(n2));
    for (size_t i = 0; i < n1; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n2)
        fail(ErrorKind::Parse, "'heights' rows must all have equal length");
      for (size_t k = 0; k < n2; ++k) {
        const double z = rows[i][k].get<double>();
        if (!std::isfinite(z)) fail(ErrorKind::Parse, "height sample is not finite");
        g.heights(static_cast<long>(i), static_cast<long>(k)) = z;
      }
    }
    return SurfaceSpec{g};
  }
  if (variant == "mesh") {
    PeriodicMesh m;
    if (!j.contains("L1") || !j.contains("L2") || !j.contains("vertices") ||
        !j.contains("triangles"))
      fail(ErrorKind::Parse,
           "mesh config needs 'L1', 'L2', 'vertices' and 'triangles'");
    m.L1 = j["L1"].get<double>();
    m.L2 = j["L2"].get<double>();
    for (const auto& v : j["vertices"]) {
      if (!v.is_array() || v.size() != 3)
        fail(ErrorKind::Parse, "mesh vertices must be [x, y, z] triples");
      m.vertices.emplace_back(v[0].get<double>(), v[1].get<double>(),
                              v[2].get<double>());
    }
    for (const auto& t : j["triangles"]) {
      if (!t.is_array() || t.size() != 3)
        fail(ErrorKind::Parse, "mesh triangles must list 3 corners");
      Triangle tri;
      for (int k = 0; k < 3; ++k) {
        const auto& c = t[static_cast<size_t>(k)];
        if (!c.is_array() || c.size() != 3)
          fail(ErrorKind::Parse, "mesh corners must be [vertex, m1, m2]");
        tri.corners[static_cast<size_t>(k)].vertex = c[0].get<int>();
        tri.corners[static_cast<size_t>(k)].shift = {c[1].get<int>(),
                                                     c[2].get<int>()};
      }
      normalizeTriangleShifts(tri);
      m.triangles.push_back(tri);
    }
    m.meta.source = j.value("source", std::string("mesh"));
    m.validate();
    return SurfaceSpec{m};
  }
  fail(ErrorKind::Parse,
       "surface config 'variant' must be one of builtin|heightgrid|mesh");
}

json specToJson(const SurfaceSpec& spec) {
  json j;
  j["schema"] = "perishell-surface/1";
  if (spec.isBuiltin()) {
    const auto& b = std::get<BuiltinSpec>(spec.value);
    j["variant"] = "builtin";
    j["name"] = b.name;
    json params = json::object();
    for (const auto& [key, value] : b.params) params[key] = value;
    j["params"] = params;
  } else if (spec.isHeightGrid()) {
    const auto& g = std::get<HeightGridSpec>(spec.value);
    j["variant"] = "heightgrid";
    j["L1"] = g.L1;
    j["L2"] = g.L2;
    json rows = json::array();
    for (long i = 0; i < g.heights.rows(); ++i) {
      json row = json::array();
      for (long k = 0; k < g.heights.cols(); ++k) row.push_back(g.heights(i, k));
      rows.push_back(std::move(row));
    }
    j["heights"] = std::move(rows);
  } else {
    const auto& m = std::get<PeriodicMesh>(spec.value);
    j["variant"] = "mesh";
    j["L1"] = m.L1;
    j["L2"] = m.L2;
    if (!m.meta.source.empty()) j["source"] = m.meta.source;
    json verts = json::array();
    for (const auto& v : m.vertices) verts.push_back({v.x(), v.y(), v.z()});
    j["vertices"] = std::move(verts);
    json tris = json::array();
    for (const Triangle& t : m.triangles) {
      json corners = json::array();
      for (const Corner& c : t.corners)
        corners.push_back({c.vertex, c.shift[0], c.shift[1]});
      tris.push_back(std::move(corners));
    }
    j["triangles"] = std::move(tris);
  }
  return j;
}

}  // namespace

DiagonalRule diagonalRuleFromString(const std::string& s) {
  if (s == "uniform") return DiagonalRule::Uniform;
  if (s == "alternating") return DiagonalRule::Alternating;
  fail(ErrorKind::InvalidArgument,
       "diagonal rule must be 'uniform' or 'alternating', got '" + s + "'");
}

std::string toString(DiagonalRule rule) {
  return rule == DiagonalRule::Uniform ? "uniform" : "alternating";
}

std::pair<double, double> SurfaceSpec::periods() const {
  if (isBuiltin()) {
    const auto& b = std::get<BuiltinSpec>(value);
    const auto p = resolveParams(b);
    if (b.name == "miura") {
      const MiuraCell c = miuraCell(p);
      return {2.0 * c.L * p.at("replicate"), 2.0 * c.V * p.at("replicate")};
    }
    return {p.at("L1"), p.at("L2")};
  }
  if (isHeightGrid()) {
    const auto& g = std::get<HeightGridSpec>(value);
    return {g.L1, g.L2};
  }
  const auto& m = std::get<PeriodicMesh>(value);
  return {m.L1, m.L2};
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  auto add = [&out](const std::string& name, const std::string& desc,
                    const std::map<std::string, double>& params,
                    const std::string& builtin = "") {
    CatalogEntry e;
    e.name = name;
    e.description = desc;
    e.spec = builtinSpec(builtin.empty() ? name : builtin, params);
    out.push_back(std::move(e));
  };
  add("plane", "flat graph z = 0", {});
  add("sine1d", "simply corrugated plane, z = cos(x)", {});
  add("trianglewave1d", "piecewise-linear corrugation (zigzag profile)", {});
  add("sumsep", "doubly corrugated: sine profile in x plus triangle wave in y",
      {});
  add("sumsep_aniso2", "sumsep with L2 = 2 L1 (convention disambiguation)",
      {{"L2", 2.0 * kTwoPi}}, "sumsep");
  add("sumsep_aniso4", "sumsep with L2 = 4 L1 (convention disambiguation)",
      {{"L2", 4.0 * kTwoPi}}, "sumsep");
  add("eggbox_smooth", "product-of-sines graph, z = sin(x) sin(y)", {});
  add("miura", "folded miura cell, four parallelogram panels", {});
  return out;
}

SurfaceSpec builtinSpec(const std::string& name,
                        const std::map<std::string, double>& params) {
  BuiltinSpec b{name, params};
  resolveParams(b);
  return SurfaceSpec{b};
}

double evaluate(const SurfaceSpec& spec, double x, double y) {
  if (spec.isBuiltin()) return evaluateBuiltin(std::get<BuiltinSpec>(spec.value), x, y);
  if (spec.isHeightGrid())
    return evaluateHeightGrid(std::get<HeightGridSpec>(spec.value), x, y);
  fail(ErrorKind::InvalidArgument,
       "evaluate() needs an analytic surface (builtin or heightgrid)");
}

PeriodicMesh sample(const SurfaceSpec& spec, int n1, int n2, DiagonalRule rule) {
  if (spec.isMesh()) {
    PeriodicMesh mesh = std::get<PeriodicMesh>(spec.value);
    mesh.meta.requested_n1 = n1;
    mesh.meta.requested_n2 = n2;
    mesh.validate();
    return mesh;
  }
  if (n1 < 3 || n2 < 3)
    fail(ErrorKind::InvalidArgument, "sampling needs n1, n2 >= 3");
  if (spec.isBuiltin()) {
    const auto& b = std::get<BuiltinSpec>(spec.value);
    const auto p = resolveParams(b);
    if (b.name == "miura") return sampleMiura(b, n1, n2, rule);
    int a1 = n1, a2 = n2;
    // Kink lines of triangle-wave profiles must land on grid lines.
    if (b.name == "trianglewave1d")
      a1 = snapUp(n1, 2 * static_cast<int>(p.at("waves")));
    if (b.name == "sumsep")
      a2 = snapUp(n2, 2 * static_cast<int>(p.at("waves_tri")));
    return sampleGrid(spec, b.name, p.at("L1"), p.at("L2"), a1, a2, n1, n2, rule);
  }
  const auto& g = std::get<HeightGridSpec>(spec.value);
  return sampleGrid(spec, "heightgrid", g.L1, g.L2, n1, n2, n1, n2, rule);
}

SurfaceSpec surfaceFromJsonText(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Parse, "surface config is not valid JSON");
  try {
    return specFromJson(j);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("surface config: ") + e.what());
  }
}

std::string surfaceToJsonText(const SurfaceSpec& spec) {
  return specToJson(spec).dump(2) + "\n";
}

PeriodicMesh meshFromJsonText(const std::string& text) {
  SurfaceSpec spec = surfaceFromJsonText(text);
  if (!spec.isMesh())
    fail(ErrorKind::Parse, "expected a mesh-variant surface config");
  return std::get<PeriodicMesh>(std::move(spec.value));
}

std::string meshToJsonText(const PeriodicMesh& mesh) {
  return surfaceToJsonText(SurfaceSpec{mesh});
}

}  // namespace psh
