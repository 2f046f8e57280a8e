#pragma once

#include "perishell/mesh.hpp"

#include <Eigen/Core>

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace psh {

/// Quad-splitting rule used when sampling a surface into triangles.
enum class DiagonalRule { Uniform, Alternating };

DiagonalRule diagonalRuleFromString(const std::string& s);
std::string toString(DiagonalRule rule);

/// Named analytic surface with a parameter map. Unset parameters take
/// the builtin's documented defaults.
struct BuiltinSpec {
  std::string name;
  std::map<std::string, double> params;
};

/// Tabulated height samples z(i*L1/n1, j*L2/n2); bilinear in between.
struct HeightGridSpec {
  double L1 = 0.0;
  double L2 = 0.0;
  Eigen::MatrixXd heights;  // n1 x n2, heights(i, j) = z(x_i, y_j)
};

/// Declarative description of a periodic surface.
struct SurfaceSpec {
  std::variant<BuiltinSpec, HeightGridSpec, PeriodicMesh> value;

  bool isBuiltin() const { return std::holds_alternative<BuiltinSpec>(value); }
  bool isHeightGrid() const { return std::holds_alternative<HeightGridSpec>(value); }
  bool isMesh() const { return std::holds_alternative<PeriodicMesh>(value); }

  /// Cell periods of the surface (after parameter defaulting).
  std::pair<double, double> periods() const;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  SurfaceSpec spec;
};

/// Builtin presets: plane, sine1d, trianglewave1d, sumsep (+ anisotropic
/// variants), eggbox_smooth, miura.
std::vector<CatalogEntry> catalog();

SurfaceSpec builtinSpec(const std::string& name,
                        const std::map<std::string, double>& params = {});

/// Height of the surface at (x, y). Arguments are reduced into the unit
/// cell first (exact fmod), so analytic evaluation is exactly periodic.
/// Valid for builtin and heightgrid variants only.
double evaluate(const SurfaceSpec& spec, double x, double y);

/// Samples the surface into a triangulated periodic mesh on an n1 x n2
/// grid. Generators with straight kink lines (triangle waves, miura)
/// snap the grid so kinks land on mesh edges; the adjustment is recorded
/// in the mesh metadata. The miura builtin ignores n1/n2 and emits its
/// natural piecewise-linear cell (optionally replicated).
PeriodicMesh sample(const SurfaceSpec& spec, int n1, int n2,
                    DiagonalRule rule = DiagonalRule::Uniform);

/// JSON surface-config schema (see README): parse and serialize.
SurfaceSpec surfaceFromJsonText(const std::string& text);
std::string surfaceToJsonText(const SurfaceSpec& spec);
PeriodicMesh meshFromJsonText(const std::string& text);
std::string meshToJsonText(const PeriodicMesh& mesh);

}  // namespace psh
