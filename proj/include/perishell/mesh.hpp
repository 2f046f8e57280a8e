#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace psh {

/// A triangle corner: vertex index plus a lattice shift (m1, m2).
/// The corner sits at vertex position + (m1*L1, m2*L2, 0).
struct Corner {
  int vertex = 0;
  std::array<int, 2> shift{0, 0};
};

struct Triangle {
  std::array<Corner, 3> corners;
};

struct MeshMetadata {
  std::string source;                  // catalog name, "heightgrid" or "mesh"
  std::string diagonal = "uniform";    // quad-splitting rule used when sampled
  int grid_n1 = 0;                     // >0 when the mesh is a grid sampling
  int grid_n2 = 0;
  int requested_n1 = 0;                // pre-snap request (kink alignment)
  int requested_n2 = 0;
};

/// Triangulated fundamental domain of a periodic surface z = f(x, y).
/// Vertices live in [0,L1) x [0,L2); triangles may reference lattice
/// translates of stored vertices through corner shifts. The projected
/// triangles tile the torus exactly once.
class PeriodicMesh {
 public:
  double L1 = 0.0;
  double L2 = 0.0;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Triangle> triangles;
  MeshMetadata meta;

  int vertexCount() const { return static_cast<int>(vertices.size()); }
  int triangleCount() const { return static_cast<int>(triangles.size()); }

  /// In-plane position of a corner (vertex base position + lattice shift).
  Eigen::Vector2d cornerXY(const Corner& c) const {
    const Eigen::Vector3d& p = vertices[static_cast<size_t>(c.vertex)];
    return {p.x() + c.shift[0] * L1, p.y() + c.shift[1] * L2};
  }

  /// Full 3D position of a corner.
  Eigen::Vector3d cornerPosition(const Corner& c) const {
    const Eigen::Vector3d& p = vertices[static_cast<size_t>(c.vertex)];
    return {p.x() + c.shift[0] * L1, p.y() + c.shift[1] * L2, p.z()};
  }

  /// Signed area of a triangle's projection onto the (x, y) plane.
  double projectedArea(const Triangle& t) const;

  /// Sum of projected signed areas; equals L1*L2 for a valid tiling.
  double projectedAreaSum() const;

  /// Checks all structural invariants (periods positive, shifts in range,
  /// every vertex referenced, positive projected areas tiling the cell,
  /// manifold edges with V - E + F = 0). Throws Error on violation.
  void validate() const;

  /// FNV-1a hash over the canonical binary content (periods, vertex
  /// coordinates, triangle corners). Used for round-trip identity checks.
  std::uint64_t contentHash() const;
};

/// Normalizes triangle corner shifts so the per-axis minimum is 0.
/// The geometric triangle is unchanged (it moves by a lattice vector).
void normalizeTriangleShifts(Triangle& t);

}  // namespace psh
