#pragma once

#include "perishell/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace psh {

/// Index map for the quasi-periodic ansatz unknowns
///   [phi: 3N per-vertex deflections] ++ [G: 3x2 gradient, row-major]
///   ++ [chi: (chi11, chi22, chi12)].
/// The deflection of the copy of vertex v at in-plane position
/// xi = xi_v + (m1 L1, m2 L2) is
///   phi_v + G xi + e3 Q(xi) - z_v (chiHat xi, 0),
/// with Q(xi) = chi11 x^2/2 + chi22 y^2/2 + chi12 x y and chiHat the
/// symmetric curvature matrix. The last term ties the in-plane components
/// to height so that cell-to-cell increments are infinitesimal rigid
/// motions; without it a bent state would shear material fibres at
/// different heights and no corrugated surface could bend isometrically.
struct AnsatzLayout {
  int vertexCount = 0;

  int size() const { return 3 * vertexCount + 9; }
  int phi(int v, int comp) const { return 3 * v + comp; }
  int g(int row, int col) const { return 3 * vertexCount + 2 * row + col; }
  int chi(int k) const { return 3 * vertexCount + 6 + k; }  // 0:11 1:22 2:12
};

/// Unique mesh edge in canonical orientation; `shift` is the lattice
/// offset of endpoint b relative to endpoint a.
struct Edge {
  int a = 0;
  int b = 0;
  std::array<int, 2> shift{0, 0};
  Eigen::Vector3d vec = Eigen::Vector3d::Zero();  // pos(b) + shift - pos(a)
};

struct EdgeSet {
  std::vector<Edge> edges;  // deterministic order (sorted by key)
  int count() const { return static_cast<int>(edges.size()); }
  const Edge& operator[](size_t i) const { return edges[i]; }
};

/// Derives the unique edge set; every geometric edge must be shared by
/// exactly two triangles.
EdgeSet collectEdges(const PeriodicMesh& mesh);

/// First-order isometry constraints over the ansatz unknowns: one row
/// per edge (<e, deflection difference> = 0, normalized by |e|) plus six
/// gauge rows removing rigid motions (mean phi = 0, G31 = G32 = 0,
/// G12 = G21). Columns are in physical units; `columnScales` gives the
/// nondimensionalization used for rank decisions (phi/l0, G, chi*l0).
struct ConstraintSystem {
  Eigen::SparseMatrix<double> C;  // (E + 6) x (3N + 9), edge rows first
  AnsatzLayout layout;
  EdgeSet edges;
  double L1 = 0.0;
  double L2 = 0.0;
  double lengthScale = 0.0;  // l0 = max(L1, L2)
  std::string meshSource;
  std::uint64_t meshHash = 0;

  int edgeRowCount() const { return edges.count(); }
  int rows() const { return static_cast<int>(C.rows()); }
  int cols() const { return static_cast<int>(C.cols()); }

  Eigen::VectorXd columnScales() const;

  /// Residuals of the edge rows only, applied to a physical ansatz vector.
  Eigen::VectorXd edgeResiduals(const Eigen::VectorXd& physical) const;
  /// Residuals of the six gauge rows.
  Eigen::VectorXd gaugeResiduals(const Eigen::VectorXd& physical) const;

  /// Sparse triplet text dump: "row col value" per line.
  std::string tripletDump() const;
};

ConstraintSystem assemble(const PeriodicMesh& mesh);

/// The six rigid-body motions expressed in the ansatz: translations
/// (phi = t) and infinitesimal rotations about e1, e2, e3
/// (phi_v = z_v (r x e3), G = [r x e1 | r x e2]). Each satisfies every
/// edge row exactly and violates at least one gauge row.
std::vector<Eigen::VectorXd> trivialModes(const PeriodicMesh& mesh);

/// Deflection of the copy of `vertex` shifted by (offsetX, offsetY)
/// lattice lengths, reconstructed from a physical ansatz vector.
Eigen::Vector3d ansatzDisplacement(const PeriodicMesh& mesh,
                                   const AnsatzLayout& layout,
                                   const Eigen::VectorXd& physical, int vertex,
                                   double offsetX, double offsetY);

}  // namespace psh
