#include "perishell/rigidity.hpp"

#include "perishell/error.hpp"
#include "perishell/surface.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

using namespace psh;

namespace {

double relativeEdgeResidual(const ConstraintSystem& sys, const Eigen::VectorXd& mode) {
  double cInf = 0.0;
  for (int k = 0; k < sys.C.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.C, k); it; ++it)
      if (it.row() < sys.edgeRowCount()) cInf = std::max(cInf, std::abs(it.value()));
  return sys.edgeResiduals(mode).lpNorm<Eigen::Infinity>() /
         (cInf * mode.lpNorm<Eigen::Infinity>());
}

Eigen::VectorXd randomAnsatz(const AnsatzLayout& lay, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(lay.size());
  for (long i = 0; i < v.size(); ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("plane 4x4 has 48 unique edges") {
  const PeriodicMesh m = sample(builtinSpec("plane"), 4, 4);
  const EdgeSet edges = collectEdges(m);
  CHECK(edges.count() == 48);
  CHECK(edges.count() == 3 * m.triangleCount() / 2);
}

TEST_CASE("edges are canonical and unique across orientations") {
  const PeriodicMesh m = sample(builtinSpec("sumsep"), 6, 6);
  const EdgeSet edges = collectEdges(m);
  // Re-keying every edge reversed must land on the same set.
  std::set<std::tuple<int, int, int, int>> keys;
  for (const Edge& e : edges.edges) {
    CHECK(e.a <= e.b);
    keys.insert({e.a, e.b, e.shift[0], e.shift[1]});
  }
  CHECK(static_cast<int>(keys.size()) == edges.count());
  // Torus triangulation: E = 3V.
  CHECK(edges.count() == 3 * m.vertexCount());
}

TEST_CASE("sumsep 32x32 has 3072 edges") {
  const PeriodicMesh m = sample(builtinSpec("sumsep"), 32, 32);
  CHECK(collectEdges(m).count() == 3072);
}

TEST_CASE("edge rows have at most 15 nonzeros") {
  const PeriodicMesh m = sample(builtinSpec("eggbox_smooth"), 8, 8);
  const ConstraintSystem sys = assemble(m);
  std::vector<int> counts(static_cast<size_t>(sys.rows()), 0);
  for (int k = 0; k < sys.C.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.C, k); it; ++it)
      if (it.value() != 0.0) counts[static_cast<size_t>(it.row())]++;
  for (int r = 0; r < sys.edgeRowCount(); ++r) CHECK(counts[static_cast<size_t>(r)] <= 15);
}

TEST_CASE("flat meshes decouple the curvature columns") {
  const PeriodicMesh m = sample(builtinSpec("plane"), 4, 4);
  const ConstraintSystem sys = assemble(m);
  for (int k = 0; k < 3; ++k) {
    const int col = sys.layout.chi(k);
    for (int r = 0; r < sys.edgeRowCount(); ++r) CHECK(sys.C.coeff(r, col) == 0.0);
  }
}

TEST_CASE("wrap edge of the plane mesh carries the documented G coefficients") {
  const PeriodicMesh m = sample(builtinSpec("plane"), 4, 4);
  const ConstraintSystem sys = assemble(m);
  // Find the x-boundary wrap edge from vertex 3 (= (3,0)) to vertex 0.
  int row = -1;
  for (int r = 0; r < sys.edgeRowCount(); ++r) {
    const Edge& e = sys.edges[static_cast<size_t>(r)];
    if (e.a == 0 && e.b == 3 && e.shift[0] == -1 && e.shift[1] == 0) row = r;
    if (e.a == 3 && e.b == 0 && e.shift[0] == 1 && e.shift[1] == 0) row = r;
  }
  REQUIRE(row >= 0);
  const Edge& e = sys.edges[static_cast<size_t>(row)];
  const double h = m.L1 / 4.0;
  // After |e| normalization the row is <unit e, delta displacement>; the
  // G coefficients are unit_e outer (delta xi).
  const double sign = e.a == 0 ? -1.0 : 1.0;  // canonical orientation may flip
  CHECK(sys.C.coeff(row, sys.layout.g(0, 0)) == doctest::Approx(sign * h).epsilon(1e-14));
  CHECK(sys.C.coeff(row, sys.layout.g(0, 1)) == 0.0);
  CHECK(sys.C.coeff(row, sys.layout.g(1, 0)) == 0.0);
  CHECK(sys.C.coeff(row, sys.layout.g(2, 0)) == 0.0);
  CHECK(std::abs(sys.C.coeff(row, sys.layout.phi(e.b, 0))) == doctest::Approx(1.0));
}

TEST_CASE("the six rigid modes satisfy every edge row exactly") {
  for (const char* name : {"sine1d", "sumsep", "eggbox_smooth", "miura"}) {
    const PeriodicMesh m = sample(builtinSpec(name), 16, 16);
    const ConstraintSystem sys = assemble(m);
    const auto rigid = trivialModes(m);
    REQUIRE(rigid.size() == 6);
    for (const auto& mode : rigid) CHECK(relativeEdgeResidual(sys, mode) <= 1e-12);
  }
}

TEST_CASE("rigid modes decompose as documented") {
  const PeriodicMesh m = sample(builtinSpec("sine1d"), 8, 4);
  const auto rigid = trivialModes(m);
  const AnsatzLayout lay{m.vertexCount()};
  // Rotation about e3: phi = 0, G = [[0,-1],[1,0],[0,0]].
  const Eigen::VectorXd& rz = rigid[5];
  for (int v = 0; v < lay.vertexCount; ++v)
    for (int c = 0; c < 3; ++c) CHECK(rz(lay.phi(v, c)) == 0.0);
  CHECK(rz(lay.g(0, 1)) == -1.0);
  CHECK(rz(lay.g(1, 0)) == 1.0);
  CHECK(rz(lay.g(0, 0)) == 0.0);
  CHECK(rz(lay.g(2, 0)) == 0.0);
  CHECK(rz(lay.g(2, 1)) == 0.0);
  // Rotation about e1: phi_v = (0, -z_v, 0), G32 = 1.
  const Eigen::VectorXd& rx = rigid[3];
  for (int v = 0; v < lay.vertexCount; ++v) {
    CHECK(rx(lay.phi(v, 0)) == 0.0);
    CHECK(rx(lay.phi(v, 1)) == -m.vertices[static_cast<size_t>(v)].z());
    CHECK(rx(lay.phi(v, 2)) == 0.0);
  }
  CHECK(rx(lay.g(2, 1)) == 1.0);
}

TEST_CASE("each rigid mode violates a gauge row") {
  const PeriodicMesh m = sample(builtinSpec("sumsep"), 8, 8);
  const ConstraintSystem sys = assemble(m);
  for (const auto& mode : trivialModes(m))
    CHECK(sys.gaugeResiduals(mode).lpNorm<Eigen::Infinity>() > 1e-9);
}

TEST_CASE("assembled rows agree with the ansatz displacement reconstruction") {
  for (const char* name : {"sumsep", "miura", "eggbox_smooth"}) {
    const PeriodicMesh m = sample(builtinSpec(name), 8, 8);
    const ConstraintSystem sys = assemble(m);
    const Eigen::VectorXd v = randomAnsatz(sys.layout, 7u);
    const Eigen::VectorXd viaMatrix = sys.edgeResiduals(v);
    for (int r = 0; r < sys.edgeRowCount(); ++r) {
      const Edge& e = sys.edges[static_cast<size_t>(r)];
      const Eigen::Vector3d da = ansatzDisplacement(m, sys.layout, v, e.a, 0.0, 0.0);
      const Eigen::Vector3d db = ansatzDisplacement(m, sys.layout, v, e.b,
                                                    e.shift[0] * m.L1, e.shift[1] * m.L2);
      const double expected = e.vec.dot(db - da) / e.vec.norm();
      CHECK(viaMatrix(r) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("edge rows are independent of the edge's lattice copy") {
  // The same geometric edge shifted by any lattice vector must impose the
  // same constraint on the ansatz: <e, delta displacement> is invariant.
  const PeriodicMesh m = sample(builtinSpec("sumsep"), 6, 6);
  const ConstraintSystem sys = assemble(m);
  const Eigen::VectorXd v = randomAnsatz(sys.layout, 99u);
  for (int r = 0; r < sys.edgeRowCount(); r += 7) {
    const Edge& e = sys.edges[static_cast<size_t>(r)];
    const double base = e.vec.dot(
        ansatzDisplacement(m, sys.layout, v, e.b, e.shift[0] * m.L1, e.shift[1] * m.L2) -
        ansatzDisplacement(m, sys.layout, v, e.a, 0.0, 0.0));
    for (const auto& [p1, p2] : {std::pair{1, 0}, {0, 1}, {-2, 3}}) {
      const double ox = p1 * m.L1, oy = p2 * m.L2;
      const double copy = e.vec.dot(
          ansatzDisplacement(m, sys.layout, v, e.b, e.shift[0] * m.L1 + ox,
                             e.shift[1] * m.L2 + oy) -
          ansatzDisplacement(m, sys.layout, v, e.a, ox, oy));
      CHECK(copy == doctest::Approx(base).epsilon(1e-9));
    }
  }
}

TEST_CASE("triplet dump covers the whole matrix") {
  const PeriodicMesh m = sample(builtinSpec("plane"), 3, 3);
  const ConstraintSystem sys = assemble(m);
  const std::string dump = sys.tripletDump();
  const long lines = std::count(dump.begin(), dump.end(), '\n');
  CHECK(lines == sys.C.nonZeros());
  CHECK(dump.find(' ') != std::string::npos);
}

TEST_CASE("non-manifold meshes are rejected") {
  PeriodicMesh m = sample(builtinSpec("plane"), 3, 3);
  m.triangles.push_back(m.triangles[0]);
  CHECK_THROWS_AS(collectEdges(m), Error);
}
