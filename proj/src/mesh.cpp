#include "perishell/mesh.hpp"

#include "perishell/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <tuple>

namespace psh {

double PeriodicMesh::projectedArea(const Triangle& t) const {
  const Eigen::Vector2d a = cornerXY(t.corners[0]);
  const Eigen::Vector2d b = cornerXY(t.corners[1]);
  const Eigen::Vector2d c = cornerXY(t.corners[2]);
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

double PeriodicMesh::projectedAreaSum() const {
  double s = 0.0;
  for (const Triangle& t : triangles) s += projectedArea(t);
  return s;
}

namespace {

// Canonical undirected edge key: (a, b, shift of b relative to a).
using EdgeKey = std::tuple<int, int, int, int>;

EdgeKey canonicalEdgeKey(const Corner& ca, const Corner& cb) {
  int a = ca.vertex, b = cb.vertex;
  int s1 = cb.shift[0] - ca.shift[0];
  int s2 = cb.shift[1] - ca.shift[1];
  if (a > b || (a == b && (s1 < 0 || (s1 == 0 && s2 < 0)))) {
    std::swap(a, b);
    s1 = -s1;
    s2 = -s2;
  }
  return {a, b, s1, s2};
}

}  // namespace

void PeriodicMesh::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0))
    fail(ErrorKind::Invariant, "mesh periods must be positive");
  if (!std::isfinite(L1) || !std::isfinite(L2))
    fail(ErrorKind::Invariant, "mesh periods must be finite");
  const int n = vertexCount();
  if (n < 1) fail(ErrorKind::Invariant, "mesh has no vertices");
  if (triangles.empty()) fail(ErrorKind::Invariant, "mesh has no triangles");

  for (int v = 0; v < n; ++v) {
    const Eigen::Vector3d& p = vertices[static_cast<size_t>(v)];
    if (!p.allFinite())
      fail(ErrorKind::Invariant, "vertex " + std::to_string(v) + " is not finite");
    if (p.x() < 0.0 || p.x() >= L1 || p.y() < 0.0 || p.y() >= L2)
      fail(ErrorKind::Invariant,
           "vertex " + std::to_string(v) + " lies outside [0,L1)x[0,L2)");
  }

  std::vector<int> referenced(static_cast<size_t>(n), 0);
  std::map<EdgeKey, int> edgeUse;
  for (size_t ti = 0; ti < triangles.size(); ++ti) {
    const Triangle& t = triangles[ti];
    for (const Corner& c : t.corners) {
      if (c.vertex < 0 || c.vertex >= n)
        fail(ErrorKind::Invariant, "triangle corner references invalid vertex");
      if (std::abs(c.shift[0]) > 1 || std::abs(c.shift[1]) > 1)
        fail(ErrorKind::Invariant, "corner shift outside {-1,0,1}");
      referenced[static_cast<size_t>(c.vertex)] = 1;
    }
    const double area = projectedArea(t);
    if (!(area > 0.0))
      fail(ErrorKind::Invariant,
           "triangle " + std::to_string(ti) +
               " has non-positive projected area " + std::to_string(area));
    for (int k = 0; k < 3; ++k)
      edgeUse[canonicalEdgeKey(t.corners[static_cast<size_t>(k)],
                               t.corners[static_cast<size_t>((k + 1) % 3)])]++;
  }
  for (int v = 0; v < n; ++v)
    if (!referenced[static_cast<size_t>(v)])
      fail(ErrorKind::Invariant,
           "vertex " + std::to_string(v) + " is not referenced by any triangle");

  for (const auto& [key, count] : edgeUse) {
    if (count != 2) {
      std::ostringstream os;
      os << "edge (" << std::get<0>(key) << "," << std::get<1>(key) << ") shift ("
         << std::get<2>(key) << "," << std::get<3>(key) << ") shared by " << count
         << " triangles (expected 2)";
      fail(ErrorKind::Invariant, os.str());
    }
  }

  const int E = static_cast<int>(edgeUse.size());
  const int F = triangleCount();
  if (2 * E != 3 * F)
    fail(ErrorKind::Invariant, "edge count is not 3F/2 (torus topology broken)");
  if (n - E + F != 0)
    fail(ErrorKind::Invariant, "Euler count V - E + F != 0");

  const double areaSum = projectedAreaSum();
  const double cell = L1 * L2;
  if (std::abs(areaSum - cell) > 1e-12 * cell)
    fail(ErrorKind::Invariant,
         "projected areas sum to " + std::to_string(areaSum) +
             ", expected cell area " + std::to_string(cell));
}

std::uint64_t PeriodicMesh::contentHash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  auto mixDouble = [&](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    mix(&bits, sizeof bits);
  };
  mixDouble(L1);
  mixDouble(L2);
  for (const Eigen::Vector3d& v : vertices) {
    mixDouble(v.x());
    mixDouble(v.y());
    mixDouble(v.z());
  }
  for (const Triangle& t : triangles)
    for (const Corner& c : t.corners) {
      std::int32_t ints[3] = {c.vertex, c.shift[0], c.shift[1]};
      mix(ints, sizeof ints);
    }
  return h;
}

void normalizeTriangleShifts(Triangle& t) {
  for (int axis = 0; axis < 2; ++axis) {
    int lo = std::min({t.corners[0].shift[static_cast<size_t>(axis)],
                       t.corners[1].shift[static_cast<size_t>(axis)],
                       t.corners[2].shift[static_cast<size_t>(axis)]});
    for (Corner& c : t.corners) c.shift[static_cast<size_t>(axis)] -= lo;
  }
}

}  // namespace psh
