#include "perishell/rigidity.hpp"

#include "perishell/error.hpp"

#include <Eigen/Dense>

#include <cstdio>
#include <map>
#include <tuple>

namespace psh {

namespace {

using EdgeKey = std::tuple<int, int, int, int>;

EdgeKey canonicalKey(const Corner& ca, const Corner& cb) {
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

EdgeSet collectEdges(const PeriodicMesh& mesh) {
  std::map<EdgeKey, int> uses;
  for (const Triangle& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      uses[canonicalKey(t.corners[static_cast<size_t>(k)],
                        t.corners[static_cast<size_t>((k + 1) % 3)])]++;
  EdgeSet set;
  set.edges.reserve(uses.size());
  for (const auto& [key, count] : uses) {
    if (count != 2)
      fail(ErrorKind::Invariant,
           "non-manifold edge (" + std::to_string(std::get<0>(key)) + "," +
               std::to_string(std::get<1>(key)) + ") shared by " +
               std::to_string(count) + " triangles");
    Edge e;
    e.a = std::get<0>(key);
    e.b = std::get<1>(key);
    e.shift = {std::get<2>(key), std::get<3>(key)};
    const Eigen::Vector3d pa = mesh.vertices[static_cast<size_t>(e.a)];
    const Eigen::Vector3d pb = mesh.vertices[static_cast<size_t>(e.b)];
    e.vec = pb + Eigen::Vector3d(e.shift[0] * mesh.L1, e.shift[1] * mesh.L2, 0.0) - pa;
    set.edges.push_back(e);
  }
  if (2 * set.count() != 3 * mesh.triangleCount())
    fail(ErrorKind::Invariant, "edge count != 3F/2");
  return set;
}

ConstraintSystem assemble(const PeriodicMesh& mesh) {
  mesh.validate();
  ConstraintSystem sys;
  sys.layout.vertexCount = mesh.vertexCount();
  sys.edges = collectEdges(mesh);
  sys.L1 = mesh.L1;
  sys.L2 = mesh.L2;
  sys.lengthScale = std::max(mesh.L1, mesh.L2);
  sys.meshSource = mesh.meta.source;
  sys.meshHash = mesh.contentHash();

  const AnsatzLayout& lay = sys.layout;
  const int E = sys.edges.count();
  const int N = lay.vertexCount;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(E) * 15 + 3 * static_cast<size_t>(N) + 4);

  for (int r = 0; r < E; ++r) {
    const Edge& e = sys.edges[static_cast<size_t>(r)];
    const Eigen::Vector3d& pa = mesh.vertices[static_cast<size_t>(e.a)];
    const Eigen::Vector3d& pb = mesh.vertices[static_cast<size_t>(e.b)];
    const double xA = pa.x(), yA = pa.y(), zA = pa.z();
    const double xB = pb.x() + e.shift[0] * mesh.L1;
    const double yB = pb.y() + e.shift[1] * mesh.L2;
    const double zB = pb.z();
    const Eigen::Vector3d ev = e.vec;
    const double len = ev.norm();
    if (!(len > 0.0)) fail(ErrorKind::Invariant, "zero-length edge");
    const double inv = 1.0 / len;

    for (int c = 0; c < 3; ++c) {
      trip.emplace_back(r, lay.phi(e.b, c), inv * ev(c));
      trip.emplace_back(r, lay.phi(e.a, c), -inv * ev(c));
    }
    const double dx = xB - xA, dy = yB - yA;
    for (int row = 0; row < 3; ++row) {
      trip.emplace_back(r, lay.g(row, 0), inv * ev(row) * dx);
      trip.emplace_back(r, lay.g(row, 1), inv * ev(row) * dy);
    }
    // Curvature coefficients: vertical quadratic plus the height-coupled
    // in-plane part (see AnsatzLayout).
    const double c11 = ev.z() * 0.5 * (xB * xB - xA * xA) - ev.x() * (zB * xB - zA * xA);
    const double c22 = ev.z() * 0.5 * (yB * yB - yA * yA) - ev.y() * (zB * yB - zA * yA);
    const double c12 = ev.z() * (xB * yB - xA * yA) - ev.x() * (zB * yB - zA * yA) -
                       ev.y() * (zB * xB - zA * xA);
    trip.emplace_back(r, lay.chi(0), inv * c11);
    trip.emplace_back(r, lay.chi(1), inv * c22);
    trip.emplace_back(r, lay.chi(2), inv * c12);
  }

  // Gauge rows: mean phi = 0 (per component), G31 = 0, G32 = 0, G12 = G21.
  const double meanCoeff = 1.0 / std::sqrt(static_cast<double>(N));
  for (int c = 0; c < 3; ++c)
    for (int v = 0; v < N; ++v) trip.emplace_back(E + c, lay.phi(v, c), meanCoeff);
  trip.emplace_back(E + 3, lay.g(2, 0), 1.0);
  trip.emplace_back(E + 4, lay.g(2, 1), 1.0);
  const double r2 = 1.0 / std::sqrt(2.0);
  trip.emplace_back(E + 5, lay.g(0, 1), r2);
  trip.emplace_back(E + 5, lay.g(1, 0), -r2);

  sys.C.resize(E + 6, lay.size());
  sys.C.setFromTriplets(trip.begin(), trip.end());
  sys.C.makeCompressed();
  return sys;
}

Eigen::VectorXd ConstraintSystem::columnScales() const {
  Eigen::VectorXd s(cols());
  const double l0 = lengthScale;
  for (int v = 0; v < layout.vertexCount; ++v)
    for (int c = 0; c < 3; ++c) s(layout.phi(v, c)) = l0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) s(layout.g(r, c)) = 1.0;
  for (int k = 0; k < 3; ++k) s(layout.chi(k)) = 1.0 / l0;
  return s;
}

Eigen::VectorXd ConstraintSystem::edgeResiduals(const Eigen::VectorXd& physical) const {
  if (physical.size() != cols())
    fail(ErrorKind::InvalidArgument, "ansatz vector has wrong size");
  return (C * physical).head(edgeRowCount());
}

Eigen::VectorXd ConstraintSystem::gaugeResiduals(const Eigen::VectorXd& physical) const {
  if (physical.size() != cols())
    fail(ErrorKind::InvalidArgument, "ansatz vector has wrong size");
  return (C * physical).tail(6);
}

std::string ConstraintSystem::tripletDump() const {
  std::string out;
  out.reserve(static_cast<size_t>(C.nonZeros()) * 32);
  char line[96];
  for (int k = 0; k < C.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(C, k); it; ++it) {
      std::snprintf(line, sizeof line, "%ld %ld %.17g\n",
                    static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value());
      out += line;
    }
  return out;
}

std::vector<Eigen::VectorXd> trivialModes(const PeriodicMesh& mesh) {
  const AnsatzLayout lay{mesh.vertexCount()};
  std::vector<Eigen::VectorXd> out;
  out.reserve(6);
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(lay.size());
    for (int v = 0; v < lay.vertexCount; ++v) t(lay.phi(v, c)) = 1.0;
    out.push_back(std::move(t));
  }
  const Eigen::Vector3d axes[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ()};
  for (const Eigen::Vector3d& r : axes) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(lay.size());
    const Eigen::Vector3d re3 = r.cross(Eigen::Vector3d::UnitZ());
    for (int v = 0; v < lay.vertexCount; ++v) {
      const Eigen::Vector3d phi = mesh.vertices[static_cast<size_t>(v)].z() * re3;
      for (int c = 0; c < 3; ++c) m(lay.phi(v, c)) = phi(c);
    }
    const Eigen::Vector3d g0 = r.cross(Eigen::Vector3d::UnitX());
    const Eigen::Vector3d g1 = r.cross(Eigen::Vector3d::UnitY());
    for (int row = 0; row < 3; ++row) {
      m(lay.g(row, 0)) = g0(row);
      m(lay.g(row, 1)) = g1(row);
    }
    out.push_back(std::move(m));
  }
  return out;
}

Eigen::Vector3d ansatzDisplacement(const PeriodicMesh& mesh,
                                   const AnsatzLayout& layout,
                                   const Eigen::VectorXd& physical, int vertex,
                                   double offsetX, double offsetY) {
  const Eigen::Vector3d& p = mesh.vertices[static_cast<size_t>(vertex)];
  const double x = p.x() + offsetX;
  const double y = p.y() + offsetY;
  const double z = p.z();
  Eigen::Vector3d d(physical(layout.phi(vertex, 0)), physical(layout.phi(vertex, 1)),
                    physical(layout.phi(vertex, 2)));
  for (int row = 0; row < 3; ++row)
    d(row) += physical(layout.g(row, 0)) * x + physical(layout.g(row, 1)) * y;
  const double c11 = physical(layout.chi(0));
  const double c22 = physical(layout.chi(1));
  const double c12 = physical(layout.chi(2));
  d.z() += 0.5 * c11 * x * x + 0.5 * c22 * y * y + c12 * x * y;
  d.x() -= z * (c11 * x + c12 * y);
  d.y() -= z * (c12 * x + c22 * y);
  return d;
}

}  // namespace psh
