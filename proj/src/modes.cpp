#include "perishell/modes.hpp"

#include "perishell/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psh {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Deterministic xorshift fill for iteration start blocks.
Eigen::MatrixXd deterministicRandom(int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      m(i, j) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
  return m;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& v) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  return qr.householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
}

Eigen::SparseMatrix<double> scaledMatrix(const ConstraintSystem& sys) {
  Eigen::SparseMatrix<double> S = sys.C;
  const Eigen::VectorXd s = sys.columnScales();
  for (int k = 0; k < S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, k); it; ++it)
      it.valueRef() *= s(it.col());
  return S;
}

double largestEigenvalue(const Eigen::SparseMatrix<double>& A) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w = A * v;
    const double next = v.dot(w);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    if (it > 10 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

KernelResult kernelDense(const Eigen::SparseMatrix<double>& S, double rankTol) {
  const Eigen::MatrixXd D(S);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
  const int m = static_cast<int>(D.rows());
  const int n = static_cast<int>(D.cols());
  const int computed = std::min(m, n);
  const double sigmaMax = computed > 0 ? svd.singularValues()(0) : 0.0;
  const double thresh = rankTol * sigmaMax;

  std::vector<int> cols;
  for (int i = 0; i < computed; ++i)
    if (svd.singularValues()(i) <= thresh) cols.push_back(i);
  for (int i = computed; i < n; ++i) cols.push_back(i);  // exact zeros beyond rank

  KernelResult res;
  res.sigmaMax = sigmaMax;
  res.backendUsed = "dense";
  res.basis.resize(n, static_cast<long>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k)
    res.basis.col(static_cast<long>(k)) = svd.matrixV().col(cols[k]);
  res.residualNorms.resize(static_cast<long>(cols.size()));
  for (long k = 0; k < res.basis.cols(); ++k)
    res.residualNorms(k) = (S * res.basis.col(k)).norm();
  return res;
}

KernelResult kernelSparse(const Eigen::SparseMatrix<double>& S, double rankTol) {
  const int n = static_cast<int>(S.cols());
  const Eigen::SparseMatrix<double> St = S.transpose();
  Eigen::SparseMatrix<double> A = St * S;
  A.makeCompressed();

  const double lambdaMax = largestEigenvalue(A);
  const double sigmaMax = std::sqrt(std::max(lambdaMax, 0.0));
  if (sigmaMax == 0.0) fail(ErrorKind::Numeric, "constraint matrix is zero");

  // Nullity bound via LDL^T inertia: eigenvalues below theta are counted
  // exactly. theta sits far above the rounding floor of A = C^T C
  // (~1e-16 lambda_max) and far below physical stiffness.
  const double theta = 1e-13 * lambdaMax;
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  int lower = 8;
  {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> inertia;
    Eigen::SparseMatrix<double> shifted = A - theta * I;
    inertia.compute(shifted);
    if (inertia.info() == Eigen::Success)
      lower = static_cast<int>((inertia.vectorD().array() < 0.0).count());
  }

  const double mu = 1e-14 * lambdaMax;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  {
    Eigen::SparseMatrix<double> shifted = A + mu * I;
    solver.compute(shifted);
  }
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::Numeric, "factorization of the normal matrix failed");

  std::ostringstream history;
  int block = std::min(n, lower + 8);
  for (int round = 0;; ++round) {
    Eigen::MatrixXd V = orthonormalize(deterministicRandom(n, block));
    for (int it = 0; it < 2; ++it) V = solver.solve(V);
    V = orthonormalize(V);

    // Rayleigh-Ritz on C restricted to span(V): exact singular values of
    // the restriction via QR + small SVD.
    Eigen::MatrixXd B = S * V;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::MatrixXd R = qr.matrixQR()
                            .topRows(block)
                            .template triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> small(R, Eigen::ComputeFullV);
    const double thresh = rankTol * sigmaMax;
    std::vector<int> accepted;
    for (int i = 0; i < block; ++i)
      if (small.singularValues()(i) <= thresh) accepted.push_back(i);
    history << "round " << round << ": block " << block << ", accepted "
            << accepted.size() << ", smallest sigma/sigma_max "
            << (small.singularValues()(block - 1) / sigmaMax) << "; ";

    if (static_cast<int>(accepted.size()) < block || block == n) {
      KernelResult res;
      res.sigmaMax = sigmaMax;
      res.backendUsed = "sparse";
      res.basis.resize(n, static_cast<long>(accepted.size()));
      for (size_t k = 0; k < accepted.size(); ++k)
        res.basis.col(static_cast<long>(k)) = V * small.matrixV().col(accepted[k]);
      res.residualNorms.resize(static_cast<long>(accepted.size()));
      for (long k = 0; k < res.basis.cols(); ++k)
        res.residualNorms(k) = (S * res.basis.col(k)).norm();
      return res;
    }
    if (block >= n || round >= 6)
      fail(ErrorKind::Numeric,
           "null-space iteration did not isolate the kernel: " + history.str());
    block = std::min(n, 2 * block + 16);
  }
}

// Weighted triple (a11, a22, sqrt(2) a12): Euclidean norm equals the
// Frobenius norm of the symmetric 2x2 matrix.
Eigen::Vector3d weighted(const std::array<double, 3>& t) {
  return {t[0], t[1], kSqrt2 * t[2]};
}

std::array<double, 3> unweighted(const Eigen::Vector3d& w) {
  return {w(0), w(1), w(2) / kSqrt2};
}

void fixSign(Eigen::VectorXd& coeffs, const Eigen::Vector3d& primary, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(primary(i)) > tol) {
      if (primary(i) < 0.0) coeffs = -coeffs;
      return;
    }
  }
  // No macro signal: pin the sign on the largest coefficient.
  int idx = 0;
  coeffs.cwiseAbs().maxCoeff(&idx);
  if (coeffs(idx) < 0.0) coeffs = -coeffs;
}

}  // namespace

KernelBackend kernelBackendFromString(const std::string& s) {
  if (s == "auto") return KernelBackend::Auto;
  if (s == "dense") return KernelBackend::Dense;
  if (s == "sparse") return KernelBackend::Sparse;
  fail(ErrorKind::InvalidArgument,
       "kernel backend must be auto|dense|sparse, got '" + s + "'");
}

std::string toString(KernelBackend b) {
  switch (b) {
    case KernelBackend::Auto: return "auto";
    case KernelBackend::Dense: return "dense";
    default: return "sparse";
  }
}

KernelResult kernel(const ConstraintSystem& system, const KernelOptions& opt) {
  if (!(opt.rankTol > 0.0) || opt.rankTol > 1e-4)
    fail(ErrorKind::InvalidArgument, "rank tolerance must lie in (0, 1e-4]");
  const Eigen::SparseMatrix<double> S = scaledMatrix(system);
  KernelBackend backend = opt.backend;
  if (backend == KernelBackend::Auto)
    backend = system.cols() <= opt.denseLimit ? KernelBackend::Dense
                                              : KernelBackend::Sparse;
  return backend == KernelBackend::Dense ? kernelDense(S, opt.rankTol)
                                         : kernelSparse(S, opt.rankTol);
}

MacroData extractMacro(const Eigen::VectorXd& physical, const AnsatzLayout& layout,
                       double L1, double L2) {
  if (physical.size() != layout.size())
    fail(ErrorKind::InvalidArgument, "ansatz vector has wrong size");
  MacroData m;
  const double c11 = physical(layout.chi(0));
  const double c22 = physical(layout.chi(1));
  const double c12 = physical(layout.chi(2));
  m.chi = {c11, c22, c12};
  m.pdot1 = {physical(layout.g(0, 0)) * L1, physical(layout.g(1, 0)) * L1,
             physical(layout.g(2, 0)) * L1 + 0.5 * c11 * L1 * L1};
  m.pdot2 = {physical(layout.g(0, 1)) * L2, physical(layout.g(1, 1)) * L2,
             physical(layout.g(2, 1)) * L2 + 0.5 * c22 * L2 * L2};
  const double e11 = L1 * m.pdot1.x();
  const double e22 = L2 * m.pdot2.y();
  const double e12 = 0.5 * (L1 * m.pdot2.x() + L2 * m.pdot1.y());
  m.E = {e11, e22, e12};
  m.Ebar = {e11 / (L1 * L1), e22 / (L2 * L2), e12 / (L1 * L2)};
  return m;
}

std::string toString(ModeClass c) {
  switch (c) {
    case ModeClass::Flexure: return "flexure";
    case ModeClass::Membrane: return "membrane";
    default: return "local_mechanism";
  }
}

ModeSetReport classify(const KernelResult& kres, const ConstraintSystem& system,
                       double tolMacro) {
  if (!(tolMacro > 0.0))
    fail(ErrorKind::InvalidArgument, "tol_macro must be positive");
  ModeSetReport rep;
  rep.kernelDimension = static_cast<int>(kres.basis.cols());
  rep.sigmaMax = kres.sigmaMax;
  rep.backendUsed = kres.backendUsed;
  rep.tolMacro = tolMacro;
  const int k = rep.kernelDimension;
  if (k == 0) return rep;

  const Eigen::VectorXd scales = system.columnScales();
  const AnsatzLayout& lay = system.layout;
  const double l0 = system.lengthScale;

  // Macro maps on unit scaled basis vectors: dimensionless curvature
  // chiHat = l0 * chi and engineering strain Ebar, both in weighted
  // (Frobenius-consistent) coordinates. Thresholds compare against
  // tol_macro directly since basis columns have unit norm.
  Eigen::MatrixXd X(3, k);  // chiHat
  Eigen::MatrixXd Y(3, k);  // Ebar
  for (int j = 0; j < k; ++j) {
    const Eigen::VectorXd phys = scales.cwiseProduct(kres.basis.col(j));
    const MacroData m = extractMacro(phys, lay, system.L1, system.L2);
    X.col(j) = weighted({m.chi[0] * l0, m.chi[1] * l0, m.chi[2] * l0});
    Y.col(j) = weighted(m.Ebar);
  }

  auto pushMode = [&](const Eigen::VectorXd& coeffs, ModeClass klass) {
    Eigen::VectorXd c = coeffs;
    const Eigen::Vector3d sig = klass == ModeClass::LocalMechanism
                                    ? Eigen::Vector3d::Zero()
                                    : klass == ModeClass::Flexure
                                          ? Eigen::Vector3d(X * c)
                                          : Eigen::Vector3d(Y * c);
    fixSign(c, sig, tolMacro);
    IsometricMode mode;
    mode.id = static_cast<int>(rep.modes.size());
    const Eigen::VectorXd scaled = kres.basis * c;
    mode.physical = scales.cwiseProduct(scaled);
    mode.macro = extractMacro(mode.physical, lay, system.L1, system.L2);
    mode.klass = klass;
    rep.modes.push_back(std::move(mode));
    return rep.modes.size() - 1;
  };

  // Flexure subspace: image of the curvature map over the kernel.
  Eigen::JacobiSVD<Eigen::MatrixXd> svdX(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  int flexRank = 0;
  while (flexRank < std::min(3, k) && svdX.singularValues()(flexRank) > tolMacro)
    ++flexRank;
  for (int i = 0; i < flexRank; ++i) {
    const size_t idx = pushMode(svdX.matrixV().col(i), ModeClass::Flexure);
    IsometricMode& mode = rep.modes[idx];
    const Eigen::Vector3d ebarW = weighted(mode.macro.Ebar);
    mode.mixed = ebarW.norm() > tolMacro;
    rep.flexureCurvatureBasis.push_back(mode.macro.chi);
  }

  // Membrane candidates: kernel combinations with zero curvature; within
  // them, the strain map's image gives membrane modes, its null space the
  // local mechanisms.
  const int nullDim = k - flexRank;
  if (nullDim > 0) {
    const Eigen::MatrixXd W0 = svdX.matrixV().rightCols(nullDim);
    Eigen::JacobiSVD<Eigen::MatrixXd> svdY(Y * W0,
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
    int memRank = 0;
    while (memRank < std::min(3, nullDim) && svdY.singularValues()(memRank) > tolMacro)
      ++memRank;
    for (int i = 0; i < memRank; ++i) {
      const size_t idx = pushMode(W0 * svdY.matrixV().col(i), ModeClass::Membrane);
      IsometricMode& mode = rep.modes[idx];
      rep.membraneStrainBasis.push_back(mode.macro.E);
      rep.membraneStrainBasisBar.push_back(mode.macro.Ebar);
    }
    for (int i = memRank; i < nullDim; ++i)
      pushMode(W0 * svdY.matrixV().col(i), ModeClass::LocalMechanism);
    rep.localMechanismCount = nullDim - memRank;
  }

  // Direct edge-row residuals relative to sigma_max.
  const Eigen::SparseMatrix<double> S = scaledMatrix(system);
  for (IsometricMode& mode : rep.modes) {
    const Eigen::VectorXd scaled = mode.physical.cwiseQuotient(scales);
    mode.edgeResidual = (S * scaled).norm() / rep.sigmaMax;
  }
  return rep;
}

PoissonPair poisson(const std::array<double, 3>& E, const std::array<double, 3>& chi,
                    double denomTol) {
  PoissonPair p;
  const double normE = weighted(E).norm();
  const double normChi = weighted(chi).norm();
  if (normE > 0.0 && std::abs(E[0]) > denomTol * normE) p.nuIn = -E[1] / E[0];
  if (normChi > 0.0 && std::abs(chi[0]) > denomTol * normChi)
    p.nuOut = -chi[1] / chi[0];
  return p;
}

PrincipalBasis principalBasis(const std::array<double, 3>& Ebar,
                              const std::array<double, 3>& chi) {
  PrincipalBasis out;
  const double norm = weighted(Ebar).norm();
  if (norm == 0.0)
    fail(ErrorKind::InvalidArgument, "principal basis needs a nonzero strain");
  double angle = 0.0;
  if (std::abs(Ebar[2]) > 1e-15 * norm)
    angle = 0.5 * std::atan2(2.0 * Ebar[2], Ebar[0] - Ebar[1]);
  out.angle = angle;
  const double c = std::cos(angle), s = std::sin(angle);
  auto rotate = [c, s](const std::array<double, 3>& t) -> std::array<double, 3> {
    // R^T M R with R = [[c, -s], [s, c]].
    const double m11 = t[0], m22 = t[1], m12 = t[2];
    const double r11 = c * c * m11 + 2.0 * c * s * m12 + s * s * m22;
    const double r22 = s * s * m11 - 2.0 * c * s * m12 + c * c * m22;
    const double r12 = (c * c - s * s) * m12 + c * s * (m22 - m11);
    return {r11, r22, r12};
  };
  out.Eprime = rotate(Ebar);
  out.chiPrime = rotate(chi);
  return out;
}

}  // namespace psh
