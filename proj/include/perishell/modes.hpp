#pragma once

#include "perishell/rigidity.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace psh {

enum class KernelBackend { Auto, Dense, Sparse };

KernelBackend kernelBackendFromString(const std::string& s);
std::string toString(KernelBackend b);

struct KernelOptions {
  double rankTol = 1e-10;          // relative to sigma_max
  KernelBackend backend = KernelBackend::Auto;
  int denseLimit = 1600;           // Auto: dense decomposition up to this size
};

/// Orthonormal basis of the null space of the scaled constraint matrix.
/// Columns live in nondimensionalized coordinates (see
/// ConstraintSystem::columnScales); physical vectors are scale * column.
struct KernelResult {
  Eigen::MatrixXd basis;           // (3N+9) x k
  Eigen::VectorXd residualNorms;   // ||C_scaled v|| per column
  double sigmaMax = 0.0;
  std::string backendUsed;
};

KernelResult kernel(const ConstraintSystem& system, const KernelOptions& opt = {});

/// Macroscopic data of one ansatz vector: cell-outline deflections,
/// effective strains (raw <p, pdot> and engineering Ebar), curvatures.
struct MacroData {
  Eigen::Vector3d pdot1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d pdot2 = Eigen::Vector3d::Zero();
  std::array<double, 3> E{0, 0, 0};     // E11, E22, E12   (length^2)
  std::array<double, 3> Ebar{0, 0, 0};  // E11/L1^2, E22/L2^2, E12/(L1 L2)
  std::array<double, 3> chi{0, 0, 0};   // chi11, chi22, chi12 (1/length)
};

MacroData extractMacro(const Eigen::VectorXd& physical, const AnsatzLayout& layout,
                       double L1, double L2);

enum class ModeClass { Flexure, Membrane, LocalMechanism };
std::string toString(ModeClass c);

struct IsometricMode {
  int id = 0;
  Eigen::VectorXd physical;  // ansatz coefficients, unit norm in scaled coords
  MacroData macro;
  ModeClass klass = ModeClass::LocalMechanism;
  bool mixed = false;        // flexure with nonzero effective strain
  double edgeResidual = 0.0; // ||C_scaled v|| / sigma_max
};

/// Kernel re-expressed in a classification-aligned basis: flexure
/// representatives spanning the curvature image (descending ||chi||),
/// then membrane modes spanning the achievable strain set, then local
/// mechanisms (E = 0 and chi = 0).
struct ModeSetReport {
  int kernelDimension = 0;
  double sigmaMax = 0.0;
  std::string backendUsed;
  std::vector<IsometricMode> modes;
  std::vector<std::array<double, 3>> membraneStrainBasis;     // raw E
  std::vector<std::array<double, 3>> membraneStrainBasisBar;  // Ebar
  std::vector<std::array<double, 3>> flexureCurvatureBasis;   // chi
  int localMechanismCount = 0;
  double tolMacro = 0.0;
};

ModeSetReport classify(const KernelResult& kernel, const ConstraintSystem& system,
                       double tolMacro = 1e-8);

/// In-plane and out-of-plane Poisson coefficients -E22/E11 and
/// -chi22/chi11; unset when the denominator is below `denomTol` times
/// the triple's norm.
struct PoissonPair {
  std::optional<double> nuIn;
  std::optional<double> nuOut;
};
PoissonPair poisson(const std::array<double, 3>& E, const std::array<double, 3>& chi,
                    double denomTol = 1e-12);

/// Congruent rotation into the principal directions of strain:
/// Eprime = R^T Ebar R is diagonal and chiPrime = R^T chi R.
struct PrincipalBasis {
  double angle = 0.0;
  std::array<double, 3> Eprime{0, 0, 0};
  std::array<double, 3> chiPrime{0, 0, 0};
};
PrincipalBasis principalBasis(const std::array<double, 3>& Ebar,
                              const std::array<double, 3>& chi);

}  // namespace psh
