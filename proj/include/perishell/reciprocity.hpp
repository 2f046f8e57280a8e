#pragma once

#include "perishell/modes.hpp"

#include <array>
#include <string>
#include <vector>

namespace psh {

/// Reciprocity pairing E11 chi22 - 2 E12 chi12 + E22 chi11 evaluated on
/// the raw strain triple (units length^2) or the dimensionless Ebar.
double pairingRaw(const std::array<double, 3>& E, const std::array<double, 3>& chi);
double pairingNormalized(const std::array<double, 3>& Ebar,
                         const std::array<double, 3>& chi);

struct PairRecord {
  int membraneModeId = 0;
  int flexureModeId = 0;
  double raw = 0.0;
  double rawResidual = 0.0;  // |pairing| / (||E||_F ||chi||_F), dimensionless
  double normalized = 0.0;
  double normalizedResidual = 0.0;
};

struct PoissonRecord {
  int membraneModeId = 0;
  int flexureModeId = 0;
  double angle = 0.0;  // rotation into the principal strain basis
  double nuIn = 0.0;
  double nuOut = 0.0;
  double identityResidual = 0.0;  // |nuIn + nuOut|
};

/// Pairing residuals across all (membrane strain, flexure curvature)
/// pairs under both conventions. The verdict names the convention(s)
/// whose residuals vanish uniformly; it is asserted only when the max
/// residual stays below `verdictTol`. Empty membrane or flexure sets
/// yield a vacuous (but explicit) report.
struct ReciprocityReport {
  std::vector<PairRecord> pairs;
  std::vector<PoissonRecord> poisson;
  double maxRawResidual = 0.0;
  double maxNormalizedResidual = 0.0;
  bool vacuous = false;
  std::string verdict;  // "raw" | "normalized" | "both" | "neither" | "vacuous"
  double verdictTol = 0.0;
};

ReciprocityReport verifyReciprocity(const ModeSetReport& modes,
                                    double verdictTol = 1e-8,
                                    double poissonDenomTol = 1e-6);

}  // namespace psh
