#include "perishell/reciprocity.hpp"

#include <cmath>

namespace psh {

namespace {

double frob(const std::array<double, 3>& t) {
  return std::sqrt(t[0] * t[0] + t[1] * t[1] + 2.0 * t[2] * t[2]);
}

}  // namespace

double pairingRaw(const std::array<double, 3>& E, const std::array<double, 3>& chi) {
  return E[0] * chi[1] - 2.0 * E[2] * chi[2] + E[1] * chi[0];
}

double pairingNormalized(const std::array<double, 3>& Ebar,
                         const std::array<double, 3>& chi) {
  return pairingRaw(Ebar, chi);
}

ReciprocityReport verifyReciprocity(const ModeSetReport& modes, double verdictTol,
                                    double poissonDenomTol) {
  ReciprocityReport rep;
  rep.verdictTol = verdictTol;

  std::vector<const IsometricMode*> membrane, flexure;
  for (const IsometricMode& m : modes.modes) {
    if (m.klass == ModeClass::Membrane) membrane.push_back(&m);
    if (m.klass == ModeClass::Flexure) flexure.push_back(&m);
  }

  if (membrane.empty() || flexure.empty()) {
    rep.vacuous = true;
    rep.verdict = "vacuous";
    return rep;
  }

  for (const IsometricMode* m : membrane) {
    const double normE = frob(m->macro.E);
    const double normEbar = frob(m->macro.Ebar);
    for (const IsometricMode* f : flexure) {
      const double normChi = frob(f->macro.chi);
      PairRecord pr;
      pr.membraneModeId = m->id;
      pr.flexureModeId = f->id;
      pr.raw = pairingRaw(m->macro.E, f->macro.chi);
      pr.rawResidual = normE * normChi > 0.0 ? std::abs(pr.raw) / (normE * normChi) : 0.0;
      pr.normalized = pairingNormalized(m->macro.Ebar, f->macro.chi);
      pr.normalizedResidual =
          normEbar * normChi > 0.0 ? std::abs(pr.normalized) / (normEbar * normChi) : 0.0;
      rep.maxRawResidual = std::max(rep.maxRawResidual, pr.rawResidual);
      rep.maxNormalizedResidual = std::max(rep.maxNormalizedResidual, pr.normalizedResidual);
      rep.pairs.push_back(pr);

      // Poisson identity in the principal strain basis, recorded when
      // both primed 11-components carry signal.
      const PrincipalBasis pb = principalBasis(m->macro.Ebar, f->macro.chi);
      if (std::abs(pb.Eprime[0]) > poissonDenomTol * normEbar &&
          std::abs(pb.chiPrime[0]) > poissonDenomTol * normChi) {
        PoissonRecord po;
        po.membraneModeId = m->id;
        po.flexureModeId = f->id;
        po.angle = pb.angle;
        po.nuIn = -pb.Eprime[1] / pb.Eprime[0];
        po.nuOut = -pb.chiPrime[1] / pb.chiPrime[0];
        po.identityResidual = std::abs(po.nuIn + po.nuOut);
        rep.poisson.push_back(po);
      }
    }
  }

  const bool rawOk = rep.maxRawResidual <= verdictTol;
  const bool normOk = rep.maxNormalizedResidual <= verdictTol;
  rep.verdict = rawOk && normOk ? "both"
                : normOk        ? "normalized"
                : rawOk         ? "raw"
                                : "neither";
  return rep;
}

}  // namespace psh
