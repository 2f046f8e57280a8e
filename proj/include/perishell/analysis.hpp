#pragma once

#include "perishell/diffgeo.hpp"
#include "perishell/modes.hpp"
#include "perishell/reciprocity.hpp"
#include "perishell/surface.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psh {

struct AnalysisOptions {
  int n1 = 16;
  int n2 = 16;
  DiagonalRule diagonal = DiagonalRule::Uniform;
  double rankTol = 1e-10;
  double tolMacro = 1e-8;
  KernelBackend backend = KernelBackend::Auto;
};

/// Named invariant check evaluated during an analysis run; any failure
/// flips the run's `ok` flag (CLI exit code 2).
struct CheckRecord {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AnalysisResult {
  PeriodicMesh mesh;
  int edgeCount = 0;
  AnsatzLayout layout;
  AnalysisOptions options;
  ModeSetReport modes;
  ReciprocityReport reciprocity;
  std::vector<CheckRecord> checks;
  bool ok = true;
};

AnalysisResult analyzeMesh(const PeriodicMesh& mesh, const AnalysisOptions& opt = {});
AnalysisResult analyze(const SurfaceSpec& spec, const AnalysisOptions& opt = {});

/// Machine-readable report (schema perishell-report/1). Deterministic:
/// repeated runs on identical inputs serialize byte-identically.
std::string analysisReportJson(const AnalysisResult& result);

/// Full ansatz vectors of the classified modes (schema perishell-modes/1),
/// enough to reconstruct deformations without re-running the kernel.
std::string modeVectorsJson(const AnalysisResult& result);

/// Mode vectors reloaded from mesh.json + modes.json.
struct ModeVectorSet {
  AnsatzLayout layout;
  double L1 = 0.0;
  double L2 = 0.0;
  std::uint64_t meshHash = 0;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<std::string> classes;
};

ModeVectorSet modeVectorsOf(const AnalysisResult& result);
ModeVectorSet modeVectorsFromJsonText(const std::string& text);

/// Deformed m1 x m2 tiling of the mesh under `physical` at amplitude t,
/// as Wavefront OBJ text (v/f lines only, full-precision coordinates).
std::string deformToObj(const PeriodicMesh& mesh, const AnsatzLayout& layout,
                        const Eigen::VectorXd& physical, double amplitude,
                        int tile1, int tile2);

/// Residual report of the linearized isometry (Gauss-invariance) equation.
struct PdeCheckReport {
  std::string wSource;  // "xy" | "x2" | "y2" | "mode:<id>"
  int n1 = 0;
  int n2 = 0;
  double rms = 0.0;
  std::optional<double> rmsRefined;  // at a doubled grid (analytic w only)
  std::optional<double> order;       // measured convergence order
  CurvatureTriple chi{0, 0, 0};
};

PdeCheckReport pdeCheckAnalytic(const SurfaceSpec& spec, const std::string& wName,
                                int n);
PdeCheckReport pdeCheckMode(const PeriodicMesh& mesh, const AnsatzLayout& layout,
                            const Eigen::VectorXd& physical, int modeId);
std::string pdeCheckJson(const PdeCheckReport& report);

}  // namespace psh
