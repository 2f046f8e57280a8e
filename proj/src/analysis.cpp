#include "perishell/analysis.hpp"

#include "perishell/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace psh {

namespace {

using json = nlohmann::ordered_json;

json tripleJson(const std::array<double, 3>& t) { return json::array({t[0], t[1], t[2]}); }

json vec3Json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string hashString(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void runChecks(AnalysisResult& res, const ConstraintSystem& sys,
               const KernelResult& kres) {
  auto add = [&res](const std::string& name, bool passed, const std::string& detail) {
    res.checks.push_back({name, passed, detail});
    res.ok = res.ok && passed;
  };

  // Rigid motions satisfy every edge row exactly (infinity-norm relative).
  const auto rigid = trivialModes(res.mesh);
  double cInf = 0.0;
  for (int k = 0; k < sys.C.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.C, k); it; ++it)
      if (it.row() < sys.edgeRowCount()) cInf = std::max(cInf, std::abs(it.value()));
  double worstRigid = 0.0;
  bool gaugeExcludes = true;
  for (const Eigen::VectorXd& mode : rigid) {
    const double denom = cInf * mode.lpNorm<Eigen::Infinity>();
    worstRigid = std::max(worstRigid,
                          sys.edgeResiduals(mode).lpNorm<Eigen::Infinity>() / denom);
    gaugeExcludes =
        gaugeExcludes && sys.gaugeResiduals(mode).lpNorm<Eigen::Infinity>() > 1e-9;
  }
  {
    std::ostringstream os;
    os << "max relative edge residual over 6 rigid modes = " << worstRigid;
    add("trivial_mode_exactness", worstRigid <= 1e-12, os.str());
  }
  add("gauge_excludes_rigid", gaugeExcludes,
      "every rigid mode violates at least one gauge row");

  {
    std::ostringstream os;
    os << "kernel dimension " << res.modes.kernelDimension << " >= 3";
    add("counting_bound", res.modes.kernelDimension >= 3, os.str());
  }

  double worstKernel = 0.0;
  for (long i = 0; i < kres.residualNorms.size(); ++i)
    worstKernel = std::max(worstKernel, kres.residualNorms(i));
  {
    const double bound = 10.0 * res.options.rankTol * kres.sigmaMax;
    std::ostringstream os;
    os << "max ||C v|| over kernel basis = " << worstKernel << " (bound " << bound
       << ")";
    add("kernel_exactness", worstKernel <= bound, os.str());
  }

  bool classOk = true;
  const double l0 = sys.lengthScale;
  for (const IsometricMode& m : res.modes.modes) {
    const auto& chi = m.macro.chi;
    const double chiHat =
        l0 * std::sqrt(chi[0] * chi[0] + chi[1] * chi[1] + 2.0 * chi[2] * chi[2]);
    if (m.klass == ModeClass::Flexure)
      classOk = classOk && chiHat > res.options.tolMacro;
    else
      classOk = classOk && chiHat <= res.options.tolMacro;
    if (m.klass == ModeClass::LocalMechanism) {
      const auto& eb = m.macro.Ebar;
      const double ebNorm =
          std::sqrt(eb[0] * eb[0] + eb[1] * eb[1] + 2.0 * eb[2] * eb[2]);
      classOk = classOk && ebNorm <= res.options.tolMacro;
    }
  }
  add("classification_soundness", classOk,
      "curvature/strain magnitudes agree with assigned classes");

  add("reciprocity_verdict", res.reciprocity.verdict != "neither",
      "verdict: " + res.reciprocity.verdict);
}

}  // namespace

AnalysisResult analyzeMesh(const PeriodicMesh& mesh, const AnalysisOptions& opt) {
  AnalysisResult res;
  res.mesh = mesh;
  res.mesh.validate();
  res.options = opt;

  const ConstraintSystem sys = assemble(res.mesh);
  res.edgeCount = sys.edgeRowCount();
  res.layout = sys.layout;

  KernelOptions kopt;
  kopt.rankTol = opt.rankTol;
  kopt.backend = opt.backend;
  const KernelResult kres = kernel(sys, kopt);

  res.modes = classify(kres, sys, opt.tolMacro);
  res.reciprocity = verifyReciprocity(res.modes);
  runChecks(res, sys, kres);
  return res;
}

AnalysisResult analyze(const SurfaceSpec& spec, const AnalysisOptions& opt) {
  return analyzeMesh(sample(spec, opt.n1, opt.n2, opt.diagonal), opt);
}

std::string analysisReportJson(const AnalysisResult& r) {
  json j;
  j["schema"] = "perishell-report/1";

  json surface;
  surface["source"] = r.mesh.meta.source;
  surface["L1"] = r.mesh.L1;
  surface["L2"] = r.mesh.L2;
  surface["vertices"] = r.mesh.vertexCount();
  surface["triangles"] = r.mesh.triangleCount();
  surface["edges"] = r.edgeCount;
  surface["mesh_hash"] = hashString(r.mesh.contentHash());
  surface["diagonal"] = r.mesh.meta.diagonal;
  surface["grid"] = json::array({r.mesh.meta.grid_n1, r.mesh.meta.grid_n2});
  surface["requested_grid"] =
      json::array({r.mesh.meta.requested_n1, r.mesh.meta.requested_n2});
  j["surface"] = std::move(surface);

  json options;
  options["rank_tol"] = r.options.rankTol;
  options["tol_macro"] = r.options.tolMacro;
  options["kernel_backend"] = r.modes.backendUsed;
  j["options"] = std::move(options);

  json kernelInfo;
  kernelInfo["dimension"] = r.modes.kernelDimension;
  kernelInfo["unknowns"] = r.layout.size();
  kernelInfo["edge_rows"] = r.edgeCount;
  kernelInfo["sigma_max"] = r.modes.sigmaMax;
  j["kernel"] = std::move(kernelInfo);

  json modes = json::array();
  for (const IsometricMode& m : r.modes.modes) {
    json mj;
    mj["id"] = m.id;
    mj["class"] = toString(m.klass);
    mj["mixed"] = m.mixed;
    mj["chi"] = tripleJson(m.macro.chi);
    mj["E"] = tripleJson(m.macro.E);
    mj["Ebar"] = tripleJson(m.macro.Ebar);
    mj["pdot1"] = vec3Json(m.macro.pdot1);
    mj["pdot2"] = vec3Json(m.macro.pdot2);
    mj["edge_residual"] = m.edgeResidual;
    modes.push_back(std::move(mj));
  }
  j["modes"] = std::move(modes);

  json strainBasis = json::array();
  for (const auto& t : r.modes.membraneStrainBasis) strainBasis.push_back(tripleJson(t));
  j["membrane_strain_basis"] = std::move(strainBasis);
  json strainBasisBar = json::array();
  for (const auto& t : r.modes.membraneStrainBasisBar)
    strainBasisBar.push_back(tripleJson(t));
  j["membrane_strain_basis_bar"] = std::move(strainBasisBar);
  json curvBasis = json::array();
  for (const auto& t : r.modes.flexureCurvatureBasis) curvBasis.push_back(tripleJson(t));
  j["flexure_curvature_basis"] = std::move(curvBasis);
  j["local_mechanism_count"] = r.modes.localMechanismCount;

  json rec;
  rec["vacuous"] = r.reciprocity.vacuous;
  rec["verdict"] = r.reciprocity.verdict;
  rec["verdict_tol"] = r.reciprocity.verdictTol;
  rec["max_raw_residual"] = r.reciprocity.maxRawResidual;
  rec["max_normalized_residual"] = r.reciprocity.maxNormalizedResidual;
  json pairs = json::array();
  for (const PairRecord& p : r.reciprocity.pairs) {
    json pj;
    pj["membrane_mode"] = p.membraneModeId;
    pj["flexure_mode"] = p.flexureModeId;
    pj["raw"] = p.raw;
    pj["raw_residual"] = p.rawResidual;
    pj["normalized"] = p.normalized;
    pj["normalized_residual"] = p.normalizedResidual;
    pairs.push_back(std::move(pj));
  }
  rec["pairs"] = std::move(pairs);
  json poissonArr = json::array();
  for (const PoissonRecord& p : r.reciprocity.poisson) {
    json pj;
    pj["membrane_mode"] = p.membraneModeId;
    pj["flexure_mode"] = p.flexureModeId;
    pj["angle"] = p.angle;
    pj["nu_in"] = p.nuIn;
    pj["nu_out"] = p.nuOut;
    pj["identity_residual"] = p.identityResidual;
    poissonArr.push_back(std::move(pj));
  }
  rec["poisson"] = std::move(poissonArr);
  j["reciprocity"] = std::move(rec);

  json checks = json::array();
  for (const CheckRecord& c : r.checks) {
    json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  j["ok"] = r.ok;
  return j.dump(2) + "\n";
}

ModeVectorSet modeVectorsOf(const AnalysisResult& r) {
  ModeVectorSet set;
  set.layout = r.layout;
  set.L1 = r.mesh.L1;
  set.L2 = r.mesh.L2;
  set.meshHash = r.mesh.contentHash();
  for (const IsometricMode& m : r.modes.modes) {
    set.vectors.push_back(m.physical);
    set.classes.push_back(toString(m.klass));
  }
  return set;
}

std::string modeVectorsJson(const AnalysisResult& r) {
  const ModeVectorSet set = modeVectorsOf(r);
  json j;
  j["schema"] = "perishell-modes/1";
  j["vertex_count"] = set.layout.vertexCount;
  j["L1"] = set.L1;
  j["L2"] = set.L2;
  j["mesh_hash"] = hashString(set.meshHash);
  j["classes"] = set.classes;
  json vecs = json::array();
  for (const Eigen::VectorXd& v : set.vectors) {
    json arr = json::array();
    for (long i = 0; i < v.size(); ++i) arr.push_back(v(i));
    vecs.push_back(std::move(arr));
  }
  j["vectors"] = std::move(vecs);
  return j.dump() + "\n";
}

ModeVectorSet modeVectorsFromJsonText(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Parse, "mode-set file is not valid JSON");
  if (j.value("schema", "") != "perishell-modes/1")
    fail(ErrorKind::Parse, "mode-set file has unknown schema");
  ModeVectorSet set;
  set.layout.vertexCount = j.at("vertex_count").get<int>();
  set.L1 = j.at("L1").get<double>();
  set.L2 = j.at("L2").get<double>();
  set.meshHash = std::stoull(j.at("mesh_hash").get<std::string>(), nullptr, 16);
  if (j.contains("classes"))
    set.classes = j["classes"].get<std::vector<std::string>>();
  for (const auto& arr : j.at("vectors")) {
    Eigen::VectorXd v(set.layout.size());
    if (static_cast<int>(arr.size()) != set.layout.size())
      fail(ErrorKind::Parse, "mode vector length does not match layout");
    for (long i = 0; i < v.size(); ++i) v(i) = arr[static_cast<size_t>(i)].get<double>();
    set.vectors.push_back(std::move(v));
  }
  return set;
}

std::string deformToObj(const PeriodicMesh& mesh, const AnsatzLayout& layout,
                        const Eigen::VectorXd& physical, double amplitude,
                        int tile1, int tile2) {
  if (tile1 < 1 || tile2 < 1)
    fail(ErrorKind::InvalidArgument, "tiling counts must be >= 1");
  if (physical.size() != layout.size())
    fail(ErrorKind::InvalidArgument, "ansatz vector has wrong size");
  const int N = mesh.vertexCount();
  std::string out;
  out.reserve(static_cast<size_t>(N) * (tile1 + 1) * (tile2 + 1) * 48);
  char line[160];
  // Vertex copies (a, b) in [0..tile1] x [0..tile2]; boundary triangles
  // reference the padded row/column (corner shifts are in {0, 1}).
  for (int b = 0; b <= tile2; ++b)
    for (int a = 0; a <= tile1; ++a)
      for (int v = 0; v < N; ++v) {
        const double ox = a * mesh.L1, oy = b * mesh.L2;
        const Eigen::Vector3d base =
            mesh.vertices[static_cast<size_t>(v)] + Eigen::Vector3d(ox, oy, 0.0);
        const Eigen::Vector3d pos =
            base + amplitude * ansatzDisplacement(mesh, layout, physical, v, ox, oy);
        std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", pos.x(), pos.y(),
                      pos.z());
        out += line;
      }
  auto vertexIndex = [&](int v, int a, int b) {
    return 1 + (b * (tile1 + 1) + a) * N + v;
  };
  for (int b = 0; b < tile2; ++b)
    for (int a = 0; a < tile1; ++a)
      for (const Triangle& t : mesh.triangles) {
        int idx[3];
        for (int k = 0; k < 3; ++k) {
          const Corner& c = t.corners[static_cast<size_t>(k)];
          idx[k] = vertexIndex(c.vertex, a + c.shift[0], b + c.shift[1]);
        }
        std::snprintf(line, sizeof line, "f %d %d %d\n", idx[0], idx[1], idx[2]);
        out += line;
      }
  return out;
}

namespace {

PdeCheckReport pdeCheckFields(const PeriodicField& f, const PeriodicField& w,
                              const CurvatureTriple& chi, const std::string& source) {
  PdeCheckReport rep;
  rep.wSource = source;
  rep.n1 = f.n1();
  rep.n2 = f.n2();
  rep.chi = chi;
  rep.rms = linearizedGaussResidual(f, w, chi).rmsNorm;
  return rep;
}

CurvatureTriple namedQuadratic(const std::string& wName) {
  if (wName == "xy") return {0.0, 0.0, 1.0};
  if (wName == "x2") return {1.0, 0.0, 0.0};
  if (wName == "y2") return {0.0, 1.0, 0.0};
  fail(ErrorKind::InvalidArgument,
       "analytic deflection must be one of xy|x2|y2, got '" + wName + "'");
}

}  // namespace

PdeCheckReport pdeCheckAnalytic(const SurfaceSpec& spec, const std::string& wName,
                                int n) {
  if (spec.isMesh())
    fail(ErrorKind::InvalidArgument,
         "analytic residual check needs a grid-sampled surface, not an explicit mesh");
  const CurvatureTriple chi = namedQuadratic(wName);
  const PeriodicField f = sampleField(spec, n, n);
  PeriodicField w;
  w.L1 = f.L1;
  w.L2 = f.L2;
  w.values = Eigen::MatrixXd::Zero(f.n1(), f.n2());
  PdeCheckReport rep = pdeCheckFields(f, w, chi, wName);

  const PeriodicField f2 = sampleField(spec, 2 * n, 2 * n);
  PeriodicField w2;
  w2.L1 = f2.L1;
  w2.L2 = f2.L2;
  w2.values = Eigen::MatrixXd::Zero(f2.n1(), f2.n2());
  rep.rmsRefined = linearizedGaussResidual(f2, w2, chi).rmsNorm;
  if (rep.rms > 1e-14 && *rep.rmsRefined > 1e-14)
    rep.order = std::log2(rep.rms / *rep.rmsRefined);
  return rep;
}

PdeCheckReport pdeCheckMode(const PeriodicMesh& mesh, const AnsatzLayout& layout,
                            const Eigen::VectorXd& physical, int modeId) {
  if (mesh.meta.grid_n1 < 3 || mesh.meta.grid_n2 < 3)
    fail(ErrorKind::InvalidArgument,
         "residual check on a mode needs a grid-sampled mesh");
  if (physical.size() != layout.size())
    fail(ErrorKind::InvalidArgument, "ansatz vector has wrong size");
  const int n1 = mesh.meta.grid_n1, n2 = mesh.meta.grid_n2;
  PeriodicField f, w;
  f.L1 = w.L1 = mesh.L1;
  f.L2 = w.L2 = mesh.L2;
  f.values.resize(n1, n2);
  w.values.resize(n1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const int v = j * n1 + i;
      f.values(i, j) = mesh.vertices[static_cast<size_t>(v)].z();
      w.values(i, j) = physical(layout.phi(v, 2));
    }
  const CurvatureTriple chi = {physical(layout.chi(0)), physical(layout.chi(1)),
                               physical(layout.chi(2))};
  return pdeCheckFields(f, w, chi, "mode:" + std::to_string(modeId));
}

std::string pdeCheckJson(const PdeCheckReport& rep) {
  json j;
  j["schema"] = "perishell-pde-check/1";
  j["w"] = rep.wSource;
  j["grid"] = json::array({rep.n1, rep.n2});
  j["chi"] = json::array({rep.chi[0], rep.chi[1], rep.chi[2]});
  j["rms"] = rep.rms;
  if (rep.rmsRefined) {
    j["rms_refined"] = *rep.rmsRefined;
    j["refined_grid"] = json::array({2 * rep.n1, 2 * rep.n2});
  }
  if (rep.order) j["order"] = *rep.order;
  return j.dump(2) + "\n";
}

}  // namespace psh
