#include "perishell/perishell.h"

#include "perishell/analysis.hpp"
#include "perishell/error.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

namespace {

thread_local std::string g_lastError;

psh_status statusOf(psh::ErrorKind kind) {
  switch (kind) {
    case psh::ErrorKind::InvalidArgument: return PSH_ERROR_INVALID_ARGUMENT;
    case psh::ErrorKind::Parse: return PSH_ERROR_PARSE;
    case psh::ErrorKind::Invariant: return PSH_ERROR_INVARIANT;
    case psh::ErrorKind::NotFound: return PSH_ERROR_NOT_FOUND;
    case psh::ErrorKind::Numeric: return PSH_ERROR_NUMERIC;
  }
  return PSH_ERROR_INVALID_ARGUMENT;
}

template <typename Fn>
psh_status guarded(Fn&& fn) {
  try {
    fn();
    return PSH_OK;
  } catch (const psh::Error& e) {
    g_lastError = e.what();
    return statusOf(e.kind());
  } catch (const std::exception& e) {
    g_lastError = e.what();
    return PSH_ERROR_NUMERIC;
  }
}

char* copyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

psh_status requireArgs(bool ok) {
  if (!ok) {
    g_lastError = "null argument";
    return PSH_ERROR_INVALID_ARGUMENT;
  }
  return PSH_OK;
}

}  // namespace

struct psh_surface {
  psh::SurfaceSpec spec;
};

struct psh_mesh {
  psh::PeriodicMesh mesh;
};

struct psh_analysis {
  // Either a full analysis or a restored (deform-only) mode set.
  std::optional<psh::AnalysisResult> full;
  psh::PeriodicMesh mesh;
  psh::ModeVectorSet modes;
};

extern "C" {

const char* psh_version(void) { return "0.1.0"; }

const char* psh_last_error(void) { return g_lastError.c_str(); }

void psh_string_free(char* s) { std::free(s); }

psh_status psh_catalog_json(char** out_json) {
  if (requireArgs(out_json)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const psh::CatalogEntry& e : psh::catalog()) {
      nlohmann::ordered_json j;
      j["name"] = e.name;
      j["description"] = e.description;
      j["config"] =
          nlohmann::ordered_json::parse(psh::surfaceToJsonText(e.spec));
      arr.push_back(std::move(j));
    }
    *out_json = copyString(arr.dump(2) + "\n");
  });
}

psh_status psh_surface_create_builtin(const char* name, const char* params_json,
                                      psh_surface** out) {
  if (requireArgs(name && out)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    std::map<std::string, double> params;
    if (params_json && *params_json) {
      auto j = nlohmann::json::parse(params_json, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        psh::fail(psh::ErrorKind::Parse, "params must be a JSON object");
      for (const auto& [key, value] : j.items()) {
        if (!value.is_number())
          psh::fail(psh::ErrorKind::Parse, "parameter '" + key + "' must be a number");
        params[key] = value.get<double>();
      }
    }
    *out = new psh_surface{psh::builtinSpec(name, params)};
  });
}

psh_status psh_surface_create_from_json(const char* config_json, psh_surface** out) {
  if (requireArgs(config_json && out)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out = new psh_surface{psh::surfaceFromJsonText(config_json)}; });
}

psh_status psh_surface_evaluate(const psh_surface* s, double x, double y,
                                double* out_z) {
  if (requireArgs(s && out_z)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out_z = psh::evaluate(s->spec, x, y); });
}

psh_status psh_surface_to_json(const psh_surface* s, char** out_json) {
  if (requireArgs(s && out_json)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out_json = copyString(psh::surfaceToJsonText(s->spec)); });
}

void psh_surface_free(psh_surface* s) { delete s; }

psh_status psh_mesh_create(const psh_surface* s, int n1, int n2,
                           const char* diagonal, psh_mesh** out) {
  if (requireArgs(s && out)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    const psh::DiagonalRule rule =
        diagonal ? psh::diagonalRuleFromString(diagonal) : psh::DiagonalRule::Uniform;
    *out = new psh_mesh{psh::sample(s->spec, n1, n2, rule)};
  });
}

psh_status psh_mesh_to_json(const psh_mesh* m, char** out_json) {
  if (requireArgs(m && out_json)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out_json = copyString(psh::meshToJsonText(m->mesh)); });
}

psh_status psh_mesh_constraint_triplets(const psh_mesh* m, char** out_text) {
  if (requireArgs(m && out_text)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] { *out_text = copyString(psh::assemble(m->mesh).tripletDump()); });
}

void psh_mesh_free(psh_mesh* m) { delete m; }

psh_status psh_analysis_run(const psh_mesh* m, double rank_tol, double tol_macro,
                            const char* backend, psh_analysis** out) {
  if (requireArgs(m && out)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    psh::AnalysisOptions opt;
    if (rank_tol != 0.0) opt.rankTol = rank_tol;
    if (tol_macro != 0.0) opt.tolMacro = tol_macro;
    if (backend) opt.backend = psh::kernelBackendFromString(backend);
    auto result = psh::analyzeMesh(m->mesh, opt);
    auto* handle = new psh_analysis;
    handle->mesh = result.mesh;
    handle->modes = psh::modeVectorsOf(result);
    handle->full = std::move(result);
    *out = handle;
  });
}

psh_status psh_analysis_restore(const char* mesh_json, const char* modes_json,
                                psh_analysis** out) {
  if (requireArgs(mesh_json && modes_json && out)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    psh::PeriodicMesh mesh = psh::meshFromJsonText(mesh_json);
    psh::ModeVectorSet set = psh::modeVectorsFromJsonText(modes_json);
    if (set.meshHash != mesh.contentHash())
      psh::fail(psh::ErrorKind::Invariant,
                "mode-set file does not match this mesh (content hash differs)");
    if (set.layout.vertexCount != mesh.vertexCount())
      psh::fail(psh::ErrorKind::Invariant, "mode-set vertex count differs from mesh");
    auto* handle = new psh_analysis;
    handle->mesh = std::move(mesh);
    handle->modes = std::move(set);
    *out = handle;
  });
}

psh_status psh_analysis_report_json(const psh_analysis* a, char** out_json) {
  if (requireArgs(a && out_json)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    if (!a->full)
      psh::fail(psh::ErrorKind::InvalidArgument,
                "restored analysis has no report; rerun the analysis");
    *out_json = copyString(psh::analysisReportJson(*a->full));
  });
}

psh_status psh_analysis_modes_json(const psh_analysis* a, char** out_json) {
  if (requireArgs(a && out_json)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    if (!a->full)
      psh::fail(psh::ErrorKind::InvalidArgument,
                "restored analysis cannot re-serialize modes");
    *out_json = copyString(psh::modeVectorsJson(*a->full));
  });
}

int psh_analysis_mode_count(const psh_analysis* a) {
  return a ? static_cast<int>(a->modes.vectors.size()) : 0;
}

int psh_analysis_checks_failed(const psh_analysis* a) {
  if (!a || !a->full) return 0;
  return a->full->ok ? 0 : 1;
}

psh_status psh_analysis_deform_obj(const psh_analysis* a, int mode_id,
                                   double amplitude, int tile1, int tile2,
                                   char** out_obj) {
  if (requireArgs(a && out_obj)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    if (mode_id < 0 || mode_id >= static_cast<int>(a->modes.vectors.size()))
      psh::fail(psh::ErrorKind::NotFound,
                "unknown mode id " + std::to_string(mode_id));
    *out_obj = copyString(psh::deformToObj(a->mesh, a->modes.layout,
                                           a->modes.vectors[static_cast<size_t>(mode_id)],
                                           amplitude, tile1, tile2));
  });
}

psh_status psh_analysis_pde_check_json(const psh_analysis* a, int mode_id,
                                       char** out_json) {
  if (requireArgs(a && out_json)) return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    if (mode_id < 0 || mode_id >= static_cast<int>(a->modes.vectors.size()))
      psh::fail(psh::ErrorKind::NotFound,
                "unknown mode id " + std::to_string(mode_id));
    const psh::PdeCheckReport rep = psh::pdeCheckMode(
        a->mesh, a->modes.layout, a->modes.vectors[static_cast<size_t>(mode_id)],
        mode_id);
    *out_json = copyString(psh::pdeCheckJson(rep));
  });
}

void psh_analysis_free(psh_analysis* a) { delete a; }

psh_status psh_pde_check_json(const char* surface_config_json, const char* w_name,
                              int n, char** out_json) {
  if (requireArgs(surface_config_json && w_name && out_json))
    return PSH_ERROR_INVALID_ARGUMENT;
  return guarded([&] {
    const psh::SurfaceSpec spec = psh::surfaceFromJsonText(surface_config_json);
    *out_json = copyString(psh::pdeCheckJson(psh::pdeCheckAnalytic(spec, w_name, n)));
  });
}

}  // extern "C"
