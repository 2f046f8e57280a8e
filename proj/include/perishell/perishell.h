/* perishell C API: isometric deflection modes of triangulated periodic
 * surfaces behind an opaque-handle, error-code interface.
 *
 * All functions returning psh_status set a thread-local message
 * retrievable with psh_last_error() on failure. Strings returned through
 * char** out-parameters are heap-allocated; release them with
 * psh_string_free().
 */
#ifndef PERISHELL_H
#define PERISHELL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psh_status {
  PSH_OK = 0,
  PSH_ERROR_INVALID_ARGUMENT = 1,
  PSH_ERROR_PARSE = 2,
  PSH_ERROR_INVARIANT = 3,
  PSH_ERROR_NOT_FOUND = 4,
  PSH_ERROR_NUMERIC = 5
} psh_status;

const char* psh_version(void);

/* Message describing the most recent failure on this thread. */
const char* psh_last_error(void);

void psh_string_free(char* s);

/* JSON listing of the builtin surface presets and their parameters. */
psh_status psh_catalog_json(char** out_json);

/* ---- surfaces -------------------------------------------------------- */

typedef struct psh_surface psh_surface;

/* params_json: optional JSON object of numeric parameters, may be NULL. */
psh_status psh_surface_create_builtin(const char* name, const char* params_json,
                                      psh_surface** out);

/* Parses the surface-config JSON schema (builtin|heightgrid|mesh). */
psh_status psh_surface_create_from_json(const char* config_json, psh_surface** out);

psh_status psh_surface_evaluate(const psh_surface* s, double x, double y,
                                double* out_z);

psh_status psh_surface_to_json(const psh_surface* s, char** out_json);

void psh_surface_free(psh_surface* s);

/* ---- meshes ---------------------------------------------------------- */

typedef struct psh_mesh psh_mesh;

/* diagonal: "uniform" or "alternating"; NULL means uniform. */
psh_status psh_mesh_create(const psh_surface* s, int n1, int n2,
                           const char* diagonal, psh_mesh** out);

/* Mesh-variant surface config JSON (re-ingestable). */
psh_status psh_mesh_to_json(const psh_mesh* m, char** out_json);

/* Sparse triplet dump ("row col value" per line) of the assembled
 * first-order isometry constraint matrix. */
psh_status psh_mesh_constraint_triplets(const psh_mesh* m, char** out_text);

void psh_mesh_free(psh_mesh* m);

/* ---- analysis -------------------------------------------------------- */

typedef struct psh_analysis psh_analysis;

/* backend: "auto", "dense" or "sparse"; NULL means auto. Pass 0 for the
 * tolerances to get the defaults (rank_tol 1e-10, tol_macro 1e-8). */
psh_status psh_analysis_run(const psh_mesh* m, double rank_tol, double tol_macro,
                            const char* backend, psh_analysis** out);

/* Reconstructs a deformation-capable handle from previously written
 * mesh.json and modes.json contents (no kernel recomputation). */
psh_status psh_analysis_restore(const char* mesh_json, const char* modes_json,
                                psh_analysis** out);

/* Full machine-readable report. Fails on restored handles. */
psh_status psh_analysis_report_json(const psh_analysis* a, char** out_json);

/* Classified mode vectors (input for psh_analysis_restore). */
psh_status psh_analysis_modes_json(const psh_analysis* a, char** out_json);

int psh_analysis_mode_count(const psh_analysis* a);

/* 0 when the analysis completed with every invariant check passing. */
int psh_analysis_checks_failed(const psh_analysis* a);

/* Deformed tile1 x tile2 tiling under mode `mode_id` at the given
 * amplitude, as Wavefront OBJ text. */
psh_status psh_analysis_deform_obj(const psh_analysis* a, int mode_id,
                                   double amplitude, int tile1, int tile2,
                                   char** out_obj);

/* Linearized Gauss-invariance residual of one computed mode's vertical
 * deflection (grid-sampled meshes only). */
psh_status psh_analysis_pde_check_json(const psh_analysis* a, int mode_id,
                                       char** out_json);

void psh_analysis_free(psh_analysis* a);

/* ---- standalone residual check -------------------------------------- */

/* w_name: "xy", "x2" or "y2"; n: grid resolution per period. */
psh_status psh_pde_check_json(const char* surface_config_json, const char* w_name,
                              int n, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* PERISHELL_H */
