// Command-line front end: catalog / analyze / deform / pde-check.
// Links the perishell C API only; report post-processing (CSV table,
// config files) happens here on the JSON the library returns.

#include <perishell/perishell.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 2;
constexpr int kExitInput = 3;

struct CliFailure {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
  throw CliFailure{code, message};
}

int exitCodeFor(psh_status s) {
  switch (s) {
    case PSH_ERROR_INVARIANT:
    case PSH_ERROR_NUMERIC:
      return kExitInvariant;
    default:
      return kExitInput;
  }
}

void check(psh_status s) {
  if (s != PSH_OK) die(exitCodeFor(s), psh_last_error());
}

std::string takeString(char* s) {
  std::string out = s ? s : "";
  psh_string_free(s);
  return out;
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kExitInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die(kExitInput, "cannot write " + path.string());
  out << content;
  if (!out) die(kExitInput, "short write to " + path.string());
}

using SurfaceHandle = std::unique_ptr<psh_surface, decltype(&psh_surface_free)>;
using MeshHandle = std::unique_ptr<psh_mesh, decltype(&psh_mesh_free)>;
using AnalysisHandle = std::unique_ptr<psh_analysis, decltype(&psh_analysis_free)>;

// A surface argument is either a catalog name or a path to a config file;
// config files may also embed the surface as a JSON object.
SurfaceHandle loadSurface(const std::string& arg, const json* embedded) {
  psh_surface* raw = nullptr;
  if (embedded && embedded->is_object()) {
    check(psh_surface_create_from_json(embedded->dump().c_str(), &raw));
  } else if (fs::exists(arg) && fs::is_regular_file(arg)) {
    check(psh_surface_create_from_json(readFile(arg).c_str(), &raw));
  } else {
    check(psh_surface_create_builtin(arg.c_str(), nullptr, &raw));
  }
  return {raw, &psh_surface_free};
}

std::string defaultOutDir() {
  const char* env = std::getenv("PERISHELL_OUT");
  return env && *env ? env : "";
}

std::string pairingCsv(const json& report) {
  std::ostringstream os;
  os << "membrane_mode,flexure_mode,raw,raw_residual,normalized,normalized_residual\n";
  char buf[64];
  for (const auto& p : report.at("reciprocity").at("pairs")) {
    os << p.at("membrane_mode").get<int>() << "," << p.at("flexure_mode").get<int>();
    for (const char* key : {"raw", "raw_residual", "normalized", "normalized_residual"}) {
      std::snprintf(buf, sizeof buf, "%.17g", p.at(key).get<double>());
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

int runAnalyze(const std::string& surfaceArg, int n1, int n2,
               const std::string& diagonal, double rankTol, double tolMacro,
               const std::string& backend, const std::string& outDir, bool csv,
               bool dumpConstraints, const json* embeddedSurface) {
  if (outDir.empty())
    die(kExitInput, "no output directory (use --out or set PERISHELL_OUT)");
  SurfaceHandle surface = loadSurface(surfaceArg, embeddedSurface);

  psh_mesh* meshRaw = nullptr;
  check(psh_mesh_create(surface.get(), n1, n2, diagonal.c_str(), &meshRaw));
  MeshHandle mesh(meshRaw, &psh_mesh_free);

  psh_analysis* analysisRaw = nullptr;
  check(psh_analysis_run(mesh.get(), rankTol, tolMacro, backend.c_str(), &analysisRaw));
  AnalysisHandle analysis(analysisRaw, &psh_analysis_free);

  char* s = nullptr;
  check(psh_analysis_report_json(analysis.get(), &s));
  const std::string reportText = takeString(s);
  check(psh_mesh_to_json(mesh.get(), &s));
  const std::string meshText = takeString(s);
  check(psh_analysis_modes_json(analysis.get(), &s));
  const std::string modesText = takeString(s);

  fs::create_directories(outDir);
  writeFile(fs::path(outDir) / "report.json", reportText);
  writeFile(fs::path(outDir) / "mesh.json", meshText);
  writeFile(fs::path(outDir) / "modes.json", modesText);

  json meta;
  meta["schema"] = "perishell-run-meta/1";
  meta["command"] = "analyze";
  meta["surface_arg"] = surfaceArg;
  meta["n1"] = n1;
  meta["n2"] = n2;
  meta["diagonal"] = diagonal;
  meta["rank_tol"] = rankTol;
  meta["tol_macro"] = tolMacro;
  meta["kernel_backend"] = backend;
  writeFile(fs::path(outDir) / "run_meta.json", meta.dump(2) + "\n");

  const json report = json::parse(reportText);
  if (csv) writeFile(fs::path(outDir) / "pairings.csv", pairingCsv(report));
  if (dumpConstraints) {
    check(psh_mesh_constraint_triplets(mesh.get(), &s));
    writeFile(fs::path(outDir) / "constraints.txt", takeString(s));
  }

  int flexure = 0, membrane = 0;
  for (const auto& m : report.at("modes")) {
    const std::string klass = m.at("class").get<std::string>();
    flexure += klass == "flexure";
    membrane += klass == "membrane";
  }
  std::cout << "surface " << report.at("surface").at("source").get<std::string>()
            << ": kernel dimension " << report.at("kernel").at("dimension").get<int>()
            << " (" << flexure << " flexure, " << membrane << " membrane, "
            << report.at("local_mechanism_count").get<int>() << " local)\n"
            << "reciprocity verdict: "
            << report.at("reciprocity").at("verdict").get<std::string>() << "\n"
            << "report written to " << (fs::path(outDir) / "report.json").string()
            << "\n";

  if (psh_analysis_checks_failed(analysis.get())) {
    std::cerr << "one or more invariant checks failed (see report)\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int runDeform(const std::string& analysisDir, int modeId, double amplitude,
              const std::string& tile, int frames, const std::string& outDir) {
  if (outDir.empty())
    die(kExitInput, "no output directory (use --out or set PERISHELL_OUT)");
  int t1 = 0, t2 = 0;
  if (std::sscanf(tile.c_str(), "%dx%d", &t1, &t2) != 2 || t1 < 1 || t2 < 1)
    die(kExitInput, "--tile expects <m1>x<m2> with positive counts");
  if (frames < 1) die(kExitInput, "--frames must be >= 1");

  const std::string meshText = readFile(fs::path(analysisDir) / "mesh.json");
  const std::string modesText = readFile(fs::path(analysisDir) / "modes.json");
  psh_analysis* raw = nullptr;
  check(psh_analysis_restore(meshText.c_str(), modesText.c_str(), &raw));
  AnalysisHandle analysis(raw, &psh_analysis_free);

  fs::create_directories(outDir);
  for (int i = 0; i < frames; ++i) {
    const double t =
        frames == 1 ? amplitude
                    : -amplitude + 2.0 * amplitude * static_cast<double>(i) /
                                       static_cast<double>(frames - 1);
    char* obj = nullptr;
    check(psh_analysis_deform_obj(analysis.get(), modeId, t, t1, t2, &obj));
    char name[96];
    std::snprintf(name, sizeof name, "mode%d_frame%03d_t%+.6f.obj", modeId, i, t);
    writeFile(fs::path(outDir) / name, takeString(obj));
  }
  std::cout << "wrote " << frames << " frame(s) for mode " << modeId << " to "
            << outDir << "\n";
  return kExitOk;
}

int runPdeCheck(const std::string& surfaceArg, const std::string& w, int n,
                const std::string& analysisDir, const std::string& outFile) {
  std::string resultText;
  char* s = nullptr;
  bool isModeId = !w.empty() && w.find_first_not_of("0123456789") == std::string::npos;
  if (isModeId) {
    if (analysisDir.empty())
      die(kExitInput, "checking a computed mode needs --analysis <dir>");
    const std::string meshText = readFile(fs::path(analysisDir) / "mesh.json");
    const std::string modesText = readFile(fs::path(analysisDir) / "modes.json");
    psh_analysis* raw = nullptr;
    check(psh_analysis_restore(meshText.c_str(), modesText.c_str(), &raw));
    AnalysisHandle analysis(raw, &psh_analysis_free);
    check(psh_analysis_pde_check_json(analysis.get(), std::stoi(w), &s));
    resultText = takeString(s);
  } else {
    if (surfaceArg.empty()) die(kExitInput, "pde-check needs --surface");
    SurfaceHandle surface = loadSurface(surfaceArg, nullptr);
    char* cfg = nullptr;
    check(psh_surface_to_json(surface.get(), &cfg));
    const std::string cfgText = takeString(cfg);
    check(psh_pde_check_json(cfgText.c_str(), w.c_str(), n, &s));
    resultText = takeString(s);
  }
  std::cout << resultText;
  if (!outFile.empty()) writeFile(outFile, resultText);
  return kExitOk;
}

int runCatalog(bool asJson) {
  char* s = nullptr;
  check(psh_catalog_json(&s));
  const std::string text = takeString(s);
  if (asJson) {
    std::cout << text;
    return kExitOk;
  }
  const json entries = json::parse(text);
  for (const auto& e : entries) {
    std::cout << e.at("name").get<std::string>() << "\n    "
              << e.at("description").get<std::string>() << "\n    params:";
    const auto& cfg = e.at("config");
    if (cfg.contains("params"))
      for (const auto& [key, value] : cfg.at("params").items())
        std::cout << " " << key << "=" << value.dump();
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perishell: isometric deflection modes of periodic surfaces"};
  app.require_subcommand(1);

  auto* cmdCatalog = app.add_subcommand("catalog", "list builtin surface presets");
  bool catalogJson = false;
  cmdCatalog->add_flag("--json", catalogJson, "print the raw JSON listing");

  auto* cmdAnalyze =
      app.add_subcommand("analyze", "compute and classify isometric modes");
  std::string surfaceArg, diagonal = "uniform", backend = "auto";
  std::string outDir = defaultOutDir(), configPath;
  int n1 = 16, n2 = 16;
  double rankTol = 1e-10, tolMacro = 1e-8;
  bool csv = false, dumpConstraints = false;
  auto* optSurface =
      cmdAnalyze->add_option("--surface", surfaceArg, "catalog name or config path");
  auto* optN1 = cmdAnalyze->add_option("--n1", n1, "grid points per period in x");
  auto* optN2 = cmdAnalyze->add_option("--n2", n2, "grid points per period in y");
  auto* optDiag = cmdAnalyze->add_option("--diagonal", diagonal,
                                         "quad split: uniform|alternating");
  auto* optRankTol =
      cmdAnalyze->add_option("--rank-tol", rankTol, "kernel rank tolerance");
  auto* optTolMacro =
      cmdAnalyze->add_option("--tol-macro", tolMacro, "classification tolerance");
  auto* optBackend = cmdAnalyze->add_option("--kernel-backend", backend,
                                            "auto|dense|sparse");
  auto* optOut = cmdAnalyze->add_option("--out", outDir, "output directory");
  cmdAnalyze->add_option("--config", configPath,
                         "JSON config file (flags override its values)");
  auto* optCsv =
      cmdAnalyze->add_flag("--csv", csv, "also write the pairing table as CSV");
  auto* optDump = cmdAnalyze->add_flag("--dump-constraints", dumpConstraints,
                                       "dump the constraint matrix triplets");

  auto* cmdDeform =
      app.add_subcommand("deform", "export deformed tilings of a computed mode");
  std::string analysisDir, tile = "3x3", deformOut = defaultOutDir();
  int modeId = 0, frames = 1;
  double amplitude = 0.1;
  cmdDeform->add_option("--analysis", analysisDir, "analysis output directory")
      ->required();
  cmdDeform->add_option("--mode", modeId, "mode id from the report")->required();
  cmdDeform->add_option("--amplitude", amplitude, "deflection amplitude t");
  cmdDeform->add_option("--tile", tile, "tiling counts <m1>x<m2>");
  cmdDeform->add_option("--frames", frames, "frames sweeping t in [-t, +t]");
  cmdDeform->add_option("--out", deformOut, "output directory");

  auto* cmdPde = app.add_subcommand(
      "pde-check", "linearized Gauss-invariance residual of a deflection");
  std::string pdeSurface, wArg = "xy", pdeAnalysis, pdeOut;
  int pdeN = 64;
  cmdPde->add_option("--surface", pdeSurface, "catalog name or config path");
  cmdPde->add_option("--w", wArg, "xy|x2|y2 or a computed mode id");
  cmdPde->add_option("--n", pdeN, "grid resolution per period");
  cmdPde->add_option("--analysis", pdeAnalysis, "analysis dir (for mode ids)");
  cmdPde->add_option("--out", pdeOut, "also write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmdCatalog->parsed()) return runCatalog(catalogJson);

    if (cmdAnalyze->parsed()) {
      json configSurface;
      if (!configPath.empty()) {
        const json cfg = json::parse(readFile(configPath), nullptr, false);
        if (cfg.is_discarded() || !cfg.is_object())
          die(kExitInput, "config file " + configPath + " is not a JSON object");
        auto fromConfig = [&](const char* key, auto& target, const CLI::Option* opt) {
          if (cfg.contains(key) && opt->count() == 0)
            target = cfg.at(key).get<std::decay_t<decltype(target)>>();
        };
        if (cfg.contains("surface") && optSurface->count() == 0) {
          if (cfg.at("surface").is_string())
            surfaceArg = cfg.at("surface").get<std::string>();
          else
            configSurface = cfg.at("surface");
        }
        fromConfig("n1", n1, optN1);
        fromConfig("n2", n2, optN2);
        fromConfig("diagonal", diagonal, optDiag);
        fromConfig("rank_tol", rankTol, optRankTol);
        fromConfig("tol_macro", tolMacro, optTolMacro);
        fromConfig("kernel_backend", backend, optBackend);
        fromConfig("out", outDir, optOut);
        fromConfig("csv", csv, optCsv);
        fromConfig("dump_constraints", dumpConstraints, optDump);
      }
      if (surfaceArg.empty() && !configSurface.is_object())
        die(kExitInput, "analyze needs --surface (or a config file with one)");
      return runAnalyze(surfaceArg, n1, n2, diagonal, rankTol, tolMacro, backend,
                        outDir, csv, dumpConstraints,
                        configSurface.is_object() ? &configSurface : nullptr);
    }

    if (cmdDeform->parsed())
      return runDeform(analysisDir, modeId, amplitude, tile, frames, deformOut);

    if (cmdPde->parsed())
      return runPdeCheck(pdeSurface, wArg, pdeN, pdeAnalysis, pdeOut);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
