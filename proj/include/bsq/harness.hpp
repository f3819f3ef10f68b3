#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsq/config.hpp"
#include "bsq/diagnostics.hpp"
#include "bsq/picard.hpp"

namespace bsq {

/// Default output root: $BSQ_OUTPUT_ROOT, else ./bsq-output.
std::filesystem::path output_root();
/// --out if given, else the config's output.dir, else <root>/<scenario>-<hash>.
std::filesystem::path resolve_output_dir(const SimConfig& config, const std::optional<std::filesystem::path>& out);

/// eigenvalues.csv (index, lambda, descriptor) and basis.json.
nlohmann::json write_basis_report(const SimConfig& config, const std::filesystem::path& dir);

struct RunSummary {
  bool solver_ok = false;
  std::string error;
  double final_time = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<PicardReport> reports;
  std::vector<AsymptoticVerdict> verdicts;
  double energy_residual_max = 0.0;  // normalized per unit time
  bool audit_breach = false;
};

/// Solves the configured problem, streaming diagnostics.csv and picard.csv and
/// writing config.json, verdicts.json and checkpoints/window-NNNN.bin into dir.
/// With `restart`, the run continues from that checkpoint (whose config hash
/// must match). Solver failures are reported in the summary with all outputs
/// up to the failing window kept.
RunSummary run_simulation(const SimConfig& config, const std::filesystem::path& dir,
                          const std::optional<std::filesystem::path>& restart = {});

/// T0 sweep on the first window plus the auto-selected window; writes contraction.csv and picard.json.
nlohmann::json picard_study(const SimConfig& config, const std::vector<double>& windows,
                            const std::filesystem::path& dir);

/// Verdicts, decay-lemma checks and inequality audit of a run directory's diagnostics; writes asymptotics.json.
nlohmann::json asymptotics_report(const std::filesystem::path& dir, const AsymptoticThresholds& thresholds);

/// Grid sweep. The spec holds "template" (a config), "kind" (run | picard | rotation)
/// and "grid": an object mapping dotted config paths to value lists. Points are
/// the Cartesian product; failures are recorded per point. Writes sweep.json.
nlohmann::json run_sweep(const nlohmann::json& spec, const std::filesystem::path& dir, int threads);

/// Sets a dotted path ("picard.window_max") inside a JSON object.
void set_json_path(nlohmann::json& j, const std::string& path, const nlohmann::json& value);

/// Consistency checks of a run directory: hashes, CSV schema, checkpoints. Writes nothing.
nlohmann::json verify_run(const std::filesystem::path& dir);

/// One SVG per diagnostics column (log scale for positive norms). Missing or
/// non-plottable columns are skipped with a warning; an empty CSV is an error
/// and leaves no files behind. Returns the written paths.
std::vector<std::filesystem::path> plot_run(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

/// Slope of ln(y^2) against t over the second half of the positive samples.
double log_square_slope(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace bsq
