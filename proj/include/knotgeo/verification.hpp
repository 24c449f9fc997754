#pragma once

#include <optional>
#include <string>
#include <vector>

#include "knotgeo/knot_geometry.hpp"

namespace knotgeo {

/// The checks the convergence runner knows how to execute. Pointwise algebra
/// checks (axioms through sympl) are step-independent; the rest differentiate
/// along flows and sweep both grid resolution and FD step.
enum class CheckKind {
  Axioms,
  J2,
  Compat,
  Sympl,
  LemmaNormal,
  TorsionPerp,
  TorsionLc,
  MetricLc,
  NablaJPerp,
  NablaJLc,
  Nijenhuis,
  Domega,
};

/// How a check's verdict is decided at the finest sweep cell.
///  - RawBelow: the measured defect itself must sit under `tolerance`.
///  - ModelAgreement: the defect must agree with the independently derived
///    pointwise model, within max(tolerance, relative_band * raw magnitude).
///    The raw magnitude is reported alongside so a nonvanishing residue is
///    visible even when the check passes.
enum class VerdictRule { RawBelow, ModelAgreement };

/// Definition of one check: JSON name, verdict rule, and tolerances. Stored
/// here (not in the runner) so tests and the acceptance suite share one
/// source of truth.
struct CheckDefinition {
  CheckKind kind;
  const char* name;
  VerdictRule rule;
  double tolerance;      // absolute tolerance on the verdict metric
  double relative_band;  // ModelAgreement: allowed deviation relative to raw
  double min_rate;       // required fitted rate when >0 and a fit exists
  bool uses_step;        // whether the FD step h enters the check
  bool sweeps;           // whether refinement is expected to shrink the defect
};

const std::vector<CheckDefinition>& check_catalog();
const CheckDefinition& check_definition(CheckKind kind);
std::optional<CheckKind> parse_check_name(const std::string& name);

/// Immersion preset selector for experiments.
struct PresetSpec {
  std::string shape;  // "circle" | "warped_circle" | "trefoil" | "flat_torus" | "point"
  double radius = 1.0;
  double wobble = 0.3;  // out-of-plane amplitude for warped_circle
  double r1 = 1.0, r2 = 1.0;
};

/// A full experiment: one ambient/immersion pairing, a refinement sweep, and
/// a set of checks. grid_sizes must increase strictly, steps must decrease
/// strictly, and when both lists are longer than one they are paired cell by
/// cell (joint refinement), so their lengths must match.
struct ExperimentSpec {
  VcpKind kind = VcpKind::G2;
  int m = 7;
  double twist_rate = 0.0;
  bool expect_fail = false;  // control experiment: listed checks must fail
  PresetSpec preset;
  std::vector<int> grid_sizes;   // strictly increasing
  std::vector<double> steps;     // strictly decreasing
  int trials = 1;                // independent seeded field draws per cell
  unsigned seed = 0;
  int band_limit = 4;            // field modes capped at min(band_limit, N/4)
  bool richardson = true;
  std::vector<CheckKind> checks;
};

/// Parses and validates a JSON experiment config; throws Error naming the
/// offending field.
ExperimentSpec parse_experiment(const std::string& json_text);
ExperimentSpec load_experiment(const std::string& path);

/// One executed sweep cell for one trial.
struct CellResult {
  int grid_size = 0;
  double step = 0.0;
  int trial = 0;
  double max_defect = 0.0;       // sup pointwise norm (or |scalar|)
  double mean_defect = 0.0;      // mean pointwise norm (or |scalar|)
  double model_deviation = 0.0;  // distance to the pointwise model, when one exists
  double wall_seconds = 0.0;     // excluded from determinism guarantees
  std::string error;             // nonempty when the cell aborted
};

enum class Verdict { Pass, Fail, FailAsExpected, PassUnexpected };

const char* verdict_name(Verdict v);

/// Aggregated outcome of one check across the sweep.
struct CheckReport {
  CheckKind kind = CheckKind::J2;
  std::vector<CellResult> cells;  // sorted by (grid, step, trial)
  double raw_at_finest = 0.0;     // max over trials at the finest cell
  double metric_at_finest = 0.0;  // verdict metric at the finest cell
  double fitted_rate = 0.0;       // log-log slope; meaningful iff rate_note empty
  std::string rate_note;          // "", "floor", or "insufficient cells for rate fit"
  bool monotone = true;           // verdict metric non-increasing over pre-floor cells
  bool vanishing_confirmed = false;  // raw defect at finest cell under the absolute tolerance
  Verdict verdict = Verdict::Fail;
};

struct VerificationReport {
  int schema_version = 1;
  ExperimentSpec spec;
  std::vector<CheckReport> checks;  // same order as spec.checks
  bool passed = false;              // Pass everywhere, FailAsExpected for controls
};

/// Executes every requested check over every sweep cell and trial. Cell
/// failures are recorded in-place and do not abort the sweep. Deterministic
/// for a fixed spec (wall times aside). Honors KNOTGEO_THREADS for cell-level
/// parallelism; results are reduced in cell order regardless of completion.
VerificationReport run_experiment(const ExperimentSpec& spec);

/// Least-squares slope of log(defect) against log(x) over the given points.
/// Points whose defect is at or below `floor` are excluded; when fewer than
/// two points survive, returns no value. Requires xs positive.
std::optional<double> fit_rate(const std::vector<std::pair<double, double>>& points,
                               double floor);

/// Rounding floor for a measured defect: 1e2 * machine epsilon * scale. For
/// step-based differences the scale must include the 1/h amplification.
double rounding_floor(double problem_scale);

/// Serialization. JSON includes wall times only when with_timing is set, so
/// determinism tests can compare byte-identical reports. The CSV has one row
/// per check x cell x trial.
std::string report_to_json(const VerificationReport& report, bool with_timing = true);
std::string report_to_csv(const VerificationReport& report);

/// Writes report.json and report.csv under out_dir (created if needed).
void write_report_files(const VerificationReport& report, const std::string& out_dir);

}  // namespace knotgeo
