// Command-line front end: validates experiment configs, runs convergence
// sweeps, prints human-readable verdict and rate tables, writes report
// artifacts (JSON + CSV).
//
// Exit codes: 0 success (including controls that fail as expected),
// 1 check failure, 2 usage/config error, 3 runtime abort.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "knotgeo/verification.hpp"

namespace {

using namespace knotgeo;

std::optional<VcpKind> kind_from_name(const std::string& name) {
  if (name == "kaehler") return VcpKind::Kaehler;
  if (name == "volume") return VcpKind::VolumeForm;
  if (name == "g2") return VcpKind::G2;
  if (name == "spin7") return VcpKind::Spin7;
  return std::nullopt;
}

int default_dim(VcpKind kind) {
  switch (kind) {
    case VcpKind::Kaehler: return 4;
    case VcpKind::VolumeForm: return 3;
    case VcpKind::G2: return 7;
    case VcpKind::Spin7: return 8;
  }
  return 0;
}

void print_header(const char* command) {
  const char* threads = std::getenv("KNOTGEO_THREADS");
  std::printf("knotgeo %s — reference defaults h=1e-04, N=128, seed=0; threads=%s\n", command,
              threads != nullptr ? threads : "1");
}

int cmd_verify_vcp(const std::string& kind_name, int m, int trials, unsigned long long seed,
                   bool corrupt) {
  std::optional<VcpKind> kind = kind_from_name(kind_name);
  if (!kind.has_value()) {
    std::fprintf(stderr, "error: unknown --kind '%s' (expected kaehler|volume|g2|spin7)\n",
                 kind_name.c_str());
    return 2;
  }
  if (m == 0) m = default_dim(*kind);

  print_header("verify-vcp");
  try {
    LinearVcp vcp = make_vcp(*kind, m);
    if (corrupt) vcp = corrupted_copy(vcp);
    AxiomReport rep = verify_vcp_axioms(vcp, trials, seed);
    double tol = check_definition(CheckKind::Axioms).tolerance;
    bool ok = rep.max_violation() <= tol;
    std::printf("kind=%s m=%d r=%d trials=%d seed=%llu%s\n", to_string(*kind).c_str(), m, vcp.r,
                trials, seed, corrupt ? " (corrupted fixture)" : "");
    std::printf("  max orthogonality violation: %.3e\n", rep.max_orthogonality);
    std::printf("  max norm-identity violation: %.3e\n", rep.max_norm);
    std::printf("  verdict: %s (tolerance %.1e)\n", ok ? "PASS" : "FAIL", tol);
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

void print_verdict_table(const VerificationReport& report) {
  std::printf("%-14s %-18s %12s %12s %10s  %s\n", "check", "verdict", "raw(finest)",
              "metric", "rate", "notes");
  for (const CheckReport& cr : report.checks) {
    const CheckDefinition& def = check_definition(cr.kind);
    char rate[32];
    if (cr.rate_note.empty())
      std::snprintf(rate, sizeof(rate), "%.2f", cr.fitted_rate);
    else
      std::snprintf(rate, sizeof(rate), "%s", "-");
    std::string notes;
    if (def.rule == VerdictRule::ModelAgreement) {
      double allowance = std::max(def.tolerance, def.relative_band * cr.raw_at_finest);
      if (cr.vanishing_confirmed)
        notes += "vanishing confirmed";
      else if (cr.metric_at_finest <= allowance)
        notes += "nonzero residue, matches model";
      else
        notes += "nonzero residue, deviates from model";
    }
    if (!cr.monotone) notes += notes.empty() ? "non-monotone sweep" : "; non-monotone sweep";
    if (!cr.rate_note.empty()) notes += (notes.empty() ? "" : "; ") + cr.rate_note;
    std::printf("%-14s %-18s %12.4e %12.4e %10s  %s\n", def.name, verdict_name(cr.verdict),
                cr.raw_at_finest, cr.metric_at_finest, rate, notes.c_str());
  }
  std::printf("overall: %s\n", report.passed ? "PASS" : "FAIL");
}

void print_rate_table(const VerificationReport& report) {
  std::printf("%-14s %8s %10s %14s %14s\n", "check", "grid", "step", "max_defect",
              "model_dev");
  for (const CheckReport& cr : report.checks) {
    const CheckDefinition& def = check_definition(cr.kind);
    for (const CellResult& r : cr.cells) {
      if (r.trial != 0) continue;  // one representative row per cell
      std::printf("%-14s %8d %10.2e %14.6e %14.6e\n", def.name, r.grid_size, r.step,
                  r.max_defect, r.model_deviation);
    }
    if (cr.rate_note.empty())
      std::printf("%-14s fitted rate: %.3f\n", def.name, cr.fitted_rate);
    else
      std::printf("%-14s fitted rate: %s\n", def.name, cr.rate_note.c_str());
  }
}

int run_config(const std::string& config_path, const std::string& out_dir, bool rate_first) {
  ExperimentSpec spec;
  try {
    spec = load_experiment(config_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  print_header(rate_first ? "converge" : "run");
  std::printf("config: %s (kind=%s, preset=%s, twist=%g, seed=%u, trials=%d)\n",
              config_path.c_str(), to_string(spec.kind).c_str(), spec.preset.shape.c_str(),
              spec.twist_rate, spec.seed, spec.trials);

  try {
    VerificationReport report = run_experiment(spec);
    write_report_files(report, out_dir);
    if (rate_first) print_rate_table(report);
    print_verdict_table(report);
    std::printf("artifacts: %s/report.json, %s/report.csv\n", out_dir.c_str(), out_dir.c_str());

    for (const CheckReport& cr : report.checks)
      for (const CellResult& r : cr.cells)
        if (!r.error.empty()) {
          std::fprintf(stderr, "error: cell (N=%d, h=%g, trial %d) aborted: %s\n", r.grid_size,
                       r.step, r.trial, r.error.c_str());
          return 3;
        }
    return report.passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized knot-space geometry: VCP algebra checks and convergence sweeps"};
  app.require_subcommand(1);

  std::string kind_name;
  int m = 0;
  int trials = 1000;
  unsigned long long seed = 0;
  bool corrupt = false;
  CLI::App* verify = app.add_subcommand("verify-vcp", "Check the cross-product axioms");
  verify->add_option("--kind", kind_name, "kaehler|volume|g2|spin7")->required();
  verify->add_option("--m", m, "ambient dimension (default: canonical for the kind)");
  verify->add_option("--trials", trials, "random tuples beyond the exhaustive basis sweep");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_flag("--corrupt", corrupt, "corrupt one tensor entry first (test hook)");

  std::string run_config_path, run_out = "out";
  CLI::App* run = app.add_subcommand("run", "Run an experiment config; write report artifacts");
  run->add_option("--config", run_config_path, "experiment JSON path")->required();
  run->add_option("--out", run_out, "output directory (default: out)");

  std::string conv_config_path, conv_out = "out";
  CLI::App* converge =
      app.add_subcommand("converge", "Run an experiment config; emphasize the rate table");
  converge->add_option("--config", conv_config_path, "experiment JSON path")->required();
  converge->add_option("--out", conv_out, "output directory (default: out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (verify->parsed()) return cmd_verify_vcp(kind_name, m, trials, seed, corrupt);
  if (run->parsed()) return run_config(run_config_path, run_out, false);
  if (converge->parsed()) return run_config(conv_config_path, conv_out, true);
  return 2;
}
