#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "warpflow/config.hpp"
#include "warpflow/persistence.hpp"
#include "warpflow/verify.hpp"

namespace warpflow {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitInvariant = 4 };

struct RunOutcome {
    FlowTrajectory trajectory;
    int exit_code = kExitOk;
    std::string reason;  // machine-readable: ok, numeric_failure, invariant_violation
};

// Runs (or, given a checkpoint, resumes) one configuration and writes
// summary.csv, profiles/NNNN.json, report.json, initial.wfp, final.wfp and
// plots/*.svg under `out_dir`.
RunOutcome execute_run(const RunConfig& rc, const std::string& out_dir, const Checkpoint* from = nullptr);

// Fixed header, one row per summary, %.17g numbers.
std::string summary_csv(const FlowTrajectory& traj);
extern const char* const kSummaryHeader;

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir, std::ostream& log);
int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_dir, std::ostream& log);
int cmd_verify(const std::string& suite, const std::string& out_dir, std::ostream& log);
int cmd_resume(const std::string& checkpoint_path, const std::optional<std::string>& out_dir, std::ostream& log);

// Pinned desk-scale suites: oracles, residuals, bounds, identities, all.
// Throws ConfigError for an unknown name.
AuditReport verify_suite(const std::string& name, std::ostream& log);

// Sausage run to extinction at the bounds-audit settings.
FlowTrajectory sausage_trajectory(double tau, int n, int node_count, int monitor_every = 50);

// Sweep members in parallel, capped by WARPFLOW_THREADS.
std::vector<SweepMember> run_sweep(const RunConfig& rc, const std::string& out_dir);
int worker_count();

// Relative rounding floor of a quantity holding k-th derivatives on a grid of spacing dr.
double rounding_floor(double dr, int k);

}  // namespace warpflow
