#pragma once

#include <string>
#include <vector>

#include "warpflow/evolve.hpp"

namespace warpflow {

// One checked claim. `measured` is the extremal value of the checked
// quantity over its validity window; trend records are reported, never gated.
struct AuditRecord {
    std::string name;
    std::string claim;  // the inequality or trend, or "plumbing"
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    bool gated = true;
    std::string note;
};

struct AuditReport {
    std::string suite;
    std::vector<AuditRecord> records;
    bool pass = true;
    void add(AuditRecord r);
    void merge(const AuditReport& other);
};

enum class OracleKind { round_sphere, hypersausage };
const char* to_string(OracleKind k);

struct OracleConfig {
    OracleKind kind = OracleKind::hypersausage;
    int n = 3;
    std::vector<int> ladder{101, 201, 401};
    int order = 4;
    double cfl = 0.8;
    // hypersausage: closed-form parameters at the start and end
    double t0 = -2.0, t1 = -1.0;
    // round sphere: initial radius and flow duration
    double rho0 = 1.0, duration = 0.1;
};

struct OracleRow {
    int node_count = 0;
    double error_psi = 0.0, error_phi = 0.0;
    double relative_error = 0.0;  // max of both over max |exact|
    long steps = 0;
    double seconds = 0.0;
};

struct OracleTable {
    OracleKind kind = OracleKind::hypersausage;
    std::vector<OracleRow> rows;
    std::vector<double> orders;  // log2 of successive error ratios
    double observed_order = 0.0; // the last entry of `orders`
};

OracleTable oracle_error(const OracleConfig& cfg);

enum class CurvatureEquation { k_top, k1_perp, k2_perp, l_sec, k_top_grad, k1_perp_grad };
const char* to_string(CurvatureEquation e);
CurvatureEquation curvature_equation_from(const std::string& name);
std::vector<CurvatureEquation> all_curvature_equations();

struct ResidualRow {
    CurvatureEquation eq = CurvatureEquation::k_top;
    double residual = 0.0;  // max |d_t K - rhs| over interior nodes and interior snapshots
    double scale = 0.0;     // max |d_t K| over the same set
};

struct ResidualTable {
    std::vector<ResidualRow> rows;
    int snapshots_used = 0;
};

// Centered time differences of the stored snapshots at fixed r against
// curvature_evolution_rhs, over a 3- or 5-snapshot stencil. Arclength-gauge
// trajectories are corrected by the tangential drift. Nodes within `margin`
// (fraction of the interval) of either orbit are skipped. Throws ConfigError
// with fewer snapshots than the stencil.
ResidualTable evolution_residuals(const FlowTrajectory& traj, const std::vector<CurvatureEquation>& eqs,
                                  double margin = 0.05, int stencil = 3);

// Trajectory sampled every `steps_between` steps for `duration`, suitable for
// evolution_residuals. Monitors are off.
FlowTrajectory residual_trajectory(const Profile& initial, double duration, int steps_between,
                                   Gauge gauge = Gauge::coordinate, double cfl = 0.8);

struct BoundsOptions {
    double area_slack = 0.01;
    double bracket_slack = 0.01;
    double length_slack = 0.01;
    double myers_slack = 0.01;
    double h_upper_tol = 1e-6;
    double h_lower_tol = 1e-3;
    double d_tol = 1e-3;
};

// Geometric bounds along a flow from sausage-slice data with parameter tau.
// Throws ConfigError if the trajectory has no extinction time.
AuditReport bounds_audit(const FlowTrajectory& traj, double tau, int n, const BoundsOptions& opt = {});

// Ordering and gradient margins at every summary, against -tol * max|K|.
AuditReport ordering_audit(const FlowTrajectory& traj, double tol = 1e-6);

struct SweepMember {
    double tau = 0.0;
    int n = 3;
    bool ok = false;
    std::string error;
    FlowTrajectory traj;
};

struct AsymptoticOptions {
    double offset = 0.5;        // simulation time after the start at which members are compared
    double lambda_floor = 0.9;  // required lambda_hat for the most negative tau
    double girth_tol = 0.05;    // relative distance of the girth from 2 pi at early times
};

// Monotone trends across a sweep in tau at a matched early time. Throws
// ConfigError unless at least three taus with max/min ratio >= 2.
AuditReport asymptotic_audit(const std::vector<SweepMember>& sweep, const AsymptoticOptions& opt = {});

// First summary at or after simulation time t (the last one if none).
const GeoSummary& summary_at(const FlowTrajectory& traj, double t);

}  // namespace warpflow
