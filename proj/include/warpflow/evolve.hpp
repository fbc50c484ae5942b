#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "warpflow/diagnostics.hpp"
#include "warpflow/metric.hpp"

namespace warpflow {

enum class TerminationReason { extinction, t_end_reached, invariant_violation, numeric_failure };
const char* to_string(TerminationReason r);

enum class Integrator { heun, imex };

struct FlowConfig {
    Gauge gauge = Gauge::coordinate;
    Integrator integrator = Integrator::heun;
    double cfl = 0.8;
    double t_end = std::numeric_limits<double>::infinity();  // simulation time; inf runs to extinction
    int monitor_every = 50;     // accepted steps between summaries
    int snapshot_every = 10;    // summaries between stored profiles
    double area_floor = 0.02;   // stop once A < area_floor * A(0)
    double curvature_cap = 1e6; // stop once max |K| exceeds this multiple of the initial value
    int max_rejections = 20;
    long max_steps = 50'000'000;
    int extinction_fit_points = 12;
    // Ordering and gradient margins must stay >= -ordering_tol * max|K|.
    bool monitor_invariants = true;
    double ordering_tol = 1e-6;
    SummaryOptions summary;
};

struct FlowState {
    double time = 0.0;
    Profile profile;
    long step_index = 0;
    double dt_last = 0.0;
};

struct FlowTrajectory {
    std::vector<FlowState> states;
    std::vector<GeoSummary> summaries;
    std::optional<double> extinction_time;
    TerminationReason termination = TerminationReason::t_end_reached;
    std::string message;
    double initial_area = 0.0;
    double initial_curvature = 0.0;
    long rejected_steps = 0;
    Gauge gauge = Gauge::coordinate;
    FlowState last;  // final accepted state
};

struct FlowRates {
    std::vector<double> chi, psi, phi;
    std::vector<double> drift;  // tangential velocity V (zero in the coordinate gauge)
};

// Time derivative of (chi, psi, phi) under Ricci flow, written as
// g_t = -2 Rc plus, in the arclength gauge, the tangential diffeomorphism that
// keeps chi uniform in r.
FlowRates rhs(const Profile& p, Gauge gauge = Gauge::coordinate);

// cfl * min(ds)^2 / (2 (1 + B)), B = max_i ds_i * (first-order coefficient
// magnitudes at node i), evaluated at interior nodes. Throws ConfigError
// unless 0 < cfl <= 1.
double adaptive_dt(const Profile& p, double cfl, Gauge gauge = Gauge::coordinate);

enum class StepStatus { accepted, rejected_stability, rejected_positivity, non_finite };
const char* to_string(StepStatus s);

struct StepResult {
    StepStatus status = StepStatus::accepted;
    FlowState state;
};

// One Heun (or IMEX) step. Rejects when dt exceeds the cfl = 1 bound for the
// explicit scheme, or when a positivity constraint breaks.
StepResult step(const FlowState& s, double dt, const FlowConfig& cfg);

// Called after every summary; return false to stop the run (reported as
// t_end_reached with a message).
using FlowObserver = std::function<bool(const FlowState&, const GeoSummary&, const FlowTrajectory&)>;

FlowTrajectory run(const Profile& initial, const FlowConfig& cfg, const FlowObserver& observer = {});

// Continue a trajectory from its `last` state with the same configuration.
// Produces the same summaries as an uninterrupted run.
FlowTrajectory resume(FlowTrajectory partial, const FlowConfig& cfg, const FlowObserver& observer = {});

// Extinction time from the area law: quadratic least squares on the last
// `points` summaries, solved for A = 0 beyond the final sample.
double extrapolate_extinction(const std::vector<GeoSummary>& summaries, int points);

// Time measured from extinction: t_sim - T_ext, negative before extinction.
double shifted_time(double t_sim, double extinction_time);
void apply_extinction_shift(FlowTrajectory& traj);

// Right-hand sides of the curvature evolution equations, with Delta the
// scalar Laplacian and time derivatives at fixed r in the coordinate gauge.
struct CurvatureRates {
    std::vector<double> k_top, k1_perp, k2_perp, l_sec;  // d_t K = Delta K + reaction and gradient terms
    std::vector<double> k_top_s, k1_perp_s;               // d_t of the s-derivatives
};

CurvatureRates curvature_evolution_rhs(const Profile& p);

}  // namespace warpflow
