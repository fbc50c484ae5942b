#pragma once

#include <string>
#include <vector>

#include "warpflow/evolve.hpp"
#include "warpflow/persistence.hpp"

namespace warpflow {

enum class InitialKind { sausage, round_sphere, hypersausage };
const char* to_string(InitialKind k);

// Flat `key = value` text; `#` starts a comment. Every key is optional.
//
//   initial        sausage | round_sphere | hypersausage     (sausage)
//   n              dimension >= 3                              (3)
//   tau            sausage parameter, < 0                      (-2)
//   rho            round-sphere radius, > 0                    (1)
//   t0             hypersausage parameter, < 0                 (-2)
//   node_count     grid nodes                                  (201)
//   order          2 | 4                                       (4)
//   cfl            (0, 1]                                      (0.8)
//   gauge          auto | coordinate | arclength               (auto: arclength for sausage)
//   stretch, bias  mesh stretch parameters                     (0, 0)
//   imex           true | false                                (false)
//   monitor_every  accepted steps between summaries            (50)
//   snapshot_every summaries between profile snapshots         (10)
//   t_end          simulation end time; unset runs to extinction
//   run_to_extinction  true | false                            (true)
//   area_floor, curvature_cap, ordering_tol, gap_window, smooth_tol
//   monitor_invariants true | false; sausage data only          (true)
//   checkpoint_every summaries between checkpoints, 0 = never  (0)
//   plots          true | false                                (true)
//   output         output directory                            (warpflow_out)
//   taus           comma-separated list for sweeps
//   sweep_offset   simulation time where sweep members are compared (0.5)
struct RunConfig {
    InitialKind initial = InitialKind::sausage;
    int n = 3;
    double tau = -2.0;
    double rho = 1.0;
    double t0 = -2.0;
    int node_count = 201;
    int order = 4;
    double cfl = 0.8;
    std::string gauge = "auto";
    double stretch = 0.0, bias = 0.0;
    bool imex = false;
    int monitor_every = 50;
    int snapshot_every = 10;
    double t_end = std::numeric_limits<double>::infinity();
    bool run_to_extinction = true;
    double area_floor = 0.02;
    double curvature_cap = 1e6;
    double ordering_tol = 1e-6;
    double gap_window = 4.0;
    double smooth_tol = kDefaultSmoothTol;
    bool monitor_invariants = true;
    int checkpoint_every = 0;
    bool plots = true;
    std::string output = "warpflow_out";
    std::vector<double> taus;
    double sweep_offset = 0.5;

    std::string text;  // the source text, kept for checkpoints
};

// Throws ConfigError on unknown keys, malformed values or invalid combinations.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Gauge resolved_gauge(const RunConfig& rc);
FlowConfig flow_config(const RunConfig& rc);
Profile initial_profile(const RunConfig& rc);
std::vector<ProvenanceEntry> initial_provenance(const RunConfig& rc);

// Copy of `rc` for one sweep member.
RunConfig member_config(const RunConfig& rc, double tau);

}  // namespace warpflow
