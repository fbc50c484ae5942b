#pragma once

#include <vector>

#include "warpflow/grid.hpp"
#include "warpflow/metric.hpp"

namespace warpflow {

// Rotationally symmetric metric chi^2 dr^2 + psi^2 dtheta^2 on S^2.
struct SectionProfile {
    Grid grid;
    std::vector<double> chi, psi;
};

struct CigarProfile {
    double lambda = 1.0;
    std::vector<double> s;      // distance from the tip
    std::vector<double> warp;   // lambda tanh(s/lambda)
    std::vector<double> gauss;  // 2 lambda^-2 sech^2(s/lambda)
    double tip_scalar = 4.0;    // 4 / lambda^2
};

// Sausage-slice initial data with a = -2 tau, T = tanh a:
//   chi = sqrt(T / (1 - T^2 sin^2 r)), psi = chi cos r, phi = artanh(T sin r)/sqrt(T).
// In the arclength gauge the same metric is resampled so that chi is the
// constant 2 ell / pi.
Profile sausage_slice(double tau, int n, const Grid& grid, Gauge gauge = Gauge::coordinate);

// Waist-to-tip length of the sausage slice, sqrt(T) K(T).
double sausage_slice_length(double tau);

Profile round_sphere(double rho, const Grid& grid, int n);

// Fateev's O(2)xO(2)-invariant ancient solution on S^3 at parameter t < 0,
// sampled from its closed form. The closed form solves g_t = -Rc/2, so under
// g_t = -2 Rc a flow-time interval dt advances the parameter by
// kHypersausageTimeScale * dt.
Profile hypersausage_exact(double t, const Grid& grid);
inline constexpr double kHypersausageTimeScale = 4.0;

// Exact ancient flow on S^2 at time t < 0; its area is -8 pi t.
SectionProfile sausage_exact(double t, const Grid& grid);
double section_area(const SectionProfile& sp);

CigarProfile cigar_profile(double lambda, const std::vector<double>& s_samples);

}  // namespace warpflow
