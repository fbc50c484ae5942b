#pragma once

#include <array>
#include <string>
#include <vector>

#include "warpflow/metric.hpp"

namespace warpflow {

enum class GirthCandidate { waist_circle, tip_circle, meridian };
const char* to_string(GirthCandidate c);

struct GirthEstimate {
    double length = 0.0;
    GirthCandidate candidate = GirthCandidate::waist_circle;
    std::array<double, 3> candidates{};  // 2 pi h, 2 pi d, 4 ell
};

// Shape comparison against the two model geometries. Each gap is the sum of
// its components; NaN when the window does not fit.
struct AsymptoticGaps {
    double cylinder_gap = 0.0;
    double cyl_psi = 0.0;        // sup |psi/h - 1| on [0, w]
    double cyl_phi = 0.0;        // sup |phi/s - 1| on (0, w]
    double cyl_curvature = 0.0;  // h^2 sup |K| on [0, w]
    double cigar_gap = 0.0;
    double cig_psi = 0.0;        // sup |psi - lambda tanh((ell - s)/lambda)| / h on [ell - w, ell]
    double cig_l = 0.0;          // lambda^2 sup L on the same window
};

struct GeoSummary {
    double time = 0.0;
    double time_ext = 0.0;  // time - extinction time; NaN until known
    double ell = 0.0, h = 0.0, area = 0.0, d = 0.0;
    GirthEstimate girth;
    double sc_max = 0.0, sc_tip = 0.0;
    double lambda_hat = 0.0;
    double k_top_waist = 0.0;
    double curvature_scale = 0.0;               // max |K| over the four eigenvalues
    std::array<double, 4> ordering_margins{};   // min of K^T-K2, K2-K1, K1-L, L
    std::array<double, 4> gradient_margins{};   // min of K^T_s, (K1)_s, (K2)_s, L_s
    AsymptoticGaps gaps;
};

struct SummaryOptions {
    double gap_window = 4.0;
};

GeoSummary geometric_summary(const Profile& p, double t, const SummaryOptions& opt = {});
GirthEstimate girth_estimate(const Profile& p);

// 2 / sqrt(Sc at the tip).
double lambda_estimate(const Profile& p);
double lambda_from_tip_scalar(double sc_tip);

// Throws ConfigError unless 0 < window < ell/2.
AsymptoticGaps asymptotic_gaps(const Profile& p, double window);

struct WeightedDifferences {
    std::vector<double> x, y, z, w;  // w is the waist weight at each node
};

// Weight equal to 1/r^2 below pi/6, 1 above pi/3, and the quintic Hermite
// bridge (value and two derivatives) in between.
double difference_weight(double r);

WeightedDifferences weighted_differences(const Profile& p);

}  // namespace warpflow
