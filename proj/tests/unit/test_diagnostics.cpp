#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "warpflow/diagnostics.hpp"
#include "warpflow/errors.hpp"
#include "warpflow/evolve.hpp"
#include "warpflow/initial_data.hpp"

using namespace warpflow;
using std::numbers::pi;

TEST_CASE("geometric summary of the unit round sphere") {
    GeoSummary s = geometric_summary(round_sphere(1.0, make_uniform_grid(201), 3), 0.0);
    CHECK(s.ell == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK(s.h == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.area == doctest::Approx(4 * pi).epsilon(1e-9));
    CHECK(s.d == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.girth.length == doctest::Approx(2 * pi).epsilon(1e-12));
    for (double c : s.girth.candidates) CHECK(c >= 2 * pi * (1 - 1e-12));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(s.ordering_margins[k]) < 1e-7);
    CHECK(s.ordering_margins[3] == doctest::Approx(1.0).epsilon(1e-7));  // min L
}

TEST_CASE("geometric summary of the tau = -1 sausage slice") {
    GeoSummary s = geometric_summary(sausage_slice(-1.0, 3, make_uniform_grid(401)), 0.0);
    CHECK(s.area == doctest::Approx(8 * pi).epsilon(1e-8));
    CHECK(s.h == doctest::Approx(0.981849061758382944).epsilon(1e-14));
    CHECK(s.girth.length <= 2 * pi * s.h * (1 + 1e-15));
}

TEST_CASE("girth of the tau = -5 slice is the waist circle") {
    GirthEstimate g = girth_estimate(sausage_slice(-5.0, 3, make_uniform_grid(201)));
    CHECK(g.candidate == GirthCandidate::waist_circle);
    CHECK(g.length == doctest::Approx(6.28318529422897633).epsilon(1e-13));
    CHECK(std::string(to_string(g.candidate)) == "waist_circle");
}

TEST_CASE("girth candidates agree near extinction") {
    FlowConfig fc;
    fc.snapshot_every = 1 << 30;
    fc.monitor_invariants = false;
    FlowTrajectory tr = run(sausage_slice(-1.0, 3, make_uniform_grid(101)), fc);
    REQUIRE(tr.termination == TerminationReason::extinction);
    const auto& c = tr.summaries.back().girth.candidates;
    const double lo = *std::min_element(c.begin(), c.end()), hi = *std::max_element(c.begin(), c.end());
    CHECK(hi / lo < 1.1);
}

TEST_CASE("lambda from the tip scalar curvature") {
    CHECK(lambda_from_tip_scalar(4.0) == doctest::Approx(1.0));
    CHECK(lambda_from_tip_scalar(16.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(lambda_from_tip_scalar(0.0), NumericError);
    CHECK_THROWS_AS(lambda_from_tip_scalar(-1.0), NumericError);
    // On the unit round S^3 the tip scalar is 6.
    CHECK(lambda_estimate(round_sphere(1.0, make_uniform_grid(101), 3)) == doctest::Approx(2 / std::sqrt(6.0)));
}

TEST_CASE("lambda of a briefly flowed tau = -20 slice lies in (0, 1]") {
    FlowConfig fc;
    fc.gauge = Gauge::arclength;
    fc.t_end = 0.2;
    fc.snapshot_every = 1 << 30;
    FlowTrajectory tr = run(sausage_slice(-20.0, 3, make_uniform_grid(201), Gauge::arclength), fc);
    const double lam = tr.summaries.back().lambda_hat;
    CHECK(lam > 0.0);
    CHECK(lam <= 1.0);
}

TEST_CASE("asymptotic gaps shrink with -tau and reject oversized windows") {
    Grid g = make_uniform_grid(401);
    AsymptoticGaps a = asymptotic_gaps(sausage_slice(-5.0, 3, g, Gauge::arclength), 2.0);
    AsymptoticGaps b = asymptotic_gaps(sausage_slice(-20.0, 3, g, Gauge::arclength), 2.0);
    CHECK(b.cylinder_gap < a.cylinder_gap);
    CHECK(b.cigar_gap < a.cigar_gap);
    CHECK(a.cylinder_gap == doctest::Approx(a.cyl_psi + a.cyl_phi + a.cyl_curvature));
    CHECK(a.cigar_gap == doctest::Approx(a.cig_psi + a.cig_l));
    CHECK_THROWS_AS(asymptotic_gaps(round_sphere(1.0, g, 3), 1.0), ConfigError);
    CHECK_THROWS_AS(asymptotic_gaps(round_sphere(1.0, g, 3), 0.0), ConfigError);
}

TEST_CASE("difference weight") {
    CHECK(difference_weight(0.3) == doctest::Approx(1 / 0.09));
    CHECK(difference_weight(1.2) == 1.0);
    CHECK(difference_weight(pi / 6) == doctest::Approx(36 / (pi * pi)));
    CHECK(difference_weight(pi / 3) == doctest::Approx(1.0));
    for (double r0 : {pi / 6, pi / 3}) {
        // Value and slope match across the junctions.
        const double e = 1e-7;
        CHECK(difference_weight(r0 - e) == doctest::Approx(difference_weight(r0 + e)).epsilon(1e-6));
        const double sl = (difference_weight(r0 - e) - difference_weight(r0 - 2 * e)) / e;
        const double sr = (difference_weight(r0 + 2 * e) - difference_weight(r0 + e)) / e;
        CHECK(sl == doctest::Approx(sr).epsilon(1e-3).scale(1));
    }
    double prev = difference_weight(0.2);
    for (double r = 0.21; r < pi / 2; r += 0.01) {
        const double w = difference_weight(r);
        CHECK(w <= prev + 1e-12);
        prev = w;
    }
}

TEST_CASE("weighted differences on the round sphere and the sausage slice") {
    WeightedDifferences s = weighted_differences(round_sphere(1.0, make_uniform_grid(201), 3));
    for (size_t i = 0; i < s.x.size(); ++i) {
        // The 1/r^2 weight amplifies rounding near the waist.
        CHECK(std::abs(s.x[i]) < 1e-4);
        CHECK(std::abs(s.y[i]) < 1e-4);
        CHECK(std::abs(s.z[i]) < 1e-4);
    }
    // K1 = K2 on the sausage; the quotient form leaves an O(dr^2) residue near the tip.
    double prev = 0;
    for (int nc : {201, 401}) {
        WeightedDifferences d = weighted_differences(sausage_slice(-1.0, 3, make_uniform_grid(nc)));
        double ymax = 0;
        for (size_t i = 0; i < d.x.size(); ++i) {
            CHECK(std::isfinite(d.x[i]));
            CHECK(d.x[i] >= -1e-6);
            CHECK(d.z[i] >= -1e-6);
            ymax = std::max(ymax, std::abs(d.y[i]));
        }
        if (prev > 0) CHECK(prev / ymax > 3.5);
        prev = ymax;
    }
    WeightedDifferences a = weighted_differences(sausage_slice(-1.0, 3, make_uniform_grid(201), Gauge::arclength));
    for (double y : a.y) CHECK(std::abs(y) < 5e-4);
}

TEST_CASE("weighted differences stay bounded at the ends under refinement") {
    for (int nc : {101, 201, 401}) {
        WeightedDifferences d = weighted_differences(sausage_slice(-2.0, 3, make_uniform_grid(nc), Gauge::arclength));
        const int m = nc - 1;
        auto end_max = [&](const std::vector<double>& v, int from, int to) {
            double e = 0;
            for (int i = from; i <= to; ++i) e = std::max(e, std::abs(v[i]));
            return e;
        };
        for (const auto* v : {&d.x, &d.z}) {
            CHECK(end_max(*v, 0, 9) <= 2 * end_max(*v, 10, 19) + 1e-12);
            CHECK(end_max(*v, m - 9, m) <= 2 * end_max(*v, m - 19, m - 10) + 1e-12);
        }
    }
}
