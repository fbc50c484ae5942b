#include <cmath>

#include "doctest.h"
#include "warpflow/errors.hpp"
#include "warpflow/initial_data.hpp"
#include "warpflow/verify.hpp"

using namespace warpflow;

TEST_CASE("audit report aggregates gated records only") {
    AuditReport r;
    r.add({"a", "x <= 1", 0.5, 1, true, true, ""});
    r.add({"trend", "reported", 9, 0, false, false, ""});
    CHECK(r.pass);
    r.add({"b", "x <= 1", 2, 1, false, true, ""});
    CHECK_FALSE(r.pass);
    AuditReport s;
    s.merge(r);
    CHECK(s.records.size() == 3);
    CHECK_FALSE(s.pass);
}

TEST_CASE("oracle error on a short round-sphere ladder converges at scheme order") {
    OracleConfig c;
    c.kind = OracleKind::round_sphere;
    c.n = 4;
    c.ladder = {41, 81};
    c.duration = 0.02;
    OracleTable t = oracle_error(c);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1].error_psi < t.rows[0].error_psi);
    CHECK(t.observed_order > 3.5);
    CHECK(std::string(to_string(t.kind)) == "round_sphere");
}

TEST_CASE("curvature equation names round-trip") {
    for (CurvatureEquation e : all_curvature_equations()) CHECK(curvature_equation_from(to_string(e)) == e);
    CHECK_THROWS_AS(curvature_equation_from("k9"), ConfigError);
}

TEST_CASE("evolution residuals need enough snapshots") {
    FlowTrajectory tr = residual_trajectory(round_sphere(1.0, make_uniform_grid(33), 3), 1e-4, 1000);
    CHECK_THROWS_AS(evolution_residuals(tr, all_curvature_equations()), ConfigError);
}

TEST_CASE("hypersausage residuals decrease under refinement") {
    std::vector<double> res;
    for (int nc : {41, 81}) {
        FlowTrajectory tr = residual_trajectory(hypersausage_exact(-2.0, make_uniform_grid(nc)), 0.02, nc / 20);
        ResidualTable t = evolution_residuals(tr, {CurvatureEquation::k_top});
        res.push_back(t.rows[0].residual / t.rows[0].scale);
    }
    CHECK(res[0] / res[1] > 3.5);
}

TEST_CASE("bounds audit needs an extinction time; sweeps need three taus") {
    FlowTrajectory tr;
    CHECK_THROWS_AS(bounds_audit(tr, -1.0, 3), ConfigError);
    std::vector<SweepMember> two(2);
    two[0].tau = -5;
    two[1].tau = -10;
    CHECK_THROWS_AS(asymptotic_audit(two), ConfigError);
    std::vector<SweepMember> narrow(3);
    narrow[0].tau = -5;
    narrow[1].tau = -6;
    narrow[2].tau = -7;
    CHECK_THROWS_AS(asymptotic_audit(narrow), ConfigError);
}

TEST_CASE("bounds and ordering audits pass on a coarse tau = -1 run") {
    FlowConfig fc;
    fc.gauge = Gauge::arclength;
    fc.snapshot_every = 1 << 30;
    FlowTrajectory tr = run(sausage_slice(-1.0, 3, make_uniform_grid(101), Gauge::arclength), fc);
    AuditReport b = bounds_audit(tr, -1.0, 3);
    for (const auto& r : b.records) INFO(r.name << " " << r.measured << " " << r.note);
    CHECK(b.pass);
    bool bracket = false;
    for (const auto& r : b.records) bracket = bracket || r.name.rfind("extinction_bracket", 0) == 0;
    CHECK(bracket);
    CHECK(ordering_audit(tr).pass);
    const GeoSummary& s = summary_at(tr, 0.1);
    CHECK(s.time >= 0.1);
    CHECK(&summary_at(tr, 1e9) == &tr.summaries.back());
}
