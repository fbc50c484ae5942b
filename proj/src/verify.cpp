#include "warpflow/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "warpflow/errors.hpp"
#include "warpflow/initial_data.hpp"

namespace warpflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

AuditRecord gate(std::string name, std::string claim, double measured, double tolerance, bool pass,
                 std::string note = {}) {
    return AuditRecord{std::move(name), std::move(claim), measured, tolerance, pass, true, std::move(note)};
}

AuditRecord trend(std::string name, std::string claim, double measured, std::string note = {}) {
    return AuditRecord{std::move(name), std::move(claim), measured, 0.0, true, false, std::move(note)};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void AuditReport::add(AuditRecord r) {
    if (r.gated && !r.pass) pass = false;
    records.push_back(std::move(r));
}

void AuditReport::merge(const AuditReport& other) {
    for (const auto& r : other.records) add(r);
}

const char* to_string(OracleKind k) {
    return k == OracleKind::round_sphere ? "round_sphere" : "hypersausage";
}

OracleTable oracle_error(const OracleConfig& cfg) {
    if (cfg.kind == OracleKind::hypersausage && cfg.n != 3) throw ConfigError("the hypersausage exists only for n = 3");
    if (cfg.ladder.empty()) throw ConfigError("oracle ladder is empty");
    OracleTable table;
    table.kind = cfg.kind;
    for (int nodes : cfg.ladder) {
        Grid g = make_uniform_grid(nodes, cfg.order);
        Profile start, exact;
        double duration;
        if (cfg.kind == OracleKind::hypersausage) {
            if (!(cfg.t0 < cfg.t1)) throw ConfigError("hypersausage oracle needs t0 < t1");
            start = hypersausage_exact(cfg.t0, g);
            exact = hypersausage_exact(cfg.t1, g);
            duration = (cfg.t1 - cfg.t0) / kHypersausageTimeScale;
        } else {
            duration = cfg.duration;
            const double rho2 = cfg.rho0 * cfg.rho0 - 2.0 * (cfg.n - 1) * duration;
            if (!(rho2 > 0.0)) throw ConfigError("round-sphere oracle runs past extinction");
            start = round_sphere(cfg.rho0, g, cfg.n);
            exact = round_sphere(std::sqrt(rho2), g, cfg.n);
        }
        FlowConfig fc;
        fc.cfl = cfg.cfl;
        fc.t_end = duration;
        fc.monitor_every = std::numeric_limits<int>::max();
        fc.monitor_invariants = false;
        auto t0 = std::chrono::steady_clock::now();
        FlowTrajectory tr = run(start, fc);
        OracleRow row;
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (tr.termination != TerminationReason::t_end_reached) {
            throw NumericError("oracle run stopped early: " + tr.message);
        }
        row.node_count = nodes;
        row.steps = tr.last.step_index;
        const Profile& got = tr.last.profile;
        double scale = 0.0;
        for (int i = 0; i < nodes; ++i) {
            row.error_psi = std::max(row.error_psi, std::abs(got.psi[i] - exact.psi[i]));
            row.error_phi = std::max(row.error_phi, std::abs(got.phi[i] - exact.phi[i]));
            scale = std::max({scale, std::abs(exact.psi[i]), std::abs(exact.phi[i])});
        }
        row.relative_error = std::max(row.error_psi, row.error_phi) / scale;
        table.rows.push_back(row);
    }
    for (size_t k = 1; k < table.rows.size(); ++k) {
        const auto& a = table.rows[k - 1];
        const auto& b = table.rows[k];
        const double ratio = static_cast<double>(b.node_count - 1) / (a.node_count - 1);
        table.orders.push_back(std::log(a.relative_error / b.relative_error) / std::log(ratio));
    }
    table.observed_order = table.orders.empty() ? 0.0 : table.orders.back();
    return table;
}

const char* to_string(CurvatureEquation e) {
    switch (e) {
        case CurvatureEquation::k_top: return "k_top";
        case CurvatureEquation::k1_perp: return "k1_perp";
        case CurvatureEquation::k2_perp: return "k2_perp";
        case CurvatureEquation::l_sec: return "l_sec";
        case CurvatureEquation::k_top_grad: return "k_top_grad";
        case CurvatureEquation::k1_perp_grad: return "k1_perp_grad";
    }
    return "unknown";
}

std::vector<CurvatureEquation> all_curvature_equations() {
    return {CurvatureEquation::k_top, CurvatureEquation::k1_perp,    CurvatureEquation::k2_perp,
            CurvatureEquation::l_sec, CurvatureEquation::k_top_grad, CurvatureEquation::k1_perp_grad};
}

CurvatureEquation curvature_equation_from(const std::string& name) {
    for (auto e : all_curvature_equations()) {
        if (name == to_string(e)) return e;
    }
    throw ConfigError("unknown curvature equation '" + name + "'");
}

namespace {

const std::vector<double>& field_of(const CurvatureField& c, CurvatureEquation e) {
    switch (e) {
        case CurvatureEquation::k_top: return c.k_top;
        case CurvatureEquation::k1_perp: return c.k1_perp;
        case CurvatureEquation::k2_perp: return c.k2_perp;
        case CurvatureEquation::l_sec: return c.l_sec;
        case CurvatureEquation::k_top_grad: return c.k_top_s;
        case CurvatureEquation::k1_perp_grad: return c.k1_perp_s;
    }
    return c.k_top;
}

const std::vector<double>& rate_of(const CurvatureRates& r, CurvatureEquation e) {
    switch (e) {
        case CurvatureEquation::k_top: return r.k_top;
        case CurvatureEquation::k1_perp: return r.k1_perp;
        case CurvatureEquation::k2_perp: return r.k2_perp;
        case CurvatureEquation::l_sec: return r.l_sec;
        case CurvatureEquation::k_top_grad: return r.k_top_s;
        case CurvatureEquation::k1_perp_grad: return r.k1_perp_s;
    }
    return r.k_top;
}

// s-derivative of a node array with the given parity.
std::vector<double> d_ds(const Profile& p, const std::vector<double>& f, ParityPair par) {
    std::vector<double> out(f.size());
    diff1_xi(p.grid, f, par, out);
    for (size_t i = 0; i < f.size(); ++i) out[i] /= p.chi[i] * p.grid.jac[i];
    return out;
}

}  // namespace

namespace {

// Weights of the first derivative at t[k] over the given stencil (Fornberg).
std::vector<double> derivative_weights(const std::vector<double>& t, double at) {
    const int m = static_cast<int>(t.size());
    std::vector<std::vector<double>> c(m, std::vector<double>(2, 0.0));
    double c1 = 1.0, c4 = t[0] - at;
    c[0][0] = 1.0;
    for (int i = 1; i < m; ++i) {
        const int mn = std::min(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = t[i] - at;
        for (int j = 0; j < i; ++j) {
            const double c3 = t[i] - t[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(m);
    for (int i = 0; i < m; ++i) w[i] = c[i][1];
    return w;
}

}  // namespace

ResidualTable evolution_residuals(const FlowTrajectory& traj, const std::vector<CurvatureEquation>& eqs,
                                  double margin, int stencil) {
    const auto& st = traj.states;
    if (stencil != 3 && stencil != 5) throw ConfigError("time stencil must have 3 or 5 points");
    if (static_cast<int>(st.size()) < stencil) {
        throw ConfigError("evolution residuals need at least " + std::to_string(stencil) + " stored snapshots");
    }
    if (eqs.empty()) throw ConfigError("no curvature equations selected");
    const int nc = st.front().profile.grid.node_count;
    for (size_t k = 0; k < st.size(); ++k) {
        if (st[k].profile.grid.node_count != nc) throw DataError("snapshots use different grids");
        if (k > 0 && !(st[k].time > st[k - 1].time)) throw DataError("snapshot times are not increasing");
    }
    std::vector<CurvatureField> fields;
    fields.reserve(st.size());
    for (const auto& s : st) fields.push_back(sectional_curvatures(s.profile));

    ResidualTable table;
    for (auto e : eqs) table.rows.push_back(ResidualRow{e, 0.0, 0.0});
    const Grid& g = st.front().profile.grid;
    const double lo = margin * kPi / 2.0, hi = (1.0 - margin) * kPi / 2.0;
    const ParityPair even{Parity::even, Parity::even}, odd{Parity::odd, Parity::odd};
    const int half = stencil / 2;
    for (size_t k = half; k + half < st.size(); ++k) {
        std::vector<double> times;
        for (size_t j = k - half; j <= k + half; ++j) times.push_back(st[j].time);
        const std::vector<double> w = derivative_weights(times, st[k].time);
        const Profile& p = st[k].profile;
        CurvatureRates rates = curvature_evolution_rhs(p);
        std::vector<double> drift;
        if (traj.gauge == Gauge::arclength) drift = rhs(p, Gauge::arclength).drift;
        for (auto& row : table.rows) {
            const auto& f0 = field_of(fields[k], row.eq);
            const auto& rr = rate_of(rates, row.eq);
            std::vector<double> fs;
            if (!drift.empty()) {
                const bool grad = row.eq == CurvatureEquation::k_top_grad || row.eq == CurvatureEquation::k1_perp_grad;
                fs = d_ds(p, f0, grad ? odd : even);
            }
            for (int i = 1; i < nc - 1; ++i) {
                if (g.nodes[i] < lo || g.nodes[i] > hi) continue;
                double dt = 0.0;
                for (int j = 0; j < stencil; ++j) dt += w[j] * field_of(fields[k - half + j], row.eq)[i];
                // The pulled-back flow moves points with velocity V along s.
                if (!drift.empty()) dt -= drift[i] * fs[i];
                row.residual = std::max(row.residual, std::abs(dt - rr[i]));
                row.scale = std::max(row.scale, std::abs(dt));
            }
        }
        ++table.snapshots_used;
    }
    return table;
}

FlowTrajectory residual_trajectory(const Profile& initial, double duration, int steps_between, Gauge gauge,
                                   double cfl) {
    if (steps_between < 1) throw ConfigError("steps_between must be positive");
    FlowConfig fc;
    fc.gauge = gauge;
    fc.cfl = cfl;
    fc.t_end = duration;
    fc.monitor_every = steps_between;
    fc.snapshot_every = 1;
    fc.monitor_invariants = false;
    FlowTrajectory tr = run(initial, fc);
    if (tr.termination != TerminationReason::t_end_reached) throw NumericError("residual run failed: " + tr.message);
    return tr;
}

AuditReport bounds_audit(const FlowTrajectory& traj, double tau, int n, const BoundsOptions& opt) {
    if (!traj.extinction_time) throw ConfigError("bounds audit needs an extinction time");
    AuditReport rep;
    rep.suite = "bounds";
    const double T = *traj.extinction_time;
    const double nm1 = n - 1.0;
    const std::string tag = " (tau=" + fmt(tau) + ", n=" + std::to_string(n) + ")";

    const double lo = -tau / nm1 * (1.0 - opt.bracket_slack), hi = -tau * (1.0 + opt.bracket_slack);
    rep.add(gate("extinction_bracket" + tag, "-tau/(n-1) <= T_ext <= -tau", T, opt.bracket_slack, T >= lo && T <= hi,
                 "bracket [" + fmt(-tau / nm1) + ", " + fmt(-tau) + "]"));

    double area_lo = kInf, area_hi = -kInf, h_max = -kInf, h_low = kInf, ell_lo = kInf, ell_hi = -kInf;
    double d_low = kInf, myers = -kInf, sc_trend = -kInf;
    int area_n = 0, h_n = 0, d_n = 0, harnack_n = 0;
    for (const auto& s : traj.summaries) {
        const double t = s.time_ext;
        if (!(t < 0.0)) continue;
        ++area_n;
        area_lo = std::min(area_lo, s.area / (-8.0 * kPi * t));
        area_hi = std::max(area_hi, s.area / (-8.0 * kPi * nm1 * t));
        h_max = std::max(h_max, s.h);
        ell_lo = std::min(ell_lo, s.ell / (-2.0 * t));
        myers = std::max(myers, s.k_top_waist * 4.0 * s.ell * s.ell / (kPi * kPi));
        if (t < -nm1) {
            ++h_n;
            h_low = std::min(h_low, s.h - (1.0 - nm1 / -t));
            ell_hi = std::max(ell_hi, s.ell / (-4.0 * nm1 * t / (1.0 - nm1 / -t)));
        }
        if (t <= -2.0 * nm1) {
            ++d_n;
            d_low = std::min(d_low, s.d - std::log(-t / (2.0 * nm1)) / (4.0 * nm1));
        }
        if (t > -T / 10.0 && t < -2.0 * nm1) {
            ++harnack_n;
            sc_trend = std::max(sc_trend, s.sc_max * t * t);
        }
    }
    const std::string steps = " over " + std::to_string(area_n) + " summaries";
    rep.add(gate("area_lower" + tag, "A >= -8 pi t", area_lo, opt.area_slack, area_lo >= 1.0 - opt.area_slack,
                 "min A/(-8 pi t)" + steps));
    rep.add(gate("area_upper" + tag, "A <= -8 pi (n-1) t", area_hi, opt.area_slack, area_hi <= 1.0 + opt.area_slack,
                 "max A/(-8 pi (n-1) t)" + steps));
    rep.add(gate("h_upper" + tag, "h <= 1", h_max, opt.h_upper_tol, h_max <= 1.0 + opt.h_upper_tol, "max h"));
    rep.add(gate("length_lower" + tag, "ell >= -2t", ell_lo, opt.length_slack, ell_lo >= 1.0 - opt.length_slack,
                 "min ell/(-2t)"));
    rep.add(gate("myers" + tag, "K^T(waist) <= pi^2/(4 ell^2)", myers, opt.myers_slack,
                 myers <= 1.0 + opt.myers_slack, "max K^T(waist) 4 ell^2 / pi^2"));
    if (h_n > 0) {
        rep.add(gate("h_lower" + tag, "h >= 1 - (n-1)/(-t) for t < -(n-1)", h_low, opt.h_lower_tol,
                     h_low >= -opt.h_lower_tol, "min h - bound over " + std::to_string(h_n) + " summaries"));
        rep.add(gate("length_upper" + tag, "ell <= -4(n-1)t / (1 - (n-1)/(-t)) for t < -(n-1)", ell_hi,
                     opt.length_slack, ell_hi <= 1.0 + opt.length_slack, "max ell/bound"));
    } else {
        rep.add(trend("h_lower" + tag, "h >= 1 - (n-1)/(-t) for t < -(n-1)", 0.0, "window empty"));
    }
    if (d_n > 0) {
        rep.add(gate("tip_radius" + tag, "d >= log(-t/(2(n-1)))/(4(n-1)) for t <= -2(n-1)", d_low, opt.d_tol,
                     d_low >= -opt.d_tol, "min d - bound over " + std::to_string(d_n) + " summaries"));
    } else {
        rep.add(trend("tip_radius" + tag, "d >= log(-t/(2(n-1)))/(4(n-1)) for t <= -2(n-1)", 0.0, "window empty"));
    }
    rep.add(trend("scalar_curvature_trend" + tag, "Sc_max t^2 on (T_ext/10, -2(n-1)), constant unspecified",
                  harnack_n > 0 ? sc_trend : std::numeric_limits<double>::quiet_NaN(),
                  "max Sc_max t^2 over " + std::to_string(harnack_n) + " summaries"));
    return rep;
}

AuditReport ordering_audit(const FlowTrajectory& traj, double tol) {
    AuditReport rep;
    rep.suite = "ordering";
    static const char* names[8] = {"K^T-K2", "K2-K1", "K1-L", "L", "K^T_s", "(K1)_s", "(K2)_s", "L_s"};
    double worst[8];
    std::fill(worst, worst + 8, kInf);
    for (const auto& s : traj.summaries) {
        const double scale = std::max(s.curvature_scale, 1e-300);
        for (int k = 0; k < 4; ++k) {
            worst[k] = std::min(worst[k], s.ordering_margins[k] / scale);
            worst[4 + k] = std::min(worst[4 + k], s.gradient_margins[k] / scale);
        }
    }
    for (int k = 0; k < 8; ++k) {
        rep.add(gate(std::string("margin ") + names[k], std::string(names[k]) + " >= -tol max|K|", worst[k], tol,
                     worst[k] >= -tol, "min over " + std::to_string(traj.summaries.size()) + " summaries"));
    }
    return rep;
}

const GeoSummary& summary_at(const FlowTrajectory& traj, double t) {
    if (traj.summaries.empty()) throw DataError("trajectory has no summaries");
    for (const auto& s : traj.summaries) {
        if (s.time >= t) return s;
    }
    return traj.summaries.back();
}

AuditReport asymptotic_audit(const std::vector<SweepMember>& sweep, const AsymptoticOptions& opt) {
    std::vector<const SweepMember*> members;
    for (const auto& m : sweep) members.push_back(&m);
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->tau > b->tau; });
    if (members.size() < 3) throw ConfigError("asymptotic audit needs at least three tau values");
    if (members.back()->tau / members.front()->tau < 2.0) throw ConfigError("sweep needs a tau ratio of at least 2");

    AuditReport rep;
    rep.suite = "asymptotics";
    std::vector<const SweepMember*> ok;
    for (auto* m : members) {
        if (m->ok) ok.push_back(m);
    }
    rep.add(gate("sweep_complete", "plumbing", static_cast<double>(ok.size()), static_cast<double>(members.size()),
                 ok.size() == members.size(), "members that produced a trajectory"));
    if (ok.size() < 3) return rep;

    std::vector<GeoSummary> at;
    std::string taus;
    for (auto* m : ok) {
        at.push_back(summary_at(m->traj, opt.offset));
        taus += (taus.empty() ? "" : ", ") + fmt(m->tau);
    }
    auto series = [&](auto get) {
        std::string s;
        for (const auto& g : at) s += (s.empty() ? "" : ", ") + fmt(get(g));
        return s;
    };
    auto strictly = [&](auto get, bool increasing) {
        double worst = kInf;
        for (size_t k = 1; k < at.size(); ++k) {
            double step = get(at[k]) - get(at[k - 1]);
            worst = std::min(worst, increasing ? step : -step);
        }
        return worst;
    };
    const std::string when = " at t_sim=" + fmt(opt.offset) + ", tau = " + taus;

    auto lam = [](const GeoSummary& g) { return g.lambda_hat; };
    double lam_step = strictly(lam, true);
    rep.add(gate("lambda_increasing", "lambda_hat increases as tau decreases", lam_step, 0.0, lam_step > 0.0,
                 "lambda_hat = " + series(lam) + when));
    rep.add(gate("lambda_floor", "lambda_hat -> 1 from below", at.back().lambda_hat, opt.lambda_floor,
                 at.back().lambda_hat >= opt.lambda_floor && at.back().lambda_hat <= 1.0 + 1e-9,
                 "most negative tau"));

    // Girth over the early window for the most negative tau.
    double girth_dev = 0.0;
    for (const auto& s : ok.back()->traj.summaries) {
        if (s.time > opt.offset) break;
        girth_dev = std::max(girth_dev, std::abs(s.girth.length / (2.0 * kPi) - 1.0));
    }
    rep.add(gate("girth_early", "girth -> 2 pi", girth_dev, opt.girth_tol, girth_dev <= opt.girth_tol,
                 "max |girth/(2 pi) - 1| on t_sim <= " + fmt(opt.offset) + ", candidate " +
                     to_string(at.back().girth.candidate)));

    auto cyl = [](const GeoSummary& g) { return g.gaps.cylinder_gap; };
    auto cig = [](const GeoSummary& g) { return g.gaps.cigar_gap; };
    double cyl_step = strictly(cyl, false), cig_step = strictly(cig, false);
    rep.add(gate("cylinder_gap_decreasing", "waist approaches the flat cylinder", cyl_step, 0.0, cyl_step > 0.0,
                 "cylinder_gap = " + series(cyl) + when));
    rep.add(gate("cigar_gap_decreasing", "tip approaches the unit cigar", cig_step, 0.0, cig_step > 0.0,
                 "cigar_gap = " + series(cig) + when));

    // Trends whose limits carry unspecified constants.
    const int n = ok.back()->n;
    auto ell_ratio = [](const GeoSummary& g) { return g.ell / (-2.0 * g.time_ext); };
    auto area_ratio = [](const GeoSummary& g) { return g.area / (-8.0 * kPi * g.time_ext); };
    double lr = ell_ratio(at.back());
    rep.add(gate("length_ratio_range", "ell/(-2t) within [1, 4(n-1)]", lr, 0.01,
                 lr >= 0.99 && lr <= 4.0 * (n - 1) * 1.01, "ell/(-2t) = " + series(ell_ratio) + when));
    rep.add(trend("area_ratio_trend", "A/(-8 pi t) bounded by 1 + eps asymptotically", area_ratio(at.back()),
                  "A/(-8 pi t) = " + series(area_ratio) + when));
    return rep;
}

}  // namespace warpflow
