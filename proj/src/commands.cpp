#include "warpflow/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "warpflow/initial_data.hpp"
#include "warpflow/svg.hpp"

namespace warpflow {

using nlohmann::json;
namespace fs = std::filesystem;

const char* const kSummaryHeader =
    "t_sim,t_ext,ell,h,area,d,girth_est,girth_candidate,sc_max,lambda_hat,margin_X,margin_Y,margin_Z,margin_L,"
    "grad_Ktop,grad_K1,grad_K2,grad_L,cylinder_gap,cigar_gap";

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string pad4(size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", k);
    return buf;
}

const char* reason_of(TerminationReason r) {
    switch (r) {
        case TerminationReason::numeric_failure: return "numeric_failure";
        case TerminationReason::invariant_violation: return "invariant_violation";
        default: return "ok";
    }
}

int exit_of(TerminationReason r) {
    switch (r) {
        case TerminationReason::numeric_failure: return kExitNumeric;
        case TerminationReason::invariant_violation: return kExitInvariant;
        default: return kExitOk;
    }
}

void write_plots(const FlowTrajectory& traj, const std::string& dir) {
    std::vector<double> t;
    for (const auto& g : traj.summaries) t.push_back(g.time);
    auto series = [&](const std::string& label, auto get) {
        Series s{label, t, {}};
        for (const auto& g : traj.summaries) s.y.push_back(get(g));
        return s;
    };
    const std::string x = "simulation time";
    write_file(dir + "/ell.svg", svg_line_chart("waist-to-tip length", x, {series("ell", [](auto& g) { return g.ell; })}));
    write_file(dir + "/h.svg", svg_line_chart("waist radius", x, {series("h", [](auto& g) { return g.h; })}));
    write_file(dir + "/area.svg", svg_line_chart("area of the 2D slice", x, {series("A", [](auto& g) { return g.area; })}));
    write_file(dir + "/d.svg", svg_line_chart("tip radius", x, {series("d", [](auto& g) { return g.d; })}));
    write_file(dir + "/girth.svg",
               svg_line_chart("girth estimate", x, {series("girth / 2pi", [](auto& g) { return g.girth.length / (2 * M_PI); })}));
    write_file(dir + "/lambda_hat.svg",
               svg_line_chart("cigar scale estimate", x, {series("lambda_hat", [](auto& g) { return g.lambda_hat; })}));
    static const char* names[8] = {"K^T-K2", "K2-K1", "K1-L", "L", "K^T_s", "(K1)_s", "(K2)_s", "L_s"};
    std::vector<Series> margins;
    for (int k = 0; k < 8; ++k) {
        margins.push_back(series(names[k], [k](auto& g) {
            const double m = k < 4 ? g.ordering_margins[k] : g.gradient_margins[k - 4];
            return m / std::max(g.curvature_scale, 1e-300);
        }));
    }
    write_file(dir + "/margins.svg", svg_line_chart("ordering margins / max|K|", x, margins));
}

json run_report(const RunConfig& rc, const RunOutcome& o, const std::vector<AuditReport>& audits) {
    const FlowTrajectory& t = o.trajectory;
    json j = {{"schema_version", schema_version()},
              {"kind", "report"},
              {"initial", to_string(rc.initial)},
              {"n", rc.n},
              {"node_count", rc.node_count},
              {"order", rc.order},
              {"gauge", resolved_gauge(rc) == Gauge::arclength ? "arclength" : "coordinate"},
              {"termination", to_string(t.termination)},
              {"reason", o.reason},
              {"exit_code", o.exit_code},
              {"message", t.message},
              {"extinction_time", t.extinction_time ? num(*t.extinction_time) : json(nullptr)},
              {"final_time", num(t.last.time)},
              {"steps", t.last.step_index},
              {"rejected_steps", t.rejected_steps},
              {"summaries", t.summaries.size()},
              {"initial_area", num(t.initial_area)}};
    switch (rc.initial) {
        case InitialKind::sausage: j["tau"] = rc.tau; break;
        case InitialKind::round_sphere:
            j["rho"] = rc.rho;
            j["exact_extinction_time"] = rc.rho * rc.rho / (2.0 * (rc.n - 1));
            break;
        case InitialKind::hypersausage:
            j["t0"] = rc.t0;
            j["exact_extinction_time"] = -rc.t0 / kHypersausageTimeScale;
            break;
    }
    json a = json::array();
    for (const auto& r : audits) a.push_back(to_json(r));
    j["audits"] = a;
    return j;
}

}  // namespace

double rounding_floor(double dr, int k) {
    return 100.0 * std::numeric_limits<double>::epsilon() / std::pow(dr, k);
}

std::string summary_csv(const FlowTrajectory& traj) {
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const auto& g : traj.summaries) {
        std::string row;
        auto add = [&](const std::string& s) { row += (row.empty() ? "" : ",") + s; };
        add(g17(g.time));
        add(g17(g.time_ext));
        add(g17(g.ell));
        add(g17(g.h));
        add(g17(g.area));
        add(g17(g.d));
        add(g17(g.girth.length));
        add(to_string(g.girth.candidate));
        add(g17(g.sc_max));
        add(g17(g.lambda_hat));
        for (double m : g.ordering_margins) add(g17(m));
        for (double m : g.gradient_margins) add(g17(m));
        add(g17(g.gaps.cylinder_gap));
        add(g17(g.gaps.cigar_gap));
        out += row + "\n";
    }
    return out;
}

RunOutcome execute_run(const RunConfig& rc, const std::string& out_dir, const Checkpoint* from) {
    // Everything that can reject the configuration happens before the first write.
    const FlowConfig fc = flow_config(rc);
    const Profile initial = initial_profile(rc);
    const auto provenance = initial_provenance(rc);
    const std::string initial_bytes = encode_profile(initial, provenance);
    SmoothnessReport smooth = validate_smoothness(initial, rc.smooth_tol);
    if (!smooth.pass) throw ConfigError("initial data fails smoothness:\n" + smooth.summary());

    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/profiles");
    if (!from) write_file(out_dir + "/initial.wfp", initial_bytes);

    auto observer = [&](const FlowState& st, const GeoSummary&, const FlowTrajectory& tr) {
        const size_t idx = tr.summaries.size() - 1;
        if (idx % static_cast<size_t>(rc.snapshot_every) == 0) {
            json p = profile_json(st.profile);
            p["time"] = st.time;
            p["step_index"] = st.step_index;
            write_file(out_dir + "/profiles/" + pad4(idx / rc.snapshot_every) + ".json", p.dump() + "\n");
        }
        if (rc.checkpoint_every > 0 && idx > 0 && idx % static_cast<size_t>(rc.checkpoint_every) == 0) {
            Checkpoint c{schema_version(), rc.text, out_dir, tr};
            c.trajectory.last = st;
            write_file(out_dir + "/checkpoint.wfc", encode_checkpoint(c));
        }
        return true;
    };

    RunOutcome o;
    try {
        if (from) {
            o.trajectory = resume(from->trajectory, fc, observer);
        } else {
            o.trajectory = run(initial, fc, observer);
        }
        o.exit_code = exit_of(o.trajectory.termination);
        o.reason = reason_of(o.trajectory.termination);
    } catch (const NumericError& e) {
        o.exit_code = kExitNumeric;
        o.reason = "numeric_failure";
        o.trajectory.termination = TerminationReason::numeric_failure;
        o.trajectory.message = e.what();
    }

    const FlowTrajectory& t = o.trajectory;
    std::vector<AuditReport> audits;
    if (rc.initial == InitialKind::sausage && t.extinction_time) {
        audits.push_back(bounds_audit(t, rc.tau, rc.n));
        audits.push_back(ordering_audit(t, rc.ordering_tol));
    }
    write_file(out_dir + "/summary.csv", summary_csv(t));
    if (!t.summaries.empty() && o.exit_code != kExitNumeric) {
        auto chain = provenance;
        chain.push_back(ProvenanceEntry{"evolved", {{"time", hex_double(t.last.time)}}, digest(initial_bytes)});
        try {
            write_file(out_dir + "/final.wfp", encode_profile(t.last.profile, chain));
        } catch (const std::runtime_error&) {
            // A non-finite final state is already reported through the exit code.
        }
    }
    if (rc.plots) write_plots(t, out_dir + "/plots");
    write_file(out_dir + "/report.json", run_report(rc, o, audits).dump(2) + "\n");
    return o;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir, std::ostream& log) {
    RunConfig rc;
    try {
        rc = load_config(config_path);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    const std::string dir = out_dir.value_or(rc.output);
    try {
        RunOutcome o = execute_run(rc, dir, nullptr);
        log << "termination: " << to_string(o.trajectory.termination);
        if (o.trajectory.extinction_time) log << ", extinction_time = " << g17(*o.trajectory.extinction_time);
        if (!o.trajectory.message.empty()) log << " (" << o.trajectory.message << ")";
        log << "\n";
        return o.exit_code;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

int worker_count() {
    if (const char* env = std::getenv("WARPFLOW_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepMember> run_sweep(const RunConfig& rc, const std::string& out_dir) {
    std::vector<SweepMember> members(rc.taus.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t k = next++; k < members.size(); k = next++) {
            SweepMember& m = members[k];
            m.tau = rc.taus[k];
            m.n = rc.n;
            try {
                char name[64];
                std::snprintf(name, sizeof name, "/tau_%g", m.tau);
                RunOutcome o = execute_run(member_config(rc, m.tau), out_dir + name);
                m.traj = std::move(o.trajectory);
                m.ok = o.exit_code == kExitOk && m.traj.extinction_time.has_value();
                if (!m.ok) m.error = o.reason + ": " + m.traj.message;
            } catch (const std::exception& e) {
                m.ok = false;
                m.error = e.what();
            }
        }
    };
    const int workers = std::min<int>(worker_count(), static_cast<int>(members.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return members;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_dir, std::ostream& log) {
    RunConfig rc;
    try {
        rc = load_config(config_path);
        if (rc.initial != InitialKind::sausage) throw ConfigError("sweeps use sausage initial data");
        std::vector<double> sorted = rc.taus;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("duplicate tau");
        if (sorted.size() < 3) throw ConfigError("a sweep needs at least three tau values");
        if (sorted.front() / sorted.back() < 2.0) throw ConfigError("sweep taus need a max/min ratio of at least 2");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    const std::string dir = out_dir.value_or(rc.output);
    std::vector<SweepMember> members = run_sweep(rc, dir);
    AsymptoticOptions opt;
    opt.offset = rc.sweep_offset;
    AuditReport asym = asymptotic_audit(members, opt);
    json mj = json::array();
    int code = kExitOk;
    for (const auto& m : members) {
        json e = {{"tau", m.tau}, {"n", m.n}, {"ok", m.ok}, {"error", m.error}};
        if (m.traj.extinction_time) e["extinction_time"] = *m.traj.extinction_time;
        if (m.ok) {
            AuditReport b = bounds_audit(m.traj, m.tau, m.n);
            e["bounds"] = to_json(b);
            if (!b.pass) code = kExitInvariant;
        } else {
            code = m.traj.termination == TerminationReason::numeric_failure ? kExitNumeric : kExitInvariant;
        }
        log << "tau " << m.tau << ": " << (m.ok ? "ok" : "failed: " + m.error) << "\n";
        mj.push_back(e);
    }
    if (!asym.pass && code == kExitOk) code = kExitInvariant;
    json out = {{"schema_version", schema_version()},
                {"kind", "sweep_audit"},
                {"n", rc.n},
                {"members", mj},
                {"asymptotics", to_json(asym)},
                {"pass", code == kExitOk},
                {"exit_code", code}};
    write_file(dir + "/sweep_audit.json", out.dump(2) + "\n");
    for (const auto& r : asym.records) {
        log << (r.gated ? (r.pass ? "PASS " : "FAIL ") : "info ") << r.name << ": " << r.note << "\n";
    }
    return code;
}

FlowTrajectory sausage_trajectory(double tau, int n, int node_count, int monitor_every) {
    Grid g = make_uniform_grid(node_count, 4);
    FlowConfig fc;
    fc.gauge = Gauge::arclength;
    fc.monitor_every = monitor_every;
    fc.monitor_invariants = false;  // the ordering audit reports margins over the whole run
    fc.snapshot_every = std::numeric_limits<int>::max();
    FlowTrajectory tr = run(sausage_slice(tau, n, g, Gauge::arclength), fc);
    if (!tr.extinction_time) throw NumericError("sausage run ended without extinction: " + tr.message);
    return tr;
}

namespace {

AuditRecord gated(std::string name, std::string claim, double measured, double tol, bool pass, std::string note = {}) {
    return AuditRecord{std::move(name), std::move(claim), measured, tol, pass, true, std::move(note)};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

AuditReport suite_oracles(std::ostream& log) {
    AuditReport rep;
    rep.suite = "oracles";
    OracleConfig hc;
    OracleTable ht = oracle_error(hc);
    const auto& hl = ht.rows.back();
    log << "hypersausage ladder: error " << fmt(hl.relative_error) << " at N=" << hl.node_count << ", order "
        << fmt(ht.observed_order) << "\n";
    rep.add(gated("hypersausage_error", "max relative error in (psi, phi) at N=401 <= 1e-3", hl.relative_error, 1e-3,
                  hl.relative_error <= 1e-3, "t0=-2 to t1=-1"));
    rep.add(gated("hypersausage_order", "observed order >= 1.8", ht.observed_order, 1.8, ht.observed_order >= 1.8));
    rep.add(gated("hypersausage_scheme_order", "observed order >= scheme order - 0.2", ht.observed_order,
                  hc.order - 0.2, ht.observed_order >= hc.order - 0.2));

    OracleConfig rcfg;
    rcfg.kind = OracleKind::round_sphere;
    rcfg.n = 4;
    OracleTable rt = oracle_error(rcfg);
    const auto& rl = rt.rows.back();
    log << "round sphere ladder: psi error " << fmt(rl.error_psi) << " at N=" << rl.node_count << ", order "
        << fmt(rt.observed_order) << "\n";
    rep.add(gated("round_sphere_error", "psi error at N=401, n=4, t=0.1 <= 1e-4", rl.error_psi, 1e-4,
                  rl.error_psi <= 1e-4));
    rep.add(gated("round_sphere_order", "observed order >= scheme order - 0.2", rt.observed_order, rcfg.order - 0.2,
                  rt.observed_order >= rcfg.order - 0.2));

    FlowConfig fc;
    fc.monitor_invariants = false;
    fc.snapshot_every = std::numeric_limits<int>::max();
    FlowTrajectory tr = run(round_sphere(1.0, make_uniform_grid(401), 3), fc);
    const double T = tr.extinction_time.value_or(std::numeric_limits<double>::quiet_NaN());
    const double rel = std::abs(T - 0.25) / 0.25;
    log << "round sphere extinction: " << fmt(T) << "\n";
    rep.add(gated("round_sphere_extinction", "extinction time 1/4 within 1% (rho0=1, n=3, N=401)", rel, 0.01,
                  rel <= 0.01, "T = " + fmt(T)));
    return rep;
}

AuditReport suite_residuals(std::ostream& log) {
    AuditReport rep;
    rep.suite = "residuals";
    const auto eqs = all_curvature_equations();
    std::vector<ResidualTable> ladder;
    const std::vector<int> nodes{51, 101, 201};
    for (int nc : nodes) {
        FlowTrajectory tr = residual_trajectory(hypersausage_exact(-2.0, make_uniform_grid(nc)), 0.05, nc / 20);
        ladder.push_back(evolution_residuals(tr, eqs));
    }
    for (size_t e = 0; e < eqs.size(); ++e) {
        const double a = ladder[1].rows[e].residual / ladder[1].rows[e].scale;
        const double b = ladder[2].rows[e].residual / ladder[2].rows[e].scale;
        const double order = std::log2(a / b);
        log << "hypersausage " << to_string(eqs[e]) << ": " << fmt(a) << " -> " << fmt(b) << ", order " << fmt(order)
            << "\n";
        rep.add(gated(std::string("hypersausage_") + to_string(eqs[e]), "residual converges at order >= 1.8", order,
                      1.8, order >= 1.8, "relative residual " + fmt(a) + " (N=101) -> " + fmt(b) + " (N=201)"));
    }

    const int nc = 101;
    const Grid g = make_uniform_grid(nc);
    FlowTrajectory sph = residual_trajectory(round_sphere(1.0, g, 3), 0.05, 5);
    ResidualTable st = evolution_residuals(sph, {CurvatureEquation::k_top, CurvatureEquation::k1_perp,
                                                 CurvatureEquation::k2_perp}, 0.05, 5);
    const double floor = rounding_floor(g.h, 4);
    for (const auto& r : st.rows) {
        const double rel = r.residual / r.scale;
        rep.add(gated(std::string("round_sphere_") + to_string(r.eq), "residual at rounding level (100 eps / dr^4)",
                      rel, floor, rel <= floor, "N=101, five-snapshot stencil"));
    }

    std::vector<double> grad;
    for (int n2 : {101, 201}) {
        const Grid gs = make_uniform_grid(n2);
        FlowTrajectory tr =
            residual_trajectory(sausage_slice(-2.0, 3, gs, Gauge::arclength), 0.1, n2 / 20, Gauge::arclength);
        ResidualTable t = evolution_residuals(tr, {CurvatureEquation::k_top_grad});
        grad.push_back(t.rows[0].residual);
    }
    const double ratio = grad[0] / grad[1];
    rep.add(gated("sausage_k_top_grad", "residual drops >= 3.5x when N doubles (tau=-2)", ratio, 3.5, ratio >= 3.5,
                  fmt(grad[0]) + " -> " + fmt(grad[1])));
    return rep;
}

AuditReport suite_bounds(std::ostream& log) {
    AuditReport rep;
    rep.suite = "bounds";
    struct Job {
        int n;
        double tau;
        FlowTrajectory traj;
        std::string error;
    };
    std::vector<Job> jobs;
    for (int n : {3, 4}) {
        for (double tau : {-2.0, -5.0, -10.0}) jobs.push_back({n, tau, {}, {}});
    }
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t k = next++; k < jobs.size(); k = next++) {
            try {
                jobs[k].traj = sausage_trajectory(jobs[k].tau, jobs[k].n, 401);
            } catch (const std::exception& e) {
                jobs[k].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < std::min<int>(worker_count(), jobs.size()); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& j : jobs) {
        const std::string tag = "(tau=" + fmt(j.tau) + ", n=" + std::to_string(j.n) + ")";
        if (!j.error.empty()) {
            rep.add(gated("run " + tag, "plumbing", 0, 0, false, j.error));
            continue;
        }
        log << "bounds " << tag << ": T_ext = " << fmt(*j.traj.extinction_time) << "\n";
        rep.merge(bounds_audit(j.traj, j.tau, j.n));
        AuditReport ord = ordering_audit(j.traj, 1e-6);
        for (auto r : ord.records) {
            r.name += " " + tag;
            rep.add(r);
        }
    }
    return rep;
}

AuditReport suite_identities(std::ostream& log) {
    AuditReport rep;
    rep.suite = "identities";
    auto residual = [](const Profile& p) {
        IdentityResidual r = curvature_derivative_identities(sectional_curvatures(p), p);
        return std::max(r.k2_residual, r.l_residual) / r.scale;
    };
    const Grid g401 = make_uniform_grid(401), g201 = make_uniform_grid(201);
    const double sph = residual(round_sphere(1.0, g401, 3));
    const double floor = rounding_floor(g401.h, 3);
    rep.add(gated("round_sphere_identities", "residual at rounding level (100 eps / dr^3)", sph, floor, sph <= floor));
    const double a = residual(sausage_slice(-1.0, 3, g201)), b = residual(sausage_slice(-1.0, 3, g401));
    rep.add(gated("sausage_identities_convergence", "residual drops >= 3.5x from N=201 to N=401", a / b, 3.5,
                  a / b >= 3.5, fmt(a) + " -> " + fmt(b)));
    const double h = residual(hypersausage_exact(-1.0, g401)) ;
    rep.add(gated("hypersausage_identities", "residual below 1e-4 at N=401", h, 1e-4, h <= 1e-4));
    log << "identities: sphere " << fmt(sph) << ", sausage " << fmt(a) << " -> " << fmt(b) << ", hypersausage "
        << fmt(h) << "\n";
    return rep;
}

}  // namespace

AuditReport verify_suite(const std::string& name, std::ostream& log) {
    if (name == "oracles") return suite_oracles(log);
    if (name == "residuals") return suite_residuals(log);
    if (name == "bounds") return suite_bounds(log);
    if (name == "identities") return suite_identities(log);
    if (name == "all") {
        AuditReport all;
        all.suite = "all";
        for (const char* s : {"identities", "oracles", "residuals", "bounds"}) all.merge(verify_suite(s, log));
        return all;
    }
    throw ConfigError("unknown suite '" + name + "' (oracles, residuals, bounds, identities, all)");
}

int cmd_verify(const std::string& suite, const std::string& out_dir, std::ostream& log) {
    AuditReport rep;
    try {
        rep = verify_suite(suite, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    for (const auto& r : rep.records) {
        log << (r.gated ? (r.pass ? "PASS " : "FAIL ") : "info ") << r.name << "  measured=" << fmt(r.measured)
            << "  [" << r.claim << "]\n";
    }
    write_file(out_dir + "/verify_" + suite + ".json", to_json(rep).dump(2) + "\n");
    return rep.pass ? kExitOk : kExitInvariant;
}

int cmd_resume(const std::string& checkpoint_path, const std::optional<std::string>& out_dir, std::ostream& log) {
    Checkpoint c;
    RunConfig rc;
    try {
        c = decode_checkpoint(read_file(checkpoint_path));
    } catch (const DataError& e) {
        log << "checkpoint error: " << e.what() << "\n";
        return kExitNumeric;
    }
    try {
        rc = parse_config(c.config_text);
    } catch (const ConfigError& e) {
        log << "checkpoint error: embedded config is invalid: " << e.what() << "\n";
        return kExitNumeric;
    }
    try {
        RunOutcome o = execute_run(rc, out_dir.value_or(c.output_dir), &c);
        log << "termination: " << to_string(o.trajectory.termination) << "\n";
        return o.exit_code;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace warpflow
