#include "warpflow/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warpflow/errors.hpp"

namespace warpflow {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr ParityPair kEvenEven{Parity::even, Parity::even};
constexpr ParityPair kOddOdd{Parity::odd, Parity::odd};

// Everything one right-hand-side evaluation produces, including the pieces
// the step-size bound needs.
struct Evaluation {
    FlowRates rates;
    SDerivs d;
    double ds_min = 0.0;
    double drift_bound = 0.0;  // B
    double k_max = 0.0;
};

Evaluation evaluate(const Profile& p, Gauge gauge) {
    Evaluation e;
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    const double n2 = p.n - 2, n3 = p.n - 3;
    s_derivatives(p, e.d);
    const SDerivs& d = e.d;
    std::vector<double> kt, k1, k2, l;
    curvature_values(p, d, kt, k1, k2, l);

    FlowRates& r = e.rates;
    r.chi.resize(nc);
    r.psi.resize(nc);
    r.phi.resize(nc);
    r.drift.assign(nc, 0.0);
    std::vector<double> rc11(nc);
    for (int i = 0; i < nc; ++i) {
        rc11[i] = kt[i] + n2 * k1[i];
        r.psi[i] = -p.psi[i] * (kt[i] + n2 * k2[i]);
        r.phi[i] = -p.phi[i] * (k1[i] + k2[i] + n3 * l[i]);
        e.k_max = std::max({e.k_max, std::abs(kt[i]), std::abs(k1[i]), std::abs(k2[i]), std::abs(l[i])});
    }
    r.psi[m] = 0.0;
    r.phi[0] = 0.0;

    if (gauge == Gauge::coordinate) {
        for (int i = 0; i < nc; ++i) r.chi[i] = -p.chi[i] * rc11[i];
    } else {
        // V_s = Rc11 + c with V = 0 at both ends keeps chi_t / chi uniform.
        std::vector<double> q(nc), cum(nc);
        for (int i = 0; i < nc; ++i) q[i] = rc11[i] * d.J[i];
        cumulative_integral_xi(g, q, kEvenEven, cum);
        const double total = cum[m];
        for (int i = 1; i < m; ++i) {
            r.drift[i] = cum[i] - g.nodes[i] / kHalfPi * total;
            r.psi[i] += r.drift[i] * d.psi_s[i];
            r.phi[i] += r.drift[i] * d.phi_s[i];
        }
        const double rate = -total / kHalfPi;
        for (int i = 0; i < nc; ++i) r.chi[i] = rate;
    }

    e.ds_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nc; ++i) e.ds_min = std::min(e.ds_min, g.h * d.J[i]);
    for (int i = 1; i < m; ++i) {
        const double ds = g.h * d.J[i];
        const double a = std::abs(d.psi_s[i] / p.psi[i]), b = std::abs(d.phi_s[i] / p.phi[i]);
        const double coeff = a + n2 * b + 2.0 * n3 * b + std::abs(r.drift[i]);
        e.drift_bound = std::max(e.drift_bound, ds * coeff);
    }
    return e;
}

double explicit_bound(const Evaluation& e, double cfl) {
    return cfl * e.ds_min * e.ds_min / (2.0 * (1.0 + e.drift_bound));
}

// The implicit part carries diffusion and every drift, so what is left
// explicit moves on the curvature time scale; the square-root term covers
// the chi-psi coupling through the Jacobian.
double imex_bound(const Evaluation& e, double cfl) {
    const double k = std::max(e.k_max, 1e-300);
    return cfl * std::min(0.1 / k, 0.5 * e.ds_min / std::sqrt(k));
}

double bound_for(const Evaluation& e, double cfl, Integrator integ) {
    return integ == Integrator::heun ? explicit_bound(e, cfl) : imex_bound(e, cfl);
}

void check_cfl(double cfl) {
    if (!(cfl > 0.0) || !(cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
}

bool positive(const Profile& p) {
    const int m = p.grid.last();
    for (int i = 0; i <= m; ++i) {
        if (!(p.chi[i] > 0.0)) return false;
        if (i < m && !(p.psi[i] > 0.0)) return false;
        if (i > 0 && !(p.phi[i] > 0.0)) return false;
    }
    return true;
}

bool finite(const Profile& p) {
    for (const auto* v : {&p.chi, &p.psi, &p.phi}) {
        for (double x : *v) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

void pin_endpoints(Profile& p) {
    p.psi.back() = 0.0;
    p.phi.front() = 0.0;
}

// Solve the tridiagonal system with sub a, diagonal b, super c in place.
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& rhs) {
    const size_t n = b.size();
    for (size_t i = 1; i < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= b[n - 1];
    for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

// Second-order operator f_ss + q f_s on the mesh, frozen at the current Jacobian.
struct Tridiag {
    std::vector<double> lo, di, up;
};

Tridiag frozen_operator(const Grid& g, const SDerivs& d, const std::vector<double>& q) {
    const int nc = g.node_count;
    Tridiag t{std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.0)};
    const double h = g.h;
    for (int i = 1; i < nc - 1; ++i) {
        const double J = d.J[i], jx = d.J_xi[i];
        const double diff = 1.0 / (h * h * J * J);
        const double adv = (q[i] - jx / (J * J)) / (2.0 * h * J);
        t.lo[i] = diff - adv;
        t.up[i] = diff + adv;
        t.di[i] = -2.0 * diff;
    }
    return t;
}

FlowState imex_update(const FlowState& s, const Evaluation& e, double dt, Gauge gauge) {
    const Profile& p = s.profile;
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    const double n2 = p.n - 2, n3 = p.n - 3;
    const SDerivs& d = e.d;
    const auto& V = e.rates.drift;

    std::vector<double> q_psi(nc, 0.0), q_phi(nc, 0.0);
    for (int i = 1; i < m; ++i) {
        const double b = d.phi_s[i] / p.phi[i], a = d.psi_s[i] / p.psi[i];
        q_psi[i] = n2 * b + V[i];
        q_phi[i] = a + 2.0 * n3 * b + V[i];
    }
    auto solve = [&](const std::vector<double>& f, const std::vector<double>& rate, const std::vector<double>& q,
                     bool psi) {
        Tridiag A = frozen_operator(g, d, q);
        const double h2 = g.h * g.h;
        if (psi) {
            // Waist row: (n-1) f_ss with the even ghost; tip row holds psi = 0.
            const double c0 = (n2 + 1.0) * 2.0 / (h2 * d.J[0] * d.J[0]);
            A.di[0] = -c0;
            A.up[0] = c0;
        } else {
            // Tip row: 2 f_ss with the even ghost; waist row holds phi = 0.
            const double cm = 2.0 * 2.0 / (h2 * d.J[m] * d.J[m]);
            A.di[m] = -cm;
            A.lo[m] = cm;
        }
        std::vector<double> a(nc), b(nc), c(nc), rhs(nc);
        for (int i = 0; i < nc; ++i) {
            double af = A.di[i] * f[i];
            if (i > 0) af += A.lo[i] * f[i - 1];
            if (i < m) af += A.up[i] * f[i + 1];
            a[i] = -dt * A.lo[i];
            b[i] = 1.0 - dt * A.di[i];
            c[i] = -dt * A.up[i];
            rhs[i] = f[i] + dt * (rate[i] - af);
        }
        const int fixed = psi ? m : 0;
        a[fixed] = c[fixed] = 0.0;
        b[fixed] = 1.0;
        rhs[fixed] = 0.0;
        thomas(a, b, c, rhs);
        return rhs;
    };

    FlowState out;
    out.profile = p;
    out.profile.psi = solve(p.psi, e.rates.psi, q_psi, true);
    out.profile.phi = solve(p.phi, e.rates.phi, q_phi, false);
    for (int i = 0; i < nc; ++i) out.profile.chi[i] = p.chi[i] + dt * e.rates.chi[i];
    (void)gauge;
    pin_endpoints(out.profile);
    out.time = s.time + dt;
    out.step_index = s.step_index + 1;
    out.dt_last = dt;
    return out;
}

StepResult advance(const FlowState& s, const Evaluation& e0, double dt, const FlowConfig& cfg) {
    StepResult res;
    if (dt > bound_for(e0, 1.0, cfg.integrator) * (1.0 + 1e-12)) {
        res.status = StepStatus::rejected_stability;
        return res;
    }
    if (cfg.integrator == Integrator::imex) {
        res.state = imex_update(s, e0, dt, cfg.gauge);
    } else {
        const Profile& p = s.profile;
        const int nc = p.grid.node_count;
        Profile mid = p;
        for (int i = 0; i < nc; ++i) {
            mid.chi[i] += dt * e0.rates.chi[i];
            mid.psi[i] += dt * e0.rates.psi[i];
            mid.phi[i] += dt * e0.rates.phi[i];
        }
        pin_endpoints(mid);
        if (!finite(mid)) {
            res.status = StepStatus::non_finite;
            return res;
        }
        if (!positive(mid)) {
            res.status = StepStatus::rejected_positivity;
            return res;
        }
        Evaluation e1 = evaluate(mid, cfg.gauge);
        res.state.profile = p;
        Profile& q = res.state.profile;
        for (int i = 0; i < nc; ++i) {
            q.chi[i] += 0.5 * dt * (e0.rates.chi[i] + e1.rates.chi[i]);
            q.psi[i] += 0.5 * dt * (e0.rates.psi[i] + e1.rates.psi[i]);
            q.phi[i] += 0.5 * dt * (e0.rates.phi[i] + e1.rates.phi[i]);
        }
        pin_endpoints(q);
        res.state.time = s.time + dt;
        res.state.step_index = s.step_index + 1;
        res.state.dt_last = dt;
    }
    if (!finite(res.state.profile)) {
        res.status = StepStatus::non_finite;
    } else if (!positive(res.state.profile)) {
        res.status = StepStatus::rejected_positivity;
    }
    return res;
}

double margin_floor(const GeoSummary& g, double tol) { return -tol * g.curvature_scale; }

std::string first_violation(const GeoSummary& g, double tol) {
    static const char* ord[4] = {"K^T-K2", "K2-K1", "K1-L", "L"};
    static const char* grad[4] = {"K^T_s", "(K1)_s", "(K2)_s", "L_s"};
    const double floor = margin_floor(g, tol);
    for (int k = 0; k < 4; ++k) {
        if (g.ordering_margins[k] < floor) {
            return std::string("ordering margin ") + ord[k] + " = " + std::to_string(g.ordering_margins[k]);
        }
        if (g.gradient_margins[k] < floor) {
            return std::string("gradient margin ") + grad[k] + " = " + std::to_string(g.gradient_margins[k]);
        }
    }
    return {};
}

void finish_extinction(FlowTrajectory& traj, const FlowConfig& cfg) {
    traj.termination = TerminationReason::extinction;
    traj.extinction_time = extrapolate_extinction(traj.summaries, cfg.extinction_fit_points);
    apply_extinction_shift(traj);
}

FlowTrajectory continue_run(FlowTrajectory traj, const FlowConfig& cfg, const FlowObserver& observer) {
    check_cfl(cfg.cfl);
    if (cfg.monitor_every < 1 || cfg.snapshot_every < 1) throw ConfigError("monitor cadences must be positive");
    if (cfg.max_rejections < 0) throw ConfigError("max_rejections must be non-negative");
    if (cfg.extinction_fit_points < 3) throw ConfigError("extinction fit needs at least three points");
    FlowState state = traj.last;
    const Profile& shape = state.profile;
    if (cfg.gauge == Gauge::arclength) {
        const auto [lo, hi] = std::minmax_element(shape.chi.begin(), shape.chi.end());
        if (*hi - *lo > 1e-12 * *hi) throw ConfigError("arclength gauge needs chi uniform in r");
    }

    auto keep_going = [&](const GeoSummary& g) -> bool {
        if (g.area < cfg.area_floor * traj.initial_area) {
            finish_extinction(traj, cfg);
            traj.message = "area floor reached";
            return false;
        }
        if (g.curvature_scale > cfg.curvature_cap * traj.initial_curvature) {
            finish_extinction(traj, cfg);
            traj.message = "curvature cap reached";
            return false;
        }
        return true;
    };

    auto record = [&](const FlowState& st) -> bool {
        GeoSummary g = geometric_summary(st.profile, st.time, cfg.summary);
        traj.summaries.push_back(g);
        if ((traj.summaries.size() - 1) % static_cast<size_t>(cfg.snapshot_every) == 0) traj.states.push_back(st);
        if (cfg.monitor_invariants) {
            std::string v = first_violation(g, cfg.ordering_tol);
            if (!v.empty()) {
                traj.termination = TerminationReason::invariant_violation;
                traj.message = v + " at t = " + std::to_string(st.time);
                return false;
            }
        }
        if (observer && !observer(st, g, traj)) {
            traj.termination = TerminationReason::t_end_reached;
            traj.message = "stopped by observer";
            return false;
        }
        return keep_going(g);
    };

    // A checkpoint taken at the final summary of a run must not step past it.
    if (!traj.summaries.empty() && !keep_going(traj.summaries.back())) {
        traj.last = state;
        return traj;
    }
    if (traj.summaries.empty()) {
        GeoSummary g0 = geometric_summary(state.profile, state.time, cfg.summary);
        traj.initial_area = g0.area;
        traj.initial_curvature = g0.curvature_scale;
        if (!record(state)) {
            traj.last = state;
            return traj;
        }
    }

    while (true) {
        if (state.time >= cfg.t_end) {
            traj.termination = TerminationReason::t_end_reached;
            break;
        }
        if (state.step_index >= cfg.max_steps) {
            traj.termination = TerminationReason::numeric_failure;
            traj.message = "step limit reached";
            break;
        }
        Evaluation e;
        try {
            e = evaluate(state.profile, cfg.gauge);
        } catch (const NumericError& err) {
            traj.termination = TerminationReason::numeric_failure;
            traj.message = err.what();
            break;
        }
        double dt = bound_for(e, cfg.cfl, cfg.integrator);
        bool clipped = false;
        if (state.time + dt >= cfg.t_end) {
            dt = cfg.t_end - state.time;
            clipped = true;
        }
        StepResult res;
        int tries = 0;
        for (;; ++tries) {
            try {
                res = advance(state, e, dt, cfg);
            } catch (const NumericError& err) {
                res.status = StepStatus::non_finite;
                traj.message = err.what();
            }
            if (res.status == StepStatus::accepted || res.status == StepStatus::non_finite) break;
            if (tries >= cfg.max_rejections) break;
            dt *= 0.5;
            clipped = false;
            ++traj.rejected_steps;
        }
        if (res.status != StepStatus::accepted) {
            traj.termination = TerminationReason::numeric_failure;
            if (traj.message.empty()) {
                traj.message = std::string("step failed: ") + to_string(res.status) + " at t = " +
                               std::to_string(state.time);
            }
            break;
        }
        if (clipped) res.state.time = cfg.t_end;
        state = std::move(res.state);
        const bool at_end = state.time >= cfg.t_end;
        if (state.step_index % cfg.monitor_every == 0 || at_end) {
            traj.last = state;
            if (!record(state)) break;
        }
    }
    traj.last = state;
    return traj;
}

}  // namespace

const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::extinction: return "extinction";
        case TerminationReason::t_end_reached: return "t_end_reached";
        case TerminationReason::invariant_violation: return "invariant_violation";
        case TerminationReason::numeric_failure: return "numeric_failure";
    }
    return "unknown";
}

const char* to_string(StepStatus s) {
    switch (s) {
        case StepStatus::accepted: return "accepted";
        case StepStatus::rejected_stability: return "rejected_stability";
        case StepStatus::rejected_positivity: return "rejected_positivity";
        case StepStatus::non_finite: return "non_finite";
    }
    return "unknown";
}

FlowRates rhs(const Profile& p, Gauge gauge) {
    check_profile(p);
    return evaluate(p, gauge).rates;
}

double adaptive_dt(const Profile& p, double cfl, Gauge gauge) {
    check_cfl(cfl);
    check_profile(p);
    return explicit_bound(evaluate(p, gauge), cfl);
}

StepResult step(const FlowState& s, double dt, const FlowConfig& cfg) {
    check_profile(s.profile);
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    return advance(s, evaluate(s.profile, cfg.gauge), dt, cfg);
}

FlowTrajectory run(const Profile& initial, const FlowConfig& cfg, const FlowObserver& observer) {
    check_profile(initial);
    if (cfg.integrator == Integrator::imex && initial.grid.order != 2) {
        throw ConfigError("the IMEX integrator pairs with the second-order scheme");
    }
    FlowTrajectory traj;
    traj.gauge = cfg.gauge;
    traj.last.profile = initial;
    return continue_run(std::move(traj), cfg, observer);
}

FlowTrajectory resume(FlowTrajectory partial, const FlowConfig& cfg, const FlowObserver& observer) {
    check_profile(partial.last.profile);
    if (partial.summaries.empty()) throw ConfigError("resume needs a trajectory with at least one summary");
    partial.termination = TerminationReason::t_end_reached;
    partial.message.clear();
    return continue_run(std::move(partial), cfg, observer);
}

double extrapolate_extinction(const std::vector<GeoSummary>& summaries, int points) {
    const int n = static_cast<int>(summaries.size());
    if (n < 3) throw NumericError("too few summaries to extrapolate extinction");
    const int k = std::min(points, n);
    // Least squares A ~ c0 + c1 u + c2 u^2 with u = t - t_last.
    const double t_last = summaries.back().time;
    double s[5] = {0, 0, 0, 0, 0}, b[3] = {0, 0, 0};
    double a_scale = 0.0;
    for (int i = n - k; i < n; ++i) a_scale = std::max(a_scale, summaries[i].area);
    for (int i = n - k; i < n; ++i) {
        double u = summaries[i].time - t_last, a = summaries[i].area / a_scale, pw = 1.0;
        for (int j = 0; j < 5; ++j) {
            s[j] += pw;
            if (j < 3) b[j] += pw * a;
            pw *= u;
        }
    }
    double m[3][4] = {{s[0], s[1], s[2], b[0]}, {s[1], s[2], s[3], b[1]}, {s[2], s[3], s[4], b[2]}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        std::swap(m[col], m[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    const double c0 = m[0][3] / m[0][0], c1 = m[1][3] / m[1][1], c2 = m[2][3] / m[2][2];
    if (!(c1 < 0.0)) throw NumericError("area is not decreasing near extinction");
    // Root of c0 + c1 u + c2 u^2 nearest the linear estimate.
    double u_lin = -c0 / c1;
    double root = u_lin;
    if (std::abs(c2) > 1e-14 * std::abs(c1) / std::max(u_lin, 1e-300)) {
        double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            double q = -0.5 * (c1 - std::sqrt(disc));  // c1 < 0: stable form
            double r1 = q / c2, r2 = c0 / q;
            root = std::abs(r1 - u_lin) < std::abs(r2 - u_lin) ? r1 : r2;
        }
    }
    return t_last + root;
}

double shifted_time(double t_sim, double extinction_time) { return t_sim - extinction_time; }

void apply_extinction_shift(FlowTrajectory& traj) {
    if (!traj.extinction_time) return;
    for (auto& g : traj.summaries) g.time_ext = shifted_time(g.time, *traj.extinction_time);
}

namespace {

// Laplacian at interior nodes of a function with known s-derivatives.
double interior_laplacian(double f_s, double f_ss, double a, double b, double n2) {
    return f_ss + (a + n2 * b) * f_s;
}

}  // namespace

CurvatureRates curvature_evolution_rhs(const Profile& p) {
    check_profile(p);
    const Grid& g = p.grid;
    const int nc = g.node_count, m = nc - 1;
    const double n2 = p.n - 2, n3 = p.n - 3;
    SDerivs d;
    s_derivatives(p, d);
    CurvatureField c = sectional_curvatures(p, d);
    const auto& kt = c.k_top;
    const auto& k1 = c.k1_perp;
    const auto& k2 = c.k2_perp;
    const auto& l = c.l_sec;
    // Quotient forms of K^T - K2 and K2 - K1; the (phi_s/phi)^2 factors amplify raw differences near the waist.
    const OrderingField ord = ordering_field(p, c, d);

    auto s_pair = [&](const std::vector<double>& f, ParityPair par, std::vector<double>& fs,
                      std::vector<double>& fss) {
        std::vector<double> f1(nc), f2(nc);
        diff1_xi(g, f, par, f1);
        diff2_xi(g, f, par, f2);
        fs.resize(nc);
        fss.resize(nc);
        for (int i = 0; i < nc; ++i) {
            double inv = 1.0 / d.J[i];
            fs[i] = f1[i] * inv;
            fss[i] = (f2[i] - d.J_xi[i] * inv * f1[i]) * inv * inv;
        }
    };

    CurvatureRates r;
    for (auto* v : {&r.k_top, &r.k1_perp, &r.k2_perp, &r.l_sec, &r.k_top_s, &r.k1_perp_s}) v->assign(nc, 0.0);
    std::vector<double> fs, fss;
    const std::vector<double>* in[4] = {&kt, &k1, &k2, &l};
    std::vector<std::vector<double>> lap(4);
    for (int k = 0; k < 4; ++k) {
        s_pair(*in[k], kEvenEven, fs, fss);
        lap[k].resize(nc);
        for (int i = 1; i < m; ++i) {
            double a = d.psi_s[i] / p.psi[i], b = d.phi_s[i] / p.phi[i];
            lap[k][i] = interior_laplacian(fs[i], fss[i], a, b, n2);
        }
    }
    // Gradient arrays from differencing; these are odd at both ends.
    std::vector<std::vector<double>> lap_grad(2);
    const std::vector<double>* grads[2] = {&c.k_top_s, &c.k1_perp_s};
    for (int k = 0; k < 2; ++k) {
        s_pair(*grads[k], kOddOdd, fs, fss);
        lap_grad[k].resize(nc);
        for (int i = 1; i < m; ++i) {
            double a = d.psi_s[i] / p.psi[i], b = d.phi_s[i] / p.phi[i];
            lap_grad[k][i] = interior_laplacian(fs[i], fss[i], a, b, n2);
        }
    }

    for (int i = 1; i < m; ++i) {
        const double a = d.psi_s[i] / p.psi[i], b = d.phi_s[i] / p.phi[i];
        const double a2 = a * a, b2 = b * b;
        const double x = ord.x_raw[i], y = ord.y_raw[i], z = k1[i] - l[i];
        r.k_top[i] = lap[0][i] + 2.0 * (kt[i] * kt[i] + n2 * k1[i] * k2[i]) - 2.0 * n2 * b2 * x;
        r.k1_perp[i] = lap[1][i] + 2.0 * (k1[i] * k1[i] + kt[i] * k2[i] + n3 * k1[i] * l[i]) + 2.0 * a2 * y -
                       2.0 * n3 * b2 * z;
        r.k2_perp[i] = lap[2][i] + 2.0 * (k2[i] * k2[i] + kt[i] * k1[i] + n3 * k2[i] * l[i]) - 2.0 * a2 * y +
                       2.0 * b2 * x;
        r.l_sec[i] = lap[3][i] + 2.0 * (k1[i] * k1[i] + k2[i] * k2[i] + n3 * l[i] * l[i]) + 4.0 * b2 * z;

        const double kts = c.k_top_s[i], k1s = c.k1_perp_s[i], k2s = c.k2_perp_s[i], ls = c.l_sec_s[i];
        r.k_top_s[i] = lap_grad[0][i] + (4.0 * kt[i] - a2 - 3.0 * n2 * b2) * kts + 2.0 * n2 * k2[i] * k1s +
                       2.0 * n2 * (k1[i] + b2) * k2s + 4.0 * n2 * b * (b2 + k1[i]) * x;
        // Differentiated from the K1 equation; three coefficients differ from the printed form.
        r.k1_perp_s[i] = lap_grad[1][i] + (4.0 * k1[i] + 2.0 * n3 * l[i] - 3.0 * a2 - (3.0 * p.n - 8.0) * b2) * k1s +
                         2.0 * k2[i] * kts + 2.0 * (kt[i] + a2) * k2s + 2.0 * n3 * (k1[i] + b2) * ls -
                         4.0 * a * (kt[i] + a2) * y + 4.0 * n3 * b * (k1[i] + b2) * z;
    }
    // Endpoint values: curvature rates are even there; the gradients vanish.
    for (auto* v : {&r.k_top, &r.k1_perp, &r.k2_perp, &r.l_sec}) {
        std::array<double, 3> dist{1.0, 2.0, 3.0}, lo{(*v)[1], (*v)[2], (*v)[3]},
            hi{(*v)[m - 1], (*v)[m - 2], (*v)[m - 3]};
        (*v)[0] = extrapolate_even(dist, lo);
        (*v)[m] = extrapolate_even(dist, hi);
    }
    return r;
}

}  // namespace warpflow
