// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "warpflow/commands.hpp"
#include "warpflow/initial_data.hpp"

using namespace warpflow;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("%s  %2d  %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

// Worst gated record whose name starts with one of `prefixes`; empty detail when none matched.
struct Gate {
    bool pass = true;
    int count = 0;
    std::string detail;
};

Gate collect(const AuditReport& rep, std::initializer_list<const char*> prefixes) {
    Gate g;
    for (const auto& r : rep.records) {
        if (!r.gated) continue;
        bool match = false;
        for (const char* p : prefixes) match = match || starts_with(r.name, p);
        if (!match) continue;
        ++g.count;
        if (!r.pass) {
            g.pass = false;
            g.detail += r.name + " measured " + fmt(r.measured) + "; ";
        }
    }
    if (g.count == 0) g.pass = false;
    return g;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MatrixRun {
    int n;
    double tau;
    FlowTrajectory traj;
    std::string error;
};

std::vector<MatrixRun> run_matrix(std::vector<MatrixRun> jobs) {
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
    for (int w = 1; w < std::min<int>(worker_count(), static_cast<int>(jobs.size())); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return jobs;
}

std::string tag(const MatrixRun& r) { return "(tau=" + fmt(r.tau) + ", n=" + std::to_string(r.n) + ")"; }

Profile random_candidate(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nodes(kMinNodes, 160), kind(0, 3), dim(3, 8), order(0, 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Grid g = make_stretched_grid(nodes(rng), 0.5 * u(rng), order(rng) ? 4 : 2, 0.2 * (u(rng) - 0.5));
    Profile p;
    switch (kind(rng)) {
        case 0: p = sausage_slice(-0.5 - 49.5 * u(rng), dim(rng), g); break;
        case 1: p = sausage_slice(-0.5 - 9.5 * u(rng), dim(rng), g, Gauge::arclength); break;
        case 2: p = round_sphere(0.1 + 5 * u(rng), g, dim(rng)); break;
        default: p = hypersausage_exact(-0.05 - 5 * u(rng), g); break;
    }
    const double c = std::exp(4 * (u(rng) - 0.5));
    for (auto* v : {&p.chi, &p.psi, &p.phi}) {
        for (double& x : *v) x *= c;
    }
    return p;
}

// Candidates that fail validation are redrawn; coarse meshes cannot carry sharp slices.
Profile random_profile(std::mt19937_64& rng, int& rejected) {
    for (;;) {
        Profile p = random_candidate(rng);
        if (validate_smoothness(p, 1e-4).pass) return p;
        ++rejected;
    }
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void criterion_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    OracleConfig c;
    c.ladder = {101, 201, 401};
    OracleTable t = oracle_error(c);
    const double secs = seconds_since(t0);
    const double err = t.rows.back().relative_error;
    const bool pass = err <= 1e-3 && t.observed_order >= 1.8 && secs <= 120.0;
    report(1, "hypersausage oracle convergence", pass,
           "error " + fmt(err) + " at N=401 (<= 1e-3), order " + fmt(t.observed_order) + " (>= 1.8), ladder " +
               fmt(secs) + " s (<= 120)");
}

void criterion_round_sphere() {
    FlowConfig fc;
    fc.monitor_invariants = false;
    fc.snapshot_every = std::numeric_limits<int>::max();
    FlowTrajectory tr = run(round_sphere(1.0, make_uniform_grid(401), 3), fc);
    const double T = tr.extinction_time.value_or(std::nan(""));
    const double rel = std::abs(T - 0.25) / 0.25;
    report(2, "round-sphere extinction", rel <= 0.01, "T = " + fmt(T) + ", relative error " + fmt(rel) + " (<= 1%)");
}

void criteria_matrix() {
    std::vector<MatrixRun> jobs;
    for (int n : {3, 4}) {
        for (double tau : {-2.0, -5.0, -10.0}) jobs.push_back({n, tau, {}, {}});
    }
    jobs.push_back({3, -20.0, {}, {}});  // sweep member for criterion 8
    const auto t0 = std::chrono::steady_clock::now();
    jobs = run_matrix(jobs);
    std::cout << "      sausage runs at N=401 took " << fmt(seconds_since(t0)) << " s\n";

    Gate bracket, area, order, hb, tip;
    std::string bracket_vals, plumbing;
    bool plumbing_ok = true;
    for (const auto& j : jobs) {
        if (!j.error.empty()) {
            plumbing_ok = false;
            plumbing += tag(j) + ": " + j.error + "; ";
        }
    }
    auto merge = [](Gate& into, const Gate& g, const std::string& where) {
        into.count += g.count;
        if (!g.pass) {
            into.pass = false;
            into.detail += where + " " + (g.detail.empty() ? "no records" : g.detail);
        }
    };
    for (const auto& j : jobs) {
        if (!j.error.empty() || j.tau == -20.0) continue;
        AuditReport b = bounds_audit(j.traj, j.tau, j.n);
        merge(bracket, collect(b, {"extinction_bracket"}), tag(j));
        bracket_vals += tag(j) + " T=" + fmt(*j.traj.extinction_time) + " ";
        merge(area, collect(b, {"area_lower", "area_upper"}), tag(j));
        merge(order, collect(ordering_audit(j.traj, 1e-6), {"margin "}), tag(j));
        if (j.tau == -10.0) {
            merge(hb, collect(b, {"h_upper", "h_lower"}), tag(j));
            if (j.n == 3) merge(tip, collect(b, {"tip_radius"}), tag(j));
        }
    }
    auto line = [&](int id, const std::string& title, const Gate& g, int expected, const std::string& ok) {
        const bool pass = plumbing_ok && g.pass && g.count == expected;
        report(id, title, pass,
               pass ? ok : plumbing + g.detail + " (" + std::to_string(g.count) + "/" + std::to_string(expected) +
                               " records)");
    };
    line(3, "extinction-time bracket", bracket, 6, bracket_vals);
    line(4, "area bounds", area, 12, "-8 pi t <= A <= -8 pi (n-1) t at every monitor step of 6 runs");
    line(5, "preserved curvature conditions", order, 48, "8 margins >= -1e-6 max|K| at every monitor step of 6 runs");
    line(6, "h bounds", hb, 4, "h <= 1 + 1e-6 and the lower bound for t < -(n-1) on the tau=-10 runs");
    line(7, "tip radius growth", tip, 1, "d >= log(-t/(2(n-1)))/(4(n-1)) - 1e-3 for t <= -2(n-1), tau=-10, n=3");

    std::vector<SweepMember> sweep;
    for (const auto& j : jobs) {
        if (j.n != 3 || j.tau == -2.0) continue;
        SweepMember m;
        m.tau = j.tau;
        m.n = 3;
        m.ok = j.error.empty();
        m.error = j.error;
        m.traj = j.traj;
        sweep.push_back(std::move(m));
    }
    AuditReport asym = asymptotic_audit(sweep);
    Gate g = collect(asym, {"sweep_complete", "lambda_increasing", "lambda_floor", "girth_early",
                            "cylinder_gap_decreasing", "cigar_gap_decreasing"});
    std::string detail;
    for (const auto& r : asym.records) {
        if (r.name == "lambda_floor" || r.name == "girth_early") detail += r.name + " " + fmt(r.measured) + " ";
    }
    report(8, "asymptotics sweep", g.pass && g.count == 6,
           g.pass ? detail + "(lambda_hat and both gaps monotone over tau in {-5,-10,-20})" : g.detail);
}

void criterion_residuals() {
    std::ostringstream log;
    AuditReport r = verify_suite("residuals", log);
    Gate hyper = collect(r, {"hypersausage_"});
    Gate sphere = collect(r, {"round_sphere_"});
    std::string orders;
    for (const auto& rec : r.records) {
        if (starts_with(rec.name, "hypersausage_")) orders += fmt(rec.measured) + " ";
    }
    report(9, "evolution-equation residuals", hyper.pass && hyper.count == 6 && sphere.pass && sphere.count == 3,
           hyper.pass && sphere.pass ? "hypersausage orders " + orders + "(>= 1.8); round sphere at rounding level"
                                     : hyper.detail + sphere.detail);
}

void criterion_infrastructure() {
    std::mt19937_64 rng(1016);
    int exact = 0, rejected = 0;
    for (int k = 0; k < 1000; ++k) {
        Profile p = random_profile(rng, rejected);
        ProfileRecord r = decode_profile(encode_profile(p, {ProvenanceEntry{"random", {}, {}}}), 1e-4);
        if (bit_equal(r.profile.chi, p.chi) && bit_equal(r.profile.psi, p.psi) && bit_equal(r.profile.phi, p.phi) &&
            bit_equal(r.profile.grid.nodes, p.grid.nodes) && r.profile.n == p.n) {
            ++exact;
        }
    }

    // Library path: checkpoint taken at the middle summary, encoded, decoded, resumed.
    RunConfig rc = parse_config("initial = sausage\nn = 3\ntau = -2\nnode_count = 101\nplots = false\n");
    const FlowConfig fc = flow_config(rc);
    const Profile init = initial_profile(rc);
    FlowTrajectory full = run(init, fc);
    const size_t mid = full.summaries.size() / 2;
    std::string bytes;
    run(init, fc, [&](const FlowState& st, const GeoSummary&, const FlowTrajectory& tr) {
        if (tr.summaries.size() - 1 < mid) return true;
        Checkpoint c{schema_version(), rc.text, "unused", tr};
        c.trajectory.last = st;
        bytes = encode_checkpoint(c);
        return false;
    });
    FlowTrajectory resumed = resume(decode_checkpoint(bytes).trajectory, fc);
    const bool lib_same = summary_csv(resumed) == summary_csv(full);

    // File path: rolling checkpoint written by a run, resumed into a fresh directory.
    const fs::path dir = fs::temp_directory_path() / "warpflow_acceptance";
    fs::remove_all(dir);
    RunConfig rf = parse_config(rc.text + "checkpoint_every = " + std::to_string(mid) + "\n");
    execute_run(rf, (dir / "a").string());
    Checkpoint ck = decode_checkpoint(read_file((dir / "a/checkpoint.wfc").string()));
    const size_t at = ck.trajectory.summaries.size();
    execute_run(rf, (dir / "b").string(), &ck);
    const std::string a = read_file((dir / "a/summary.csv").string()), b = read_file((dir / "b/summary.csv").string());
    const bool file_same = a == b;
    fs::remove_all(dir);

    report(10, "infrastructure", exact == 1000 && lib_same && file_same,
           std::to_string(exact) + "/1000 bit-exact round trips (" + std::to_string(rejected) +
               " under-resolved draws redrawn); resume at summary " + std::to_string(mid) + "/" +
               std::to_string(full.summaries.size()) + " " + (lib_same ? "identical" : "DIFFERS") +
               "; file checkpoint at summary " + std::to_string(at) + " " + (file_same ? "identical" : "DIFFERS"));
}

template <class F>
void guarded(int id, const std::string& title, F f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, title, false, std::string("threw: ") + e.what());
    }
}

}  // namespace

// With arguments, only the named groups run (1, 2, 3 for criteria 3-8, 9, 10).
int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
    const auto t0 = std::chrono::steady_clock::now();
    if (want(1)) guarded(1, "hypersausage oracle convergence", criterion_oracle);
    if (want(2)) guarded(2, "round-sphere extinction", criterion_round_sphere);
    if (want(3)) guarded(3, "bounds matrix and sweep", criteria_matrix);
    if (want(9)) guarded(9, "evolution-equation residuals", criterion_residuals);
    if (want(10)) guarded(10, "infrastructure", criterion_infrastructure);
    std::printf("%s: %d failing, %.0f s\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures,
                seconds_since(t0));
    return failures ? 1 : 0;
}
