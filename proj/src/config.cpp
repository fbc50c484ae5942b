#include "warpflow/config.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "warpflow/initial_data.hpp"

namespace warpflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (v.empty() || end != begin + v.size()) throw ConfigError("'" + key + "' needs a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 2e9) throw ConfigError("'" + key + "' needs an integer, got '" + v + "'");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("'" + key + "' needs true or false, got '" + v + "'");
}

void validate(const RunConfig& rc) {
    if (rc.n < 3) throw ConfigError("n must be at least 3");
    if (rc.initial == InitialKind::sausage && !(rc.tau < 0.0)) throw ConfigError("tau must be negative");
    for (double t : rc.taus) {
        if (!(t < 0.0)) throw ConfigError("every sweep tau must be negative");
    }
    if (rc.initial == InitialKind::round_sphere && !(rc.rho > 0.0)) throw ConfigError("rho must be positive");
    if (rc.initial == InitialKind::hypersausage) {
        if (rc.n != 3) throw ConfigError("the hypersausage exists only for n = 3");
        if (!(rc.t0 < 0.0)) throw ConfigError("t0 must be negative");
    }
    if (rc.node_count < kMinNodes) throw ConfigError("node_count must be at least " + std::to_string(kMinNodes));
    if (rc.order != 2 && rc.order != 4) throw ConfigError("order must be 2 or 4");
    if (!(rc.cfl > 0.0 && rc.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    if (rc.gauge != "auto" && rc.gauge != "coordinate" && rc.gauge != "arclength") {
        throw ConfigError("gauge must be auto, coordinate or arclength");
    }
    if (!(rc.stretch >= 0.0) || !(rc.stretch + std::abs(rc.bias) < 1.0)) {
        throw ConfigError("mesh stretch needs stretch >= 0 and stretch + |bias| < 1");
    }
    if (rc.imex && rc.order != 2) throw ConfigError("imex needs order = 2");
    if (rc.monitor_every < 1 || rc.snapshot_every < 1) throw ConfigError("cadences must be positive");
    if (rc.checkpoint_every < 0) throw ConfigError("checkpoint_every must be non-negative");
    if (!(rc.t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (!rc.run_to_extinction && std::isinf(rc.t_end)) throw ConfigError("run_to_extinction = false needs t_end");
    if (!(rc.area_floor > 0.0 && rc.area_floor < 1.0)) throw ConfigError("area_floor must lie in (0, 1)");
    if (!(rc.curvature_cap > 1.0)) throw ConfigError("curvature_cap must exceed 1");
    if (!(rc.ordering_tol >= 0.0)) throw ConfigError("ordering_tol must be non-negative");
    if (!(rc.gap_window > 0.0)) throw ConfigError("gap_window must be positive");
    if (!(rc.smooth_tol > 0.0)) throw ConfigError("smooth_tol must be positive");
    if (!(rc.sweep_offset >= 0.0)) throw ConfigError("sweep_offset must be non-negative");
    if (rc.output.empty()) throw ConfigError("output must not be empty");
}

}  // namespace

const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::sausage: return "sausage";
        case InitialKind::round_sphere: return "round_sphere";
        case InitialKind::hypersausage: return "hypersausage";
    }
    return "unknown";
}

RunConfig parse_config(const std::string& text) {
    RunConfig rc;
    rc.text = text;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"initial",
         [&](auto&, auto& v) {
             if (v == "sausage") rc.initial = InitialKind::sausage;
             else if (v == "round_sphere") rc.initial = InitialKind::round_sphere;
             else if (v == "hypersausage") rc.initial = InitialKind::hypersausage;
             else throw ConfigError("unknown initial data '" + v + "'");
         }},
        {"n", [&](auto& k, auto& v) { rc.n = to_int(k, v); }},
        {"tau", [&](auto& k, auto& v) { rc.tau = to_double(k, v); }},
        {"rho", [&](auto& k, auto& v) { rc.rho = to_double(k, v); }},
        {"t0", [&](auto& k, auto& v) { rc.t0 = to_double(k, v); }},
        {"node_count", [&](auto& k, auto& v) { rc.node_count = to_int(k, v); }},
        {"order", [&](auto& k, auto& v) { rc.order = to_int(k, v); }},
        {"cfl", [&](auto& k, auto& v) { rc.cfl = to_double(k, v); }},
        {"gauge", [&](auto&, auto& v) { rc.gauge = v; }},
        {"stretch", [&](auto& k, auto& v) { rc.stretch = to_double(k, v); }},
        {"bias", [&](auto& k, auto& v) { rc.bias = to_double(k, v); }},
        {"imex", [&](auto& k, auto& v) { rc.imex = to_bool(k, v); }},
        {"monitor_every", [&](auto& k, auto& v) { rc.monitor_every = to_int(k, v); }},
        {"snapshot_every", [&](auto& k, auto& v) { rc.snapshot_every = to_int(k, v); }},
        {"t_end", [&](auto& k, auto& v) { rc.t_end = to_double(k, v); }},
        {"run_to_extinction", [&](auto& k, auto& v) { rc.run_to_extinction = to_bool(k, v); }},
        {"area_floor", [&](auto& k, auto& v) { rc.area_floor = to_double(k, v); }},
        {"curvature_cap", [&](auto& k, auto& v) { rc.curvature_cap = to_double(k, v); }},
        {"ordering_tol", [&](auto& k, auto& v) { rc.ordering_tol = to_double(k, v); }},
        {"gap_window", [&](auto& k, auto& v) { rc.gap_window = to_double(k, v); }},
        {"smooth_tol", [&](auto& k, auto& v) { rc.smooth_tol = to_double(k, v); }},
        {"monitor_invariants", [&](auto& k, auto& v) { rc.monitor_invariants = to_bool(k, v); }},
        {"checkpoint_every", [&](auto& k, auto& v) { rc.checkpoint_every = to_int(k, v); }},
        {"plots", [&](auto& k, auto& v) { rc.plots = to_bool(k, v); }},
        {"output", [&](auto&, auto& v) { rc.output = v; }},
        {"sweep_offset", [&](auto& k, auto& v) { rc.sweep_offset = to_double(k, v); }},
        {"taus",
         [&](auto& k, auto& v) {
             rc.taus.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) rc.taus.push_back(to_double(k, trim(item)));
         }},
    };
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (seen.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        seen[key] = lineno;
        it->second(key, value);
    }
    if (seen.count("t_end") && !seen.count("run_to_extinction")) rc.run_to_extinction = false;
    if (rc.run_to_extinction && seen.count("t_end")) {
        throw ConfigError("t_end and run_to_extinction = true are mutually exclusive");
    }
    validate(rc);
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

Gauge resolved_gauge(const RunConfig& rc) {
    if (rc.gauge == "coordinate") return Gauge::coordinate;
    if (rc.gauge == "arclength") return Gauge::arclength;
    return rc.initial == InitialKind::sausage ? Gauge::arclength : Gauge::coordinate;
}

FlowConfig flow_config(const RunConfig& rc) {
    FlowConfig fc;
    fc.gauge = resolved_gauge(rc);
    fc.integrator = rc.imex ? Integrator::imex : Integrator::heun;
    fc.cfl = rc.cfl;
    fc.t_end = rc.run_to_extinction ? std::numeric_limits<double>::infinity() : rc.t_end;
    fc.monitor_every = rc.monitor_every;
    fc.snapshot_every = rc.snapshot_every;
    fc.area_floor = rc.area_floor;
    fc.curvature_cap = rc.curvature_cap;
    // The orderings are theorems for sausage data only; on a round sphere every margin is
    // zero and the monitor would trip on discretization noise.
    fc.monitor_invariants = rc.monitor_invariants && rc.initial == InitialKind::sausage;
    fc.ordering_tol = rc.ordering_tol;
    fc.summary.gap_window = rc.gap_window;
    return fc;
}

Profile initial_profile(const RunConfig& rc) {
    const Grid g = make_stretched_grid(rc.node_count, rc.stretch, rc.order, rc.bias);
    switch (rc.initial) {
        case InitialKind::sausage: return sausage_slice(rc.tau, rc.n, g, resolved_gauge(rc));
        case InitialKind::round_sphere: return round_sphere(rc.rho, g, rc.n);
        case InitialKind::hypersausage: return hypersausage_exact(rc.t0, g);
    }
    throw ConfigError("unknown initial data");
}

std::vector<ProvenanceEntry> initial_provenance(const RunConfig& rc) {
    ProvenanceEntry e;
    e.generator = to_string(rc.initial);
    e.params["n"] = std::to_string(rc.n);
    e.params["node_count"] = std::to_string(rc.node_count);
    e.params["order"] = std::to_string(rc.order);
    switch (rc.initial) {
        case InitialKind::sausage:
            e.params["tau"] = hex_double(rc.tau);
            e.params["gauge"] = resolved_gauge(rc) == Gauge::arclength ? "arclength" : "coordinate";
            break;
        case InitialKind::round_sphere: e.params["rho"] = hex_double(rc.rho); break;
        case InitialKind::hypersausage: e.params["t0"] = hex_double(rc.t0); break;
    }
    return {e};
}

RunConfig member_config(const RunConfig& rc, double tau) {
    RunConfig m = rc;
    m.tau = tau;
    m.taus.clear();
    std::istringstream in(rc.text);
    std::string line;
    m.text.clear();
    while (std::getline(in, line)) {
        const std::string key = trim(line.substr(0, line.find('=')));
        if (key == "tau" || key == "taus") continue;
        m.text += line + "\n";
    }
    m.text += "tau = " + hex_double(tau) + "\n";
    return m;
}

}  // namespace warpflow
