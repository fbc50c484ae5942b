#include "warpflow/persistence.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace warpflow {

using nlohmann::json;

namespace {

json hex_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(hex_double(x));
    return a;
}

std::vector<double> parse_hex_array(const json& j, const char* what) {
    if (!j.is_array()) throw DataError(std::string("field '") + what + "' is not an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_string()) throw DataError(std::string("field '") + what + "' holds a non-string entry");
        out.push_back(parse_hex_double(e.get<std::string>()));
    }
    return out;
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
    return *it;
}

void check_schema(const json& j, const char* kind) {
    const json& k = field(j, "kind");
    if (!k.is_string() || k.get<std::string>() != kind) {
        throw DataError(std::string("not a ") + kind + " record");
    }
    const json& v = field(j, "schema_version");
    if (!v.is_string()) throw DataError("schema_version is not a string");
    const std::string s = v.get<std::string>();
    int major = 0, minor = 0;
    if (std::sscanf(s.c_str(), "%d.%d", &major, &minor) != 2) throw DataError("bad schema_version '" + s + "'");
    if (major != kSchemaMajor) {
        throw DataError("schema_version " + s + " is not readable by this build (" + schema_version() + ")");
    }
}

json parse(const std::string& bytes) {
    try {
        return json::parse(bytes);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed record: ") + e.what());
    }
}

json mesh_json(const Grid& g) {
    return {{"kind", g.beta == 0.0 && g.bias == 0.0 ? "uniform" : "stretched"},
            {"node_count", g.node_count},
            {"order", g.order},
            {"beta", hex_double(g.beta)},
            {"bias", hex_double(g.bias)}};
}

Grid mesh_from_json(const json& j) {
    const int nc = field(j, "node_count").get<int>();
    const int order = field(j, "order").get<int>();
    const double beta = parse_hex_double(field(j, "beta").get<std::string>());
    const double bias = parse_hex_double(field(j, "bias").get<std::string>());
    try {
        return make_stretched_grid(nc, beta, order, bias);
    } catch (const ConfigError& e) {
        throw DataError(std::string("bad mesh descriptor: ") + e.what());
    }
}

json profile_body(const Profile& p) {
    return {{"n", p.n},
            {"node_count", p.grid.node_count},
            {"mesh", mesh_json(p.grid)},
            {"chi", hex_array(p.chi)},
            {"psi", hex_array(p.psi)},
            {"phi", hex_array(p.phi)}};
}

Profile profile_from_body(const json& j) {
    Profile p;
    p.n = field(j, "n").get<int>();
    p.grid = mesh_from_json(field(j, "mesh"));
    const int nc = field(j, "node_count").get<int>();
    if (nc != p.grid.node_count) throw DataError("node_count disagrees with the mesh descriptor");
    p.chi = parse_hex_array(field(j, "chi"), "chi");
    p.psi = parse_hex_array(field(j, "psi"), "psi");
    p.phi = parse_hex_array(field(j, "phi"), "phi");
    for (const auto* v : {&p.chi, &p.psi, &p.phi}) {
        if (static_cast<int>(v->size()) != nc) {
            throw DataError("array length " + std::to_string(v->size()) + " does not match node_count " +
                            std::to_string(nc));
        }
    }
    try {
        check_profile(p);
    } catch (const std::runtime_error& e) {
        throw DataError(e.what());
    }
    return p;
}

json state_json(const FlowState& s) {
    return {{"time", hex_double(s.time)},
            {"step_index", s.step_index},
            {"dt_last", hex_double(s.dt_last)},
            {"profile", profile_body(s.profile)}};
}

FlowState state_from_json(const json& j) {
    FlowState s;
    s.time = parse_hex_double(field(j, "time").get<std::string>());
    s.step_index = field(j, "step_index").get<long>();
    s.dt_last = parse_hex_double(field(j, "dt_last").get<std::string>());
    s.profile = profile_from_body(field(j, "profile"));
    return s;
}

// Decimal output for reports: non-finite values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string schema_version() { return std::to_string(kSchemaMajor) + "." + std::to_string(kSchemaMinor); }

std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) {
    if (s.empty()) throw DataError("empty number");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size()) throw DataError("bad number '" + s + "'");
    return v;
}

std::string digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string encode_profile(const Profile& p, const std::vector<ProvenanceEntry>& provenance) {
    check_profile(p);
    if (provenance.empty()) throw ConfigError("provenance chain is empty");
    json prov = json::array();
    for (const auto& e : provenance) {
        json params = json::object();
        for (const auto& [k, v] : e.params) params[k] = v;
        json entry = {{"generator", e.generator}, {"params", params}};
        if (!e.parent.empty()) entry["parent"] = e.parent;
        prov.push_back(entry);
    }
    json j = profile_body(p);
    j["kind"] = "profile";
    j["schema_version"] = schema_version();
    j["provenance"] = prov;
    return j.dump() + "\n";
}

ProfileRecord decode_profile(const std::string& bytes, double smooth_tol) {
    ProfileRecord r;
    try {
        json j = parse(bytes);
        check_schema(j, "profile");
        r.schema = j["schema_version"].get<std::string>();
        r.profile = profile_from_body(j);
        const json& prov = field(j, "provenance");
        if (!prov.is_array() || prov.empty()) throw DataError("provenance chain is empty");
        for (const auto& e : prov) {
            ProvenanceEntry pe;
            pe.generator = field(e, "generator").get<std::string>();
            for (const auto& [k, v] : field(e, "params").items()) pe.params[k] = v.get<std::string>();
            if (e.contains("parent")) pe.parent = e["parent"].get<std::string>();
            r.provenance.push_back(std::move(pe));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed profile record: ") + e.what());
    }
    SmoothnessReport rep = validate_smoothness(r.profile, smooth_tol);
    if (!rep.pass) {
        std::string failed;
        for (const auto& c : rep.checks) {
            if (!c.pass) failed += (failed.empty() ? "" : "; ") + c.name + " [" + c.condition + "]";
        }
        throw ValidationError("profile fails smoothness: " + failed, rep);
    }
    return r;
}

std::vector<ProvenanceEntry> evolved_provenance(const std::string& parent_bytes, double time) {
    ProfileRecord parent = decode_profile(parent_bytes, std::numeric_limits<double>::infinity());
    auto chain = parent.provenance;
    chain.push_back(ProvenanceEntry{"evolved", {{"time", hex_double(time)}}, digest(parent_bytes)});
    return chain;
}

json to_json(const GeoSummary& g, bool exact) {
    auto v = [exact](double x) { return exact ? json(hex_double(x)) : num(x); };
    json margins = json::array(), grads = json::array(), cands = json::array();
    for (double m : g.ordering_margins) margins.push_back(v(m));
    for (double m : g.gradient_margins) grads.push_back(v(m));
    for (double c : g.girth.candidates) cands.push_back(v(c));
    return {{"time", v(g.time)},
            {"time_ext", v(g.time_ext)},
            {"ell", v(g.ell)},
            {"h", v(g.h)},
            {"area", v(g.area)},
            {"d", v(g.d)},
            {"girth", v(g.girth.length)},
            {"girth_candidate", to_string(g.girth.candidate)},
            {"girth_candidates", cands},
            {"sc_max", v(g.sc_max)},
            {"sc_tip", v(g.sc_tip)},
            {"lambda_hat", v(g.lambda_hat)},
            {"k_top_waist", v(g.k_top_waist)},
            {"curvature_scale", v(g.curvature_scale)},
            {"ordering_margins", margins},
            {"gradient_margins", grads},
            {"gaps",
             {{"cylinder_gap", v(g.gaps.cylinder_gap)},
              {"cyl_psi", v(g.gaps.cyl_psi)},
              {"cyl_phi", v(g.gaps.cyl_phi)},
              {"cyl_curvature", v(g.gaps.cyl_curvature)},
              {"cigar_gap", v(g.gaps.cigar_gap)},
              {"cig_psi", v(g.gaps.cig_psi)},
              {"cig_l", v(g.gaps.cig_l)}}}};
}

GeoSummary summary_from_json(const json& j) {
    auto v = [](const json& x) { return parse_hex_double(x.get<std::string>()); };
    GeoSummary g;
    g.time = v(field(j, "time"));
    g.time_ext = v(field(j, "time_ext"));
    g.ell = v(field(j, "ell"));
    g.h = v(field(j, "h"));
    g.area = v(field(j, "area"));
    g.d = v(field(j, "d"));
    g.girth.length = v(field(j, "girth"));
    const std::string cand = field(j, "girth_candidate").get<std::string>();
    bool known = false;
    for (auto c : {GirthCandidate::waist_circle, GirthCandidate::tip_circle, GirthCandidate::meridian}) {
        if (cand == to_string(c)) {
            g.girth.candidate = c;
            known = true;
        }
    }
    if (!known) throw DataError("unknown girth candidate '" + cand + "'");
    const json& cands = field(j, "girth_candidates");
    const json& margins = field(j, "ordering_margins");
    const json& grads = field(j, "gradient_margins");
    if (cands.size() != 3 || margins.size() != 4 || grads.size() != 4) throw DataError("bad summary array size");
    for (int k = 0; k < 3; ++k) g.girth.candidates[k] = v(cands[k]);
    for (int k = 0; k < 4; ++k) {
        g.ordering_margins[k] = v(margins[k]);
        g.gradient_margins[k] = v(grads[k]);
    }
    g.sc_max = v(field(j, "sc_max"));
    g.sc_tip = v(field(j, "sc_tip"));
    g.lambda_hat = v(field(j, "lambda_hat"));
    g.k_top_waist = v(field(j, "k_top_waist"));
    g.curvature_scale = v(field(j, "curvature_scale"));
    const json& gaps = field(j, "gaps");
    g.gaps.cylinder_gap = v(field(gaps, "cylinder_gap"));
    g.gaps.cyl_psi = v(field(gaps, "cyl_psi"));
    g.gaps.cyl_phi = v(field(gaps, "cyl_phi"));
    g.gaps.cyl_curvature = v(field(gaps, "cyl_curvature"));
    g.gaps.cigar_gap = v(field(gaps, "cigar_gap"));
    g.gaps.cig_psi = v(field(gaps, "cig_psi"));
    g.gaps.cig_l = v(field(gaps, "cig_l"));
    return g;
}

std::string encode_checkpoint(const Checkpoint& c) {
    const FlowTrajectory& t = c.trajectory;
    json sums = json::array();
    for (const auto& g : t.summaries) sums.push_back(to_json(g, true));
    json j = {{"kind", "checkpoint"},
              {"schema_version", schema_version()},
              {"config", c.config_text},
              {"output_dir", c.output_dir},
              {"gauge", t.gauge == Gauge::arclength ? "arclength" : "coordinate"},
              {"initial_area", hex_double(t.initial_area)},
              {"initial_curvature", hex_double(t.initial_curvature)},
              {"rejected_steps", t.rejected_steps},
              {"last", state_json(t.last)},
              {"summaries", sums}};
    std::string body = j.dump();
    // The trailing digest line detects truncation and corruption.
    return body + "\n" + digest(body) + "\n";
}

Checkpoint decode_checkpoint(const std::string& bytes) {
    const size_t nl = bytes.find('\n');
    if (nl == std::string::npos) throw DataError("checkpoint is truncated");
    const std::string body = bytes.substr(0, nl);
    std::string tail = bytes.substr(nl + 1);
    while (!tail.empty() && (tail.back() == '\n' || tail.back() == '\r')) tail.pop_back();
    if (tail != digest(body)) throw DataError("checkpoint digest mismatch (truncated or corrupt file)");
    Checkpoint c;
    try {
        json j = parse(body);
        check_schema(j, "checkpoint");
        c.schema = j["schema_version"].get<std::string>();
        c.config_text = field(j, "config").get<std::string>();
        c.output_dir = field(j, "output_dir").get<std::string>();
        FlowTrajectory& t = c.trajectory;
        const std::string gauge = field(j, "gauge").get<std::string>();
        if (gauge != "arclength" && gauge != "coordinate") throw DataError("unknown gauge '" + gauge + "'");
        t.gauge = gauge == "arclength" ? Gauge::arclength : Gauge::coordinate;
        t.initial_area = parse_hex_double(field(j, "initial_area").get<std::string>());
        t.initial_curvature = parse_hex_double(field(j, "initial_curvature").get<std::string>());
        t.rejected_steps = field(j, "rejected_steps").get<long>();
        t.last = state_from_json(field(j, "last"));
        for (const auto& s : field(j, "summaries")) t.summaries.push_back(summary_from_json(s));
        if (t.summaries.empty()) throw DataError("checkpoint has no summaries");
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
    return c;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw DataError("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

json to_json(const AuditReport& r) {
    json recs = json::array();
    for (const auto& a : r.records) {
        recs.push_back({{"name", a.name},
                        {"claim", a.claim},
                        {"measured", num(a.measured)},
                        {"tolerance", num(a.tolerance)},
                        {"pass", a.pass},
                        {"gated", a.gated},
                        {"note", a.note}});
    }
    return {{"schema_version", schema_version()}, {"suite", r.suite}, {"pass", r.pass}, {"records", recs}};
}

json to_json(const OracleTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"node_count", r.node_count},
                        {"error_psi", num(r.error_psi)},
                        {"error_phi", num(r.error_phi)},
                        {"relative_error", num(r.relative_error)},
                        {"steps", r.steps},
                        {"seconds", num(r.seconds)}});
    }
    json orders = json::array();
    for (double o : t.orders) orders.push_back(num(o));
    return {{"kind", to_string(t.kind)}, {"rows", rows}, {"orders", orders}, {"observed_order", num(t.observed_order)}};
}

json to_json(const ResidualTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"equation", to_string(r.eq)},
                        {"residual", num(r.residual)},
                        {"scale", num(r.scale)},
                        {"relative", num(r.scale > 0 ? r.residual / r.scale : r.residual)}});
    }
    return {{"snapshots_used", t.snapshots_used}, {"rows", rows}};
}

json profile_json(const Profile& p) {
    return {{"schema_version", schema_version()},
            {"n", p.n},
            {"r", p.grid.nodes},
            {"chi", p.chi},
            {"psi", p.psi},
            {"phi", p.phi}};
}

}  // namespace warpflow
