#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "warpflow/initial_data.hpp"
#include "warpflow/persistence.hpp"

using namespace warpflow;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("hex doubles are bit-exact") {
    for (double v : {0.0, -0.0, 1.0 / 3, 1e-310, 1.7976931348623157e308, -2.5e-17}) {
        const double w = parse_hex_double(hex_double(v));
        CHECK(std::memcmp(&v, &w, sizeof v) == 0);
    }
    CHECK_THROWS_AS(parse_hex_double("0x1.8p+1junk"), DataError);
}

TEST_CASE("sausage slice round trip is bitwise equal") {
    Profile p = sausage_slice(-1.0, 3, make_uniform_grid(201));
    std::string bytes = encode_profile(p, {ProvenanceEntry{"sausage", {{"tau", "-1"}}, {}}});
    ProfileRecord r = decode_profile(bytes);
    CHECK(r.schema == schema_version());
    CHECK(bit_equal(r.profile.chi, p.chi));
    CHECK(bit_equal(r.profile.psi, p.psi));
    CHECK(bit_equal(r.profile.phi, p.phi));
    CHECK(bit_equal(r.profile.grid.nodes, p.grid.nodes));
    CHECK(r.profile.n == 3);
    REQUIRE(r.provenance.size() == 1);
    CHECK(r.provenance[0].generator == "sausage");
    CHECK(encode_profile(r.profile, r.provenance) == bytes);
}

TEST_CASE("provenance chain is never empty and links to the parent digest") {
    Profile p = round_sphere(1.0, make_uniform_grid(33), 3);
    CHECK_THROWS_AS(encode_profile(p, {}), ConfigError);
    std::string parent = encode_profile(p, {ProvenanceEntry{"round_sphere", {}, {}}});
    auto chain = evolved_provenance(parent, 0.5);
    REQUIRE(chain.size() == 2);
    CHECK(chain.back().generator == "evolved");
    CHECK(chain.back().parent == digest(parent));
    CHECK(digest(parent).size() == 16);
    CHECK(decode_profile(encode_profile(p, chain)).provenance.size() == 2);
}

TEST_CASE("corrupt payloads raise decode errors") {
    Profile p = round_sphere(1.0, make_uniform_grid(33), 3);
    std::string bytes = encode_profile(p, {ProvenanceEntry{"round_sphere", {}, {}}});
    CHECK_THROWS_AS(decode_profile(bytes.substr(0, bytes.size() / 2)), DataError);
    CHECK_THROWS_AS(decode_profile("not json"), DataError);
    auto j = nlohmann::json::parse(bytes);
    j["chi"].erase(j["chi"].begin());
    CHECK_THROWS_AS(decode_profile(j.dump()), DataError);
    auto newer = nlohmann::json::parse(bytes);
    newer["schema_version"] = "2.0";
    CHECK_THROWS_AS(decode_profile(newer.dump()), DataError);
    auto minor = nlohmann::json::parse(bytes);
    minor["schema_version"] = "1.7";
    CHECK_NOTHROW(decode_profile(minor.dump()));
}

TEST_CASE("psi nonzero at the tip fails validation naming the condition") {
    Profile p = round_sphere(1.0, make_uniform_grid(33), 3);
    p.psi.back() = 0.05;
    std::string bytes = encode_profile(p, {ProvenanceEntry{"hand_made", {}, {}}});
    try {
        decode_profile(bytes);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK_FALSE(e.report().pass);
        CHECK(std::string(e.what()).find("psi odd at r = pi/2") != std::string::npos);
    }
}

TEST_CASE("checkpoint round trip and truncation") {
    FlowConfig fc;
    fc.t_end = 0.01;
    fc.monitor_every = 5;
    FlowTrajectory tr = run(round_sphere(1.0, make_uniform_grid(33), 3), fc);
    Checkpoint c{schema_version(), "initial = round_sphere\n", "out", tr};
    std::string bytes = encode_checkpoint(c);
    Checkpoint d = decode_checkpoint(bytes);
    CHECK(d.config_text == c.config_text);
    CHECK(d.output_dir == "out");
    CHECK(d.trajectory.last.time == tr.last.time);
    CHECK(d.trajectory.last.step_index == tr.last.step_index);
    CHECK(bit_equal(d.trajectory.last.profile.psi, tr.last.profile.psi));
    REQUIRE(d.trajectory.summaries.size() == tr.summaries.size());
    CHECK(d.trajectory.summaries.back().area == tr.summaries.back().area);
    CHECK(encode_checkpoint(d) == bytes);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 10)), DataError);
    std::string flipped = bytes;
    flipped[flipped.size() / 2] ^= 1;
    CHECK_THROWS_AS(decode_checkpoint(flipped), DataError);
}

TEST_CASE("write_file replaces atomically and read_file reports missing files") {
    const auto dir = std::filesystem::temp_directory_path() / "warpflow_persistence_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "x.txt").string();
    write_file(path, "one");
    write_file(path, "two");
    CHECK(read_file(path) == "two");
    CHECK_THROWS_AS(read_file((dir / "missing").string()), DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("summary json round trip in exact mode") {
    GeoSummary g = geometric_summary(sausage_slice(-2.0, 4, make_uniform_grid(101)), 0.125);
    GeoSummary h = summary_from_json(to_json(g, true));
    CHECK(h.area == g.area);
    CHECK(h.ell == g.ell);
    CHECK(h.girth.candidate == g.girth.candidate);
    CHECK(h.ordering_margins == g.ordering_margins);
}
