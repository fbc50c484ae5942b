#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpflow/errors.hpp"
#include "warpflow/evolve.hpp"
#include "warpflow/verify.hpp"

namespace warpflow {

// Major.minor; decoders accept any minor of their own major and refuse newer majors.
inline constexpr int kSchemaMajor = 1;
inline constexpr int kSchemaMinor = 0;
std::string schema_version();

// Decoded payload that fails the smoothness conditions. The report names each condition.
class ValidationError : public DataError {
public:
    ValidationError(const std::string& what, SmoothnessReport report)
        : DataError(what), report_(std::move(report)) {}
    const SmoothnessReport& report() const { return report_; }

private:
    SmoothnessReport report_;
};

// One link of a provenance chain: a generator with its parameters, or
// "evolved" with the digest of the parent record.
struct ProvenanceEntry {
    std::string generator;
    std::map<std::string, std::string> params;
    std::string parent;  // digest of the parent encoding, empty for generators
};

struct ProfileRecord {
    std::string schema;
    Profile profile;
    std::vector<ProvenanceEntry> provenance;  // oldest first, never empty
};

// Full-precision text encoding (.wfp): JSON with hex-float arrays.
std::string encode_profile(const Profile& p, const std::vector<ProvenanceEntry>& provenance);
// Throws DataError on malformed input and ValidationError when the profile
// fails validate_smoothness at `smooth_tol`.
ProfileRecord decode_profile(const std::string& bytes, double smooth_tol = kDefaultSmoothTol);

// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string digest(const std::string& bytes);

// Chain for a profile evolved from the record encoded as `parent_bytes`.
std::vector<ProvenanceEntry> evolved_provenance(const std::string& parent_bytes, double time);

// Bit-exact double <-> text.
std::string hex_double(double v);
double parse_hex_double(const std::string& s);

// Everything needed to continue a run: the config text it was started from
// and the trajectory without stored snapshots.
struct Checkpoint {
    std::string schema;
    std::string config_text;
    std::string output_dir;
    FlowTrajectory trajectory;
};

std::string encode_checkpoint(const Checkpoint& c);
// Throws DataError on a truncated or corrupt file or a newer schema.
Checkpoint decode_checkpoint(const std::string& bytes);

std::string read_file(const std::string& path);
// Writes through a temporary file and renames, so readers never see a partial file.
void write_file(const std::string& path, const std::string& contents);

nlohmann::json to_json(const GeoSummary& g, bool exact = false);
GeoSummary summary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const OracleTable& t);
nlohmann::json to_json(const ResidualTable& t);
nlohmann::json profile_json(const Profile& p);  // decimal arrays for snapshots

}  // namespace warpflow
