#ifndef SAGL_HARNESS_HPP
#define SAGL_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sagl/bilinear.hpp"
#include "sagl/labeling.hpp"
#include "sagl/partition.hpp"
#include "sagl/polynomial.hpp"
#include "sagl/signmatrix.hpp"

namespace sagl {

/// Everything needed to regenerate an instance byte for byte.
struct InstanceSpec {
    std::string family_name;  // "unit-disk", "disk", "dot-product" or "custom"
    std::string family_text;  // the family-spec document
    unsigned n = 0;
    std::uint64_t seed = 0;

    // coordinate distribution: numerators uniform over a jittered grid with a
    // fixed denominator, so rationals stay small and zero signs stay rare
    long halfwidth = 2;
    std::uint64_t denominator = 1u << 16;
    std::optional<unsigned> radius_coordinate;  // coordinate drawn from [radius_min, radius_max]
    long radius_min = 1;
    long radius_max = 2;
};

// Built-in families.  dot-product: f = x.y - t on R^q (Q = q when t = 0).
InstanceSpec make_builtin_spec(const std::string& family, unsigned n, std::uint64_t seed,
                               unsigned dot_q = 2, long dot_threshold = 0);

std::vector<RatVec> generate_instance(const InstanceSpec& spec);

// Points file: CSV with header id,c1..cq; rationals as "p/q".
void write_points_csv(std::ostream& os, const std::vector<RatVec>& points);
std::vector<RatVec> read_points_csv(std::istream& is);

struct GateResult {
    bool pass = false;
    int vertex_a = -1;  // offending pair when !pass
    int vertex_b = -1;
    int constraint = -1;
    std::vector<SignMatrix> signs;  // one per constraint, valid on pass
};

// Computes all per-constraint sign matrices and reports the first exact zero.
GateResult general_position_gate(const std::vector<RatVec>& points, const Family& family,
                                 unsigned threads = 0);

struct RunParams {
    Rational beta = Rational(2);
    bool require_strict = false;
    unsigned max_retries = 8;
    unsigned frame_attempts = 16;
    unsigned resample_cap = 16;  // gate-driven reseeds; 0 = hard error on zero
    unsigned threads = 0;
    bool check_trivial = true;   // also run the baseline codec on the instance
    bool geometric_audit = false;  // cone-avoidance containment check per node
};

struct SectionReport {
    unsigned reduced_dim = 0;
    std::size_t count_positive = 0;
    std::size_t count_negative = 0;
    unsigned depth = 0;
    bool strict_balance = false;
    std::uint64_t retries = 0;
    LabelStats stats;
};

struct RunReport {
    std::string family_name;
    unsigned n = 0;
    std::uint64_t seed = 0;         // seed that actually generated the instance
    std::uint64_t requested_seed = 0;
    unsigned resamples = 0;
    std::vector<SectionReport> sections;
    std::uint64_t pair_count = 0;
    std::uint64_t mismatches = 0;
    bool orientation_agreement = true;
    std::uint64_t max_bits_total = 0;  // per-vertex worst case summed over sections
    double mean_bits_total = 0.0;
    std::uint64_t trivial_bound = 0;
    std::uint64_t label_file_bytes = 0;
    std::uint64_t trivial_mismatches = 0;
    bool trivial_length_exact = true;
    double wall_seconds = 0.0;

    bool success() const { return mismatches == 0 && orientation_agreement; }
};

// Encode -> serialize -> drop everything but the byte stream -> deserialize ->
// decode every pair (both orientations) against direct evaluation of f.
RunReport run_roundtrip(const InstanceSpec& spec, const RunParams& params);

// Same pipeline but retains the artifacts (labels, hierarchies, file bytes)
// for the CLI and tests.
struct EncodedInstance {
    InstanceSpec spec;
    Family family;
    std::vector<RatVec> points;
    std::vector<SignMatrix> signs;
    std::vector<DiagonalizedForm> forms;
    std::vector<HierarchyTree> hierarchies;
    std::vector<LabelFileSection> sections;
    unsigned resamples = 0;
};

EncodedInstance encode_instance(const InstanceSpec& spec, const RunParams& params);

// Encode externally supplied points (no resampling possible): a zero sign is
// a hard GateError.
EncodedInstance encode_given_points(const Family& family, std::vector<RatVec> points,
                                    std::uint64_t seed, const RunParams& params);

struct ScalingRow {
    unsigned n = 0;
    std::uint64_t max_bits = 0;
    double mean_bits = 0.0;
    unsigned depth = 0;
    std::uint64_t mismatches = 0;
    double wall_seconds = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double fitted_slope = 0.0;      // least squares on log(max_bits) vs log(n)
    double scheme_exponent = 0.0;   // log2(2^Q-1)/Q for the family's Q
    unsigned reduced_dim = 0;
};

// Requires >= 4 geometrically spaced sizes; any round-trip failure throws.
ScalingReport run_scaling(const InstanceSpec& base, const std::vector<unsigned>& sizes,
                          const RunParams& params);

std::string run_report_json(const RunReport& r);
std::string run_report_text(const RunReport& r);
std::string scaling_report_csv(const ScalingReport& r);

}  // namespace sagl

#endif
