#ifndef SAGL_PARTITION_HPP
#define SAGL_PARTITION_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sagl/bilinear.hpp"
#include "sagl/matrix.hpp"
#include "sagl/rational.hpp"
#include "sagl/signmatrix.hpp"

namespace sagl {

// Hierarchies use per-cell bitmasks in a uint64, so reduced dimensions beyond
// 6 (64 cells, terminal size 4096) are rejected up front.
constexpr unsigned kMaxHierarchyQ = 6;

/// Reduced-space point per vertex; vertex id == position.
struct LiftedPointSet {
    std::size_t reduced_dim = 0;
    std::vector<RatVec> points;

    std::size_t n() const { return points.size(); }
};

/// One homogeneous hyperplane w.z = 0 per vertex (w = D * reduced_lift(y));
/// indexed by vertex id.
struct HyperplaneSet {
    std::size_t reduced_dim = 0;
    std::vector<RatVec> normals;
};

LiftedPointSet lift_point_set(const std::vector<RatVec>& raw_points, const DiagonalizedForm& form,
                              unsigned threads = 0);
HyperplaneSet build_hyperplane_set(const std::vector<RatVec>& raw_points,
                                   const DiagonalizedForm& form, unsigned threads = 0);

/// One node's split: cells are the sign orthants of frame*(p - apex), with
/// points on a boundary going to the lowest-index incident cell.  Cell
/// indices run 1..cell_count with empty cells permitted.
struct CellAssignment {
    RatVec apex;
    RatMatrix frame;      // Q x Q, invertible
    RatVec thresholds;    // frame * apex
    std::uint32_t cell_count = 0;
    std::vector<std::uint32_t> members;  // vertex ids, ascending
    std::vector<std::uint32_t> cells;    // parallel to members, 1-based

    std::vector<std::uint32_t> loads() const;
    std::uint32_t cell_of(std::uint32_t vertex) const;  // throws if not a member
};

struct BalanceOptions {
    Rational beta = Rational(2);
    bool require_strict = false;
};

// min(m-1, ceil(beta*m/2^Q) + 2^Q - 1); the m-1 term forbids a split that
// leaves everything in one cell.
std::uint64_t balance_bound(std::uint64_t m, unsigned reduced_dim, const Rational& beta);

// The Yao-Yao band [floor(m/2^Q), floor(m/2^Q) + 2^Q - 1].
std::pair<std::uint64_t, std::uint64_t> strict_balance_band(std::uint64_t m, unsigned reduced_dim);

struct BalanceReport {
    std::vector<std::uint32_t> cell_loads;
    bool pass = false;
    bool strict = false;  // every nonempty-cell load inside the Yao-Yao band and none above it
};

BalanceReport verify_balance(const CellAssignment& a, unsigned reduced_dim, const Rational& beta);

// Bitmask over cells 1..cell_count (bit c-1 for cell c): cells on which
// edge_sign(., y) is constant over assigned members (empty cells count as
// uniform; the member y itself is skipped).  The companion sign array gives
// the shared sign per uniform cell (+1/-1, 0 for cells with no countable
// member).
struct UniformityRow {
    std::uint64_t mask = 0;
    // shared sign per cell, only meaningful where mask bit set
    std::array<std::int8_t, 64> cell_sign{};
};

UniformityRow uniformity_row(const CellAssignment& a, std::uint32_t y, const SignMatrix& signs);

struct UniformityReport {
    bool pass = false;
    std::vector<std::uint32_t> violating_vertices;  // y with empty certificate
};

// The operative avoidance check: for every vertex y of the whole graph at
// least one cell must be sign-uniform.
UniformityReport verify_uniformity(const CellAssignment& a, const SignMatrix& signs);

// Heuristic Tukey-deep point: coordinate medians in a seeded rotated frame.
RatVec centerpoint_estimate(const LiftedPointSet& pts, const std::vector<std::uint32_t>& members,
                            std::uint64_t seed);
RatVec centerpoint_estimate(const LiftedPointSet& pts, std::uint64_t seed);

struct ProviderOptions {
    std::uint64_t seed = 0;
    unsigned frame_attempts = 16;  // random frames tried per call
    BalanceOptions balance;
};

// Builds the best-balance assignment it can find: identity frame first, then
// seeded random invertible frames, thresholds chosen per coordinate by an
// exact sweep.  Uniformity is *not* guaranteed here; build_hierarchy verifies
// it and retries.  Throws ProviderError("degenerate input") when all member
// points coincide.
CellAssignment build_cell_assignment(const LiftedPointSet& pts, const HyperplaneSet& hyps,
                                     const std::vector<std::uint32_t>& members,
                                     const ProviderOptions& opts);

// Exhaustive strict-bound search for tiny nodes (Q <= 2, m <= limit): apexes
// from member pair-line intersections, frames from member pair directions.
std::optional<CellAssignment> exhaustive_strict_assignment(const LiftedPointSet& pts,
                                                           const std::vector<std::uint32_t>& members,
                                                           std::size_t limit = 12);

// Geometric avoidance audit: cells whose open cone misses {w.p = 0} entirely.
// Implies sign-uniformity for that cell; used as an optional slow(ish) check.
std::uint64_t geometric_avoidance_mask(const CellAssignment& a, const RatVec& normal);

struct HierarchyNode {
    std::uint32_t id = 0;
    std::uint32_t parent = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t depth = 0;
    std::vector<std::uint32_t> members;  // ascending vertex id; fixed terminal order
    bool terminal = false;
    CellAssignment assignment;                                     // when !terminal
    std::vector<std::pair<std::uint32_t, std::uint32_t>> children;  // (cell, node id), cell ascending
    std::uint64_t seed_used = 0;
    std::uint32_t retries = 0;

    std::uint32_t child_for_cell(std::uint32_t cell) const;  // UINT32_MAX when absent
};

struct HierarchyParams {
    std::uint64_t seed = 0;
    unsigned max_retries = 8;
    unsigned frame_attempts = 16;
    BalanceOptions balance;
    bool geometric_audit = false;
    unsigned threads = 0;
};

struct HierarchyTree {
    std::size_t n = 0;
    unsigned reduced_dim = 0;
    std::vector<HierarchyNode> nodes;  // nodes[0] is the root
    std::uint32_t max_depth = 0;
    bool strict_everywhere = false;  // every split met the Yao-Yao band
    std::uint64_t total_retries = 0;

    std::uint64_t terminal_capacity() const;  // 4^Q
    std::uint64_t cells_per_node() const;     // 2^Q
};

// Recursive partition of the lifted vertex set.  Every non-terminal node is
// balance-checked and certified sign-uniform for all n vertices before its
// children are created; failures retry with fresh seeds and finally abort
// with a ProviderError naming the node and offending vertices.
HierarchyTree build_hierarchy(const LiftedPointSet& pts, const HyperplaneSet& hyps,
                              const SignMatrix& signs, const HierarchyParams& params);

// Guaranteed number of splitting levels: exact unrolling of the load
// recurrence m -> balance_bound(m, Q, beta) (strict mode uses the Yao-Yao band
// upper end) until m <= 4^Q.
unsigned depth_bound(std::uint64_t n, unsigned reduced_dim, const Rational& beta,
                     bool strict = false);

// Closed-form ceil(log2((n-2^Q+1)/(4^Q-2^Q+1))/Q) split-level count under strict
// balance; 0 when n <= 4^Q.
unsigned yao_yao_depth_formula(std::uint64_t n, unsigned reduced_dim);

// Audit dump (JSON text) of nodes, loads, seeds, retries and certificate
// summaries; consumed by the CLI verify subcommand.
std::string hierarchy_audit_json(const HierarchyTree& tree, const SignMatrix& signs);

}  // namespace sagl

#endif
