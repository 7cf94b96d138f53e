#include "sagl/partition.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sagl/errors.hpp"
#include "sagl/parallel.hpp"

namespace sagl {

namespace {

std::uint64_t pow2(unsigned q) { return 1ULL << q; }
std::uint64_t pow4(unsigned q) { return 1ULL << (2 * q); }

void require_hierarchy_dim(std::size_t q) {
    if (q == 0 || q > kMaxHierarchyQ)
        throw std::invalid_argument("hierarchy reduced dimension must be in 1.." +
                                    std::to_string(kMaxHierarchyQ));
}

}  // namespace

LiftedPointSet lift_point_set(const std::vector<RatVec>& raw_points, const DiagonalizedForm& form,
                              unsigned threads) {
    LiftedPointSet out;
    out.reduced_dim = form.reduced_dim;
    out.points.resize(raw_points.size());
    parallel_for(
        raw_points.size(), [&](std::size_t i) { out.points[i] = reduced_lift(raw_points[i], form); },
        threads);
    return out;
}

HyperplaneSet build_hyperplane_set(const std::vector<RatVec>& raw_points,
                                   const DiagonalizedForm& form, unsigned threads) {
    HyperplaneSet out;
    out.reduced_dim = form.reduced_dim;
    out.normals.resize(raw_points.size());
    parallel_for(
        raw_points.size(), [&](std::size_t i) { out.normals[i] = hyperplane_normal(raw_points[i], form); },
        threads);
    return out;
}

std::vector<std::uint32_t> CellAssignment::loads() const {
    std::vector<std::uint32_t> out(cell_count, 0);
    for (std::uint32_t c : cells) ++out[c - 1];
    return out;
}

std::uint32_t CellAssignment::cell_of(std::uint32_t vertex) const {
    auto it = std::lower_bound(members.begin(), members.end(), vertex);
    if (it == members.end() || *it != vertex)
        throw std::invalid_argument("CellAssignment::cell_of: vertex is not a member");
    return cells[static_cast<std::size_t>(it - members.begin())];
}

std::uint64_t balance_bound(std::uint64_t m, unsigned reduced_dim, const Rational& beta) {
    require_hierarchy_dim(reduced_dim);
    Rational scaled = beta * Rational(static_cast<unsigned long>(m)) /
                      Rational(static_cast<unsigned long>(pow2(reduced_dim)));
    mpz_class ceil_val;
    mpz_cdiv_q(ceil_val.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    std::uint64_t relaxed = ceil_val.get_ui() + pow2(reduced_dim) - 1;
    return std::min<std::uint64_t>(m > 0 ? m - 1 : 0, relaxed);
}

std::pair<std::uint64_t, std::uint64_t> strict_balance_band(std::uint64_t m, unsigned reduced_dim) {
    std::uint64_t lo = m / pow2(reduced_dim);
    return {lo, lo + pow2(reduced_dim) - 1};
}

BalanceReport verify_balance(const CellAssignment& a, unsigned reduced_dim, const Rational& beta) {
    BalanceReport rep;
    rep.cell_loads = a.loads();
    std::uint64_t m = a.members.size();
    std::uint64_t bound = balance_bound(m, reduced_dim, beta);
    auto [lo, hi] = strict_balance_band(m, reduced_dim);
    std::uint64_t maxload = 0;
    bool strict = a.cell_count == pow2(reduced_dim);
    for (std::uint32_t load : rep.cell_loads) {
        maxload = std::max<std::uint64_t>(maxload, load);
        if (load < lo || load > hi) strict = false;
    }
    rep.pass = maxload <= bound;
    rep.strict = strict;
    return rep;
}

UniformityRow uniformity_row(const CellAssignment& a, std::uint32_t y, const SignMatrix& signs) {
    UniformityRow row;
    // state: 0 unseen, +1/-1 uniform so far, 2 mixed
    std::array<std::int8_t, 64> state{};
    for (std::size_t k = 0; k < a.members.size(); ++k) {
        std::uint32_t x = a.members[k];
        if (x == y) continue;  // diagonal is never decoded
        int s = signs.at(y, x);
        std::int8_t& st = state[a.cells[k] - 1];
        if (st == 0) st = static_cast<std::int8_t>(s == 0 ? 3 : s);
        else if (st != (s == 0 ? 3 : s)) st = 2;
    }
    for (std::uint32_t c = 0; c < a.cell_count; ++c) {
        if (state[c] == 2 || state[c] == 3) continue;  // mixed, or zero-sign member
        row.mask |= (1ULL << c);
        row.cell_sign[c] = state[c];  // 0 for empty cells
    }
    return row;
}

UniformityReport verify_uniformity(const CellAssignment& a, const SignMatrix& signs) {
    UniformityReport rep;
    for (std::uint32_t y = 0; y < signs.n(); ++y) {
        if (uniformity_row(a, y, signs).mask == 0) rep.violating_vertices.push_back(y);
    }
    rep.pass = rep.violating_vertices.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// centerpoint estimate
// ---------------------------------------------------------------------------

namespace {

Rational median_of_sorted(std::vector<Rational>& vals) {
    std::sort(vals.begin(), vals.end());
    std::size_t m = vals.size();
    if (m % 2 == 1) return vals[m / 2];
    return (vals[m / 2 - 1] + vals[m / 2]) / 2;
}

}  // namespace

RatVec centerpoint_estimate(const LiftedPointSet& pts, const std::vector<std::uint32_t>& members,
                            std::uint64_t /*seed*/) {
    if (members.empty()) throw std::invalid_argument("centerpoint_estimate: empty point set");
    // Coordinate-wise medians: cheap, deterministic, and deep enough in
    // practice for the generator's distributions.
    RatVec est(pts.reduced_dim);
    std::vector<Rational> vals(members.size());
    for (std::size_t c = 0; c < pts.reduced_dim; ++c) {
        for (std::size_t k = 0; k < members.size(); ++k) vals[k] = pts.points[members[k]][c];
        est[c] = median_of_sorted(vals);
    }
    return est;
}

RatVec centerpoint_estimate(const LiftedPointSet& pts, std::uint64_t seed) {
    std::vector<std::uint32_t> all(pts.n());
    std::iota(all.begin(), all.end(), 0);
    return centerpoint_estimate(pts, all, seed);
}

// ---------------------------------------------------------------------------
// cell provider: orthants of an invertible frame, thresholds by exact sweep
// ---------------------------------------------------------------------------

namespace {

RatMatrix random_invertible_frame(unsigned q, SplitMix& rng) {
    for (int tries = 0; tries < 64; ++tries) {
        RatMatrix f(q, q);
        for (unsigned i = 0; i < q; ++i)
            for (unsigned j = 0; j < q; ++j) f.at(i, j) = rng.small_rational(4);
        if (!f.inverse_or_empty().rows()) continue;
        return f;
    }
    // fall back to a perturbed identity, always invertible for small epsilon
    RatMatrix f = RatMatrix::identity(q);
    for (unsigned i = 0; i < q; ++i)
        for (unsigned j = 0; j < q; ++j)
            if (i != j) f.at(i, j) = Rational(static_cast<long>(rng.below(9)) - 4, 100);
    return f;
}

struct SweepScore {
    std::uint64_t max_load;
    std::uint64_t sum_sq;
    bool operator<(const SweepScore& o) const {
        if (max_load != o.max_load) return max_load < o.max_load;
        return sum_sq < o.sum_sq;
    }
};

SweepScore score_counts(const std::vector<std::uint32_t>& counts) {
    SweepScore s{0, 0};
    for (std::uint32_t c : counts) {
        s.max_load = std::max<std::uint64_t>(s.max_load, c);
        s.sum_sq += static_cast<std::uint64_t>(c) * c;
    }
    return s;
}

// One frame attempt: choose thresholds coordinate by coordinate, each time
// minimizing the max class load by an exact sweep over midpoint candidates.
CellAssignment frame_attempt(const LiftedPointSet& pts, const std::vector<std::uint32_t>& members,
                             RatMatrix frame) {
    const unsigned q = static_cast<unsigned>(pts.reduced_dim);
    const std::size_t m = members.size();
    CellAssignment out;
    out.frame = std::move(frame);
    out.cell_count = static_cast<std::uint32_t>(pow2(q));
    out.members = members;
    out.thresholds.resize(q);

    std::vector<std::uint32_t> cls(m, 0);  // class from coordinates processed so far

    std::vector<Rational> proj(m);
    std::vector<std::size_t> order(m);
    for (unsigned coord = 0; coord < q; ++coord) {
        for (std::size_t k = 0; k < m; ++k) {
            Rational acc;
            const RatVec& p = pts.points[members[k]];
            for (unsigned j = 0; j < q; ++j) {
                const Rational& f = out.frame.at(coord, j);
                if (sgn(f) != 0) acc += f * p[j];
            }
            proj[k] = std::move(acc);
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            int c = cmp(proj[a], proj[b]);
            if (c != 0) return c < 0;
            return a < b;
        });

        const std::uint32_t upper = 1u << coord;
        std::vector<std::uint32_t> counts(upper * 2, 0);
        for (std::size_t k = 0; k < m; ++k) ++counts[cls[k] | upper];

        // candidate: below the minimum (nothing moved, every bit = 1)
        Rational best_threshold = proj[order[0]] - 1;
        SweepScore best = score_counts(counts);

        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i;
            while (j < m && proj[order[j]] == proj[order[i]]) {
                std::size_t k = order[j];
                --counts[cls[k] | upper];
                ++counts[cls[k]];
                ++j;
            }
            Rational cand = (j < m) ? Rational((proj[order[i]] + proj[order[j]]) / 2)
                                    : Rational(proj[order[i]] + 1);
            SweepScore sc = score_counts(counts);
            if (sc < best) {
                best = sc;
                best_threshold = cand;
            }
            i = j;
        }

        out.thresholds[coord] = best_threshold;
        for (std::size_t k = 0; k < m; ++k)
            if (proj[k] > best_threshold) cls[k] |= upper;
    }

    out.cells.resize(m);
    for (std::size_t k = 0; k < m; ++k) out.cells[k] = cls[k] + 1;

    RatMatrix inv = out.frame.inverse_or_empty();
    out.apex = inv.apply(out.thresholds);
    return out;
}

bool all_points_equal(const LiftedPointSet& pts, const std::vector<std::uint32_t>& members) {
    for (std::size_t k = 1; k < members.size(); ++k)
        if (pts.points[members[k]] != pts.points[members[0]]) return false;
    return true;
}

// Exact median split on the line.  Coincident values straddling the median
// sit on the split boundary; they are divided between the two incident cells
// by count so the strict Yao-Yao band always holds.  Identical reduced points
// carry identical signs against every hyperplane, so decode correctness is
// unaffected by which side such a point lands on.
CellAssignment median_split_1d(const LiftedPointSet& pts,
                               const std::vector<std::uint32_t>& members) {
    const std::size_t m = members.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        int c = cmp(pts.points[members[a]][0], pts.points[members[b]][0]);
        if (c != 0) return c < 0;
        return members[a] < members[b];
    });
    const std::size_t lower = (m + 1) / 2;  // ceil(m/2)

    CellAssignment out;
    out.frame = RatMatrix::identity(1);
    out.cell_count = 2;
    out.members = members;
    out.cells.resize(m);
    for (std::size_t k = 0; k < m; ++k) out.cells[order[k]] = k < lower ? 1 : 2;

    const Rational& hi_of_low = pts.points[members[order[lower - 1]]][0];
    const Rational& lo_of_high = pts.points[members[order[lower]]][0];
    // apex strictly between the halves when possible, on the shared value when not
    out.thresholds = {hi_of_low == lo_of_high ? hi_of_low : (hi_of_low + lo_of_high) / 2};
    out.apex = out.thresholds;
    return out;
}

}  // namespace

CellAssignment build_cell_assignment(const LiftedPointSet& pts, const HyperplaneSet& /*hyps*/,
                                     const std::vector<std::uint32_t>& members,
                                     const ProviderOptions& opts) {
    require_hierarchy_dim(pts.reduced_dim);
    if (members.size() < 2 || all_points_equal(pts, members))
        throw ProviderError("degenerate input: node members coincide");

    const unsigned q = static_cast<unsigned>(pts.reduced_dim);
    if (q == 1) return median_split_1d(pts, members);

    std::uint64_t target = opts.balance.require_strict
                               ? strict_balance_band(members.size(), q).second
                               : balance_bound(members.size(), q, opts.balance.beta);

    SplitMix rng(opts.seed);
    CellAssignment best;
    std::uint64_t best_max = ~0ULL;
    unsigned attempts = std::max(1u, opts.frame_attempts);
    for (unsigned attempt = 0; attempt < attempts; ++attempt) {
        RatMatrix frame =
            attempt == 0 ? RatMatrix::identity(q) : random_invertible_frame(q, rng);
        CellAssignment cand = frame_attempt(pts, members, std::move(frame));
        auto loads = cand.loads();
        std::uint64_t mx = *std::max_element(loads.begin(), loads.end());
        if (mx < best_max) {
            best_max = mx;
            best = std::move(cand);
        }
        if (best_max <= target) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// exhaustive strict search (test oracle + tiny-node fallback, Q <= 2)
// ---------------------------------------------------------------------------

namespace {

bool strict_ok(const CellAssignment& a, unsigned q) {
    auto [lo, hi] = strict_balance_band(a.members.size(), q);
    auto loads = a.loads();
    for (std::uint32_t load : loads)
        if (load < lo || load > hi) return false;
    return true;
}

CellAssignment assign_from_frame(const LiftedPointSet& pts,
                                 const std::vector<std::uint32_t>& members, RatMatrix frame,
                                 RatVec thresholds) {
    const unsigned q = static_cast<unsigned>(pts.reduced_dim);
    CellAssignment out;
    out.frame = std::move(frame);
    out.thresholds = std::move(thresholds);
    out.cell_count = static_cast<std::uint32_t>(pow2(q));
    out.members = members;
    out.cells.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        const RatVec& p = pts.points[members[k]];
        std::uint32_t cls = 0;
        for (unsigned i = 0; i < q; ++i) {
            Rational acc;
            for (unsigned j = 0; j < q; ++j) acc += out.frame.at(i, j) * p[j];
            if (acc > out.thresholds[i]) cls |= (1u << i);
        }
        out.cells[k] = cls + 1;
    }
    RatMatrix inv = out.frame.inverse_or_empty();
    out.apex = inv.rows() ? inv.apply(out.thresholds) : RatVec(q);
    return out;
}

}  // namespace

std::optional<CellAssignment> exhaustive_strict_assignment(const LiftedPointSet& pts,
                                                           const std::vector<std::uint32_t>& members,
                                                           std::size_t limit) {
    const unsigned q = static_cast<unsigned>(pts.reduced_dim);
    if (q > 2 || members.size() > limit) return std::nullopt;
    if (members.size() < 2) return std::nullopt;

    if (q == 1) {
        // every threshold between consecutive values
        std::vector<Rational> vals;
        for (auto id : members) vals.push_back(pts.points[id][0]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            RatMatrix f = RatMatrix::identity(1);
            CellAssignment cand =
                assign_from_frame(pts, members, f, {(vals[i] + vals[i + 1]) / 2});
            if (strict_ok(cand, q)) return cand;
        }
        return std::nullopt;
    }

    // q == 2: apex candidates from pair-line intersections (plus the points
    // themselves), direction candidates from pair differences and the axes.
    std::vector<RatVec> dirs;  // normals
    dirs.push_back({Rational(1), Rational(0)});
    dirs.push_back({Rational(0), Rational(1)});
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            const RatVec& pa = pts.points[members[a]];
            const RatVec& pb = pts.points[members[b]];
            Rational dx = pb[0] - pa[0], dy = pb[1] - pa[1];
            if (sgn(dx) == 0 && sgn(dy) == 0) continue;
            dirs.push_back({-dy, dx});  // normal of the spanned line
        }

    std::vector<RatVec> apexes;
    for (auto id : members) apexes.push_back(pts.points[id]);
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            RatVec mid(2);
            mid[0] = (pts.points[members[a]][0] + pts.points[members[b]][0]) / 2;
            mid[1] = (pts.points[members[a]][1] + pts.points[members[b]][1]) / 2;
            apexes.push_back(std::move(mid));
        }
    // intersections of pairs of member-spanned lines
    struct Line {
        RatVec n;
        Rational c;
    };  // n.p = c
    std::vector<Line> lines;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            const RatVec& pa = pts.points[members[a]];
            const RatVec& pb = pts.points[members[b]];
            Rational dx = pb[0] - pa[0], dy = pb[1] - pa[1];
            if (sgn(dx) == 0 && sgn(dy) == 0) continue;
            RatVec n{-dy, dx};
            lines.push_back(Line{n, n[0] * pa[0] + n[1] * pa[1]});
        }
    for (std::size_t a = 0; a < lines.size(); ++a)
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            Rational det = lines[a].n[0] * lines[b].n[1] - lines[a].n[1] * lines[b].n[0];
            if (sgn(det) == 0) continue;
            RatVec p(2);
            p[0] = (lines[a].c * lines[b].n[1] - lines[b].c * lines[a].n[1]) / det;
            p[1] = (lines[a].n[0] * lines[b].c - lines[b].n[0] * lines[a].c) / det;
            apexes.push_back(std::move(p));
        }

    for (const RatVec& apex : apexes) {
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            for (std::size_t j = i + 1; j < dirs.size(); ++j) {
                Rational det = dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0];
                if (sgn(det) == 0) continue;
                RatMatrix f(2, 2);
                f.at(0, 0) = dirs[i][0];
                f.at(0, 1) = dirs[i][1];
                f.at(1, 0) = dirs[j][0];
                f.at(1, 1) = dirs[j][1];
                RatVec t(2);
                t[0] = dirs[i][0] * apex[0] + dirs[i][1] * apex[1];
                t[1] = dirs[j][0] * apex[0] + dirs[j][1] * apex[1];
                CellAssignment cand = assign_from_frame(pts, members, f, t);
                if (strict_ok(cand, q)) return cand;
            }
        }
    }
    return std::nullopt;
}

std::uint64_t geometric_avoidance_mask(const CellAssignment& a, const RatVec& normal) {
    const unsigned q = static_cast<unsigned>(a.frame.rows());
    RatMatrix inv = a.frame.inverse_or_empty();
    if (!inv.rows()) return 0;
    // hyperplane w.p = 0 in frame coordinates z = F(p - apex):
    // (F^-T w) . z = -w.apex
    RatVec c(q);
    for (unsigned i = 0; i < q; ++i) {
        Rational acc;
        for (unsigned j = 0; j < q; ++j) acc += inv.at(j, i) * normal[j];
        c[i] = acc;
    }
    Rational offset;  // -w.apex
    for (unsigned j = 0; j < q; ++j) offset -= normal[j] * a.apex[j];

    std::uint64_t mask = 0;
    for (std::uint32_t cell = 0; cell < a.cell_count; ++cell) {
        bool has_pos = false, has_neg = false;
        for (unsigned i = 0; i < q; ++i) {
            int cs = sgn(c[i]);
            if (cs == 0) continue;
            bool positive_ray = ((cell >> i) & 1u) ? (cs > 0) : (cs < 0);
            (positive_ray ? has_pos : has_neg) = true;
        }
        if (has_pos && has_neg) continue;  // functional spans all values on the cone
        int off = sgn(offset);
        if (has_pos && off <= 0) mask |= (1ULL << cell);
        else if (has_neg && off >= 0) mask |= (1ULL << cell);
        // has_pos == has_neg == false means c == 0: degenerate, no avoidance
    }
    return mask;
}

// ---------------------------------------------------------------------------
// hierarchy
// ---------------------------------------------------------------------------

std::uint32_t HierarchyNode::child_for_cell(std::uint32_t cell) const {
    for (const auto& [c, node] : children)
        if (c == cell) return node;
    return std::numeric_limits<std::uint32_t>::max();
}

std::uint64_t HierarchyTree::terminal_capacity() const { return pow4(reduced_dim); }
std::uint64_t HierarchyTree::cells_per_node() const { return pow2(reduced_dim); }

HierarchyTree build_hierarchy(const LiftedPointSet& pts, const HyperplaneSet& hyps,
                              const SignMatrix& signs, const HierarchyParams& params) {
    require_hierarchy_dim(pts.reduced_dim);
    if (pts.n() == 0) throw std::invalid_argument("build_hierarchy: empty point set");
    if (signs.n() != pts.n())
        throw std::invalid_argument("build_hierarchy: sign matrix size mismatch");

    HierarchyTree tree;
    tree.n = pts.n();
    tree.reduced_dim = static_cast<unsigned>(pts.reduced_dim);
    tree.strict_everywhere = true;
    const std::uint64_t terminal_cap = tree.terminal_capacity();

    std::vector<std::uint32_t> all(pts.n());
    std::iota(all.begin(), all.end(), 0);
    tree.nodes.push_back(HierarchyNode{});
    tree.nodes[0].members = std::move(all);

    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        std::uint32_t id = queue.front();
        queue.pop_front();
        // members are moved out while we work on the node; reassigned below
        std::vector<std::uint32_t> members = std::move(tree.nodes[id].members);
        std::uint32_t depth = tree.nodes[id].depth;
        tree.max_depth = std::max(tree.max_depth, depth);

        if (members.size() <= terminal_cap) {
            tree.nodes[id].terminal = true;
            tree.nodes[id].members = std::move(members);
            continue;
        }

        CellAssignment accepted;
        bool found = false;
        std::vector<std::uint32_t> last_violations;
        std::vector<std::uint32_t> best_loads;
        std::uint32_t attempt = 0;
        for (; attempt <= params.max_retries; ++attempt) {
            ProviderOptions popts;
            popts.seed = splitmix64(params.seed ^ (0x9e3779b97f4a7c15ULL * (id + 1)) ^
                                    (0xc2b2ae3d27d4eb4fULL * attempt));
            popts.frame_attempts = params.frame_attempts;
            popts.balance = params.balance;
            CellAssignment cand = build_cell_assignment(pts, hyps, members, popts);

            BalanceReport bal = verify_balance(cand, tree.reduced_dim, params.balance.beta);
            best_loads = bal.cell_loads;
            if (!bal.pass || (params.balance.require_strict && !bal.strict)) {
                if (auto strict = exhaustive_strict_assignment(pts, members)) {
                    cand = std::move(*strict);
                    bal = verify_balance(cand, tree.reduced_dim, params.balance.beta);
                } else {
                    continue;
                }
            }
            UniformityReport uni = verify_uniformity(cand, signs);
            if (!uni.pass) {
                last_violations = uni.violating_vertices;
                continue;
            }
            if (params.geometric_audit) {
                // geometric avoidance implies sign-uniformity; check containment
                for (std::uint32_t y = 0; y < signs.n(); ++y) {
                    std::uint64_t geo = geometric_avoidance_mask(cand, hyps.normals[y]);
                    std::uint64_t uniform = uniformity_row(cand, y, signs).mask;
                    if ((geo & ~uniform) != 0)
                        throw std::logic_error(
                            "geometric audit: avoided cell is not sign-uniform (node " +
                            std::to_string(id) + ", vertex " + std::to_string(y) + ")");
                }
            }
            if (!bal.strict) tree.strict_everywhere = false;
            tree.nodes[id].seed_used = popts.seed;
            tree.nodes[id].retries = attempt;
            tree.total_retries += attempt;
            accepted = std::move(cand);
            found = true;
            break;
        }
        if (!found) {
            std::ostringstream os;
            os << "partition provider exhausted at node " << id << " (depth " << depth
               << ", " << members.size() << " members) after " << attempt << " retries;";
            os << " best loads:";
            for (auto l : best_loads) os << ' ' << l;
            if (!last_violations.empty()) {
                os << "; uniformity violated for vertices:";
                for (std::size_t i = 0; i < std::min<std::size_t>(8, last_violations.size()); ++i)
                    os << ' ' << last_violations[i];
                if (last_violations.size() > 8) os << " ...";
            }
            throw ProviderError(os.str());
        }

        // children per nonempty cell, ascending cell index
        for (std::uint32_t cell = 1; cell <= accepted.cell_count; ++cell) {
            std::vector<std::uint32_t> child_members;
            for (std::size_t k = 0; k < accepted.members.size(); ++k)
                if (accepted.cells[k] == cell) child_members.push_back(accepted.members[k]);
            if (child_members.empty()) continue;
            std::uint32_t child_id = static_cast<std::uint32_t>(tree.nodes.size());
            HierarchyNode child;
            child.id = child_id;
            child.parent = id;
            child.depth = depth + 1;
            child.members = std::move(child_members);
            tree.nodes.push_back(std::move(child));
            tree.nodes[id].children.emplace_back(cell, child_id);
            queue.push_back(child_id);
        }
        tree.nodes[id].members = std::move(members);
        tree.nodes[id].assignment = std::move(accepted);
    }
    return tree;
}

unsigned depth_bound(std::uint64_t n, unsigned reduced_dim, const Rational& beta, bool strict) {
    require_hierarchy_dim(reduced_dim);
    const std::uint64_t cap = pow4(reduced_dim);
    std::uint64_t m = n;
    unsigned levels = 0;
    while (m > cap) {
        std::uint64_t next =
            strict ? strict_balance_band(m, reduced_dim).second : balance_bound(m, reduced_dim, beta);
        if (next >= m) next = m - 1;  // guaranteed progress: no cell holds everything
        m = next;
        ++levels;
    }
    return levels;
}

unsigned yao_yao_depth_formula(std::uint64_t n, unsigned reduced_dim) {
    require_hierarchy_dim(reduced_dim);
    const std::uint64_t cap = pow4(reduced_dim);
    if (n <= cap) return 0;
    // smallest s with 2^(Q s) * (4^Q - 2^Q + 1) >= n - 2^Q + 1
    mpz_class target = mpz_class(static_cast<unsigned long>(n)) - pow2(reduced_dim) + 1;
    mpz_class denom = mpz_class(static_cast<unsigned long>(cap)) - pow2(reduced_dim) + 1;
    unsigned s = 0;
    mpz_class lhs = denom;
    while (lhs < target) {
        lhs <<= reduced_dim;
        ++s;
    }
    return s;
}

std::string hierarchy_audit_json(const HierarchyTree& tree, const SignMatrix& signs) {
    nlohmann::json j;
    j["n"] = tree.n;
    j["Q"] = tree.reduced_dim;
    j["max_depth"] = tree.max_depth;
    j["strict_everywhere"] = tree.strict_everywhere;
    j["total_retries"] = tree.total_retries;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
        nlohmann::json nj;
        nj["id"] = node.id;
        nj["depth"] = node.depth;
        nj["terminal"] = node.terminal;
        nj["member_count"] = node.members.size();
        if (node.members.size() <= 64) nj["members"] = node.members;
        if (node.parent != std::numeric_limits<std::uint32_t>::max()) nj["parent"] = node.parent;
        if (!node.terminal) {
            nj["loads"] = node.assignment.loads();
            nj["seed"] = node.seed_used;
            nj["retries"] = node.retries;
            std::uint64_t min_options = ~0ULL;
            std::size_t forced = 0;  // vertices with exactly one uniform cell
            for (std::uint32_t y = 0; y < signs.n(); ++y) {
                auto row = uniformity_row(node.assignment, y, signs);
                std::uint64_t pc = static_cast<std::uint64_t>(__builtin_popcountll(row.mask));
                min_options = std::min(min_options, pc);
                if (pc == 1) ++forced;
            }
            nj["certificate"] = {{"min_uniform_cells", min_options},
                                 {"forced_vertices", forced}};
        }
        nodes.push_back(std::move(nj));
    }
    return j.dump(2);
}

}  // namespace sagl
