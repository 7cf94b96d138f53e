#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "sagl/errors.hpp"
#include "sagl/harness.hpp"
#include "sagl/labeling.hpp"

using namespace sagl;

namespace {

RatVec rv(std::initializer_list<long> xs) {
    RatVec v;
    for (long x : xs) v.push_back(make_rational(x));
    return v;
}

struct Encoded {
    Family family;
    std::vector<RatVec> points;
    SignMatrix signs;
    HierarchyTree tree;
    std::vector<VertexLabel> labels;
};

Encoded encode_builtin(const std::string& family, unsigned n, std::uint64_t seed,
                       unsigned dot_q = 2) {
    InstanceSpec spec = make_builtin_spec(family, n, seed, dot_q);
    Encoded e;
    e.family = parse_family(spec.family_text);
    DiagonalizedForm form = congruence_diagonalize(to_bilinear(e.family.constraints[0].pred));
    e.points = generate_instance(spec);
    e.signs = build_sign_matrix(e.points, e.family.constraints[0].pred);
    REQUIRE_FALSE(e.signs.first_zero_pair().has_value());
    LiftedPointSet lifted = lift_point_set(e.points, form);
    HyperplaneSet hyps = build_hyperplane_set(e.points, form);
    HierarchyParams hp;
    hp.seed = seed ^ 0xabcddcba;
    e.tree = build_hierarchy(lifted, hyps, e.signs, hp);
    e.labels = encode_labels(e.tree, e.signs);
    return e;
}

Encoded encode_points(const std::string& family_text, std::vector<RatVec> pts,
                      std::uint64_t seed = 7) {
    Encoded e;
    e.family = parse_family(family_text);
    DiagonalizedForm form = congruence_diagonalize(to_bilinear(e.family.constraints[0].pred));
    e.points = std::move(pts);
    e.signs = build_sign_matrix(e.points, e.family.constraints[0].pred);
    LiftedPointSet lifted = lift_point_set(e.points, form);
    HyperplaneSet hyps = build_hyperplane_set(e.points, form);
    HierarchyParams hp;
    hp.seed = seed;
    e.tree = build_hierarchy(lifted, hyps, e.signs, hp);
    e.labels = encode_labels(e.tree, e.signs);
    return e;
}

}  // namespace

TEST_CASE("addresses: single vertex gets the empty path and slot 1") {
    Encoded e = encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0})});
    auto addrs = assign_addresses(e.tree);
    REQUIRE(addrs.size() == 1);
    CHECK(addrs[0].components.empty());
    CHECK(addrs[0].slot == 1);
}

TEST_CASE("addresses: Q=1 n=32 median hierarchy gives 32 distinct 3-component paths") {
    Encoded e = encode_builtin("dot-product", 32, 29, 1);
    REQUIRE(e.tree.max_depth == 3);
    auto addrs = assign_addresses(e.tree);
    std::set<std::pair<std::vector<std::uint32_t>, std::uint32_t>> distinct;
    for (const auto& a : addrs) {
        CHECK(a.components.size() == 3);
        distinct.insert({a.components, a.slot});
    }
    CHECK(distinct.size() == 32);
}

TEST_CASE("addresses: prefixes reconstruct the hierarchy partition") {
    Encoded e = encode_builtin("dot-product", 200, 31, 2);
    auto addrs = assign_addresses(e.tree);
    for (std::uint32_t k = 1; k <= e.tree.max_depth; ++k) {
        std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> groups;
        for (std::uint32_t v = 0; v < addrs.size(); ++v) {
            if (addrs[v].components.size() < k) continue;
            std::vector<std::uint32_t> prefix(addrs[v].components.begin(),
                                              addrs[v].components.begin() + k);
            groups[prefix].push_back(v);
        }
        std::set<std::vector<std::uint32_t>> node_sets;
        for (const auto& node : e.tree.nodes)
            if (node.depth == k) node_sets.insert(node.members);
        for (const auto& [prefix, verts] : groups) CHECK(node_sets.count(verts) == 1);
    }
}

TEST_CASE("label tree: n <= 4^Q collapses to a single final node with the sign row") {
    Encoded e = encode_builtin("unit-disk", 30, 17);
    REQUIRE(e.tree.nodes.size() == 1);
    for (std::uint32_t y = 0; y < 30; ++y) {
        const LabelTree& t = e.labels[y].tree;
        REQUIRE(t.nodes.size() == 1);
        REQUIRE(t.nodes[0].final);
        REQUIRE(t.nodes[0].bits.size() == 30);
        for (std::uint32_t x = 0; x < 30; ++x)
            if (x != y) CHECK(t.nodes[0].bits[x] == e.signs.edge_bit(y, x));
    }
}

TEST_CASE("label tree: vertex adjacent to everything collapses to all-1 leaves") {
    // all points in the positive quadrant: x.y > 0 always, so every cell is
    // uniform-adjacent for every y
    std::vector<RatVec> pts;
    SplitMix rng(3);
    for (int i = 0; i < 40; ++i) {
        long a = 1 + static_cast<long>(rng.below(1000));
        long b = 1 + static_cast<long>(rng.below(1000));
        pts.push_back({make_rational(a, 7), make_rational(b, 11)});
    }
    Encoded e = encode_points("q=2\nx1*y1 + x2*y2 >= 0\n", std::move(pts));
    for (std::uint32_t y = 0; y < 40; ++y) {
        const LabelTree& t = e.labels[y].tree;
        REQUIRE(t.nodes.size() == 1);
        if (e.tree.max_depth == 0) {
            for (std::uint32_t x = 0; x < 40; ++x)
                if (x != y) CHECK(t.nodes[0].bits[x]);
        } else {
            CHECK_FALSE(t.nodes[0].final);
            CHECK(t.nodes[0].splits.empty());
            CHECK(t.nodes[0].leaves.size() == e.tree.cells_per_node());
            for (const auto& [cell, bit] : t.nodes[0].leaves) {
                bool has_member = false;
                for (std::size_t k = 0; k < e.tree.nodes[0].assignment.members.size(); ++k)
                    if (e.tree.nodes[0].assignment.cells[k] == cell &&
                        e.tree.nodes[0].assignment.members[k] != y)
                        has_member = true;
                if (has_member) CHECK(bit);  // empty cells keep the default 0
            }
        }
    }
}

TEST_CASE("round trip: walking A(x) through B(y) reproduces the sign matrix") {
    for (auto [family, n, seed, q] :
         {std::tuple<const char*, unsigned, std::uint64_t, unsigned>{"unit-disk", 300, 3, 2},
          {"dot-product", 200, 5, 2},
          {"dot-product", 150, 7, 1}}) {
        Encoded e = encode_builtin(family, n, seed, q);
        for (std::uint32_t x = 0; x < n; ++x)
            for (std::uint32_t y = 0; y < n; ++y) {
                if (x == y) continue;
                int bit = decode_oriented(e.labels[x], e.labels[y]);
                CHECK(bit == (e.signs.edge_bit(x, y) ? 1 : 0));
            }
    }
}

TEST_CASE("decode: K2 with an edge answers 1 in both orders") {
    Encoded e = encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0}), rv({1, 0})});
    CHECK(decode(e.labels[0], e.labels[1]) == 1);
    CHECK(decode(e.labels[1], e.labels[0]) == 1);
    CHECK(decode_oriented(e.labels[0], e.labels[1]) == 1);
    CHECK(decode_oriented(e.labels[1], e.labels[0]) == 1);
}

TEST_CASE("decode: two far-apart unit disks answer 0 in both orders") {
    Encoded e = encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0}), rv({100, 0})});
    CHECK(decode(e.labels[0], e.labels[1]) == 0);
    CHECK(decode(e.labels[1], e.labels[0]) == 0);
}

TEST_CASE("decode: self query and header mismatch are errors") {
    Encoded e = encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0}), rv({1, 0})});
    CHECK_THROWS_AS(decode(e.labels[0], e.labels[0]), std::invalid_argument);

    Encoded other =
        encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0}), rv({1, 0}), rv({0, 1})});
    CHECK_THROWS_AS(decode(e.labels[0], other.labels[1]), FormatError);
}

TEST_CASE("encode rejects zero signs (general-position gate)") {
    // two unit disks at distance exactly 2: f = 0
    std::vector<RatVec> pts = {rv({0, 0}), rv({2, 0})};
    Family fam = parse_family("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n");
    DiagonalizedForm form = congruence_diagonalize(to_bilinear(fam.constraints[0].pred));
    SignMatrix signs = build_sign_matrix(pts, fam.constraints[0].pred);
    REQUIRE(signs.first_zero_pair().has_value());
    LiftedPointSet lifted = lift_point_set(pts, form);
    HyperplaneSet hyps = build_hyperplane_set(pts, form);
    HierarchyParams hp;
    HierarchyTree tree = build_hierarchy(lifted, hyps, signs, hp);
    CHECK_THROWS_AS(encode_labels(tree, signs), GateError);
}

TEST_CASE("serialize: round trip is the identity across instances") {
    std::size_t total = 0;
    for (auto [family, n, seed, q] :
         {std::tuple<const char*, unsigned, std::uint64_t, unsigned>{"unit-disk", 280, 11, 2},
          {"dot-product", 300, 13, 2},
          {"dot-product", 120, 17, 1}}) {
        Encoded e = encode_builtin(family, n, seed, q);
        for (const auto& label : e.labels) {
            LabelBits bits = serialize_label(label);
            VertexLabel back = deserialize_label(bits);
            CHECK(back.header == label.header);
            CHECK(back.id == label.id);
            CHECK(back.address.components == label.address.components);
            CHECK(back.address.slot == label.address.slot);
            REQUIRE(back.tree.nodes.size() == label.tree.nodes.size());
            for (std::size_t i = 0; i < back.tree.nodes.size(); ++i) {
                CHECK(back.tree.nodes[i].final == label.tree.nodes[i].final);
                CHECK(back.tree.nodes[i].leaves == label.tree.nodes[i].leaves);
                CHECK(back.tree.nodes[i].splits == label.tree.nodes[i].splits);
                CHECK(back.tree.nodes[i].bits == label.tree.nodes[i].bits);
            }
            CHECK(bits.bit_count == 96 + label.address_bits() + label.tree_bits());
            ++total;
        }
    }
    CHECK(total == 700);
}

TEST_CASE("serialize: identity on ten thousand synthetic labels") {
    // labels drawn shape-first, independent of any hierarchy: random address
    // depth, random tree with the grammar's invariants
    SplitMix rng(0xfeedULL);
    for (int it = 0; it < 10000; ++it) {
        unsigned q = 1 + static_cast<unsigned>(rng.below(6));
        std::uint32_t cells = 1u << q;
        VertexLabel v;
        v.header.version = kLabelFormatVersion;
        v.header.n = 1 + static_cast<std::uint32_t>(rng.below(100000));
        v.header.reduced_dim = static_cast<std::uint16_t>(q);
        v.id = static_cast<std::uint32_t>(rng.below(v.header.n));
        std::size_t levels = rng.below(7);
        for (std::size_t l = 0; l < levels; ++l)
            v.address.components.push_back(1 + static_cast<std::uint32_t>(rng.below(cells)));
        v.address.slot = 1 + static_cast<std::uint32_t>(rng.below(1u << (2 * q)));

        // random tree, bounded depth, every splitting node keeps >= 1 leaf
        struct Builder {
            SplitMix& rng;
            std::uint32_t cells;
            LabelTree& tree;
            std::uint32_t build(unsigned depth) {
                std::uint32_t idx = static_cast<std::uint32_t>(tree.nodes.size());
                tree.nodes.emplace_back();
                if (depth == 0 || rng.below(3) == 0) {
                    LabelTree::Node node;
                    node.final = true;
                    std::uint64_t cap = static_cast<std::uint64_t>(cells) * cells;  // 4^Q
                    std::size_t c = 1 + rng.below(std::min<std::uint64_t>(20, cap));
                    for (std::size_t k = 0; k < c; ++k) node.bits.push_back(rng.below(2));
                    tree.nodes[idx] = std::move(node);
                    return idx;
                }
                LabelTree::Node node;
                std::uint64_t leaf_count = 1 + rng.below(cells);
                std::vector<std::uint32_t> order(cells);
                std::iota(order.begin(), order.end(), 1u);
                // deterministic shuffle
                for (std::size_t i = order.size(); i > 1; --i)
                    std::swap(order[i - 1], order[rng.below(i)]);
                std::vector<std::uint32_t> leaves(order.begin(), order.begin() + leaf_count);
                std::sort(leaves.begin(), leaves.end());
                for (std::uint32_t cell : leaves) node.leaves.emplace_back(cell, rng.below(2));
                tree.nodes[idx] = std::move(node);
                for (std::uint32_t cell = 1; cell <= cells; ++cell) {
                    if (std::binary_search(leaves.begin(), leaves.end(), cell)) continue;
                    std::uint32_t child = build(depth - 1);
                    tree.nodes[idx].splits.emplace_back(cell, child);
                }
                return idx;
            }
        };
        Builder{rng, cells, v.tree}.build(q <= 2 ? 2 : 1);

        LabelBits bits = serialize_label(v);
        VertexLabel back = deserialize_label(bits);
        REQUIRE(back.tree.nodes.size() == v.tree.nodes.size());
        CHECK(back.header == v.header);
        CHECK(back.id == v.id);
        CHECK(back.address.components == v.address.components);
        CHECK(back.address.slot == v.address.slot);
        bool same = true;
        for (std::size_t i = 0; i < v.tree.nodes.size(); ++i)
            same = same && back.tree.nodes[i].final == v.tree.nodes[i].final &&
                   back.tree.nodes[i].leaves == v.tree.nodes[i].leaves &&
                   back.tree.nodes[i].splits == v.tree.nodes[i].splits &&
                   back.tree.nodes[i].bits == v.tree.nodes[i].bits;
        CHECK(same);
    }
}

TEST_CASE("serialize: smallest format case is header + slot + one final node") {
    Encoded e = encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0})});
    const unsigned q = 4;  // unit disk reduced dimension
    LabelBits bits = serialize_label(e.labels[0]);
    // record header 96, empty path, slot 2Q, final marker Q+1, count 2Q, 1 bit
    CHECK(bits.bit_count == 96 + 0 + 2 * q + (q + 1) + 2 * q + 1);
}

TEST_CASE("serialize: truncation and version mismatch are detected") {
    Encoded e = encode_points("q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n", {rv({0, 0}), rv({1, 1})});
    LabelBits bits = serialize_label(e.labels[0]);
    CHECK_THROWS_AS(deserialize_label(bits.bytes.data(), bits.bit_count - 9), FormatError);
    std::vector<std::uint8_t> tampered = bits.bytes;
    tampered[0] = 0xff;  // version byte
    CHECK_THROWS_AS(deserialize_label(tampered.data(), bits.bit_count), FormatError);
}

TEST_CASE("label file: sections survive a write/read cycle") {
    Encoded e = encode_builtin("dot-product", 64, 19, 2);
    LabelFileSection sec;
    sec.n = 64;
    sec.reduced_dim = 2;
    sec.depth = static_cast<std::uint16_t>(e.tree.max_depth);
    sec.strict_balance = e.tree.strict_everywhere;
    sec.complement = false;
    sec.labels = e.labels;

    std::ostringstream os(std::ios::binary);
    write_label_file(os, {sec});
    std::string blob = os.str();
    CHECK(blob.substr(0, 4) == "SAGL");

    std::istringstream is(blob, std::ios::binary);
    auto sections = read_label_file(is);
    REQUIRE(sections.size() == 1);
    CHECK(sections[0].n == 64);
    CHECK(sections[0].reduced_dim == 2);
    CHECK(sections[0].labels.size() == 64);
    for (std::uint32_t i = 0; i < 64; ++i)
        for (std::uint32_t j = i + 1; j < 64; ++j)
            CHECK(decode(sections[0].labels[i], sections[0].labels[j]) ==
                  decode(e.labels[i], e.labels[j]));
}

TEST_CASE("label file: garbage magic rejected") {
    std::istringstream is("GARBAGE");
    CHECK_THROWS_AS(read_label_file(is), FormatError);
}

TEST_CASE("alpha formula: degenerate Q=1 and the closed-form Q=4 value") {
    CHECK(alpha_formula(1) == 0);
    CHECK(alpha_formula(2) == 33);
    CHECK(alpha_formula(4) == 3603);  // 4096 - 512 + 32 - 13
}

TEST_CASE("label stats: bounds and exponent on a real instance") {
    Encoded e = encode_builtin("dot-product", 300, 23, 2);
    LabelStats st = label_stats(e.labels);
    CHECK(st.id_bits == 9);
    CHECK(st.trivial_bound == 150 + 9);
    CHECK(st.measured_depth == e.tree.max_depth);
    CHECK(st.max_bits >= st.id_bits);
    CHECK(static_cast<double>(st.max_bits) <= st.adjusted_bound);
    CHECK(st.exponent_estimate ==
          doctest::Approx(std::log(double(st.max_bits)) / std::log(300.0)));
}

TEST_CASE("label stats: paper bound at Q=1 is the exact recurrence count") {
    Encoded e = encode_builtin("dot-product", 120, 17, 1);
    LabelStats st = label_stats(e.labels);
    double expect = 1.0 * (st.measured_depth + 2) + 2.0 * st.measured_depth + 6.0;
    CHECK(st.paper_bound == doctest::Approx(expect));
}

TEST_CASE("self-containment: decode answers from deserialized bytes only") {
    Encoded e = encode_builtin("unit-disk", 300, 37);
    std::vector<LabelBits> wire;
    for (const auto& label : e.labels) wire.push_back(serialize_label(label));
    std::vector<VertexLabel> fresh;
    for (const auto& bits : wire) fresh.push_back(deserialize_label(bits));
    for (std::uint32_t i = 0; i < 300; ++i)
        for (std::uint32_t j = i + 1; j < 300; ++j)
            CHECK(decode(fresh[i], fresh[j]) == (e.signs.edge_bit(i, j) ? 1 : 0));
}

TEST_CASE("budget: adjusted bound dominates across instances") {
    for (auto [family, n, seed, q] :
         {std::tuple<const char*, unsigned, std::uint64_t, unsigned>{"unit-disk", 512, 41, 2},
          {"dot-product", 400, 43, 2},
          {"dot-product", 512, 47, 1}}) {
        Encoded e = encode_builtin(family, n, seed, q);
        LabelStats st = label_stats(e.labels);
        CHECK(static_cast<double>(st.max_bits) <= st.adjusted_bound);
        CHECK(st.measured_depth <= depth_bound(n, e.labels[0].header.reduced_dim, Rational(2)));
    }
}
