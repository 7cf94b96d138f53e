#include "sagl/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "sagl/bitio.hpp"
#include "sagl/errors.hpp"
#include "sagl/parallel.hpp"

namespace sagl {

namespace {

unsigned tree_q(const LabelHeader& h) { return h.reduced_dim; }

std::uint64_t cells_of(unsigned q) { return 1ULL << q; }

}  // namespace

std::uint64_t ceil_log2(std::uint64_t n) {
    std::uint64_t bits = 0;
    while ((1ULL << bits) < n) ++bits;
    return bits;
}

std::uint64_t trivial_bound_bits(std::uint64_t n) {
    return (n - 1 + 1) / 2 + ceil_log2(n);  // ceil((n-1)/2) + ceil(log2 n)
}

std::uint64_t VertexLabel::address_bits() const {
    unsigned q = tree_q(header);
    return static_cast<std::uint64_t>(address.components.size()) * q + 2ULL * q;
}

std::uint64_t VertexLabel::tree_bits() const {
    unsigned q = tree_q(header);
    std::uint64_t total = 0;
    for (const auto& node : tree.nodes) {
        total += q + 1;  // leaf-count field (0 marks a final node)
        if (node.final) total += 2ULL * q + node.bits.size();
        else total += node.leaves.size() * (q + 1ULL);
    }
    return total;
}

// ---------------------------------------------------------------------------
// addresses
// ---------------------------------------------------------------------------

std::vector<Address> assign_addresses(const HierarchyTree& h) {
    std::vector<Address> out(h.n);
    for (const auto& node : h.nodes) {
        if (!node.terminal) continue;
        // path of cell indices from the root down to this terminal
        std::vector<std::uint32_t> path;
        std::uint32_t cur = node.id;
        while (h.nodes[cur].parent != std::numeric_limits<std::uint32_t>::max()) {
            std::uint32_t par = h.nodes[cur].parent;
            std::uint32_t cell = 0;
            for (const auto& [c, child] : h.nodes[par].children)
                if (child == cur) {
                    cell = c;
                    break;
                }
            path.push_back(cell);
            cur = par;
        }
        std::reverse(path.begin(), path.end());
        for (std::size_t k = 0; k < node.members.size(); ++k) {
            Address a;
            a.components = path;
            a.slot = static_cast<std::uint32_t>(k + 1);
            out[node.members[k]] = std::move(a);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// trees
// ---------------------------------------------------------------------------

namespace {

std::uint32_t build_tree_rec(std::uint32_t y, const HierarchyTree& h, const SignMatrix& signs,
                             std::uint32_t hnode_id, LabelTree& out) {
    const HierarchyNode& hnode = h.nodes[hnode_id];
    std::uint32_t idx = static_cast<std::uint32_t>(out.nodes.size());
    out.nodes.emplace_back();

    if (hnode.terminal) {
        LabelTree::Node node;
        node.final = true;
        node.bits.reserve(hnode.members.size());
        for (std::uint32_t x : hnode.members)
            node.bits.push_back(x == y ? false : signs.edge_bit(y, x));
        out.nodes[idx] = std::move(node);
        return idx;
    }

    UniformityRow row = uniformity_row(hnode.assignment, y, signs);
    if (row.mask == 0)
        throw std::logic_error("build_label_tree: missing uniformity certificate at node " +
                               std::to_string(hnode_id));
    LabelTree::Node node;
    std::vector<std::uint32_t> recurse_cells;
    for (std::uint32_t cell = 1; cell <= hnode.assignment.cell_count; ++cell) {
        if (row.mask & (1ULL << (cell - 1))) {
            bool bit = row.cell_sign[cell - 1] > 0;  // empty cells default to 0
            node.leaves.emplace_back(cell, bit);
        } else {
            recurse_cells.push_back(cell);
        }
    }
    out.nodes[idx] = std::move(node);
    for (std::uint32_t cell : recurse_cells) {
        std::uint32_t child = hnode.child_for_cell(cell);
        if (child == std::numeric_limits<std::uint32_t>::max())
            throw std::logic_error("build_label_tree: non-uniform cell without hierarchy child");
        std::uint32_t sub = build_tree_rec(y, h, signs, child, out);
        out.nodes[idx].splits.emplace_back(cell, sub);
    }
    return idx;
}

}  // namespace

LabelTree build_label_tree(std::uint32_t y, const HierarchyTree& h, const SignMatrix& signs) {
    LabelTree out;
    build_tree_rec(y, h, signs, 0, out);
    return out;
}

std::vector<VertexLabel> encode_labels(const HierarchyTree& h, const SignMatrix& signs,
                                       unsigned threads) {
    if (auto zero = signs.first_zero_pair())
        throw GateError("general position violated: f is zero on a vertex pair",
                        static_cast<int>(zero->first), static_cast<int>(zero->second));
    LabelHeader header;
    header.version = kLabelFormatVersion;
    header.n = static_cast<std::uint32_t>(h.n);
    header.reduced_dim = static_cast<std::uint16_t>(h.reduced_dim);

    std::vector<Address> addresses = assign_addresses(h);
    std::vector<VertexLabel> labels(h.n);
    parallel_for(
        h.n,
        [&](std::size_t y) {
            labels[y].header = header;
            labels[y].id = static_cast<std::uint32_t>(y);
            labels[y].address = addresses[y];
            labels[y].tree = build_label_tree(static_cast<std::uint32_t>(y), h, signs);
        },
        threads);
    return labels;
}

// ---------------------------------------------------------------------------
// decode
// ---------------------------------------------------------------------------

int decode_oriented(const VertexLabel& address_label, const VertexLabel& tree_label) {
    if (!(address_label.header == tree_label.header))
        throw FormatError("decode: labels come from different encoding runs");
    const Address& addr = address_label.address;
    const LabelTree& tree = tree_label.tree;
    if (tree.nodes.empty()) throw FormatError("decode: empty label tree");

    std::uint32_t node = 0;
    std::size_t level = 0;
    for (;;) {
        const LabelTree::Node& nd = tree.nodes[node];
        if (nd.final) {
            if (addr.slot == 0 || addr.slot > nd.bits.size())
                throw FormatError("decode: slot index outside the final node");
            return nd.bits[addr.slot - 1] ? 1 : 0;
        }
        if (level >= addr.components.size())
            throw FormatError("decode: address exhausted before reaching a leaf");
        std::uint32_t cell = addr.components[level++];
        bool routed = false;
        for (const auto& [c, bit] : nd.leaves)
            if (c == cell) return bit ? 1 : 0;
        for (const auto& [c, child] : nd.splits)
            if (c == cell) {
                node = child;
                routed = true;
                break;
            }
        if (!routed) throw FormatError("decode: address routes to a missing cell");
    }
}

int decode(const VertexLabel& a, const VertexLabel& b) {
    if (!(a.header == b.header))
        throw FormatError("decode: labels come from different encoding runs");
    if (a.id == b.id) throw std::invalid_argument("decode: self query");
    const VertexLabel& lo = a.id < b.id ? a : b;
    const VertexLabel& hi = a.id < b.id ? b : a;
    return decode_oriented(lo, hi);
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

void write_tree_node(BitWriter& w, const LabelTree& tree, std::uint32_t idx, unsigned q) {
    const LabelTree::Node& nd = tree.nodes[idx];
    if (nd.final) {
        w.put_bits(0, q + 1);
        w.put_bits(nd.bits.size() - 1, 2 * q);
        for (bool b : nd.bits) w.put_bit(b);
        return;
    }
    w.put_bits(nd.leaves.size(), q + 1);
    for (const auto& [cell, bit] : nd.leaves) {
        w.put_bits(cell - 1, q);
        w.put_bit(bit);
    }
    for (const auto& [cell, child] : nd.splits) write_tree_node(w, tree, child, q);
}

std::uint32_t read_tree_node(BitReader& r, LabelTree& tree, unsigned q) {
    std::uint32_t idx = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::uint64_t a = r.get_bits(q + 1);
    if (a > cells_of(q)) throw FormatError("label tree: leaf count exceeds cell count");
    if (a == 0) {
        std::uint64_t c = r.get_bits(2 * q) + 1;
        LabelTree::Node node;
        node.final = true;
        node.bits.reserve(c);
        for (std::uint64_t k = 0; k < c; ++k) node.bits.push_back(r.get_bit());
        tree.nodes[idx] = std::move(node);
        return idx;
    }
    LabelTree::Node node;
    std::uint64_t leaf_mask = 0;
    for (std::uint64_t k = 0; k < a; ++k) {
        std::uint32_t cell = static_cast<std::uint32_t>(r.get_bits(q)) + 1;
        bool bit = r.get_bit();
        if (leaf_mask & (1ULL << (cell - 1))) throw FormatError("label tree: duplicate leaf cell");
        leaf_mask |= 1ULL << (cell - 1);
        node.leaves.emplace_back(cell, bit);
    }
    std::sort(node.leaves.begin(), node.leaves.end());
    tree.nodes[idx] = std::move(node);
    for (std::uint32_t cell = 1; cell <= cells_of(q); ++cell) {
        if (leaf_mask & (1ULL << (cell - 1))) continue;
        std::uint32_t child = read_tree_node(r, tree, q);
        tree.nodes[idx].splits.emplace_back(cell, child);
    }
    return idx;
}

}  // namespace

LabelBits serialize_label(const VertexLabel& v) {
    unsigned q = tree_q(v.header);
    if (v.address.components.size() > 255)
        throw FormatError("serialize_label: address deeper than the format allows");
    BitWriter w;
    w.put_bits(v.header.version, 8);
    w.put_bits(v.header.n, 32);
    w.put_bits(v.header.reduced_dim, 16);
    w.put_bits(v.id, 32);
    w.put_bits(v.address.components.size(), 8);
    for (std::uint32_t c : v.address.components) w.put_bits(c - 1, q);
    w.put_bits(v.address.slot - 1, 2 * q);
    write_tree_node(w, v.tree, 0, q);
    return LabelBits{w.bytes(), w.bit_count()};
}

VertexLabel deserialize_label(const std::uint8_t* data, std::uint64_t bit_count) {
    BitReader r(data, bit_count);
    VertexLabel v;
    v.header.version = static_cast<std::uint8_t>(r.get_bits(8));
    if (v.header.version != kLabelFormatVersion)
        throw FormatError("label format version mismatch");
    v.header.n = static_cast<std::uint32_t>(r.get_bits(32));
    v.header.reduced_dim = static_cast<std::uint16_t>(r.get_bits(16));
    unsigned q = tree_q(v.header);
    if (q == 0 || q > kMaxHierarchyQ) throw FormatError("label header: invalid reduced dimension");
    v.id = static_cast<std::uint32_t>(r.get_bits(32));
    std::uint64_t levels = r.get_bits(8);
    v.address.components.resize(levels);
    for (auto& c : v.address.components) c = static_cast<std::uint32_t>(r.get_bits(q)) + 1;
    v.address.slot = static_cast<std::uint32_t>(r.get_bits(2 * q)) + 1;
    read_tree_node(r, v.tree, q);
    if (r.remaining() != 0) throw FormatError("label record has trailing bits");
    return v;
}

// ---------------------------------------------------------------------------
// label file
// ---------------------------------------------------------------------------

namespace {

void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }
void put_u16(std::ostream& os, std::uint16_t v) {
    os.put(static_cast<char>(v >> 8));
    os.put(static_cast<char>(v & 0xff));
}
void put_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint8_t take_u8(std::istream& is) {
    int c = is.get();
    if (c == EOF) throw FormatError("label file truncated");
    return static_cast<std::uint8_t>(c);
}
std::uint16_t take_u16(std::istream& is) {
    std::uint16_t v = take_u8(is);
    return static_cast<std::uint16_t>((v << 8) | take_u8(is));
}
std::uint32_t take_u32(std::istream& is) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | take_u8(is);
    return v;
}

constexpr char kMagic[4] = {'S', 'A', 'G', 'L'};

}  // namespace

void write_label_file(std::ostream& os, const std::vector<LabelFileSection>& sections) {
    if (sections.empty()) throw std::invalid_argument("write_label_file: no sections");
    os.write(kMagic, 4);
    put_u8(os, kLabelFormatVersion);
    for (std::size_t s = 0; s < sections.size(); ++s) {
        const auto& sec = sections[s];
        if (sec.labels.size() != sec.n)
            throw std::invalid_argument("write_label_file: record count differs from n");
        put_u32(os, sec.n);
        put_u16(os, sec.reduced_dim);
        put_u16(os, sec.depth);
        std::uint8_t flags = 0;
        if (sec.strict_balance) flags |= 1u;
        if (sec.complement) flags |= 2u;
        if (s + 1 < sections.size()) flags |= 4u;
        put_u8(os, flags);
        for (const auto& label : sec.labels) {
            LabelBits bits = serialize_label(label);
            put_u32(os, static_cast<std::uint32_t>(bits.bit_count));
            os.write(reinterpret_cast<const char*>(bits.bytes.data()),
                     static_cast<std::streamsize>(bits.bytes.size()));
        }
    }
}

std::vector<LabelFileSection> read_label_file(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not a SAGL label file");
    std::uint8_t version = take_u8(is);
    if (version != kLabelFormatVersion) throw FormatError("unsupported label file version");

    std::vector<LabelFileSection> sections;
    bool more = true;
    while (more) {
        LabelFileSection sec;
        sec.n = take_u32(is);
        sec.reduced_dim = take_u16(is);
        sec.depth = take_u16(is);
        std::uint8_t flags = take_u8(is);
        sec.strict_balance = flags & 1u;
        sec.complement = flags & 2u;
        more = flags & 4u;
        sec.labels.reserve(sec.n);
        for (std::uint32_t i = 0; i < sec.n; ++i) {
            std::uint32_t bit_count = take_u32(is);
            std::size_t nbytes = (bit_count + 7) / 8;
            std::vector<std::uint8_t> buf(nbytes);
            is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes));
            if (static_cast<std::size_t>(is.gcount()) != nbytes)
                throw FormatError("label file truncated");
            sec.labels.push_back(deserialize_label(buf.data(), bit_count));
        }
        sections.push_back(std::move(sec));
    }
    return sections;
}

// ---------------------------------------------------------------------------
// stats and bounds
// ---------------------------------------------------------------------------

Int alpha_formula(unsigned reduced_dim) {
    Int q2 = Int(1) << reduced_dim;
    Int q4 = q2 * q2;
    Int q8 = q4 * q2;
    return q8 - 2 * q4 + 2 * q2 - 3 * static_cast<long>(reduced_dim) - 1;
}

Int adjusted_tree_bound(unsigned reduced_dim, unsigned levels) {
    const unsigned q = reduced_dim;
    Int t = Int(q + 1) + 2 * static_cast<long>(q) + (Int(1) << (2 * q));  // final node
    for (unsigned h = 0; h < levels; ++h)
        t = 2 * Int(q + 1) + ((Int(1) << q) - 1) * t;
    return t;
}

double nominal_tree_bound(unsigned reduced_dim, unsigned levels) {
    const unsigned q = reduced_dim;
    if (q == 1) {
        // alpha degenerates to 0/0; use the recurrence directly: worst node
        // adds a(Q+1) = 2 bits per level over the 2Q + 4^Q final cost.
        return 2.0 * levels + 6.0;
    }
    Int pow = 1;
    for (unsigned h = 0; h < levels; ++h) pow *= (Int(1) << q) - 1;
    mpq_class bound = mpq_class(alpha_formula(q) * pow - (static_cast<long>(q) + 1)) /
                      mpq_class((Int(1) << q) - 2);
    return bound.get_d();
}

LabelStats label_stats(const std::vector<VertexLabel>& labels) {
    if (labels.empty()) throw std::invalid_argument("label_stats: empty label set");
    LabelStats st;
    const std::uint32_t n = labels.front().header.n;
    const unsigned q = labels.front().header.reduced_dim;
    st.id_bits = ceil_log2(n);
    std::uint64_t total = 0;
    for (const auto& label : labels) {
        std::uint64_t bits = label.payload_bits() + st.id_bits;
        st.max_bits = std::max(st.max_bits, bits);
        total += bits;
        st.measured_depth = std::max(st.measured_depth,
                                     static_cast<std::uint32_t>(label.address.components.size()));
    }
    st.mean_bits = static_cast<double>(total) / static_cast<double>(labels.size());
    st.paper_bound =
        static_cast<double>(q) * (st.measured_depth + 2.0) + nominal_tree_bound(q, st.measured_depth);
    st.adjusted_bound = static_cast<double>(q) * (st.measured_depth + 2.0) +
                        mpq_class(adjusted_tree_bound(q, st.measured_depth)).get_d() +
                        static_cast<double>(st.id_bits);
    st.trivial_bound = n >= 2 ? trivial_bound_bits(n) : 0;
    st.exponent_estimate =
        n > 1 ? std::log(static_cast<double>(st.max_bits)) / std::log(static_cast<double>(n)) : 0.0;
    return st;
}

}  // namespace sagl
