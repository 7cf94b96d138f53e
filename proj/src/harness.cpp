#include "sagl/harness.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sagl/bounds.hpp"
#include "sagl/errors.hpp"
#include "sagl/parallel.hpp"

namespace sagl {

namespace {

constexpr std::uint64_t kReseedSalt = 0xa24baed4963ee407ULL;

std::string dot_product_text(unsigned q, long threshold) {
    std::ostringstream os;
    os << "q=" << q << "\n";
    for (unsigned i = 1; i <= q; ++i) {
        if (i > 1) os << " + ";
        os << "x" << i << "*y" << i;
    }
    os << " >= " << threshold << "\n";
    return os.str();
}

}  // namespace

InstanceSpec make_builtin_spec(const std::string& family, unsigned n, std::uint64_t seed,
                               unsigned dot_q, long dot_threshold) {
    InstanceSpec spec;
    spec.family_name = family;
    spec.n = n;
    spec.seed = seed;
    if (family == "unit-disk") {
        spec.family_text = "q=2\n(x1-y1)^2 + (x2-y2)^2 <= 4\n";
        spec.halfwidth = 2;
    } else if (family == "disk") {
        spec.family_text = "q=3\n(x1-y1)^2 + (x2-y2)^2 <= (x3+y3)^2\n";
        spec.halfwidth = 2;
        spec.radius_coordinate = 2;
        spec.radius_min = 1;
        spec.radius_max = 2;
    } else if (family == "dot-product") {
        spec.family_text = dot_product_text(dot_q, dot_threshold);
        spec.halfwidth = 2;
    } else {
        throw std::invalid_argument("unknown built-in family: " + family);
    }
    return spec;
}

std::vector<RatVec> generate_instance(const InstanceSpec& spec) {
    Family fam = parse_family(spec.family_text);
    const unsigned q = fam.q;
    SplitMix rng(spec.seed);
    const Int den(static_cast<unsigned long>(spec.denominator));
    std::vector<RatVec> points(spec.n);
    for (unsigned v = 0; v < spec.n; ++v) {
        points[v].resize(q);
        for (unsigned c = 0; c < q; ++c) {
            long lo, hi;
            if (spec.radius_coordinate && *spec.radius_coordinate == c) {
                lo = spec.radius_min * static_cast<long>(spec.denominator);
                hi = spec.radius_max * static_cast<long>(spec.denominator);
            } else {
                hi = spec.halfwidth * static_cast<long>(spec.denominator);
                lo = -hi;
            }
            std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
            long num = lo + static_cast<long>(rng.below(span));
            Rational val(Int(num), den);
            val.canonicalize();
            points[v][c] = std::move(val);
        }
    }
    return points;
}

void write_points_csv(std::ostream& os, const std::vector<RatVec>& points) {
    if (points.empty()) throw std::invalid_argument("write_points_csv: empty point set");
    const std::size_t q = points.front().size();
    os << "id";
    for (std::size_t c = 1; c <= q; ++c) os << ",c" << c;
    os << "\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        os << i;
        for (const auto& v : points[i]) os << ',' << rational_to_string(v);
        os << "\n";
    }
}

std::vector<RatVec> read_points_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("points csv: missing header");
    std::vector<RatVec> points;
    std::size_t expected = std::string::npos;
    while (std::getline(is, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.size() < 2) throw FormatError("points csv: malformed row: " + line);
        if (expected == std::string::npos) expected = cols.size();
        if (cols.size() != expected) throw FormatError("points csv: ragged row: " + line);
        std::size_t id = std::stoul(cols[0]);
        if (id != points.size()) throw FormatError("points csv: ids must be 0..n-1 in order");
        RatVec p;
        for (std::size_t c = 1; c < cols.size(); ++c) p.push_back(rational_from_string(cols[c]));
        points.push_back(std::move(p));
    }
    if (points.empty()) throw FormatError("points csv: no rows");
    return points;
}

GateResult general_position_gate(const std::vector<RatVec>& points, const Family& family,
                                 unsigned threads) {
    GateResult res;
    for (std::size_t c = 0; c < family.constraints.size(); ++c) {
        SignMatrix m = build_sign_matrix(points, family.constraints[c].pred, threads);
        if (auto zero = m.first_zero_pair()) {
            res.pass = false;
            res.vertex_a = static_cast<int>(zero->first);
            res.vertex_b = static_cast<int>(zero->second);
            res.constraint = static_cast<int>(c);
            res.signs.clear();
            return res;
        }
        res.signs.push_back(std::move(m));
    }
    res.pass = true;
    return res;
}

namespace {

void encode_sections(EncodedInstance& enc, std::uint64_t seed, const RunParams& params);

}  // namespace

EncodedInstance encode_instance(const InstanceSpec& spec, const RunParams& params) {
    EncodedInstance enc;
    enc.spec = spec;
    enc.family = parse_family(spec.family_text);

    GateResult gate;
    unsigned attempt = 0;
    for (;; ++attempt) {
        InstanceSpec trial = spec;
        trial.seed = attempt == 0 ? spec.seed : splitmix64(spec.seed ^ (kReseedSalt * attempt));
        enc.points = generate_instance(trial);
        gate = general_position_gate(enc.points, enc.family, params.threads);
        if (gate.pass) {
            enc.spec.seed = trial.seed;
            break;
        }
        if (attempt >= params.resample_cap) {
            std::ostringstream os;
            os << "general position gate: f" << gate.constraint << "(x" << gate.vertex_a << ", x"
               << gate.vertex_b << ") = 0";
            if (params.resample_cap > 0) os << " after " << attempt + 1 << " samples";
            throw GateError(os.str(), gate.vertex_a, gate.vertex_b);
        }
    }
    enc.resamples = attempt;
    enc.signs = std::move(gate.signs);
    encode_sections(enc, enc.spec.seed, params);
    return enc;
}

EncodedInstance encode_given_points(const Family& family, std::vector<RatVec> points,
                                    std::uint64_t seed, const RunParams& params) {
    EncodedInstance enc;
    enc.spec.family_name = "custom";
    enc.spec.family_text = family_to_json(family);  // informational only
    enc.spec.n = static_cast<unsigned>(points.size());
    enc.spec.seed = seed;
    enc.family = family;
    enc.points = std::move(points);
    GateResult gate = general_position_gate(enc.points, enc.family, params.threads);
    if (!gate.pass) {
        std::ostringstream os;
        os << "general position gate: f" << gate.constraint << "(x" << gate.vertex_a << ", x"
           << gate.vertex_b << ") = 0";
        throw GateError(os.str(), gate.vertex_a, gate.vertex_b);
    }
    enc.signs = std::move(gate.signs);
    encode_sections(enc, seed, params);
    return enc;
}

namespace {

void encode_sections(EncodedInstance& enc, std::uint64_t seed, const RunParams& params) {
    for (std::size_t c = 0; c < enc.family.constraints.size(); ++c) {
        const auto& constraint = enc.family.constraints[c];
        BilinearForm bf = to_bilinear(constraint.pred);
        DiagonalizedForm form = congruence_diagonalize(bf);
        if (form.reduced_dim == 0)
            throw std::invalid_argument("family constraint reduces to a constant predicate");
        LiftedPointSet lifted = lift_point_set(enc.points, form, params.threads);
        HyperplaneSet hyps = build_hyperplane_set(enc.points, form, params.threads);

        HierarchyParams hp;
        hp.seed = splitmix64(seed ^ (0x5851f42d4c957f2dULL * (c + 1)));
        hp.max_retries = params.max_retries;
        hp.frame_attempts = params.frame_attempts;
        hp.balance.beta = params.beta;
        hp.balance.require_strict = params.require_strict;
        hp.geometric_audit = params.geometric_audit;
        hp.threads = params.threads;
        HierarchyTree tree = build_hierarchy(lifted, hyps, enc.signs[c], hp);

        LabelFileSection section;
        section.n = static_cast<std::uint32_t>(enc.spec.n);
        section.reduced_dim = static_cast<std::uint16_t>(form.reduced_dim);
        section.depth = static_cast<std::uint16_t>(tree.max_depth);
        section.strict_balance = tree.strict_everywhere;
        section.complement = constraint.complement;
        section.labels = encode_labels(tree, enc.signs[c], params.threads);

        enc.forms.push_back(std::move(form));
        enc.hierarchies.push_back(std::move(tree));
        enc.sections.push_back(std::move(section));
    }
}

}  // namespace

RunReport run_roundtrip(const InstanceSpec& spec, const RunParams& params) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.family_name = spec.family_name;
    rep.n = spec.n;
    rep.requested_seed = spec.seed;

    std::string file_bytes;
    std::vector<SignMatrix> signs;
    std::vector<bool> complements;
    {
        EncodedInstance enc = encode_instance(spec, params);
        rep.seed = enc.spec.seed;
        rep.resamples = enc.resamples;
        for (std::size_t c = 0; c < enc.sections.size(); ++c) {
            SectionReport sr;
            sr.reduced_dim = enc.sections[c].reduced_dim;
            sr.count_positive = enc.forms[c].count_positive;
            sr.count_negative = enc.forms[c].count_negative;
            sr.depth = enc.hierarchies[c].max_depth;
            sr.strict_balance = enc.hierarchies[c].strict_everywhere;
            sr.retries = enc.hierarchies[c].total_retries;
            sr.stats = label_stats(enc.sections[c].labels);
            rep.sections.push_back(std::move(sr));
            complements.push_back(enc.sections[c].complement);
        }
        std::ostringstream os(std::ios::binary);
        write_label_file(os, enc.sections);
        file_bytes = os.str();
        signs = std::move(enc.signs);
        // every other encoding artifact dies here; decode sees only the bytes
    }
    rep.label_file_bytes = file_bytes.size();

    std::istringstream is(file_bytes, std::ios::binary);
    std::vector<LabelFileSection> sections = read_label_file(is);
    const std::size_t n = spec.n;
    const std::size_t k = sections.size();

    // per-vertex total bits across sections (ids charged per section)
    {
        std::uint64_t idbits = ceil_log2(n);
        double total = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            std::uint64_t bits = 0;
            for (std::size_t c = 0; c < k; ++c)
                bits += sections[c].labels[v].payload_bits() + idbits;
            rep.max_bits_total = std::max(rep.max_bits_total, bits);
            total += static_cast<double>(bits);
        }
        rep.mean_bits_total = n ? total / static_cast<double>(n) : 0.0;
        rep.trivial_bound = n >= 2 ? trivial_bound_bits(n) : 0;
    }

    // pair verification fans out by row; per-row tallies keep it deterministic
    std::vector<std::uint64_t> row_mismatch(n, 0);
    std::vector<std::uint8_t> row_disagree(n, 0);
    parallel_for(
        n,
        [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                bool predicted = true;
                for (std::size_t c = 0; c < k; ++c) {
                    int fwd = decode(sections[c].labels[i], sections[c].labels[j]);
                    int rev = decode_oriented(sections[c].labels[j], sections[c].labels[i]);
                    if (fwd != rev) row_disagree[i] = 1;
                    predicted = predicted && ((fwd == 1) != complements[c]);
                }
                bool truth = true;
                for (std::size_t c = 0; c < k; ++c)
                    truth = truth && ((signs[c].at(i, j) >= 0) != complements[c]);
                if (predicted != truth) ++row_mismatch[i];
            }
        },
        params.threads);
    for (std::size_t i = 0; i < n; ++i) {
        rep.mismatches += row_mismatch[i];
        if (row_disagree[i]) rep.orientation_agreement = false;
    }
    rep.pair_count = n >= 2 ? static_cast<std::uint64_t>(n) * (n - 1) / 2 : 0;

    if (params.check_trivial && n >= 2) {
        SignMatrix combined(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                bool truth = true;
                for (std::size_t c = 0; c < k; ++c)
                    truth = truth && ((signs[c].at(i, j) >= 0) != complements[c]);
                combined.set(i, j, truth ? 1 : -1);
            }
        auto trivial = trivial_encode(combined);
        for (const auto& label : trivial)
            if (label.bit_length() != trivial_bound_bits(n)) rep.trivial_length_exact = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if ((trivial_decode(trivial[i], trivial[j]) == 1) != combined.edge_bit(i, j))
                    ++rep.trivial_mismatches;
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ScalingReport run_scaling(const InstanceSpec& base, const std::vector<unsigned>& sizes,
                          const RunParams& params) {
    if (sizes.size() < 4)
        throw std::invalid_argument("run_scaling: need at least 4 instance sizes");
    ScalingReport rep;
    for (unsigned n : sizes) {
        InstanceSpec spec = base;
        spec.n = n;
        RunReport run = run_roundtrip(spec, params);
        if (!run.success())
            throw std::runtime_error("run_scaling: round trip failed at n = " + std::to_string(n));
        ScalingRow row;
        row.n = n;
        row.max_bits = run.max_bits_total;
        row.mean_bits = run.mean_bits_total;
        row.depth = run.sections.empty() ? 0 : run.sections.front().depth;
        row.mismatches = run.mismatches;
        row.wall_seconds = run.wall_seconds;
        rep.rows.push_back(row);
        if (rep.reduced_dim == 0 && !run.sections.empty())
            rep.reduced_dim = run.sections.front().reduced_dim;
    }
    // least squares slope of log(max_bits) against log(n)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(rep.rows.size());
    for (const auto& row : rep.rows) {
        double x = std::log(static_cast<double>(row.n));
        double y = std::log(static_cast<double>(row.max_bits));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.scheme_exponent = rep.reduced_dim ? sagl::scheme_exponent(rep.reduced_dim) : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

namespace {

nlohmann::json section_json(const SectionReport& s) {
    return {
        {"Q", s.reduced_dim},
        {"signature", {s.count_positive, s.count_negative}},
        {"depth", s.depth},
        {"strict_balance", s.strict_balance},
        {"retries", s.retries},
        {"max_bits", s.stats.max_bits},
        {"mean_bits", s.stats.mean_bits},
        {"paper_bound", s.stats.paper_bound},
        {"adjusted_bound", s.stats.adjusted_bound},
        {"trivial_bound", s.stats.trivial_bound},
        {"exponent_estimate", s.stats.exponent_estimate},
    };
}

}  // namespace

std::string run_report_json(const RunReport& r) {
    nlohmann::json j;
    j["family"] = r.family_name;
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["requested_seed"] = r.requested_seed;
    j["resamples"] = r.resamples;
    j["pair_count"] = r.pair_count;
    j["mismatches"] = r.mismatches;
    j["orientation_agreement"] = r.orientation_agreement;
    j["max_bits"] = r.max_bits_total;
    j["mean_bits"] = r.mean_bits_total;
    j["trivial_bound"] = r.trivial_bound;
    j["label_file_bytes"] = r.label_file_bytes;
    j["trivial_mismatches"] = r.trivial_mismatches;
    j["trivial_length_exact"] = r.trivial_length_exact;
    j["wall_seconds"] = r.wall_seconds;
    auto& secs = j["sections"] = nlohmann::json::array();
    for (const auto& s : r.sections) secs.push_back(section_json(s));
    return j.dump(2);
}

std::string run_report_text(const RunReport& r) {
    std::ostringstream os;
    os << "family          " << r.family_name << "\n"
       << "n               " << r.n << "\n"
       << "seed            " << r.seed;
    if (r.resamples) os << "  (resampled " << r.resamples << "x from " << r.requested_seed << ")";
    os << "\n";
    for (std::size_t c = 0; c < r.sections.size(); ++c) {
        const auto& s = r.sections[c];
        os << "section " << c << "       Q=" << s.reduced_dim << " signature=(" << s.count_positive
           << "," << s.count_negative << ") depth=" << s.depth
           << (s.strict_balance ? " strict" : " relaxed") << " retries=" << s.retries << "\n"
           << "  bits/vertex   max=" << s.stats.max_bits << " mean=" << s.stats.mean_bits
           << " paper_bound=" << s.stats.paper_bound << " adjusted_bound=" << s.stats.adjusted_bound
           << "\n";
    }
    os << "pairs           " << r.pair_count << "\n"
       << "mismatches      " << r.mismatches << "\n"
       << "orientations    " << (r.orientation_agreement ? "agree" : "DISAGREE") << "\n"
       << "max bits        " << r.max_bits_total << " (trivial bound " << r.trivial_bound << ")\n"
       << "label file      " << r.label_file_bytes << " bytes\n";
    if (r.trivial_mismatches || !r.trivial_length_exact)
        os << "trivial codec   BROKEN (" << r.trivial_mismatches << " mismatches)\n";
    os << "wall time       " << r.wall_seconds << " s\n";
    return os.str();
}

std::string scaling_report_csv(const ScalingReport& r) {
    std::ostringstream os;
    os << "n,max_bits,mean_bits,depth,mismatches,wall_seconds\n";
    for (const auto& row : r.rows)
        os << row.n << ',' << row.max_bits << ',' << row.mean_bits << ',' << row.depth << ','
           << row.mismatches << ',' << row.wall_seconds << "\n";
    os << "# fitted_slope," << r.fitted_slope << "\n";
    os << "# scheme_exponent(Q=" << r.reduced_dim << ")," << r.scheme_exponent << "\n";
    return os.str();
}

}  // namespace sagl
