// sagl: semi-algebraic adjacency labeling tool
//
// Subcommands: lift, gen, encode, decode, verify, bench, bounds.
// Exit codes: 0 success, 2 gate rejection, 3 provider exhausted, 4 decode
// mismatch, 1 anything else.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sagl/bounds.hpp"
#include "sagl/errors.hpp"
#include "sagl/harness.hpp"

using namespace sagl;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct FamilyArgs {
    std::string family = "unit-disk";
    unsigned dot_q = 2;
    long dot_t = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family,
                        "built-in family (unit-disk, disk, dot-product) or a family-spec file");
        cmd->add_option("--dot-q", dot_q, "ambient dimension for dot-product");
        cmd->add_option("--dot-t", dot_t, "threshold t for dot-product (f = x.y - t)");
    }

    bool is_builtin() const {
        return family == "unit-disk" || family == "disk" || family == "dot-product";
    }

    InstanceSpec spec(unsigned n, std::uint64_t seed) const {
        if (is_builtin()) return make_builtin_spec(family, n, seed, dot_q, dot_t);
        InstanceSpec s;
        s.family_name = family;
        s.family_text = slurp(family);
        s.n = n;
        s.seed = seed;
        return s;
    }
};

struct RunArgs {
    std::uint64_t seed = 1;
    double beta = 2.0;
    unsigned max_retries = 8;
    bool strict_balance = false;
    bool no_resample = false;
    bool geo_audit = false;
    unsigned threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "instance / partition seed");
        cmd->add_option("--beta", beta, "relaxed balance factor (default 2)");
        cmd->add_option("--max-retries", max_retries, "provider retries per node");
        cmd->add_flag("--strict-balance", strict_balance, "require the strict Yao-Yao load band");
        cmd->add_flag("--no-resample", no_resample, "fail instead of reseeding on a zero sign");
        cmd->add_flag("--geo-audit", geo_audit, "also run the exact cone-avoidance audit per node");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    }

    RunParams params() const {
        RunParams p;
        p.beta = Rational(beta);
        p.beta.canonicalize();
        p.require_strict = strict_balance;
        p.max_retries = max_retries;
        p.resample_cap = no_resample ? 0 : 16;
        p.geometric_audit = geo_audit;
        p.threads = threads;
        return p;
    }
};

std::vector<RatVec> load_points(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_points_csv(f);
}

int decode_all_sections(const std::vector<LabelFileSection>& sections, std::uint32_t u,
                        std::uint32_t v) {
    bool edge = true;
    for (const auto& sec : sections) {
        if (u >= sec.labels.size() || v >= sec.labels.size())
            throw std::invalid_argument("vertex id out of range");
        int bit = decode(sec.labels[u], sec.labels[v]);
        edge = edge && ((bit == 1) != sec.complement);
    }
    return edge ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-algebraic adjacency labeling"};
    app.set_config("--config", "", "key=value config file");
    app.require_subcommand(1);

    auto* lift = app.add_subcommand("lift", "reduce a family to its diagonalized bilinear form");
    FamilyArgs lift_fam;
    lift_fam.attach(lift);
    bool lift_json = false;
    lift->add_flag("--json", lift_json, "machine-readable output");

    auto* gen = app.add_subcommand("gen", "generate a random instance");
    FamilyArgs gen_fam;
    gen_fam.attach(gen);
    unsigned gen_n = 64;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "-";
    gen->add_option("--n", gen_n, "number of vertices")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output csv path ('-' = stdout)");

    auto* encode = app.add_subcommand("encode", "encode an instance into a label file");
    FamilyArgs enc_fam;
    enc_fam.attach(encode);
    RunArgs enc_run;
    enc_run.attach(encode);
    unsigned enc_n = 0;
    std::string enc_points, enc_out;
    encode->add_option("--n", enc_n, "generate this many vertices");
    encode->add_option("--points", enc_points, "points csv (instead of --n)");
    encode->add_option("--out", enc_out, "label file path")->required();

    auto* dec = app.add_subcommand("decode", "answer one adjacency query from a label file");
    std::string dec_labels;
    std::uint32_t dec_u = 0, dec_v = 0;
    dec->add_option("--labels", dec_labels, "label file")->required();
    dec->add_option("--u", dec_u, "first vertex id")->required();
    dec->add_option("--v", dec_v, "second vertex id")->required();

    auto* verify = app.add_subcommand("verify", "full round trip against direct evaluation");
    FamilyArgs ver_fam;
    ver_fam.attach(verify);
    RunArgs ver_run;
    ver_run.attach(verify);
    unsigned ver_n = 64;
    std::string ver_points, ver_audit;
    bool ver_json = false;
    verify->add_option("--n", ver_n, "generate this many vertices");
    verify->add_option("--points", ver_points, "points csv (instead of --n)");
    verify->add_option("--audit", ver_audit, "write the hierarchy audit dump (json)");
    verify->add_flag("--json", ver_json, "machine-readable report");

    auto* bench = app.add_subcommand("bench", "scaling run over a grid of sizes");
    FamilyArgs ben_fam;
    ben_fam.attach(bench);
    RunArgs ben_run;
    ben_run.attach(bench);
    std::vector<unsigned> ben_sizes;
    std::string ben_csv;
    bench->add_option("--ns", ben_sizes, "at least 4 sizes, e.g. --ns 64 256 1024 4096")
        ->required()
        ->expected(-4);
    bench->add_option("--csv", ben_csv, "write rows to this csv file");

    auto* bounds = app.add_subcommand("bounds", "closed-form bound calculators");
    std::vector<std::uint64_t> warren_args, family_args;
    unsigned exp_q = 0;
    bounds->add_option("--warren", warren_args, "k l d: region bound (8edk/l)^l")->expected(3);
    bounds->add_option("--family-count", family_args, "n dimS p d: graph count bound")->expected(4);
    bounds->add_option("--exponent", exp_q, "Q: scheme exponent log2(2^Q-1)/Q");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*lift) {
            Family fam = parse_family(lift_fam.spec(0, 0).family_text);
            nlohmann::json out;
            out["q"] = fam.q;
            auto& arr = out["constraints"] = nlohmann::json::array();
            for (const auto& c : fam.constraints) {
                BilinearForm bf = to_bilinear(c.pred);
                DiagonalizedForm form = congruence_diagonalize(bf);
                nlohmann::json cj;
                cj["d"] = c.pred.total_degree();
                cj["lift_dim"] = bf.dim();
                cj["Q"] = form.reduced_dim;
                cj["signature"] = {form.count_positive, form.count_negative};
                cj["complement"] = c.complement;
                auto& diag = cj["diagonal"] = nlohmann::json::array();
                for (const auto& dv : form.diagonal) diag.push_back(rational_to_string(dv));
                arr.push_back(std::move(cj));
            }
            if (lift_json) {
                std::cout << out.dump(2) << "\n";
            } else {
                std::cout << "q = " << fam.q << "\n";
                for (std::size_t i = 0; i < fam.constraints.size(); ++i) {
                    const auto& cj = out["constraints"][i];
                    std::cout << "constraint " << i << ": lift dim " << cj["lift_dim"]
                              << " -> Q = " << cj["Q"] << ", signature (" << cj["signature"][0]
                              << "," << cj["signature"][1] << ")"
                              << (fam.constraints[i].complement ? " [complemented]" : "") << "\n"
                              << "  diagonal:";
                    for (const auto& dv : cj["diagonal"]) std::cout << " " << dv.get<std::string>();
                    std::cout << "\n";
                }
            }
            return 0;
        }

        if (*gen) {
            auto points = generate_instance(gen_fam.spec(gen_n, gen_seed));
            if (gen_out == "-") {
                write_points_csv(std::cout, points);
            } else {
                std::ofstream f(gen_out);
                if (!f) throw std::runtime_error("cannot open " + gen_out);
                write_points_csv(f, points);
            }
            return 0;
        }

        if (*encode) {
            RunParams params = enc_run.params();
            EncodedInstance enc = [&] {
                if (!enc_points.empty()) {
                    Family fam = parse_family(enc_fam.spec(0, 0).family_text);
                    return encode_given_points(fam, load_points(enc_points), enc_run.seed, params);
                }
                if (enc_n == 0) throw std::runtime_error("encode: need --n or --points");
                return encode_instance(enc_fam.spec(enc_n, enc_run.seed), params);
            }();
            std::ofstream f(enc_out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + enc_out);
            write_label_file(f, enc.sections);
            std::cerr << "wrote " << enc.sections.size() << " section(s), n = " << enc.spec.n
                      << ", to " << enc_out << "\n";
            return 0;
        }

        if (*dec) {
            std::ifstream f(dec_labels, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + dec_labels);
            auto sections = read_label_file(f);
            std::cout << decode_all_sections(sections, dec_u, dec_v) << "\n";
            return 0;
        }

        if (*verify) {
            RunParams params = ver_run.params();
            RunReport rep;
            if (!ver_points.empty()) {
                Family fam = parse_family(ver_fam.spec(0, 0).family_text);
                auto points = load_points(ver_points);
                EncodedInstance enc =
                    encode_given_points(fam, std::move(points), ver_run.seed, params);
                if (!ver_audit.empty()) {
                    std::ofstream af(ver_audit);
                    af << hierarchy_audit_json(enc.hierarchies[0], enc.signs[0]) << "\n";
                }
                std::ostringstream os(std::ios::binary);
                write_label_file(os, enc.sections);
                std::istringstream is(os.str(), std::ios::binary);
                auto sections = read_label_file(is);
                rep.family_name = ver_fam.family;
                rep.n = enc.spec.n;
                rep.seed = rep.requested_seed = ver_run.seed;
                for (std::size_t i = 0; i < enc.spec.n; ++i)
                    for (std::size_t j = i + 1; j < enc.spec.n; ++j) {
                        bool predicted =
                            decode_all_sections(sections, static_cast<std::uint32_t>(i),
                                                static_cast<std::uint32_t>(j)) == 1;
                        bool truth = enc.family.edge(enc.points[i], enc.points[j]);
                        if (predicted != truth) ++rep.mismatches;
                        ++rep.pair_count;
                    }
            } else {
                rep = run_roundtrip(ver_fam.spec(ver_n, ver_run.seed), params);
                if (!ver_audit.empty()) {
                    EncodedInstance enc =
                        encode_instance(ver_fam.spec(ver_n, ver_run.seed), params);
                    std::ofstream af(ver_audit);
                    af << hierarchy_audit_json(enc.hierarchies[0], enc.signs[0]) << "\n";
                }
            }
            std::cout << (ver_json ? run_report_json(rep) : run_report_text(rep)) << "\n";
            return rep.mismatches == 0 && rep.orientation_agreement ? 0 : 4;
        }

        if (*bench) {
            RunParams params = ben_run.params();
            InstanceSpec base = ben_fam.spec(0, ben_run.seed);
            ScalingReport rep = run_scaling(base, ben_sizes, params);
            std::string csv = scaling_report_csv(rep);
            if (!ben_csv.empty()) {
                std::ofstream f(ben_csv);
                f << csv;
            }
            std::cout << csv;
            std::cout << "fitted slope " << rep.fitted_slope << " vs scheme exponent "
                      << rep.scheme_exponent << " (Q = " << rep.reduced_dim << ")\n";
            return 0;
        }

        if (*bounds) {
            if (warren_args.size() == 3) {
                BoundValue v = warren_region_bound(warren_args[0], warren_args[1], warren_args[2]);
                std::cout << "warren_region_bound(k=" << warren_args[0] << ", l=" << warren_args[1]
                          << ", d=" << warren_args[2] << "): log2 = " << v.log2_value << "\n";
            }
            if (family_args.size() == 4) {
                FamilyCountBound v = family_count_bound(family_args[0], family_args[1],
                                                        family_args[2], family_args[3]);
                std::cout << "family_count_bound(n=" << family_args[0] << ", dimS=" << family_args[1]
                          << ", p=" << family_args[2] << ", d=" << family_args[3]
                          << "): log2 = " << v.log2_value << ", c = " << v.c << "\n";
            }
            if (exp_q > 0)
                std::cout << "scheme_exponent(" << exp_q << ") = " << scheme_exponent(exp_q)
                          << "\n";
            return 0;
        }
    } catch (const GateError& e) {
        std::cerr << "gate rejection: " << e.what() << "\n";
        return 2;
    } catch (const ProviderError& e) {
        std::cerr << "provider exhausted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
