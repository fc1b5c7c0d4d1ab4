#include "ria/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ria/align.hpp"
#include "ria/dof_regions.hpp"
#include "ria/lattice.hpp"
#include "ria/net_model.hpp"
#include "ria/sim.hpp"

namespace ria {

namespace {

using ordered_json = nlohmann::ordered_json;

struct CommonOpts {
    std::string config_path;
    std::int64_t seed_override = -1;  // <0: use the config file's seed
    std::string out;
    std::string format = "json";
    std::size_t cap_directions = kDefaultDirectionCap;
    unsigned long long cap_enum = 100000000ULL;
    unsigned long long cap_codebook = 1000000ULL;
    int threads = 1;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "network config JSON path")
        ->required();
    cmd->add_option("--seed", opts.seed_override,
                    "override the seed stored in the config file");
    cmd->add_option("--out", opts.out, "artifact output path");
    cmd->add_option("--format", opts.format, "artifact format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--cap-directions", opts.cap_directions,
                    "construction cap on D + D' per stream");
    cmd->add_option("--cap-enum", opts.cap_enum,
                    "cap on distance-enumeration points");
    cmd->add_option("--cap-codebook", opts.cap_codebook,
                    "cap on ML decoding codebook entries");
    cmd->add_option("--threads", opts.threads, "worker thread cap");
}

struct Loaded {
    NetworkConfig config;
    std::uint64_t seed;
    std::string hash;
    Caps caps;
    int threads;
};

Loaded load(const CommonOpts& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw SchemaError("cannot open config file " + opts.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    ParsedConfig parsed = config_from_json(buf.str());
    Loaded l;
    l.config = parsed.config;
    l.seed = opts.seed_override >= 0 ? static_cast<std::uint64_t>(opts.seed_override)
                                     : parsed.seed;
    l.hash = config_hash(l.config, l.seed);
    l.caps.directions = opts.cap_directions;
    l.caps.enumeration = opts.cap_enum;
    l.caps.codebook = opts.cap_codebook;
    l.threads = opts.threads;
    return l;
}

ordered_json meta_json(const Loaded& l) {
    ordered_json meta;
    meta["version"] = kVersion;
    meta["config_hash"] = l.hash;
    meta["seed"] = l.seed;
    return meta;
}

std::string meta_line(const Loaded& l) {
    return "version=" + std::string(kVersion) + " config_hash=" + l.hash +
           " seed=" + std::to_string(l.seed);
}

void write_artifact(const std::string& path, const std::string& payload) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write artifact " + path);
    out << payload;
}

RationalVector parse_rationals(const std::string& text, int expected) {
    std::vector<Rational> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(Rational::parse(item));
    if (expected >= 0 && static_cast<int>(vals.size()) != expected)
        throw SchemaError("expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(vals.size()));
    RationalVector v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

int cmd_regions(const CommonOpts& opts, const std::string& contains,
                const std::string& maximize, bool vertices) {
    Loaded l = load(opts);
    DofRegion inner = inner_region(l.config);
    bool have_outer = l.config.kind == NetworkKind::InterferenceChannel &&
                      l.config.uniform_tx() && l.config.uniform_rx() &&
                      l.config.K <= kMaxOuterUsers;
    std::optional<DofRegion> outer;
    if (have_outer) outer = outer_region(l.config.K, l.config.M[0], l.config.N[0]);

    ordered_json result;
    result["meta"] = meta_json(l);
    result["inner"] = ordered_json::parse(region_to_json(inner));
    if (outer) result["outer"] = ordered_json::parse(region_to_json(*outer));

    if (!contains.empty()) {
        RationalVector v = parse_rationals(contains, inner.dim);
        DofPoint point;
        point.J = l.config.kind == NetworkKind::XNetwork ? l.config.J : 1;
        point.K = l.config.kind == NetworkKind::XNetwork ? l.config.K : inner.dim;
        point.v = v;
        bool in_expanded = region_contains(inner, point);
        bool in_direct = inner_contains_direct(l.config, point);
        result["contains"]["inner"] = in_expanded;
        result["contains"]["inner_direct"] = in_direct;
        std::cout << "contains inner: " << (in_expanded ? "true" : "false") << "\n";
        if (outer) {
            bool in_outer = region_contains(*outer, point);
            result["contains"]["outer"] = in_outer;
            std::cout << "contains outer: " << (in_outer ? "true" : "false") << "\n";
        }
    }
    if (!maximize.empty()) {
        RationalVector obj = parse_rationals(maximize, inner.dim);
        MaximizeResult mi = region_maximize(inner, obj);
        result["maximize"]["inner"] = mi.value.to_string();
        std::cout << "maximize inner = " << mi.value.to_string() << "\n";
        if (outer) {
            MaximizeResult mo = region_maximize(*outer, obj);
            result["maximize"]["outer"] = mo.value.to_string();
            std::cout << "maximize outer = " << mo.value.to_string() << "\n";
        }
    }
    if (vertices) {
        auto verts = region_vertices(inner);
        std::cout << "inner vertices: " << verts.size() << "\n";
        if (opts.format == "csv") {
            write_artifact(opts.out, "# " + meta_line(l) + "\n" + vertices_to_csv(verts));
            return 0;
        }
        ordered_json jv = ordered_json::array();
        for (const auto& v : verts) {
            std::vector<std::string> row;
            for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i].to_string());
            jv.push_back(row);
        }
        result["vertices"] = jv;
    }
    write_artifact(opts.out, result.dump(2) + "\n");
    return 0;
}

int cmd_directions(const CommonOpts& opts, int n, int streams, int target) {
    Loaded l = load(opts);
    DirectionCounts counts =
        direction_counts(l.config, n, target >= 1 ? target - 1 : -1);
    std::cout << "E=" << counts.E << " D=" << counts.D.to_string()
              << " D'=" << counts.Dprime.to_string() << "\n";
    if (opts.out.empty()) return 0;

    DirectionFamily fam = build_directions(l.config, n, streams, l.seed,
                                           target >= 1 ? target - 1 : -1,
                                           l.caps.directions);
    ordered_json result;
    result["meta"] = meta_json(l);
    result["E"] = counts.E;
    result["D"] = counts.D.to_string();
    result["Dprime"] = counts.Dprime.to_string();
    ordered_json base = ordered_json::array();
    ordered_json ext = ordered_json::array();
    for (const auto& set : fam.base)
        base.push_back(ordered_json::parse(direction_set_to_json(set)));
    for (const auto& set : fam.extended)
        ext.push_back(ordered_json::parse(direction_set_to_json(set)));
    result["base"] = base;
    result["extended"] = ext;
    write_artifact(opts.out, result.dump(2) + "\n");
    return 0;
}

int cmd_align_check(const CommonOpts& opts, int n, const std::string& dof,
                    const std::string& dump_model, int receiver) {
    Loaded l = load(opts);
    DofPoint point = dof.empty() ? default_dof_point(l.config) : parse_dof_point(dof);
    StreamAllocation alloc = allocate_streams(l.config, point);
    NetworkDirections nd =
        build_network_directions(l.config, n, alloc, l.seed, l.caps.directions);

    long long violations = 0;
    ordered_json reports = ordered_json::array();
    for (int j = 0; j < l.config.J; ++j) {
        AlignmentReport report = verify_alignment(l.config, nd, alloc, j);
        violations += static_cast<long long>(report.violations.size());
        std::cout << "receiver " << j + 1 << ": checked=" << report.checked
                  << " violations=" << report.violations.size() << "\n";
        ordered_json rec;
        rec["receiver"] = j + 1;
        rec["checked"] = report.checked;
        rec["violations"] = report.violations.size();
        ordered_json groups = ordered_json::array();
        for (const auto& g : report.groups) {
            ordered_json gg;
            if (g.target >= 0) gg["target"] = g.target + 1;
            gg["stream"] = g.stream + 1;
            gg["occupied"] = g.occupied;
            gg["capacity"] = g.capacity;
            groups.push_back(gg);
        }
        rec["groups"] = groups;
        reports.push_back(rec);
    }
    std::cout << "violations: " << violations << "\n";

    if (!dump_model.empty()) {
        ChannelMatrix channel = sample_channel(l.config, l.seed);
        ReceiveModel model = build_receive_model(l.config, channel, nd, alloc,
                                                 receiver - 1, l.seed, l.caps);
        write_artifact(dump_model, "# " + meta_line(l) + "\n" +
                                       receive_model_to_csv(model));
    }
    if (!opts.out.empty()) {
        ordered_json result;
        result["meta"] = meta_json(l);
        result["reports"] = reports;
        result["violations"] = violations;
        write_artifact(opts.out, result.dump(2) + "\n");
    }
    return violations == 0 ? 0 : 3;
}

int cmd_mindist(const CommonOpts& opts, int n, long Q, int monomials, int receiver,
                double delta, double p0, double epsilon) {
    Loaded l = load(opts);
    DistanceReport report;
    if (monomials > 0) {
        // Row of the first m extended-set monomials, the pure Diophantine probe.
        DirectionFamily fam =
            build_directions(l.config, n, 1, l.seed,
                             l.config.kind == NetworkKind::XNetwork ? 0 : -1,
                             l.caps.directions);
        if (static_cast<std::size_t>(monomials) > fam.extended[0].size())
            throw SchemaError("only " + std::to_string(fam.extended[0].size()) +
                              " extended monomials available");
        ChannelMatrix channel = sample_channel(l.config, l.seed);
        Eigen::MatrixXd A(1, monomials);
        for (int i = 0; i < monomials; ++i)
            A(0, i) = fam.extended[0].eval(static_cast<std::size_t>(i), channel);
        report = min_distance(A, Q, delta, l.caps.enumeration, l.threads);
    } else {
        DofPoint point = default_dof_point(l.config);
        LinkContext ctx = build_link_context(l.config, l.seed, n, point, l.caps);
        const ReceiveModel& model = ctx.models[receiver - 1];
        report = min_distance(model.B, Q, delta, l.caps.enumeration, l.threads);
        if (p0 > 0 && l.config.kind == NetworkKind::InterferenceChannel &&
            l.config.uniform_tx() && l.config.uniform_rx()) {
            double w = static_cast<double>(model.G) / model.rows;
            CodeParams params = choose_code_params_p0(p0, epsilon, w, ctx.nu2_max);
            DirectionCounts counts = direction_counts(l.config, n);
            apply_result1_bound(report, params.lambda, l.config.K, l.config.N[0],
                                static_cast<long long>(counts.D.to_u64()),
                                static_cast<long long>(counts.Dprime.to_u64()));
        }
    }
    std::cout << "d_min=" << report.d_min << " bound_lemma1=" << report.bound_lemma1
              << " pass=" << (report.pass_lemma1 ? "true" : "false") << "\n";
    if (!opts.out.empty()) {
        ordered_json result = ordered_json::parse(distance_report_to_json(report));
        ordered_json wrapped;
        wrapped["meta"] = meta_json(l);
        wrapped["report"] = result;
        write_artifact(opts.out, wrapped.dump(2) + "\n");
    }
    return 0;
}

int cmd_simulate(const CommonOpts& opts, int n, const std::string& dof,
                 long long trials, double epsilon, int p0_min_exp, int p0_max_exp) {
    Loaded l = load(opts);
    ExperimentPlan plan;
    plan.config = l.config;
    plan.seed = l.seed;
    plan.n = n;
    plan.dof_point = dof.empty() ? default_dof_point(l.config) : parse_dof_point(dof);
    for (int e = p0_min_exp; e <= p0_max_exp; ++e)
        plan.p0_grid.push_back(std::pow(10.0, e));
    plan.epsilon = epsilon;
    plan.trials = trials;
    plan.threads = l.threads;
    plan.caps = l.caps;

    SlopeReport report = run_link_experiment(plan);
    for (std::size_t j = 0; j < report.slope_per_receiver.size(); ++j) {
        const auto& s = report.slope_per_receiver[j];
        std::cout << "receiver " << j + 1 << ": finite-n prediction "
                  << report.finite_n_per_receiver[j].to_string() << ", slope ";
        if (s.conclusive)
            std::cout << s.slope << " (stderr " << s.stderr_ << ", rows "
                      << s.rows_used << ")\n";
        else
            std::cout << "inconclusive (" << s.rows_used << " reliable rows)\n";
    }
    std::string stem = opts.out.empty() ? "slope_report" : opts.out;
    write_artifact(stem + ".csv", slope_report_to_csv(report, meta_line(l)));
    write_artifact(stem + ".json",
                   slope_report_to_json(report, l.hash, l.seed) + "\n");
    return 0;
}

int cmd_formulas(const CommonOpts& opts) {
    Loaded l = load(opts);
    auto formulas = total_dof_formulas(l.config);
    ordered_json rows = ordered_json::array();
    for (const auto& f : formulas) {
        std::cout << f.formula << " = " << f.value.to_string();
        ordered_json rec;
        rec["label"] = f.label;
        rec["formula"] = f.formula;
        rec["value"] = f.value.to_string();
        if (f.witness) {
            std::cout << "  (witness d = " << f.witness->v[0].to_string() << ")";
            rec["witness_entry"] = f.witness->v[0].to_string();
        }
        std::cout << "\n";
        rows.push_back(rec);
    }
    if (formulas.empty())
        std::cout << "no closed-form totals for this configuration\n";
    if (!opts.out.empty()) {
        ordered_json result;
        result["meta"] = meta_json(l);
        result["formulas"] = rows;
        write_artifact(opts.out, result.dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"real interference alignment toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string contains, maximize, dof, dump_model;
    bool vertices = false;
    int n = 1, streams = 1, target = 0, monomials = 0, receiver = 1;
    long Q = 1;
    double delta = 0.5, p0 = 0, epsilon = 0.5;
    long long trials = 10000;
    double sim_epsilon = 0.01;
    int p0_min_exp = 2, p0_max_exp = 8;

    auto* regions = app.add_subcommand("regions", "inner/outer DoF regions and queries");
    attach_common(regions, opts);
    regions->add_option("--contains", contains, "membership query point (rationals)");
    regions->add_option("--maximize", maximize, "objective coefficients (rationals)");
    regions->add_flag("--vertices", vertices, "enumerate inner-region vertices");

    auto* directions = app.add_subcommand("directions", "direction counts and sets");
    attach_common(directions, opts);
    directions->add_option("--n", n, "degree parameter")->required();
    directions->add_option("--streams", streams, "streams to build");
    directions->add_option("--target", target, "X-network target receiver (1-based)");

    auto* align_check = app.add_subcommand("align-check", "verify alignment closure");
    attach_common(align_check, opts);
    align_check->add_option("--n", n, "degree parameter")->required();
    align_check->add_option("--dof", dof, "DoF point (rationals; rows ';' for X)");
    align_check->add_option("--dump-model", dump_model, "receive-model CSV path");
    align_check->add_option("--receiver", receiver, "receiver for --dump-model");

    auto* mindist = app.add_subcommand("mindist", "exhaustive minimum distance");
    attach_common(mindist, opts);
    mindist->add_option("--n", n, "degree parameter")->required();
    mindist->add_option("--Q", Q, "integer constellation radius")->required();
    mindist->add_option("--monomials", monomials,
                        "probe the first m extended monomials instead of a model");
    mindist->add_option("--receiver", receiver, "receiver model to probe");
    mindist->add_option("--delta", delta, "Diophantine slack");
    mindist->add_option("--p0", p0, "attach the constellation bound at this P0");
    mindist->add_option("--epsilon", epsilon, "epsilon for --p0");

    auto* simulate = app.add_subcommand(
        "simulate",
        "power sweep and DoF slope; CSV columns: receiver,P0,Q,lambda,d_min,"
        "bound,empirical_err,ci_lo,ci_hi,useful_symbols,rate_nats,slope_point,"
        "reliable (one row per sweep point and receiver)");
    attach_common(simulate, opts);
    simulate->add_option("--n", n, "degree parameter")->required();
    simulate->add_option("--dof", dof, "DoF point (rationals; rows ';' for X)");
    simulate->add_option("--trials", trials, "Monte Carlo trials per sweep point");
    simulate->add_option("--epsilon", sim_epsilon, "code-parameter epsilon");
    simulate->add_option("--p0-min-exp", p0_min_exp, "smallest grid exponent");
    simulate->add_option("--p0-max-exp", p0_max_exp, "largest grid exponent");

    auto* formulas = app.add_subcommand("formulas", "closed-form total-DoF table");
    attach_common(formulas, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (regions->parsed()) return cmd_regions(opts, contains, maximize, vertices);
        if (directions->parsed()) return cmd_directions(opts, n, streams, target);
        if (align_check->parsed())
            return cmd_align_check(opts, n, dof, dump_model, receiver);
        if (mindist->parsed())
            return cmd_mindist(opts, n, Q, monomials, receiver, delta, p0, epsilon);
        if (simulate->parsed())
            return cmd_simulate(opts, n, dof, trials, sim_epsilon, p0_min_exp,
                                p0_max_exp);
        if (formulas->parsed()) return cmd_formulas(opts);
    } catch (const CapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace ria
