#include "ria/sim.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ria/dof_regions.hpp"
#include "ria/rng.hpp"

namespace ria {

std::vector<double> default_power_grid() {
    std::vector<double> grid;
    for (int e = 2; e <= 8; ++e) grid.push_back(std::pow(10.0, e));
    return grid;
}

DofPoint default_dof_point(const NetworkConfig& config) {
    switch (config.kind) {
        case NetworkKind::InterferenceChannel: {
            std::vector<Rational> d;
            for (int k = 0; k < config.K; ++k)
                d.push_back(Rational(static_cast<std::int64_t>(config.M[k]) * config.N[k],
                                     config.M[k] + config.N[k]));
            return DofPoint::vector_point(d);
        }
        case NetworkKind::GeneralDemand: {
            // Largest symmetric point: c * (|W_j| + 1{complement nonempty}) <= N_j.
            Rational c = Rational(config.N[0]);
            for (int j = 0; j < config.J; ++j) {
                int load = static_cast<int>(config.demands[j].size()) +
                           (config.demand_complement(j).empty() ? 0 : 1);
                c = rational_min(c, Rational(config.N[j], load));
            }
            return DofPoint::vector_point(std::vector<Rational>(config.K, c));
        }
        case NetworkKind::XNetwork: {
            Rational c = Rational(config.N[0], config.K + config.J - 1);
            for (int j = 1; j < config.J; ++j)
                c = rational_min(c, Rational(config.N[j], config.K + config.J - 1));
            return DofPoint::matrix_point(config.J, config.K,
                                          std::vector<Rational>(config.J * config.K, c));
        }
    }
    return {};
}

Rational finite_n_rate_prediction(const NetworkConfig& config, int n, int receiver) {
    std::vector<Rational> ones(config.message_count(), Rational(0));
    for (int m = 0; m < config.message_count(); ++m) {
        int tx = (config.kind == NetworkKind::XNetwork) ? m % config.K : m;
        ones[m] = Rational(config.M[tx]);  // dbar = 1 per message
    }
    DofPoint point;
    point.J = config.kind == NetworkKind::XNetwork ? config.J : 1;
    point.K = config.kind == NetworkKind::XNetwork ? config.K : config.message_count();
    point.v.resize(ones.size());
    for (std::size_t i = 0; i < ones.size(); ++i) point.v[i] = ones[i];

    StreamAllocation alloc = allocate_streams(config, point);
    NetworkDirections nd = build_network_directions(config, n, alloc, 0);
    ChannelMatrix ch = sample_channel(config, 0);
    ReceiveModel model = build_receive_model(config, ch, nd, alloc, receiver, 0);
    return Rational(model.useful_cols * config.N[receiver],
                    model.G + config.N[receiver]);
}

void validate_plan(const ExperimentPlan& plan, const LinkContext& ctx) {
    if (plan.p0_grid.empty()) throw SchemaError("empty power grid");
    for (std::size_t i = 1; i < plan.p0_grid.size(); ++i)
        if (!(plan.p0_grid[i] > plan.p0_grid[i - 1]))
            throw SchemaError("power grid must be strictly increasing");
    if (plan.trials < 1) throw SchemaError("trials must be >= 1");

    double w = 0;
    for (const auto& model : ctx.models)
        w = std::max(w, static_cast<double>(model.G) / model.rows);
    const double p0_max = plan.p0_grid.back();
    CodeParams params = choose_code_params_p0(p0_max, plan.epsilon, w, ctx.nu2_max,
                                              plan.delta_slack);
    for (const auto& model : ctx.models) {
        if (codebook_size(model, params.Q, plan.caps.codebook) > plan.caps.codebook)
            throw CapError("plan refused: codebook at P0=" + std::to_string(p0_max) +
                           " exceeds cap " + std::to_string(plan.caps.codebook));
        // Difference enumeration over the feasible box must fit as well.
        unsigned long long total = 1;
        for (long long c = 0; c < model.G; ++c) {
            unsigned long long radix =
                4ULL * static_cast<unsigned long long>(model.column_mult[c]) *
                    params.Q + 1;
            if (total > plan.caps.enumeration / radix)
                throw CapError("plan refused: distance enumeration at P0=" +
                               std::to_string(p0_max) + " exceeds cap " +
                               std::to_string(plan.caps.enumeration));
            total *= radix;
        }
    }
}

SlopeReport run_link_experiment(const ExperimentPlan& plan) {
    LinkContext ctx = build_link_context(plan.config, plan.seed, plan.n,
                                         plan.dof_point, plan.caps);
    validate_plan(plan, ctx);

    SlopeReport report;
    report.nu2_max = ctx.nu2_max;
    for (const auto& model : ctx.models)
        report.w = std::max(report.w, static_cast<double>(model.G) / model.rows);
    for (int j = 0; j < plan.config.J; ++j) {
        const auto& model = ctx.models[j];
        report.finite_n_per_receiver.push_back(
            Rational(model.useful_cols * plan.config.N[j], model.G + plan.config.N[j]));
    }
    auto formulas = total_dof_formulas(plan.config);
    if (!formulas.empty() && formulas[0].witness)
        report.asymptotic_per_message = formulas[0].witness->v[0];

    for (std::size_t p = 0; p < plan.p0_grid.size(); ++p) {
        const double P0 = plan.p0_grid[p];
        CodeParams params = choose_code_params_p0(P0, plan.epsilon, report.w,
                                                  ctx.nu2_max, plan.delta_slack);
        for (int j = 0; j < plan.config.J; ++j) {
            const auto& model = ctx.models[j];
            // Distances over the feasible codeword differences: column c of
            // the integer vector ranges over Z_{mult_c * Q}.
            Eigen::VectorXi radii =
                (model.column_mult.cast<long>() * (2 * params.Q)).cast<int>();
            DistanceReport dm = min_distance_bounded(model.B, radii, 0.5,
                                                     plan.caps.enumeration,
                                                     plan.threads);
            ErrorRate mc = monte_carlo_error(
                ctx, j, params, plan.trials,
                derive_seed(plan.seed, Stream::Generic, p), 1.0, plan.threads,
                plan.caps.codebook);

            SweepRow row;
            row.receiver = j;
            row.P0 = P0;
            row.Q = params.Q;
            row.lambda = params.lambda;
            row.d_min = dm.d_min;
            // Union bound over the actual codebook at the exact feasible
            // minimum distance of the constellation.
            const double cb_count = static_cast<double>(
                codebook_size(model, params.Q, plan.caps.codebook));
            const double pair = params.lambda * dm.d_min;
            row.union_bound = cb_count * std::exp(-pair * pair / 8.0);
            row.useful_symbols = model.useful_cols;
            row.rate_nats = static_cast<double>(model.useful_cols) *
                            std::log(2.0 * params.Q + 1.0);
            row.block_err = mc.block_err;
            row.ci_lo = mc.wilson_lo;
            row.ci_hi = mc.wilson_hi;
            row.slope_point = row.rate_nats / (0.5 * std::log(P0));
            row.reliable = row.block_err <= plan.reliability_threshold;
            report.rows.push_back(row);
        }
    }

    for (int j = 0; j < plan.config.J; ++j) {
        std::vector<SweepRow> mine;
        for (const auto& row : report.rows)
            if (row.receiver == j) mine.push_back(row);
        report.slope_per_receiver.push_back(
            slope_estimate(mine, plan.reliability_threshold));
    }
    return report;
}

SlopeEstimate slope_estimate(const std::vector<SweepRow>& receiver_rows,
                             double reliability_threshold) {
    std::vector<double> xs, ys;
    for (const auto& row : receiver_rows) {
        if (row.block_err > reliability_threshold) continue;
        xs.push_back(0.5 * std::log(row.P0));
        ys.push_back(row.rate_nats);
    }
    SlopeEstimate est;
    est.rows_used = static_cast<int>(xs.size());
    if (xs.size() < 3) return est;  // inconclusive

    const int n = static_cast<int>(xs.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    est.conclusive = true;
    est.slope = sxy / sxx;
    double ss_res = 0;
    for (int i = 0; i < n; ++i) {
        double r = ys[i] - my - est.slope * (xs[i] - mx);
        ss_res += r * r;
    }
    est.stderr_ = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return est;
}

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

std::string slope_report_to_csv(const SlopeReport& report, const std::string& meta) {
    std::ostringstream out;
    out << "# " << meta << "\n";
    out << "receiver,P0,Q,lambda,d_min,bound,empirical_err,ci_lo,ci_hi,"
           "useful_symbols,rate_nats,slope_point,reliable\n";
    for (const auto& r : report.rows) {
        out << r.receiver + 1 << "," << fmt(r.P0) << "," << r.Q << "," << fmt(r.lambda)
            << "," << fmt(r.d_min) << "," << fmt(r.union_bound) << ","
            << fmt(r.block_err) << "," << fmt(r.ci_lo) << "," << fmt(r.ci_hi) << ","
            << r.useful_symbols << "," << fmt(r.rate_nats) << "," << fmt(r.slope_point)
            << "," << (r.reliable ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string slope_report_to_json(const SlopeReport& report,
                                 const std::string& config_hash, std::uint64_t seed) {
    nlohmann::ordered_json out;
    out["meta"]["config_hash"] = config_hash;
    out["meta"]["seed"] = seed;
    out["w"] = report.w;
    out["nu2_max"] = report.nu2_max;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json rec;
        rec["receiver"] = r.receiver + 1;
        rec["P0"] = r.P0;
        rec["Q"] = r.Q;
        rec["lambda"] = r.lambda;
        rec["d_min"] = r.d_min;
        rec["union_bound"] = r.union_bound;
        rec["useful_symbols"] = r.useful_symbols;
        rec["rate_nats"] = r.rate_nats;
        rec["block_err"] = r.block_err;
        rec["ci"] = {r.ci_lo, r.ci_hi};
        rec["slope_point"] = r.slope_point;
        rec["reliable"] = r.reliable;
        rows.push_back(rec);
    }
    out["rows"] = rows;
    nlohmann::ordered_json preds = nlohmann::ordered_json::array();
    for (const auto& p : report.finite_n_per_receiver) preds.push_back(p.to_string());
    out["finite_n_per_receiver"] = preds;
    if (report.asymptotic_per_message)
        out["asymptotic_per_message"] = report.asymptotic_per_message->to_string();
    nlohmann::ordered_json slopes = nlohmann::ordered_json::array();
    for (const auto& s : report.slope_per_receiver) {
        nlohmann::ordered_json rec;
        rec["conclusive"] = s.conclusive;
        rec["slope"] = s.slope;
        rec["stderr"] = s.stderr_;
        rec["rows_used"] = s.rows_used;
        slopes.push_back(rec);
    }
    out["slope_per_receiver"] = slopes;
    return out.dump(2);
}

}  // namespace ria
