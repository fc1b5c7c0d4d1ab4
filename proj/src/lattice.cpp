#include "ria/lattice.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ria/bigint.hpp"
#include "ria/parallel.hpp"
#include "ria/rng.hpp"

namespace ria {

namespace {

constexpr unsigned long long kChunk = 1 << 16;

void check_params(double P, double epsilon, double w, double nu2) {
    if (P <= 0) throw SchemaError("power P must be positive");
    if (epsilon <= 0 || epsilon >= 1) throw SchemaError("epsilon must lie in (0,1)");
    if (w <= 0) throw SchemaError("aspect ratio w must be positive");
    if (nu2 <= 0) throw SchemaError("nu^2 must be positive");
}

}  // namespace

CodeParams choose_code_params(double P, double epsilon, double w, double nu2,
                              std::optional<double> delta_slack) {
    check_params(P, epsilon, w, nu2);
    const double delta_max = epsilon * (1 + w) / (1 - epsilon);
    CodeParams cp;
    cp.P = P;
    cp.nu2 = nu2;
    cp.epsilon = epsilon;
    cp.w = w;
    cp.delta_slack = delta_slack.value_or(delta_max / 2);
    if (cp.delta_slack <= 0 || cp.delta_slack >= delta_max)
        throw SchemaError("delta slack must lie in (0, eps(1+w)/(1-eps))");
    cp.P0 = P / nu2;
    cp.Q = std::max(1L, static_cast<long>(std::floor(
                            std::pow(cp.P0, (1 - epsilon) / (2 * (1 + w))))));
    cp.lambda = std::sqrt(cp.P0) / static_cast<double>(cp.Q);
    return cp;
}

CodeParams choose_code_params_p0(double P0, double epsilon, double w, double nu2,
                                 std::optional<double> delta_slack) {
    return choose_code_params(P0 * nu2, epsilon, w, nu2, delta_slack);
}

namespace {

DistanceReport min_distance_core(const Eigen::MatrixXd& A,
                                 const Eigen::VectorXi& radii,
                                 unsigned long long cap, int threads) {
    const int m = static_cast<int>(A.cols());
    const int n = static_cast<int>(A.rows());

    unsigned long long total = 1;
    bool any_nonzero = false;
    for (int i = 0; i < m; ++i) {
        unsigned long long radix = 2ULL * radii[i] + 1;
        any_nonzero = any_nonzero || radii[i] > 0;
        if (total > cap / radix)
            throw CapError("distance enumeration refused: search needs more than " +
                           std::to_string(cap) + " points");
        total *= radix;
    }
    if (!any_nonzero) throw SchemaError("distance search over an empty box");

    unsigned long long zero_index = 0;
    for (int i = 0; i < m; ++i)
        zero_index = zero_index * (2ULL * radii[i] + 1) +
                     static_cast<unsigned long long>(radii[i]);

    struct ChunkBest {
        double sq = std::numeric_limits<double>::infinity();
        unsigned long long index = 0;
    };
    const std::size_t num_chunks = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
    std::vector<ChunkBest> best(num_chunks);

    parallel_chunks(total, kChunk, threads, [&](std::size_t c, unsigned long long b,
                                                unsigned long long e) {
        std::vector<long> digits(m);
        unsigned long long rem = b;
        for (int i = m - 1; i >= 0; --i) {
            unsigned long long radix = 2ULL * radii[i] + 1;
            digits[i] = static_cast<long>(rem % radix);
            rem /= radix;
        }
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < m; ++i)
            v += static_cast<double>(digits[i] - radii[i]) * A.col(i);

        ChunkBest local;
        for (unsigned long long pos = b; pos < e; ++pos) {
            if (pos != zero_index) {
                double sq = v.squaredNorm();
                if (sq < local.sq) {
                    local.sq = sq;
                    local.index = pos;
                }
            }
            for (int i = m - 1; i >= 0; --i) {
                if (++digits[i] < 2L * radii[i] + 1) {
                    v += A.col(i);
                    break;
                }
                digits[i] = 0;
                v -= static_cast<double>(2 * radii[i]) * A.col(i);
            }
        }
        best[c] = local;
    });

    ChunkBest global;
    for (const auto& cb : best)
        if (cb.sq < global.sq) global = cb;

    DistanceReport report;
    report.m = m;
    report.nrows = n;
    report.enumerated = total - 1;
    report.argmin.resize(m);
    unsigned long long rem = global.index;
    for (int i = m - 1; i >= 0; --i) {
        unsigned long long radix = 2ULL * radii[i] + 1;
        report.argmin[i] =
            static_cast<int>(static_cast<long>(rem % radix) - radii[i]);
        rem /= radix;
    }
    // Exact recomputation at the argmin removes incremental rounding drift.
    report.d_min = (A * report.argmin.cast<double>()).norm();
    return report;
}

}  // namespace

DistanceReport min_distance(const Eigen::MatrixXd& A, long Q, double delta,
                            unsigned long long cap, int threads) {
    if (Q < 1) throw SchemaError("min_distance needs Q >= 1");
    const int m = static_cast<int>(A.cols());
    Eigen::VectorXi radii = Eigen::VectorXi::Constant(m, static_cast<int>(2 * Q));
    DistanceReport report = min_distance_core(A, radii, cap, threads);
    report.Q = Q;
    report.delta = delta;
    report.bound_lemma1 = std::pow(static_cast<double>(Q),
                                   -(static_cast<double>(m) / report.nrows) - delta);
    report.pass_lemma1 = report.d_min >= report.bound_lemma1;
    return report;
}

DistanceReport min_distance_bounded(const Eigen::MatrixXd& A,
                                    const Eigen::VectorXi& radii, double delta,
                                    unsigned long long cap, int threads) {
    DistanceReport report = min_distance_core(A, radii, cap, threads);
    report.delta = delta;
    return report;
}

void apply_result1_bound(DistanceReport& report, double lambda, int K, int N,
                         long long D, long long Dprime) {
    report.lambda = lambda;
    const double base = 2.0 * (K - 1) * N * static_cast<double>(report.Q);
    report.bound_result1 =
        lambda * std::pow(base, -static_cast<double>(D + Dprime) - report.delta);
    report.pass_result1 = lambda * report.d_min >= report.bound_result1;
}

Eigen::VectorXi ml_decode_bounded(const Eigen::VectorXd& z, const Eigen::MatrixXd& B,
                                  double lambda, const Eigen::VectorXi& bounds,
                                  unsigned long long cap) {
    const int m = static_cast<int>(B.cols());
    const int n = static_cast<int>(B.rows());
    unsigned long long total = 1;
    for (int i = 0; i < m; ++i) {
        unsigned long long radix = 2ULL * bounds[i] + 1;
        if (radix == 0 || total > cap / radix)
            throw CapError("ML decoding refused: codebook exceeds cap " +
                           std::to_string(cap));
        total *= radix;
    }

    std::vector<long> digits(m, 0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        v -= lambda * static_cast<double>(bounds[i]) * B.col(i);

    double best_sq = std::numeric_limits<double>::infinity();
    unsigned long long best_index = 0;
    for (unsigned long long pos = 0; pos < total; ++pos) {
        double sq = (z - v).squaredNorm();
        if (sq < best_sq) {  // strict: ties keep the lexicographically smallest u
            best_sq = sq;
            best_index = pos;
        }
        for (int i = m - 1; i >= 0; --i) {
            if (++digits[i] < 2L * bounds[i] + 1) {
                v += lambda * B.col(i);
                break;
            }
            digits[i] = 0;
            v -= lambda * static_cast<double>(2 * bounds[i]) * B.col(i);
        }
    }

    Eigen::VectorXi u(m);
    unsigned long long rem = best_index;
    for (int i = m - 1; i >= 0; --i) {
        unsigned long long radix = 2ULL * bounds[i] + 1;
        u[i] = static_cast<int>(static_cast<long>(rem % radix) - bounds[i]);
        rem /= radix;
    }
    return u;
}

Eigen::VectorXi ml_decode(const Eigen::VectorXd& y, const ReceiveModel& model,
                          const CodeParams& params, unsigned long long cap) {
    Eigen::VectorXd z = model.W.partialPivLu().solve(y);
    Eigen::VectorXi bounds =
        (model.column_mult.cast<long>() * params.Q).cast<int>();
    return ml_decode_bounded(z, model.B, params.lambda, bounds, cap);
}

ErrorBound error_prob_bound(long long m, int /*nrows*/, long Q, double d_min) {
    ErrorBound eb;
    const double exponent = -d_min * d_min / 8.0;
    eb.standard = std::exp(static_cast<double>(m) * std::log(2.0 * Q + 1.0) + exponent);
    eb.loose = Q >= 1 ? std::exp(static_cast<double>(m) * std::log(3.0 * Q) + exponent)
                      : 0.0;
    return eb;
}

unsigned long long codebook_size(const ReceiveModel& model, long Q,
                                 unsigned long long cap) {
    unsigned long long total = 1;
    for (Eigen::Index c = 0; c < model.column_mult.size(); ++c) {
        unsigned long long radix =
            2ULL * static_cast<unsigned long long>(model.column_mult[c]) * Q + 1;
        if (total > cap / radix) return cap + 1;
        total *= radix;
    }
    return total;
}

namespace {

// Materialized codebook of all feasible lattice points lambda * B * u.
struct Codebook {
    Eigen::MatrixXd points;  // n x count
    Eigen::VectorXi bounds;
    unsigned long long count = 0;

    unsigned long long rank(const Eigen::VectorXd& u) const {
        unsigned long long idx = 0;
        for (Eigen::Index i = 0; i < bounds.size(); ++i) {
            unsigned long long radix = 2ULL * bounds[i] + 1;
            idx = idx * radix +
                  static_cast<unsigned long long>(std::llround(u[i]) + bounds[i]);
        }
        return idx;
    }

    Eigen::VectorXi unrank(unsigned long long idx) const {
        Eigen::VectorXi u(bounds.size());
        for (Eigen::Index i = bounds.size() - 1; i >= 0; --i) {
            unsigned long long radix = 2ULL * bounds[i] + 1;
            u[i] = static_cast<int>(static_cast<long>(idx % radix) - bounds[i]);
            idx /= radix;
        }
        return u;
    }

    unsigned long long nearest(const Eigen::VectorXd& y) const {
        double best = std::numeric_limits<double>::infinity();
        unsigned long long best_idx = 0;
        for (unsigned long long i = 0; i < count; ++i) {
            double sq = (y - points.col(static_cast<Eigen::Index>(i))).squaredNorm();
            if (sq < best) {
                best = sq;
                best_idx = i;
            }
        }
        return best_idx;
    }
};

Codebook build_codebook(const ReceiveModel& model, const CodeParams& params,
                        unsigned long long cap) {
    Codebook cb;
    cb.bounds = (model.column_mult.cast<long>() * params.Q).cast<int>();
    cb.count = codebook_size(model, params.Q, cap);
    if (cb.count > cap)
        throw CapError("Monte Carlo refused: codebook exceeds cap " +
                       std::to_string(cap));
    const int m = static_cast<int>(model.G);
    cb.points.resize(model.rows, static_cast<Eigen::Index>(cb.count));
    std::vector<long> digits(m, 0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(model.rows);
    for (int i = 0; i < m; ++i)
        v -= params.lambda * static_cast<double>(cb.bounds[i]) * model.B.col(i);
    for (unsigned long long pos = 0; pos < cb.count; ++pos) {
        cb.points.col(static_cast<Eigen::Index>(pos)) = v;
        for (int i = m - 1; i >= 0; --i) {
            if (++digits[i] < 2L * cb.bounds[i] + 1) {
                v += params.lambda * model.B.col(i);
                break;
            }
            digits[i] = 0;
            v -= params.lambda * static_cast<double>(2 * cb.bounds[i]) * model.B.col(i);
        }
    }
    return cb;
}

double wilson_center(double p, double n, double z) {
    return (p + z * z / (2 * n)) / (1 + z * z / n);
}
double wilson_half(double p, double n, double z) {
    return z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n);
}

}  // namespace

ErrorRate monte_carlo_error(const LinkContext& ctx, int receiver,
                            const CodeParams& params, long long trials,
                            std::uint64_t seed, double noise_std, int threads,
                            unsigned long long codebook_cap) {
    if (trials < 1) throw SchemaError("Monte Carlo needs at least one trial");
    const ReceiveModel& model = ctx.models[receiver];
    Codebook cb = build_codebook(model, params, codebook_cap);
    const long long useful = model.useful_cols;

    struct Counts {
        long long block = 0;
        long long symbol = 0;
    };
    const unsigned long long chunk = 256;
    const std::size_t num_chunks =
        static_cast<std::size_t>((static_cast<unsigned long long>(trials) + chunk - 1) / chunk);
    std::vector<Counts> counts(num_chunks);

    parallel_chunks(static_cast<unsigned long long>(trials), chunk, threads,
                    [&](std::size_t c, unsigned long long b, unsigned long long e) {
        Counts local;
        for (unsigned long long t = b; t < e; ++t) {
            Rng rng(derive_seed(seed, Stream::Trial,
                                static_cast<std::uint64_t>(receiver), t));
            SymbolBlocks symbols = random_symbols(ctx.config, ctx.alloc, ctx.nd,
                                                  params.Q, params.lambda, rng);
            Eigen::VectorXd u_true =
                receive_integers(ctx.config, ctx.nd, ctx.alloc, model, symbols);
            unsigned long long idx_true = cb.rank(u_true);
            Eigen::VectorXd y = cb.points.col(static_cast<Eigen::Index>(idx_true));
            if (noise_std > 0)
                for (int r = 0; r < model.rows; ++r) y[r] += noise_std * rng.normal();
            unsigned long long idx_hat = cb.nearest(y);
            if (idx_hat != idx_true) {
                Eigen::VectorXi u_hat = cb.unrank(idx_hat);
                long long wrong = 0;
                for (long long i = 0; i < useful; ++i)
                    if (u_hat[i] != static_cast<int>(std::llround(u_true[i]))) ++wrong;
                if (wrong > 0) ++local.block;
                local.symbol += wrong;
            }
        }
        counts[c] = local;
    });

    ErrorRate rate;
    rate.trials = trials;
    rate.useful_symbols = useful;
    for (const auto& c : counts) {
        rate.block_errors += c.block;
        rate.symbol_errors += c.symbol;
    }
    rate.block_err = static_cast<double>(rate.block_errors) / trials;
    rate.symbol_err =
        static_cast<double>(rate.symbol_errors) / (static_cast<double>(trials) * useful);
    const double z = 1.959963984540054;  // 95%
    double center = wilson_center(rate.block_err, static_cast<double>(trials), z);
    double half = wilson_half(rate.block_err, static_cast<double>(trials), z);
    rate.wilson_lo = rate.block_errors == 0 ? 0.0 : std::max(0.0, center - half);
    rate.wilson_hi = rate.block_errors == trials ? 1.0 : std::min(1.0, center + half);
    return rate;
}

std::string distance_report_to_json(const DistanceReport& report) {
    nlohmann::ordered_json out;
    out["m"] = report.m;
    out["rows"] = report.nrows;
    out["Q"] = report.Q;
    out["delta"] = report.delta;
    out["d_min"] = report.d_min;
    std::vector<int> q(report.argmin.data(), report.argmin.data() + report.argmin.size());
    out["argmin"] = q;
    out["bound_lemma1"] = report.bound_lemma1;
    out["pass_lemma1"] = report.pass_lemma1;
    if (std::isfinite(report.bound_result1)) {
        out["bound_result1"] = report.bound_result1;
        out["pass_result1"] = report.pass_result1;
        out["lambda"] = report.lambda;
    }
    out["enumerated"] = report.enumerated;
    return out.dump();
}

std::string error_rate_to_json(const ErrorRate& rate) {
    nlohmann::ordered_json out;
    out["trials"] = rate.trials;
    out["block_errors"] = rate.block_errors;
    out["block_err"] = rate.block_err;
    out["wilson_lo"] = rate.wilson_lo;
    out["wilson_hi"] = rate.wilson_hi;
    out["symbol_err"] = rate.symbol_err;
    return out.dump();
}

}  // namespace ria
