// Code-parameter selection, exhaustive minimum-distance search, exhaustive
// maximum-likelihood decoding, and the analytic error-probability bounds.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "ria/align.hpp"
#include "ria/caps.hpp"

namespace ria {

// Constellation scaling for average per-antenna power P:
//   P0 = P / nu^2 = (lambda * Q)^2,
//   Q  = max(1, floor(P0^{(1-eps)/(2(1+w))})),   w = m/n of the receive model,
//   lambda = sqrt(P0) / Q.
struct CodeParams {
    double P = 1.0;
    double P0 = 1.0;
    double epsilon = 0.5;
    double delta_slack = 0.0;
    double w = 1.0;
    long Q = 1;
    double lambda = 1.0;
    double nu2 = 1.0;
};

CodeParams choose_code_params(double P, double epsilon, double w, double nu2,
                              std::optional<double> delta_slack = std::nullopt);
CodeParams choose_code_params_p0(double P0, double epsilon, double w, double nu2,
                                 std::optional<double> delta_slack = std::nullopt);

struct DistanceReport {
    int m = 0;
    int nrows = 0;
    long Q = 0;
    double delta = 0.5;
    double d_min = 0.0;
    Eigen::VectorXi argmin;
    double bound_lemma1 = 0.0;  // Q^{-m/n - delta}
    bool pass_lemma1 = false;
    // lambda * (2(K-1)NQ)^{-(D+D') - delta}; set by apply_result1_bound.
    double bound_result1 = std::numeric_limits<double>::quiet_NaN();
    bool pass_result1 = false;
    double lambda = 1.0;
    unsigned long long enumerated = 0;
};

// Exact min of ||A q||_2 over nonzero q in Z_{2Q}^m (codeword differences).
// The argmin is the first strict minimizer in ascending enumeration order
// (+q/-q tie in exact arithmetic and resolve by floating comparison); the
// reported distance is recomputed exactly at the argmin.
DistanceReport min_distance(const Eigen::MatrixXd& A, long Q, double delta = 0.5,
                            unsigned long long cap = 100000000ULL, int threads = 1);

// Same search over a box with per-column radii (|q_c| <= radii[c]); used for
// the feasible codeword-difference lattice of a receive model, where column c
// ranges over 2 * column_mult[c] * Q. Lemma-style bounds are not attached.
DistanceReport min_distance_bounded(const Eigen::MatrixXd& A,
                                    const Eigen::VectorXi& radii, double delta = 0.5,
                                    unsigned long long cap = 100000000ULL,
                                    int threads = 1);

// Attaches the scheme-specific constellation-distance bound for a uniform
// (K,[N],[N]) instance; compares lambda * d_min against it.
void apply_result1_bound(DistanceReport& report, double lambda, int K, int N,
                         long long D, long long Dprime);

// Exhaustive ML decoding: argmin over u (entry c in [-bounds[c], bounds[c]])
// of ||z - lambda * B u||. Ties break to the lexicographically smallest u.
// Minimizing over z = W^{-1} y with the structural generator B is the exact
// colored-noise likelihood rule for y = lambda * A u + W * noise.
Eigen::VectorXi ml_decode_bounded(const Eigen::VectorXd& z, const Eigen::MatrixXd& B,
                                  double lambda, const Eigen::VectorXi& bounds,
                                  unsigned long long cap = 1000000ULL);

// Decodes a raw observation y against a receive model: whitens by W and runs
// the bounded search with per-column ranges column_mult * Q.
Eigen::VectorXi ml_decode(const Eigen::VectorXd& y, const ReceiveModel& model,
                          const CodeParams& params,
                          unsigned long long cap = 1000000ULL);

struct ErrorBound {
    double standard = 0.0;  // (2Q+1)^m exp(-d_min^2 / 8)
    double loose = 0.0;     // (3Q)^m   exp(-d_min^2 / 8)
};
// d_min here is the constellation distance (already lambda-scaled). Values
// above 1 are vacuous and reported as-is.
ErrorBound error_prob_bound(long long m, int nrows, long Q, double d_min);

struct ErrorRate {
    long long trials = 0;
    long long block_errors = 0;
    long long symbol_errors = 0;
    long long useful_symbols = 0;
    double block_err = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double symbol_err = 0.0;
};

// Monte Carlo link simulation at one receiver: i.i.d. uniform Z_Q message
// symbols, AWGN with per-antenna deviation noise_std added before weighting,
// exhaustive ML decoding, errors counted on the useful integers only.
// Deterministic per (ctx, params, trials, seed) for any thread count.
ErrorRate monte_carlo_error(const LinkContext& ctx, int receiver,
                            const CodeParams& params, long long trials,
                            std::uint64_t seed, double noise_std = 1.0,
                            int threads = 1,
                            unsigned long long codebook_cap = 1000000ULL);

// Feasible codebook size prod_c (2 * mult_c * Q + 1) without materializing it.
unsigned long long codebook_size(const ReceiveModel& model, long Q,
                                 unsigned long long cap);

std::string distance_report_to_json(const DistanceReport& report);
std::string error_rate_to_json(const ErrorRate& rate);

}  // namespace ria
