// End-to-end link experiments: sweep the normalized power P0, build code
// parameters, decode, and estimate the empirical DoF slope.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ria/align.hpp"
#include "ria/caps.hpp"
#include "ria/dof_point.hpp"
#include "ria/lattice.hpp"
#include "ria/rational.hpp"

namespace ria {

struct ExperimentPlan {
    NetworkConfig config;
    std::uint64_t seed = 0;
    int n = 1;
    DofPoint dof_point;
    std::vector<double> p0_grid;  // strictly increasing
    double epsilon = 0.01;
    std::optional<double> delta_slack;
    long long trials = 10000;
    double reliability_threshold = 0.1;
    int threads = 1;
    Caps caps;
};

std::vector<double> default_power_grid();        // {1e2, 1e3, ..., 1e8}
DofPoint default_dof_point(const NetworkConfig& config);

struct SweepRow {
    int receiver = 0;
    double P0 = 0;
    long Q = 1;
    double lambda = 1;
    double d_min = 0;        // unscaled min ||B q||; constellation distance is lambda*d_min
    double union_bound = 0;  // (2Q+1)^G exp(-(lambda d_min)^2 / 8)
    long long useful_symbols = 0;
    double rate_nats = 0;    // useful_symbols * log(2Q+1)
    double block_err = 0;
    double ci_lo = 0, ci_hi = 0;
    double slope_point = 0;  // rate / (0.5 log P0)
    bool reliable = false;
};

struct SlopeEstimate {
    bool conclusive = false;
    double slope = 0;
    double stderr_ = 0;
    int rows_used = 0;
};

struct SlopeReport {
    std::vector<SweepRow> rows;  // grid-major, receiver-minor order
    std::vector<Rational> finite_n_per_receiver;  // useful * N / (G + N)
    std::optional<Rational> asymptotic_per_message;
    std::vector<SlopeEstimate> slope_per_receiver;
    double nu2_max = 1;
    double w = 1;  // max_j G_j / N_j, used by the Q schedule
};

// Rejects any plan whose largest sweep point would exceed an enumeration or
// codebook cap; nothing runs on a rejected plan.
void validate_plan(const ExperimentPlan& plan, const LinkContext& ctx);

SlopeReport run_link_experiment(const ExperimentPlan& plan);

// Least-squares slope of rate against 0.5*log(P0) over the reliable rows of
// one receiver; inconclusive (never a fabricated slope) below 3 such rows.
SlopeEstimate slope_estimate(const std::vector<SweepRow>& receiver_rows,
                             double reliability_threshold);

// Per-user finite-n rate prediction useful * N / (G + N) at single-stream
// allocation; for a uniform (K,[N],[N]) channel this is N*D/(D+D'+1).
Rational finite_n_rate_prediction(const NetworkConfig& config, int n, int receiver = 0);

std::string slope_report_to_csv(const SlopeReport& report, const std::string& meta);
std::string slope_report_to_json(const SlopeReport& report, const std::string& config_hash,
                                 std::uint64_t seed);

}  // namespace ria
