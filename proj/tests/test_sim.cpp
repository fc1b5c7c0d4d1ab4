#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ria/sim.hpp"

using namespace ria;

namespace {

NetworkConfig ic2_11() {
    return make_config(NetworkKind::InterferenceChannel, 2, 2, {1, 1}, {1, 1});
}

ExperimentPlan small_plan(int n, long long trials = 500) {
    ExperimentPlan plan;
    plan.config = ic2_11();
    plan.seed = 1;
    plan.n = n;
    plan.dof_point = default_dof_point(plan.config);
    plan.p0_grid = {1e2, 1e3, 1e4, 1e5};
    plan.epsilon = 0.01;
    plan.trials = trials;
    return plan;
}

}  // namespace

TEST_CASE("finite-n rate prediction follows the direction counts exactly") {
    auto cfg = ic2_11();
    // N * D / (D + D' + 1) with D = n^2, D' = (n+1)^2
    CHECK(finite_n_rate_prediction(cfg, 1) == Rational(1, 6));
    CHECK(finite_n_rate_prediction(cfg, 2) == Rational(2, 7));
    CHECK(finite_n_rate_prediction(cfg, 3) == Rational(9, 26));
    CHECK(finite_n_rate_prediction(cfg, 4) == Rational(16, 42));

    // strictly increasing toward N/2
    Rational prev(0);
    for (int n = 1; n <= 6; ++n) {
        Rational cur = finite_n_rate_prediction(cfg, n);
        CHECK(prev < cur);
        CHECK(cur < Rational(1, 2));
        prev = cur;
    }
}

TEST_CASE("default dof points allocate integral streams") {
    auto cfg = ic2_11();
    DofPoint p = default_dof_point(cfg);
    CHECK(p.v[0] == Rational(1, 2));
    StreamAllocation alloc = allocate_streams(cfg, p);
    CHECK(alloc.rho == 2);
    CHECK(alloc.dbar == std::vector<std::int64_t>{1, 1});

    auto x = make_config(NetworkKind::XNetwork, 2, 2, {1, 1}, {1, 1});
    DofPoint px = default_dof_point(x);
    CHECK(px.v[0] == Rational(1, 3));
    CHECK(allocate_streams(x, px).rho == 3);
}

TEST_CASE("slope estimation on synthetic rows") {
    std::vector<SweepRow> rows;
    for (int e = 2; e <= 6; ++e) {
        SweepRow row;
        row.P0 = std::pow(10.0, e);
        row.rate_nats = 0.35 * 0.5 * std::log(row.P0);  // exact line, slope 0.35
        row.block_err = 0.0;
        rows.push_back(row);
    }
    SlopeEstimate est = slope_estimate(rows, 0.1);
    CHECK(est.conclusive);
    CHECK(est.slope == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(est.stderr_ == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(est.rows_used == 5);

    // an unreliable row is excluded from the fit
    rows[2].block_err = 0.5;
    rows[2].rate_nats = 1e9;
    SlopeEstimate est2 = slope_estimate(rows, 0.1);
    CHECK(est2.conclusive);
    CHECK(est2.rows_used == 4);
    CHECK(est2.slope == doctest::Approx(0.35).epsilon(1e-12));

    // fewer than three reliable rows is inconclusive, not a fabricated slope
    std::vector<SweepRow> sparse(rows.begin(), rows.begin() + 2);
    sparse.push_back(rows[3]);
    sparse[0].block_err = 0.9;
    SlopeEstimate est3 = slope_estimate(sparse, 0.1);
    CHECK_FALSE(est3.conclusive);
    CHECK(est3.rows_used == 2);
}

TEST_CASE("plan validation rejects bad grids and oversized points") {
    ExperimentPlan plan = small_plan(1);
    LinkContext ctx = build_link_context(plan.config, plan.seed, plan.n, plan.dof_point);
    plan.p0_grid = {1e4, 1e3};
    CHECK_THROWS_AS(validate_plan(plan, ctx), SchemaError);
    plan.p0_grid = {};
    CHECK_THROWS_AS(validate_plan(plan, ctx), SchemaError);
    plan.p0_grid = {1e2, 1e30};  // Q explodes past the codebook cap
    plan.caps.codebook = 100;
    CHECK_THROWS_AS(validate_plan(plan, ctx), CapError);
}

TEST_CASE("link experiment: rate accounting, monotone error, determinism") {
    ExperimentPlan plan = small_plan(1, 800);
    SlopeReport report = run_link_experiment(plan);
    REQUIRE(report.rows.size() == plan.p0_grid.size() * 2);

    for (const auto& row : report.rows) {
        CHECK(row.rate_nats ==
              doctest::Approx(row.useful_symbols * std::log(2.0 * row.Q + 1.0)));
        CHECK(row.slope_point ==
              doctest::Approx(row.rate_nats / (0.5 * std::log(row.P0))));
    }

    // empirical block error non-increasing along the sweep on smoothed pairs
    for (int j = 0; j < 2; ++j) {
        std::vector<SweepRow> mine;
        for (const auto& row : report.rows)
            if (row.receiver == j) mine.push_back(row);
        for (std::size_t i = 0; i + 2 < mine.size(); ++i) {
            double s0 = 0.5 * (mine[i].block_err + mine[i + 1].block_err);
            double s1 = 0.5 * (mine[i + 1].block_err + mine[i + 2].block_err);
            double slack = (mine[i].ci_hi - mine[i].ci_lo) +
                           (mine[i + 2].ci_hi - mine[i + 2].ci_lo);
            CHECK(s1 <= s0 + slack);
        }
    }

    // pure function of the plan
    SlopeReport again = run_link_experiment(plan);
    REQUIRE(again.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(again.rows[i].block_err == report.rows[i].block_err);
        CHECK(again.rows[i].d_min == report.rows[i].d_min);
        CHECK(again.rows[i].rate_nats == report.rows[i].rate_nats);
    }

    // thread-count invariance
    ExperimentPlan threaded = plan;
    threaded.threads = 3;
    SlopeReport par = run_link_experiment(threaded);
    for (std::size_t i = 0; i < report.rows.size(); ++i)
        CHECK(par.rows[i].block_err == report.rows[i].block_err);

    CHECK(report.finite_n_per_receiver[0] == Rational(1, 6));
    CHECK(report.asymptotic_per_message.has_value());
    CHECK(*report.asymptotic_per_message == Rational(1, 2));
}

TEST_CASE("degree parameter raises the finite-n prediction along the sweep") {
    ExperimentPlan p1 = small_plan(1, 200);
    ExperimentPlan p2 = small_plan(2, 200);
    p2.p0_grid = {1e2, 1e3};
    SlopeReport r1 = run_link_experiment(p1);
    SlopeReport r2 = run_link_experiment(p2);
    CHECK(r1.finite_n_per_receiver[0] < r2.finite_n_per_receiver[0]);
    CHECK(r2.finite_n_per_receiver[0] == Rational(2, 7));
}

TEST_CASE("report serialization embeds metadata") {
    ExperimentPlan plan = small_plan(1, 100);
    plan.p0_grid = {1e2, 1e3, 1e4};
    SlopeReport report = run_link_experiment(plan);
    std::string csv = slope_report_to_csv(report, "version=x config_hash=y seed=1");
    CHECK(csv.rfind("# version=x", 0) == 0);
    CHECK(csv.find("receiver,P0,Q,lambda") != std::string::npos);
    std::string json = slope_report_to_json(report, "y", 1);
    CHECK(json.find("\"config_hash\": \"y\"") != std::string::npos);
    CHECK(json.find("\"finite_n_per_receiver\"") != std::string::npos);
}
