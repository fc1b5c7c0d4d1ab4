#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ria/net_model.hpp"

using namespace ria;

TEST_CASE("make_config validates the three kinds") {
    auto ic = make_config(NetworkKind::InterferenceChannel, 3, 3, {2, 2, 2}, {3, 3, 3});
    CHECK(ic.demands.size() == 3);
    CHECK(ic.demands[0] == std::vector<int>{0});
    CHECK(ic.demands[2] == std::vector<int>{2});

    auto gd = make_config(NetworkKind::GeneralDemand, 3, 2, {2, 2, 2}, {2, 2},
                          {{0, 1}, {2}});
    CHECK(gd.demand_complement(0) == std::vector<int>{2});
    CHECK(gd.demand_complement(1) == std::vector<int>{0, 1});

    auto x = make_config(NetworkKind::XNetwork, 2, 3, {1, 1}, {1, 1, 1});
    CHECK(x.demands_message(2, 1));
    CHECK(x.message_count() == 6);
}

TEST_CASE("make_config rejects bad shapes") {
    CHECK_THROWS_WITH_AS(
        make_config(NetworkKind::InterferenceChannel, 2, 3, {1, 1}, {1, 1, 1}),
        "IC requires J=K", SchemaError);
    CHECK_THROWS_AS(make_config(NetworkKind::GeneralDemand, 3, 2, {2, 2, 2}, {2, 2},
                                {{0}, {}}),
                    SchemaError);
    CHECK_THROWS_AS(make_config(NetworkKind::GeneralDemand, 3, 1, {2, 2, 2}, {2}, {}),
                    SchemaError);
    CHECK_THROWS_AS(
        make_config(NetworkKind::InterferenceChannel, 2, 2, {1}, {1, 1}),
        SchemaError);
    CHECK_THROWS_AS(
        make_config(NetworkKind::InterferenceChannel, 2, 2, {1, 0}, {1, 1}),
        SchemaError);
}

TEST_CASE("channel sampling is reproducible and bounded away from zero") {
    auto cfg = make_config(NetworkKind::InterferenceChannel, 3, 3, {2, 2, 2}, {3, 3, 3});
    ChannelMatrix a = sample_channel(cfg, 7);
    ChannelMatrix b = sample_channel(cfg, 7);
    ChannelMatrix c = sample_channel(cfg, 8);

    bool all_equal = true, any_diff = false;
    for (int j = 0; j < cfg.J; ++j)
        for (int k = 0; k < cfg.K; ++k) {
            all_equal = all_equal && (a.block(j, k).array() == b.block(j, k).array()).all();
            any_diff = any_diff || !(a.block(j, k).array() == c.block(j, k).array()).all();
            for (int r = 0; r < cfg.N[j]; ++r)
                for (int t = 0; t < cfg.M[k]; ++t) {
                    double mag = std::abs(a.coeff(j, k, r, t));
                    CHECK(mag >= 0.5);
                    CHECK(mag <= 2.0);
                }
        }
    CHECK(all_equal);  // bit-exact
    CHECK(any_diff);
}

TEST_CASE("config round-trips through the JSON schema") {
    auto gd = make_config(NetworkKind::GeneralDemand, 3, 2, {2, 2, 2}, {2, 2},
                          {{0, 1}, {2}});
    std::string text = config_to_json(gd, 99);
    ParsedConfig back = config_from_json(text);
    CHECK(back.seed == 99);
    CHECK(back.config.kind == NetworkKind::GeneralDemand);
    CHECK(back.config.K == 3);
    CHECK(back.config.J == 2);
    CHECK(back.config.M == gd.M);
    CHECK(back.config.N == gd.N);
    CHECK(back.config.demands == gd.demands);
    CHECK(config_to_json(back.config, back.seed) == text);
    CHECK(config_hash(back.config, 99) == config_hash(gd, 99));
    CHECK(config_hash(back.config, 99) != config_hash(gd, 100));
}

TEST_CASE("malformed JSON raises schema errors") {
    CHECK_THROWS_AS(config_from_json("{"), SchemaError);
    CHECK_THROWS_AS(config_from_json(R"({"kind":"nope","K":1,"J":1,"M":[1],"N":[1]})"),
                    SchemaError);
    CHECK_THROWS_AS(config_from_json(R"({"kind":"ic","K":2,"J":2,"M":[1,1]})"),
                    SchemaError);
}
