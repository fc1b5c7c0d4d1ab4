#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ria/directions.hpp"
#include "ria/rng.hpp"

using namespace ria;

namespace {

NetworkConfig ic(int K, int antennas) {
    return make_config(NetworkKind::InterferenceChannel, K, K,
                       std::vector<int>(K, antennas), std::vector<int>(K, antennas));
}

// Independent naive monomial evaluation: walks the full coordinate grid and
// multiplies h^alpha factor by factor, never consulting DirectionSet::eval.
double naive_eval(const NetworkConfig& config, const GeneratorIndex& gens,
                  std::span<const std::uint8_t> exps, const ChannelMatrix& ch,
                  double delta, int delta_exp) {
    double v = 1.0;
    for (int j = 0; j < config.J; ++j)
        for (int k = 0; k < config.K; ++k)
            for (int r = 0; r < config.N[j]; ++r)
                for (int t = 0; t < config.M[k]; ++t) {
                    int g = gens.find(j, k, r, t);
                    if (g < 0) continue;
                    for (int e = 0; e < exps[g]; ++e) v *= ch.coeff(j, k, r, t);
                }
    for (int e = 0; e < delta_exp; ++e) v *= delta;
    return v;
}

}  // namespace

TEST_CASE("generator index membership per kind") {
    auto cfg_ic = ic(2, 1);
    GeneratorIndex g1 = GeneratorIndex::build(cfg_ic);
    CHECK(g1.size() == 2);  // (1,2) and (2,1) cross links
    CHECK(g1.find(0, 1, 0, 0) >= 0);
    CHECK(g1.find(1, 0, 0, 0) >= 0);
    CHECK(g1.find(0, 0, 0, 0) == -1);  // direct link excluded

    auto gd = make_config(NetworkKind::GeneralDemand, 3, 2, {2, 2, 2}, {2, 2},
                          {{0, 1}, {2}});
    GeneratorIndex g2 = GeneratorIndex::build(gd);
    CHECK(g2.size() == 12);  // (1*4 + 2*4) cross coefficients
    CHECK(g2.find(0, 2, 1, 1) >= 0);
    CHECK(g2.find(0, 0, 0, 0) == -1);
    CHECK(g2.find(1, 2, 0, 0) == -1);  // demanded at receiver 2

    auto x = make_config(NetworkKind::XNetwork, 2, 2, {1, 1}, {1, 1});
    GeneratorIndex g3 = GeneratorIndex::build(x, 0);
    CHECK(g3.size() == 2);  // all links into receiver 2
    CHECK(g3.find(1, 0, 0, 0) >= 0);
    CHECK(g3.find(1, 1, 0, 0) >= 0);
    CHECK(g3.find(0, 0, 0, 0) == -1);
}

TEST_CASE("direction counts match the closed forms") {
    auto c1 = direction_counts(ic(2, 1), 2);
    CHECK(c1.E == 2);
    CHECK(c1.D.to_string() == "4");
    CHECK(c1.Dprime.to_string() == "9");

    auto c2 = direction_counts(ic(3, 1), 2);
    CHECK(c2.E == 6);
    CHECK(c2.D.to_string() == "64");
    CHECK(c2.Dprime.to_string() == "729");

    auto c3 = direction_counts(ic(2, 2), 1);
    CHECK(c3.E == 8);
    CHECK(c3.D.to_string() == "1");
    CHECK(c3.Dprime.to_string() == "256");

    // Counts stay exact far beyond 64-bit.
    auto big = direction_counts(ic(4, 2), 3);
    CHECK(big.E == 48);
    CHECK(big.D.to_string() == "79766443076872509863361");  // 3^48
}

TEST_CASE("construction enumerates every exponent tuple exactly once") {
    auto cfg = ic(2, 1);
    DirectionFamily fam = build_directions(cfg, 2, 1, /*seed=*/3);
    CHECK(fam.base[0].size() == 4);
    CHECK(fam.extended[0].size() == 9);

    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < fam.base[0].size(); ++i) {
        auto row = fam.base[0].exponents(i);
        std::vector<int> key(row.begin(), row.end());
        for (int e : key) CHECK(e <= 1);
        seen.insert(key);
    }
    CHECK(seen.size() == 4);  // pairwise distinct monomials

    // n=1 base set collapses to the all-zero exponent vector.
    DirectionFamily unit = build_directions(cfg, 1, 1, 3);
    CHECK(unit.base[0].size() == 1);
    auto row = unit.base[0].exponents(0);
    CHECK(std::all_of(row.begin(), row.end(), [](std::uint8_t e) { return e == 0; }));
}

TEST_CASE("lexicographic rank agrees with stored rows") {
    auto cfg = ic(3, 1);
    DirectionFamily fam = build_directions(cfg, 3, 1, 11);
    const DirectionSet& base = fam.base[0];
    Rng rng(4);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t i = rng.next_u64() % base.size();
        auto row = base.exponents(i);
        std::vector<int> key(row.begin(), row.end());
        CHECK(base.rank_checked(key) == static_cast<long long>(i));
    }
    std::vector<int> out_of_range(base.generators().size(), 0);
    out_of_range[0] = 3;  // = n, only valid in the extended set
    CHECK(base.rank_of(out_of_range) == -1);
    CHECK(fam.extended[0].rank_checked(out_of_range) >= 0);
}

TEST_CASE("closure: incrementing any cross generator lands in the extended set") {
    auto cfg = ic(3, 1);
    DirectionFamily fam = build_directions(cfg, 2, 1, 5);
    const DirectionSet& base = fam.base[0];
    const DirectionSet& ext = fam.extended[0];
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto row = base.exponents(i);
        for (std::size_t g = 0; g < row.size(); ++g) {
            std::vector<int> v(row.begin(), row.end());
            ++v[g];
            long long rank = ext.rank_checked(v);
            REQUIRE(rank >= 0);
            CHECK(ext.delta_exponent(static_cast<std::size_t>(rank)) ==
                  base.delta_exponent(i));
        }
    }
}

TEST_CASE("evaluation matches an independent naive loop") {
    auto cfg = ic(2, 1);
    ChannelMatrix ch = sample_channel(cfg, 21);
    DirectionFamily fam = build_directions(cfg, 2, 2, 21);
    for (int l = 0; l < 2; ++l) {
        const DirectionSet& base = fam.base[l];
        for (std::size_t i = 0; i < base.size(); ++i) {
            double expect = naive_eval(cfg, base.generators(), base.exponents(i), ch,
                                       base.delta_value(), base.delta_exponent(i));
            CHECK(base.eval(i, ch) == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("trivial evaluations") {
    auto cfg = ic(2, 1);
    ChannelMatrix ch = sample_channel(cfg, 0);
    GeneratorIndex gens = GeneratorIndex::build(cfg);
    Direction d;
    d.exponents = {0, 0};
    CHECK(eval_direction(d, ch, gens, 0.75) == 1.0);  // empty product, no delta

    d.exponents = {1, 0};
    double h = ch.coeff(gens.coords[0][0], gens.coords[0][1], 0, 0);
    CHECK(eval_direction(d, ch, gens, 0.75) == doctest::Approx(h));

    d.tag = DeltaTag{-1, 0};
    d.delta_exponent = 2;
    CHECK(eval_direction(d, ch, gens, 0.5) == doctest::Approx(h * 0.25));
}

TEST_CASE("evaluated direction values are pairwise distinct on sampled channels") {
    auto cfg = ic(2, 1);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ChannelMatrix ch = sample_channel(cfg, seed);
        DirectionFamily fam = build_directions(cfg, 3, 1, seed);
        Eigen::VectorXd vals = fam.extended[0].eval_all(ch);
        for (Eigen::Index a = 0; a < vals.size(); ++a)
            for (Eigen::Index b = a + 1; b < vals.size(); ++b)
                CHECK(std::abs(vals[a] - vals[b]) >
                      1e-12 * std::max(std::abs(vals[a]), std::abs(vals[b])));
    }
}

TEST_CASE("determinism: identical seeds give identical delta draws and ordering") {
    auto cfg = ic(3, 1);
    DirectionFamily a = build_directions(cfg, 2, 3, 77);
    DirectionFamily b = build_directions(cfg, 2, 3, 77);
    DirectionFamily c = build_directions(cfg, 2, 3, 78);
    for (int l = 0; l < 3; ++l) {
        CHECK(a.base[l].delta_value() == b.base[l].delta_value());
        CHECK(a.base[l].delta_value() >= 0.5);
        CHECK(a.base[l].delta_value() <= 1.0);
        CHECK(a.extended[l].delta_value() == a.base[l].delta_value());
    }
    bool any_diff = false;
    for (int l = 0; l < 3; ++l)
        any_diff = any_diff || a.base[l].delta_value() != c.base[l].delta_value();
    CHECK(any_diff);
}

TEST_CASE("construction cap refusal names the counts") {
    auto cfg = ic(3, 2);  // E = 24: n=2 gives D' = 3^24, far over any desk cap
    try {
        build_directions(cfg, 2, 1, 0);
        FAIL("expected CapError");
    } catch (const CapError& e) {
        std::string msg = e.what();
        CHECK(msg.find("16777216") != std::string::npos);        // D = 2^24
        CHECK(msg.find("282429536481") != std::string::npos);    // D' = 3^24
        CHECK(msg.find("100000") != std::string::npos);          // the cap
    }
}

TEST_CASE("direction JSON export carries exponents and delta bookkeeping") {
    auto cfg = ic(2, 1);
    DirectionFamily fam = build_directions(cfg, 2, 1, 1);
    std::string json = direction_set_to_json(fam.base[0]);
    CHECK(json.find("\"exponents\":[0,0]") != std::string::npos);
    CHECK(json.find("\"delta_exponent\":1") != std::string::npos);  // standalone factor
    std::string ext = direction_set_to_json(fam.extended[0]);
    CHECK(ext.find("\"delta_exponent\":0") != std::string::npos);   // bare monomial 1
}
