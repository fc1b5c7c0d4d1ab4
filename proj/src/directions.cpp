#include "ria/directions.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "ria/rng.hpp"

namespace ria {

int GeneratorIndex::find(int j, int k, int r, int t) const {
    std::array<int, 4> key{j, k, r, t};
    auto it = std::lower_bound(coords.begin(), coords.end(), key);
    if (it == coords.end() || *it != key) return -1;
    return static_cast<int>(it - coords.begin());
}

GeneratorIndex GeneratorIndex::build(const NetworkConfig& config, int target_receiver) {
    GeneratorIndex gi;
    gi.kind = config.kind;
    gi.target_receiver = target_receiver;
    switch (config.kind) {
        case NetworkKind::InterferenceChannel:
            for (int j = 0; j < config.J; ++j)
                for (int k = 0; k < config.K; ++k) {
                    if (k == j) continue;
                    for (int r = 0; r < config.N[j]; ++r)
                        for (int t = 0; t < config.M[k]; ++t)
                            gi.coords.push_back({j, k, r, t});
                }
            break;
        case NetworkKind::GeneralDemand:
            for (int j = 0; j < config.J; ++j)
                for (int k : config.demand_complement(j))
                    for (int r = 0; r < config.N[j]; ++r)
                        for (int t = 0; t < config.M[k]; ++t)
                            gi.coords.push_back({j, k, r, t});
            break;
        case NetworkKind::XNetwork:
            if (target_receiver < 0 || target_receiver >= config.J)
                throw SchemaError("X-network generator index needs a target receiver");
            for (int jh = 0; jh < config.J; ++jh) {
                if (jh == target_receiver) continue;
                for (int kh = 0; kh < config.K; ++kh)
                    for (int r = 0; r < config.N[jh]; ++r)
                        for (int t = 0; t < config.M[kh]; ++t)
                            gi.coords.push_back({jh, kh, r, t});
            }
            break;
    }
    std::sort(gi.coords.begin(), gi.coords.end());
    return gi;
}

DirectionCounts direction_counts(const NetworkConfig& config, int n,
                                 int target_receiver) {
    if (n < 1) throw SchemaError("degree parameter n must be >= 1");
    int target = target_receiver;
    if (config.kind == NetworkKind::XNetwork && target < 0) {
        // Counts are the same for every target receiver when antennas are
        // uniform; otherwise the caller must say which target it means.
        if (!(config.uniform_rx() && config.uniform_tx()))
            throw SchemaError(
                "X-network direction counts need a target receiver for "
                "non-uniform antennas");
        target = 0;
    }
    GeneratorIndex gens = GeneratorIndex::build(config, target);
    DirectionCounts counts;
    counts.E = gens.size();
    counts.D = BigUint::pow(static_cast<std::uint64_t>(n), counts.E);
    counts.Dprime = BigUint::pow(static_cast<std::uint64_t>(n) + 1, counts.E);
    return counts;
}

DirectionSet::DirectionSet(std::shared_ptr<const GeneratorIndex> gens, int n,
                           bool extended, DeltaTag tag, double delta_value)
    : gens_(std::move(gens)), n_(n), extended_(extended), tag_(tag), delta_(delta_value) {
    const std::size_t E = gens_->size();
    const std::size_t r = static_cast<std::size_t>(radix());
    std::size_t count = 1;
    for (std::size_t g = 0; g < E; ++g) {
        if (count > (std::size_t{1} << 40) / r)
            throw CapError("direction set materialization out of range");
        count *= r;
    }
    count_ = count;

    auto exps = std::make_shared<std::vector<std::uint8_t>>();
    exps->assign(count_ * E, 0);
    // Odometer in lexicographic order: member 0 is all-zero, last generator
    // varies fastest.
    std::vector<std::uint8_t> cur(E, 0);
    for (std::size_t i = 0; i < count_; ++i) {
        std::copy(cur.begin(), cur.end(), exps->begin() + i * E);
        for (std::size_t g = E; g-- > 0;) {
            if (++cur[g] < r) break;
            cur[g] = 0;
        }
    }
    exps_ = std::move(exps);
}

int DirectionSet::exponent_sum(std::size_t i) const {
    auto row = exponents(i);
    int s = 0;
    for (std::uint8_t e : row) s += e;
    return s;
}

int DirectionSet::delta_exponent(std::size_t i) const {
    return exponent_sum(i) + (extended_ ? 0 : 1);
}

long long DirectionSet::rank_of(std::span<const int> exponents) const {
    if (exponents.size() != gens_->size()) return -1;
    const int r = radix();
    long long rank = 0;
    for (int e : exponents) {
        if (e < 0 || e >= r) return -1;
        rank = rank * r + e;
    }
    return rank;
}

long long DirectionSet::rank_checked(std::span<const int> exponents) const {
    long long rank = rank_of(exponents);
    if (rank < 0) return -1;
    auto row = this->exponents(static_cast<std::size_t>(rank));
    for (std::size_t g = 0; g < row.size(); ++g)
        if (static_cast<int>(row[g]) != exponents[g]) return -1;
    return rank;
}

namespace {

double pow_small(double base, int exp) {
    double v = 1.0;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
}

}  // namespace

double DirectionSet::eval(std::size_t i, const ChannelMatrix& channel) const {
    auto row = exponents(i);
    double v = 1.0;
    int total = 0;
    for (std::size_t g = 0; g < row.size(); ++g) {
        int e = row[g];
        if (e == 0) continue;
        total += e;
        const auto& c = gens_->coords[g];
        v *= pow_small(channel.coeff(c[0], c[1], c[2], c[3]), e);
    }
    v *= pow_small(delta_, delta_exponent(i));
    if (!std::isfinite(v) || v == 0.0)
        throw std::range_error("direction evaluation left double range (exponent sum " +
                               std::to_string(total) + ")");
    return v;
}

Eigen::VectorXd DirectionSet::eval_all(const ChannelMatrix& channel) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(count_));
    for (std::size_t i = 0; i < count_; ++i)
        out[static_cast<Eigen::Index>(i)] = eval(i, channel);
    return out;
}

Direction DirectionSet::member(std::size_t i) const {
    Direction d;
    auto row = exponents(i);
    d.exponents.assign(row.begin(), row.end());
    d.tag = tag_;
    d.delta_exponent = delta_exponent(i);
    return d;
}

DirectionFamily build_directions(const NetworkConfig& config, int n,
                                 int num_streams, std::uint64_t seed,
                                 int target_receiver, std::size_t cap) {
    if (num_streams < 1) throw SchemaError("stream count must be >= 1");
    DirectionCounts counts = direction_counts(config, n, target_receiver);
    BigUint total = counts.D + counts.Dprime;
    if (total > BigUint(cap))
        throw CapError("direction construction refused: D=" + counts.D.to_string() +
                       " plus D'=" + counts.Dprime.to_string() + " exceeds cap " +
                       std::to_string(cap));

    DirectionFamily fam;
    fam.n = n;
    int target = (config.kind == NetworkKind::XNetwork && target_receiver < 0)
                     ? 0
                     : target_receiver;
    fam.gens = std::make_shared<const GeneratorIndex>(
        GeneratorIndex::build(config, target));
    for (int l = 0; l < num_streams; ++l) {
        DeltaTag tag{config.kind == NetworkKind::XNetwork ? target : -1, l};
        Rng rng(derive_seed(seed, Stream::Delta,
                            static_cast<std::uint64_t>(tag.target_receiver + 1),
                            static_cast<std::uint64_t>(l)));
        double delta = rng.uniform(0.5, 1.0);
        fam.base.emplace_back(fam.gens, n, false, tag, delta);
        fam.extended.emplace_back(fam.gens, n, true, tag, delta);
    }
    return fam;
}

double eval_direction(const Direction& d, const ChannelMatrix& channel,
                      const GeneratorIndex& gens, double delta_value) {
    double v = 1.0;
    for (std::size_t g = 0; g < d.exponents.size(); ++g) {
        const auto& c = gens.coords[g];
        v *= pow_small(channel.coeff(c[0], c[1], c[2], c[3]), d.exponents[g]);
    }
    if (d.tag) v *= pow_small(delta_value, d.delta_exponent);
    if (!std::isfinite(v) || v == 0.0)
        throw std::range_error("direction evaluation left double range");
    return v;
}

std::string direction_set_to_json(const DirectionSet& set) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
        Direction d = set.member(i);
        nlohmann::ordered_json rec;
        rec["exponents"] = d.exponents;
        if (d.tag) {
            nlohmann::ordered_json tag;
            if (d.tag->target_receiver >= 0)
                tag["target_receiver"] = d.tag->target_receiver + 1;
            tag["stream"] = d.tag->stream + 1;
            rec["delta_tag"] = tag;
        }
        rec["delta_exponent"] = d.delta_exponent;
        out.push_back(rec);
    }
    return out.dump();
}

}  // namespace ria
