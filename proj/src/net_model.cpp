#include "ria/net_model.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "ria/rng.hpp"

namespace ria {

using ordered_json = nlohmann::ordered_json;

std::string kind_to_string(NetworkKind kind) {
    switch (kind) {
        case NetworkKind::InterferenceChannel: return "ic";
        case NetworkKind::GeneralDemand: return "general";
        case NetworkKind::XNetwork: return "x";
    }
    return "ic";
}

NetworkKind kind_from_string(const std::string& s) {
    if (s == "ic") return NetworkKind::InterferenceChannel;
    if (s == "general") return NetworkKind::GeneralDemand;
    if (s == "x") return NetworkKind::XNetwork;
    throw SchemaError("unknown network kind '" + s + "' (expected ic|general|x)");
}

bool NetworkConfig::uniform_tx() const {
    return std::all_of(M.begin(), M.end(), [&](int m) { return m == M[0]; });
}

bool NetworkConfig::uniform_rx() const {
    return std::all_of(N.begin(), N.end(), [&](int n) { return n == N[0]; });
}

std::vector<int> NetworkConfig::demand_complement(int j) const {
    std::vector<int> out;
    for (int k = 0; k < K; ++k)
        if (!demands_message(j, k)) out.push_back(k);
    return out;
}

bool NetworkConfig::demands_message(int j, int k) const {
    if (kind == NetworkKind::XNetwork) return true;
    const auto& w = demands[j];
    return std::binary_search(w.begin(), w.end(), k);
}

int NetworkConfig::message_count() const {
    return kind == NetworkKind::XNetwork ? J * K : K;
}

NetworkConfig make_config(NetworkKind kind, int K, int J, std::vector<int> M,
                          std::vector<int> N,
                          std::vector<std::vector<int>> demands) {
    if (K < 1 || J < 1) throw SchemaError("K and J must be at least 1");
    if (static_cast<int>(M.size()) != K)
        throw SchemaError("M must have length K=" + std::to_string(K));
    if (static_cast<int>(N.size()) != J)
        throw SchemaError("N must have length J=" + std::to_string(J));
    for (int m : M)
        if (m < 1) throw SchemaError("all transmit antenna counts must be >= 1");
    for (int n : N)
        if (n < 1) throw SchemaError("all receive antenna counts must be >= 1");

    NetworkConfig cfg;
    cfg.kind = kind;
    cfg.K = K;
    cfg.J = J;
    cfg.M = std::move(M);
    cfg.N = std::move(N);

    switch (kind) {
        case NetworkKind::InterferenceChannel: {
            if (J != K) throw SchemaError("IC requires J=K");
            if (!demands.empty())
                throw SchemaError("IC demands are implicit; do not supply them");
            for (int j = 0; j < J; ++j) cfg.demands.push_back({j});
            break;
        }
        case NetworkKind::GeneralDemand: {
            if (static_cast<int>(demands.size()) != J)
                throw SchemaError("general demand needs one demand set per receiver");
            for (auto& w : demands) {
                if (w.empty()) throw SchemaError("empty demand set");
                std::sort(w.begin(), w.end());
                w.erase(std::unique(w.begin(), w.end()), w.end());
                for (int k : w)
                    if (k < 0 || k >= K)
                        throw SchemaError("demand index out of range 1.." + std::to_string(K));
            }
            cfg.demands = std::move(demands);
            break;
        }
        case NetworkKind::XNetwork: {
            if (!demands.empty())
                throw SchemaError("X network demands are implicit; do not supply them");
            break;
        }
    }
    return cfg;
}

ChannelMatrix sample_channel(const NetworkConfig& config, std::uint64_t seed) {
    Rng rng(derive_seed(seed, Stream::Channel));
    ChannelMatrix ch;
    ch.h.resize(config.J);
    for (int j = 0; j < config.J; ++j) {
        ch.h[j].resize(config.K);
        for (int k = 0; k < config.K; ++k) {
            Eigen::MatrixXd& blk = ch.h[j][k];
            blk.resize(config.N[j], config.M[k]);
            for (int r = 0; r < config.N[j]; ++r) {
                for (int t = 0; t < config.M[k]; ++t) {
                    double mag = rng.uniform(0.5, 2.0);
                    double sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
                    blk(r, t) = sign * mag;
                }
            }
        }
    }
    return ch;
}

std::string config_to_json(const NetworkConfig& config, std::uint64_t seed) {
    ordered_json out;
    out["kind"] = kind_to_string(config.kind);
    out["K"] = config.K;
    out["J"] = config.J;
    out["M"] = config.M;
    out["N"] = config.N;
    if (config.kind == NetworkKind::GeneralDemand) {
        ordered_json dem = ordered_json::array();
        for (const auto& w : config.demands) {
            ordered_json set = ordered_json::array();
            for (int k : w) set.push_back(k + 1);
            dem.push_back(set);
        }
        out["demands"] = dem;
    }
    out["seed"] = seed;
    return out.dump();
}

ParsedConfig config_from_json(const std::string& text) {
    ordered_json in;
    try {
        in = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        NetworkKind kind = kind_from_string(in.at("kind").get<std::string>());
        int K = in.at("K").get<int>();
        int J = in.at("J").get<int>();
        auto M = in.at("M").get<std::vector<int>>();
        auto N = in.at("N").get<std::vector<int>>();
        std::vector<std::vector<int>> demands;
        if (in.contains("demands")) {
            for (const auto& set : in.at("demands")) {
                std::vector<int> w;
                for (const auto& k : set) w.push_back(k.get<int>() - 1);
                demands.push_back(std::move(w));
            }
        }
        ParsedConfig parsed;
        parsed.config = make_config(kind, K, J, std::move(M), std::move(N),
                                    std::move(demands));
        parsed.seed = in.value("seed", std::uint64_t{0});
        return parsed;
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("config schema violation: ") + e.what());
    }
}

std::string config_hash(const NetworkConfig& config, std::uint64_t seed) {
    std::string canon = config_to_json(config, seed);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace ria
