// Network configuration, message demands, and random channel generation.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ria/errors.hpp"

namespace ria {

enum class NetworkKind { InterferenceChannel, GeneralDemand, XNetwork };

std::string kind_to_string(NetworkKind kind);
NetworkKind kind_from_string(const std::string& s);

// A (K, J, [M_k], [N_j]) network. Indices are 0-based in code and 1-based in
// every file format and printed message.
struct NetworkConfig {
    NetworkKind kind = NetworkKind::InterferenceChannel;
    int K = 0;                              // transmitters
    int J = 0;                              // receivers
    std::vector<int> M;                     // transmit antennas, size K
    std::vector<int> N;                     // receive antennas, size J
    std::vector<std::vector<int>> demands;  // per receiver, sorted 0-based tx indices

    bool uniform_tx() const;
    bool uniform_rx() const;
    // Transmitters whose message receiver j does not request (interference set).
    std::vector<int> demand_complement(int j) const;
    bool demands_message(int j, int k) const;
    int message_count() const;  // K, or J*K for X networks
};

// Validates and returns a config. For the interference channel, demands are
// auto-filled as singletons; for X networks every (j,k) pair carries a message
// and demands stay empty.
NetworkConfig make_config(NetworkKind kind, int K, int J, std::vector<int> M,
                          std::vector<int> N,
                          std::vector<std::vector<int>> demands = {});

// All channel coefficients h[j][k](r, t), dimensioned N_j x M_k.
struct ChannelMatrix {
    std::vector<std::vector<Eigen::MatrixXd>> h;

    const Eigen::MatrixXd& block(int j, int k) const { return h[j][k]; }
    double coeff(int j, int k, int r, int t) const { return h[j][k](r, t); }
};

// Deterministic per (config, seed); entries have magnitude uniform on
// [0.5, 2] and uniform sign, so no coefficient is zero or huge.
ChannelMatrix sample_channel(const NetworkConfig& config, std::uint64_t seed);

// JSON schema:
//   {"kind": "ic"|"general"|"x", "K": int, "J": int, "M": [int], "N": [int],
//    "demands": [[int]]?, "seed": int}
// Demands use 1-based transmitter indices.
std::string config_to_json(const NetworkConfig& config, std::uint64_t seed);
struct ParsedConfig {
    NetworkConfig config;
    std::uint64_t seed = 0;
};
ParsedConfig config_from_json(const std::string& text);

// FNV-1a hash of the canonical serialization; embedded in artifacts.
std::string config_hash(const NetworkConfig& config, std::uint64_t seed);

}  // namespace ria
