// Transmit-signal construction, symbolic alignment verification, and
// per-receiver lattice generator assembly.
//
// The receive model at receiver j is  y = lambda * B * u + noise  with
//   B = [useful block | per-antenna interference blocks],
// where the useful block columns are channel-scaled stream directions and
// each antenna's interference block holds one copy of the evaluated extended
// direction vector(s). A = W * B with a random unit-diagonal weighting W.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ria/caps.hpp"
#include "ria/directions.hpp"
#include "ria/dof_point.hpp"
#include "ria/net_model.hpp"

namespace ria {

// Integer stream counts d_bar for a rational DoF point: the least rho with
// rho * d / M integral for every message, and the resulting d_bar values.
struct StreamAllocation {
    std::int64_t rho = 1;
    std::vector<std::int64_t> dbar;  // per message; X networks row-major (j, k)
    DofPoint dof_point;

    std::int64_t dbar_at(int k) const { return dbar[k]; }
    std::int64_t dbar_at(int j, int K, int k) const { return dbar[j * K + k]; }
};
StreamAllocation allocate_streams(const NetworkConfig& config, const DofPoint& point);

// Direction families for a whole network: one family for interference /
// general-demand networks, one per target receiver for X networks.
struct NetworkDirections {
    int n = 1;
    std::vector<DirectionFamily> families;

    const DirectionFamily& family_for_target(int target) const {
        return families.size() == 1 ? families[0] : families[target];
    }
};
NetworkDirections build_network_directions(const NetworkConfig& config, int n,
                                           const StreamAllocation& alloc,
                                           std::uint64_t seed,
                                           std::size_t cap = kDefaultDirectionCap);

// ---- symbolic alignment verification -------------------------------------

struct AlignmentViolation {
    int receiver, tx, rx_antenna, tx_antenna, stream;
    long long base_index;
};

struct AlignmentGroup {
    int target;   // -1 outside X networks
    int stream;
    long long occupied;  // distinct extended directions hit by interference
    long long capacity;  // D' of the group's extended set
};

struct AlignmentReport {
    int receiver = 0;
    long long checked = 0;
    std::vector<AlignmentViolation> violations;
    std::vector<AlignmentGroup> groups;

    bool ok() const { return violations.empty(); }
};

// Certifies, by exact integer lookup, that every interfering monomial
// h * (delta * T) lands inside the matching extended set. A violation would
// indicate an implementation bug; the closure holds identically.
AlignmentReport verify_alignment(const NetworkConfig& config,
                                 const NetworkDirections& nd,
                                 const StreamAllocation& alloc, int receiver);

// ---- receive model --------------------------------------------------------

struct ReceiveModel {
    int receiver = 0;
    int rows = 0;
    long long G = 0;
    long long useful_cols = 0;
    long long interference_cols = 0;

    Eigen::MatrixXd B;  // rows x G, structural generator (identity weighting)
    Eigen::MatrixXd A;  // W * B
    Eigen::MatrixXd W;  // unit diagonal, off-diagonal gamma in [1/2, 1]
    double det_w = 1.0;
    int w_redraws = 0;

    // Per-column integer range multiplier: a symbol in column c ranges over
    // [-mult*Q, mult*Q]. Useful columns have mult 1; an interference column
    // accumulates at most one Z_Q symbol per contributing (tx, antenna) pair,
    // and structurally unreachable columns have mult 0.
    Eigen::VectorXi column_mult;

    struct UsefulBlock {
        int tx;         // transmitter index
        int target;     // intended receiver (== receiver for all blocks here)
        long long offset;
        int antennas;
        int streams;
        long long dirs;  // D
        long long width() const { return static_cast<long long>(antennas) * streams * dirs; }
    };
    std::vector<UsefulBlock> useful;

    struct InterferenceGroup {
        int target;  // aligned group identity; -1 outside X networks
        int streams;
        long long width_per_stream;  // D' of the group
    };
    std::vector<InterferenceGroup> groups;
    long long antenna_block_width = 0;

    long long interference_offset(int r, int group_index, int stream,
                                  long long extended_rank) const;
    Eigen::MatrixXd noise_cov() const { return W * W.transpose(); }
};

ReceiveModel build_receive_model(const NetworkConfig& config,
                                 const ChannelMatrix& channel,
                                 const NetworkDirections& nd,
                                 const StreamAllocation& alloc, int receiver,
                                 std::uint64_t seed, const Caps& caps = {});

// ---- symbols, encoding, propagation ---------------------------------------

// Integer message symbols: per message one (dbar * D) x M_k matrix, row
// (l * D + i) holding stream l, direction i; transmitted value is lambda * q.
struct SymbolBlocks {
    std::vector<Eigen::MatrixXi> s;  // per message (X networks row-major (j,k))
    double lambda = 1.0;
};

SymbolBlocks random_symbols(const NetworkConfig& config,
                            const StreamAllocation& alloc,
                            const NetworkDirections& nd, long Q, double lambda,
                            class Rng& rng);

// Per-transmitter transmit vectors x_k = lambda * sum_l delta_l T_l s_l.
std::vector<Eigen::VectorXd> encode_transmitters(const NetworkConfig& config,
                                                 const ChannelMatrix& channel,
                                                 const NetworkDirections& nd,
                                                 const StreamAllocation& alloc,
                                                 const SymbolBlocks& symbols);

// Noiseless physical propagation y_j = sum_k H_{j,k} x_k.
Eigen::VectorXd propagate(const NetworkConfig& config, const ChannelMatrix& channel,
                          const std::vector<Eigen::VectorXd>& x, int receiver);

// The exact integer vector u with y_j = lambda * B * u: useful entries are
// the transmitted integers, interference entries accumulate them through the
// exponent-increment map. Computed independently of the model's matrix
// assembly so the two paths can be cross-checked.
Eigen::VectorXd receive_integers(const NetworkConfig& config,
                                 const NetworkDirections& nd,
                                 const StreamAllocation& alloc,
                                 const ReceiveModel& model,
                                 const SymbolBlocks& symbols);

// Per-antenna power normalizers nu^2_k = sum of squared direction values
// used by transmitter k (all its antennas share one direction vector).
std::vector<double> transmit_power_normalizers(const NetworkConfig& config,
                                               const ChannelMatrix& channel,
                                               const NetworkDirections& nd,
                                               const StreamAllocation& alloc);

// ---- bundled link instance -------------------------------------------------

struct LinkContext {
    NetworkConfig config;
    ChannelMatrix channel;
    StreamAllocation alloc;
    NetworkDirections nd;
    std::vector<ReceiveModel> models;  // per receiver
    std::vector<double> nu2;           // per transmitter
    double nu2_max = 1.0;
};

// Samples the channel, builds directions, verifies alignment at every
// receiver (throwing on the impossible), and assembles all receive models.
LinkContext build_link_context(const NetworkConfig& config, std::uint64_t seed,
                               int n, const DofPoint& point, const Caps& caps = {});

// CSV dump of a receive model (row-major entries; header documents layout).
std::string receive_model_to_csv(const ReceiveModel& model);

}  // namespace ria
