// Monomial transmit-direction sets over channel-coefficient generators.
//
// A direction is a monomial  prod_g h_g^{alpha_g} * delta^e  represented by
// its exact integer exponent vector. All alignment logic is integer
// arithmetic on these vectors; floats appear only when a direction is
// evaluated against a concrete channel.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ria/bigint.hpp"
#include "ria/errors.hpp"
#include "ria/net_model.hpp"

namespace ria {

inline constexpr std::size_t kDefaultDirectionCap = 100000;  // D + D' per stream

// The ordered list of channel coordinates (j, k, r, t) that act as monomial
// generators. The order is lexicographic on (j, k, r, t) and fixed, because
// exponent vectors index into it.
//
// Membership rules per network kind:
//   interference channel: all cross links (j, k != j, r, t),
//   general demand:       (j, k in complement of demands[j], r, t),
//   X network (target j): (jhat != j, khat, rhat, that).
struct GeneratorIndex {
    NetworkKind kind = NetworkKind::InterferenceChannel;
    int target_receiver = -1;  // X networks only
    std::vector<std::array<int, 4>> coords;

    std::size_t size() const { return coords.size(); }
    // Position of (j,k,r,t) in the ordered list, or -1 if not a generator.
    int find(int j, int k, int r, int t) const;

    static GeneratorIndex build(const NetworkConfig& config, int target_receiver = -1);
};

// Stream identity of a direction set: stream index l, and for X networks the
// target receiver the stream is intended for.
struct DeltaTag {
    int target_receiver = -1;
    int stream = 0;

    bool operator==(const DeltaTag&) const = default;
};

// A single monomial record, used for JSON export and small tests. Bulk
// storage lives in DirectionSet.
struct Direction {
    std::vector<int> exponents;
    std::optional<DeltaTag> tag;
    int delta_exponent = 0;
};

// One enumerated set of directions for one stream: the base set (exponents
// <= n-1, cardinality n^E) or the extended interference set (exponents <= n,
// cardinality (n+1)^E). Members are stored in lexicographic exponent order,
// which equals mixed-radix order of the member index.
//
// Base-set members carry delta_exponent = sum(alpha) + 1: the stream factor
// delta_l multiplies the encoded signal once on top of the (h*delta_l)^alpha
// accumulation. Extended-set members carry sum(alpha) only; incrementing one
// channel exponent of a base member then lands exactly on an extended member
// with matching delta exponent, which is the alignment closure fact.
class DirectionSet {
  public:
    DirectionSet(std::shared_ptr<const GeneratorIndex> gens, int n, bool extended,
                 DeltaTag tag, double delta_value);

    const GeneratorIndex& generators() const { return *gens_; }
    int degree() const { return n_; }
    bool extended() const { return extended_; }
    int radix() const { return extended_ ? n_ + 1 : n_; }
    DeltaTag tag() const { return tag_; }
    double delta_value() const { return delta_; }
    std::size_t size() const { return count_; }

    std::span<const std::uint8_t> exponents(std::size_t i) const {
        return {exps_->data() + i * width(), width()};
    }
    int delta_exponent(std::size_t i) const;
    int exponent_sum(std::size_t i) const;

    // Mixed-radix rank of an exponent vector; -1 when any entry is out of
    // range for this set. rank_checked verifies the stored row matches.
    long long rank_of(std::span<const int> exponents) const;
    long long rank_checked(std::span<const int> exponents) const;

    // Monomial value prod h^alpha * delta^e for a concrete channel.
    double eval(std::size_t i, const ChannelMatrix& channel) const;
    Eigen::VectorXd eval_all(const ChannelMatrix& channel) const;

    Direction member(std::size_t i) const;

  private:
    std::size_t width() const { return gens_->size(); }

    std::shared_ptr<const GeneratorIndex> gens_;
    int n_;
    bool extended_;
    DeltaTag tag_;
    double delta_;
    std::size_t count_;
    std::shared_ptr<const std::vector<std::uint8_t>> exps_;
};

// Exact cardinalities: E generators, D = n^E base directions, D' = (n+1)^E
// extended directions. For X networks pass the target receiver (counts are
// per target); omit it for uniform-antenna X networks where all targets agree.
struct DirectionCounts {
    std::size_t E = 0;
    BigUint D;
    BigUint Dprime;
};
DirectionCounts direction_counts(const NetworkConfig& config, int n,
                                 int target_receiver = -1);

// Base and extended sets for streams 1..num_streams of one generator context.
// delta_l values are drawn uniformly from [1/2, 1], deterministically from
// the experiment seed, independently per (target receiver, stream).
struct DirectionFamily {
    std::shared_ptr<const GeneratorIndex> gens;
    int n = 1;
    std::vector<DirectionSet> base;      // one per stream
    std::vector<DirectionSet> extended;  // one per stream
};
DirectionFamily build_directions(const NetworkConfig& config, int n,
                                 int num_streams, std::uint64_t seed,
                                 int target_receiver = -1,
                                 std::size_t cap = kDefaultDirectionCap);

// Standalone monomial evaluation; the independent naive loop used by tests
// lives in test code.
double eval_direction(const Direction& d, const ChannelMatrix& channel,
                      const GeneratorIndex& gens, double delta_value);

std::string direction_set_to_json(const DirectionSet& set);

}  // namespace ria
