// Achievable DoF-region polytopes, the transmitter-grouping outer bound,
// closed-form totals, and exact rational region queries.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ria/dof_point.hpp"
#include "ria/net_model.hpp"
#include "ria/rational.hpp"

namespace ria {

struct Constraint {
    RationalVector coeffs;
    Rational rhs;
    std::string provenance;
};

// A bounded polytope { x >= 0 : coeffs . x <= rhs } in message-DoF space.
// Max-form inequalities arrive pre-expanded into linear constraints
// (max_i a_i <= b iff every a_i <= b; sums of per-receiver maxima expand over
// selectors). Nonnegativity and single-user box cuts are part of the list.
struct DofRegion {
    int dim = 0;
    std::vector<Constraint> constraints;
};

inline constexpr int kMaxSelectorExpansion = 10000;  // X-network selectors per receiver
inline constexpr int kMaxOuterUsers = 8;
inline constexpr int kMaxVertexDim = 6;
inline constexpr int kMaxVertexConstraints = 64;

// Achievable inner region for the config's network kind.
DofRegion inner_region(const NetworkConfig& config);

// Direct evaluation of the max-form inequalities, kept as an independent
// membership oracle for the expanded constraint lists.
bool inner_contains_direct(const NetworkConfig& config, const DofPoint& point);

// Transmitter-grouping outer bound for a uniform-antenna (K,[M],[N])
// interference channel: for every group size g, every useful-transmitter
// subset of size g and every interfering subset of the admissible
// cardinality min{K-g, floor(gN/M)}, the induced two-user cuts.
DofRegion outer_region(int K, int M, int N);
bool outer_contains_direct(int K, int M, int N, const DofPoint& point);

struct OuterTotal {
    Rational total;          // min over g of gNK / min{K, floor(g(N+M)/M)}
    int best_g = 1;
    Rational zero_forcing;   // min{max(M,N), K*min(M,N)}
};
OuterTotal outer_total_dof(int K, int M, int N);

struct TotalDofFormula {
    std::string label;
    std::string formula;
    Rational value;
    std::optional<DofPoint> witness;
};
std::vector<TotalDofFormula> total_dof_formulas(const NetworkConfig& config);

// ---- region queries --------------------------------------------------------

bool region_contains(const DofRegion& region, const DofPoint& point);

// All polytope vertices by exhaustive basis enumeration over constraint
// subsets, deduplicated, in lexicographic order. Exact rational arithmetic.
std::vector<RationalVector> region_vertices(const DofRegion& region);

struct MaximizeResult {
    Rational value;
    RationalVector arg;
};
MaximizeResult region_maximize(const DofRegion& region, const RationalVector& objective);

std::string region_to_json(const DofRegion& region);
std::string vertices_to_csv(const std::vector<RationalVector>& vertices);

}  // namespace ria
