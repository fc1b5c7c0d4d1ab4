// Desk-scale resource caps. Every exhaustive enumeration checks its cap up
// front and refuses with the required count instead of running away.
#pragma once

#include <cstddef>

namespace ria {

struct Caps {
    std::size_t directions = 100000;                  // D + D' per stream
    unsigned long long enumeration = 100000000ULL;    // distance-search points
    unsigned long long codebook = 1000000ULL;         // ML decoding codewords
    long long model_columns = 1LL << 20;              // receive-model width G
};

}  // namespace ria
