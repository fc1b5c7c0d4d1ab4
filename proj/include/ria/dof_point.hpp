// Exact-rational DoF points: a vector d_k for interference/general-demand
// networks, a J x K matrix d_{j,k} (stored row-major) for X networks.
#pragma once

#include <string>

#include "ria/net_model.hpp"
#include "ria/rational.hpp"

namespace ria {

struct DofPoint {
    int J = 1;  // 1 for per-message vectors, J for X-network matrices
    int K = 0;
    RationalVector v;  // size J*K, row-major (j, k)

    static DofPoint vector_point(std::vector<Rational> entries) {
        DofPoint p;
        p.J = 1;
        p.K = static_cast<int>(entries.size());
        p.v.resize(p.K);
        for (int i = 0; i < p.K; ++i) p.v[i] = entries[i];
        return p;
    }

    static DofPoint matrix_point(int J, int K, std::vector<Rational> row_major) {
        DofPoint p;
        p.J = J;
        p.K = K;
        p.v.resize(J * K);
        for (int i = 0; i < J * K; ++i) p.v[i] = row_major[i];
        return p;
    }

    const Rational& at(int k) const { return v[k]; }
    const Rational& at(int j, int k) const { return v[j * K + k]; }
    int size() const { return static_cast<int>(v.size()); }
};

// Parses "1/2,1/2" (vector) or "1/3,1/3;1/3,1/3" (matrix rows split by ';').
DofPoint parse_dof_point(const std::string& text);

std::string dof_point_to_string(const DofPoint& p);

}  // namespace ria
