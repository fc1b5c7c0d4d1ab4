#include "ria/dof_regions.hpp"

#include <algorithm>
#include <functional>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace ria {

DofPoint parse_dof_point(const std::string& text) {
    std::vector<std::vector<Rational>> rows;
    std::stringstream ss(text);
    std::string row_text;
    while (std::getline(ss, row_text, ';')) {
        std::vector<Rational> row;
        std::stringstream rs(row_text);
        std::string item;
        while (std::getline(rs, item, ',')) row.push_back(Rational::parse(item));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw SchemaError("empty DoF point");
    if (rows.size() == 1) return DofPoint::vector_point(rows[0]);
    std::vector<Rational> flat;
    for (const auto& row : rows) {
        if (row.size() != rows[0].size())
            throw SchemaError("ragged DoF matrix");
        for (const auto& v : row) flat.push_back(v);
    }
    return DofPoint::matrix_point(static_cast<int>(rows.size()),
                                  static_cast<int>(rows[0].size()), flat);
}

std::string dof_point_to_string(const DofPoint& p) {
    std::string out;
    for (int j = 0; j < p.J; ++j) {
        if (j) out += ";";
        for (int k = 0; k < p.K; ++k) {
            if (k) out += ",";
            out += p.v[j * p.K + k].to_string();
        }
    }
    return out;
}

namespace {

RationalVector zero_vec(int dim) {
    RationalVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Rational(0);
    return v;
}

void add_constraint(DofRegion& region, RationalVector coeffs, Rational rhs,
                    std::string provenance) {
    region.constraints.push_back({std::move(coeffs), std::move(rhs), std::move(provenance)});
}

void add_nonneg_and_dedupe(DofRegion& region, const std::vector<Rational>& box,
                           const std::vector<std::string>& box_labels) {
    for (int i = 0; i < region.dim; ++i) {
        RationalVector c = zero_vec(region.dim);
        c[i] = Rational(1);
        add_constraint(region, c, box[i], box_labels[i]);
    }
    for (int i = 0; i < region.dim; ++i) {
        RationalVector c = zero_vec(region.dim);
        c[i] = Rational(-1);
        add_constraint(region, c, Rational(0), "nonneg " + std::to_string(i + 1));
    }
    // Exact duplicates only waste vertex-enumeration work.
    std::set<std::vector<std::pair<std::int64_t, std::int64_t>>> seen;
    std::vector<Constraint> kept;
    for (auto& con : region.constraints) {
        std::vector<std::pair<std::int64_t, std::int64_t>> key;
        key.reserve(region.dim + 1);
        for (int i = 0; i < region.dim; ++i)
            key.push_back({con.coeffs[i].num(), con.coeffs[i].den()});
        key.push_back({con.rhs.num(), con.rhs.den()});
        if (seen.insert(key).second) kept.push_back(std::move(con));
    }
    region.constraints = std::move(kept);
}

int min_mn(int a, int b) { return a < b ? a : b; }

// Per-coordinate single-user caps min(M_k, N of the decoding receiver(s)).
std::vector<Rational> box_limits(const NetworkConfig& config,
                                 std::vector<std::string>& labels) {
    std::vector<Rational> box;
    switch (config.kind) {
        case NetworkKind::InterferenceChannel:
            for (int k = 0; k < config.K; ++k) {
                box.push_back(Rational(min_mn(config.M[k], config.N[k])));
                labels.push_back("single-user k=" + std::to_string(k + 1));
            }
            break;
        case NetworkKind::GeneralDemand:
            for (int k = 0; k < config.K; ++k) {
                int cap = config.M[k];
                for (int j = 0; j < config.J; ++j)
                    if (config.demands_message(j, k)) cap = min_mn(cap, config.N[j]);
                box.push_back(Rational(cap));
                labels.push_back("single-user k=" + std::to_string(k + 1));
            }
            break;
        case NetworkKind::XNetwork:
            for (int j = 0; j < config.J; ++j)
                for (int k = 0; k < config.K; ++k) {
                    box.push_back(Rational(min_mn(config.M[k], config.N[j])));
                    labels.push_back("single-user j=" + std::to_string(j + 1) +
                                     " k=" + std::to_string(k + 1));
                }
            break;
    }
    return box;
}

bool in_box(const NetworkConfig& config, const DofPoint& point) {
    std::vector<std::string> labels;
    std::vector<Rational> box = box_limits(config, labels);
    for (int i = 0; i < point.size(); ++i) {
        if (point.v[i] < Rational(0)) return false;
        if (point.v[i] > box[i]) return false;
    }
    return true;
}

void for_each_subset(int K, int size, const std::vector<int>& pool,
                     const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> pick(size);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == size) {
            fn(pick);
            return;
        }
        for (int i = start; i <= static_cast<int>(pool.size()) - (size - depth); ++i) {
            pick[depth] = pool[i];
            rec(i + 1, depth + 1);
        }
    };
    if (size == 0)
        fn({});
    else if (size <= static_cast<int>(pool.size()))
        rec(0, 0);
    (void)K;
}

}  // namespace

DofRegion inner_region(const NetworkConfig& config) {
    DofRegion region;
    region.dim = config.message_count();

    switch (config.kind) {
        case NetworkKind::InterferenceChannel: {
            // One pair constraint per ordered (k, khat):
            //   d_k / N_k + d_khat / M_khat <= 1.
            for (int k = 0; k < config.K; ++k)
                for (int kh = 0; kh < config.K; ++kh) {
                    if (kh == k) continue;
                    RationalVector c = zero_vec(region.dim);
                    c[k] += Rational(1, config.N[k]);
                    c[kh] += Rational(1, config.M[kh]);
                    add_constraint(region, c, Rational(1),
                                   "ic-pair k=" + std::to_string(k + 1) +
                                       " khat=" + std::to_string(kh + 1));
                }
            break;
        }
        case NetworkKind::GeneralDemand: {
            // Per receiver: demanded sum plus each single interferer <= N_j.
            for (int j = 0; j < config.J; ++j) {
                std::vector<int> wc = config.demand_complement(j);
                RationalVector base = zero_vec(region.dim);
                for (int k : config.demands[j]) base[k] += Rational(1);
                if (wc.empty()) {
                    add_constraint(region, base, Rational(config.N[j]),
                                   "demand-sum j=" + std::to_string(j + 1));
                } else {
                    for (int kh : wc) {
                        RationalVector c = base;
                        c[kh] += Rational(1);
                        add_constraint(region, c, Rational(config.N[j]),
                                       "demand j=" + std::to_string(j + 1) +
                                           " khat=" + std::to_string(kh + 1));
                    }
                }
            }
            break;
        }
        case NetworkKind::XNetwork: {
            // Per receiver j, one constraint per selector assigning an
            // interfering transmitter to every other receiver:
            //   sum_k d_{j,k}/N_j + sum_{jhat != j} d_{jhat,sel(jhat)}/M_sel <= 1.
            std::vector<int> others;
            double selector_count = 1;
            for (int x = 1; x < config.J; ++x) selector_count *= config.K;
            if (selector_count > kMaxSelectorExpansion)
                throw CapError("X-network selector expansion needs " +
                               std::to_string(static_cast<long long>(selector_count)) +
                               " constraints per receiver; cap " +
                               std::to_string(kMaxSelectorExpansion) +
                               " (use direct membership instead)");
            for (int j = 0; j < config.J; ++j) {
                others.clear();
                for (int jh = 0; jh < config.J; ++jh)
                    if (jh != j) others.push_back(jh);
                std::vector<int> sel(others.size(), 0);
                for (;;) {
                    RationalVector c = zero_vec(region.dim);
                    for (int k = 0; k < config.K; ++k)
                        c[j * config.K + k] += Rational(1, config.N[j]);
                    std::string tag = "x j=" + std::to_string(j + 1) + " sel=";
                    for (std::size_t o = 0; o < others.size(); ++o) {
                        int jh = others[o];
                        int kh = sel[o];
                        c[jh * config.K + kh] += Rational(1, config.M[kh]);
                        tag += std::to_string(jh + 1) + ":" + std::to_string(kh + 1) +
                               (o + 1 < others.size() ? "," : "");
                    }
                    add_constraint(region, c, Rational(1), tag);
                    std::size_t o = 0;
                    while (o < sel.size() && ++sel[o] == config.K) sel[o++] = 0;
                    if (o == sel.size()) break;
                }
            }
            break;
        }
    }

    std::vector<std::string> labels;
    std::vector<Rational> box = box_limits(config, labels);
    add_nonneg_and_dedupe(region, box, labels);
    return region;
}

bool inner_contains_direct(const NetworkConfig& config, const DofPoint& point) {
    if (point.size() != config.message_count())
        throw SchemaError("DoF point dimension mismatch");
    if (!in_box(config, point)) return false;

    switch (config.kind) {
        case NetworkKind::InterferenceChannel: {
            for (int k = 0; k < config.K; ++k) {
                Rational worst(0);
                for (int kh = 0; kh < config.K; ++kh) {
                    if (kh == k) continue;
                    worst = rational_max(worst, point.at(kh) / Rational(config.M[kh]));
                }
                if (point.at(k) / Rational(config.N[k]) + worst > Rational(1))
                    return false;
            }
            return true;
        }
        case NetworkKind::GeneralDemand: {
            for (int j = 0; j < config.J; ++j) {
                Rational sum(0);
                for (int k : config.demands[j]) sum += point.at(k);
                Rational worst(0);
                for (int kh : config.demand_complement(j))
                    worst = rational_max(worst, point.at(kh));
                if (sum + worst > Rational(config.N[j])) return false;
            }
            return true;
        }
        case NetworkKind::XNetwork: {
            for (int j = 0; j < config.J; ++j) {
                Rational lhs(0);
                for (int k = 0; k < config.K; ++k)
                    lhs += point.at(j, k) / Rational(config.N[j]);
                for (int jh = 0; jh < config.J; ++jh) {
                    if (jh == j) continue;
                    Rational worst(0);
                    for (int kh = 0; kh < config.K; ++kh)
                        worst = rational_max(worst,
                                             point.at(jh, kh) / Rational(config.M[kh]));
                    lhs += worst;
                }
                if (lhs > Rational(1)) return false;
            }
            return true;
        }
    }
    return false;
}

DofRegion outer_region(int K, int M, int N) {
    if (K < 1 || M < 1 || N < 1) throw SchemaError("outer_region needs K,M,N >= 1");
    if (K > kMaxOuterUsers)
        throw CapError("outer-bound subset enumeration capped at K <= " +
                       std::to_string(kMaxOuterUsers));
    DofRegion region;
    region.dim = K;
    const Rational cut(min_mn(M, N));

    std::vector<int> all(K);
    for (int k = 0; k < K; ++k) all[k] = k;

    for (int g = 1; g <= K; ++g) {
        const int size2 = std::min(K - g, (g * N) / M);
        for_each_subset(K, g, all, [&](const std::vector<int>& gt1) {
            RationalVector c1 = zero_vec(K);
            std::string t1;
            for (int k : gt1) {
                c1[k] = Rational(1);
                t1 += (t1.empty() ? "" : ",") + std::to_string(k + 1);
            }
            add_constraint(region, c1, Rational(g) * cut,
                           "group g=" + std::to_string(g) + " useful={" + t1 + "}");
            std::vector<int> rest;
            for (int k = 0; k < K; ++k)
                if (std::find(gt1.begin(), gt1.end(), k) == gt1.end())
                    rest.push_back(k);
            for_each_subset(K, size2, rest, [&](const std::vector<int>& gt2) {
                std::string t2;
                RationalVector c2 = zero_vec(K);
                for (int k : gt2) {
                    c2[k] = Rational(1);
                    t2 += (t2.empty() ? "" : ",") + std::to_string(k + 1);
                }
                if (!gt2.empty())
                    add_constraint(region, c2, Rational(size2) * cut,
                                   "group g=" + std::to_string(g) + " interf={" + t2 + "}");
                RationalVector c3 = c1;
                for (int k : gt2) c3[k] += Rational(1);
                add_constraint(region, c3, Rational(g * N),
                               "group g=" + std::to_string(g) + " useful={" + t1 +
                                   "} interf={" + t2 + "}");
            });
        });
    }

    std::vector<Rational> box(K, cut);
    std::vector<std::string> labels;
    for (int k = 0; k < K; ++k)
        labels.push_back("single-user k=" + std::to_string(k + 1));
    add_nonneg_and_dedupe(region, box, labels);
    return region;
}

bool outer_contains_direct(int K, int M, int N, const DofPoint& point) {
    if (point.size() != K) throw SchemaError("DoF point dimension mismatch");
    const Rational cut(min_mn(M, N));
    for (int i = 0; i < K; ++i) {
        if (point.v[i] < Rational(0) || point.v[i] > cut) return false;
    }
    std::vector<int> all(K);
    for (int k = 0; k < K; ++k) all[k] = k;
    bool ok = true;
    for (int g = 1; g <= K && ok; ++g) {
        const int size2 = std::min(K - g, (g * N) / M);
        for_each_subset(K, g, all, [&](const std::vector<int>& gt1) {
            if (!ok) return;
            Rational s1(0);
            for (int k : gt1) s1 += point.at(k);
            if (s1 > Rational(g) * cut) {
                ok = false;
                return;
            }
            // The binding interferer set is the size2 largest remaining coords.
            std::vector<Rational> rest;
            for (int k = 0; k < K; ++k)
                if (std::find(gt1.begin(), gt1.end(), k) == gt1.end())
                    rest.push_back(point.at(k));
            std::sort(rest.begin(), rest.end(),
                      [](const Rational& a, const Rational& b) { return b < a; });
            Rational s2(0);
            for (int i = 0; i < size2; ++i) s2 += rest[i];
            if (s2 > Rational(size2) * cut || s1 + s2 > Rational(g * N)) ok = false;
        });
    }
    return ok;
}

OuterTotal outer_total_dof(int K, int M, int N) {
    if (K < 1 || M < 1 || N < 1) throw SchemaError("outer_total_dof needs K,M,N >= 1");
    OuterTotal result;
    result.zero_forcing =
        rational_min(Rational(std::max(M, N)), Rational(K) * Rational(min_mn(M, N)));
    bool first = true;
    for (int g = 1; g <= K; ++g) {
        int denom = std::min(K, (g * (N + M)) / M);
        Rational value = Rational(static_cast<std::int64_t>(g) * N * K) / Rational(denom);
        if (first || value < result.total) {
            result.total = value;
            result.best_g = g;
            first = false;
        }
    }
    return result;
}

std::vector<TotalDofFormula> total_dof_formulas(const NetworkConfig& config) {
    std::vector<TotalDofFormula> out;
    if (!config.uniform_tx() || !config.uniform_rx()) return out;
    const int M = config.M[0];
    const int N = config.N[0];
    const int K = config.K;
    const int J = config.J;

    if (config.kind == NetworkKind::InterferenceChannel) {
        if (M == N) {
            Rational value = Rational(static_cast<std::int64_t>(N) * K, 2);
            std::vector<Rational> w(K, Rational(N, 2));
            out.push_back({"ic-equal-antennas", "NK/2", value,
                           DofPoint::vector_point(w)});
        } else {
            Rational value =
                Rational(static_cast<std::int64_t>(K) * M * N, M + N);
            std::vector<Rational> w(K, Rational(static_cast<std::int64_t>(M) * N, M + N));
            out.push_back({"ic-rect-antennas", "KMN/(M+N)", value,
                           DofPoint::vector_point(w)});
        }
    }
    if (config.kind == NetworkKind::XNetwork) {
        if (M == N) {
            Rational value =
                Rational(static_cast<std::int64_t>(K) * J * N, K + J - 1);
            std::vector<Rational> w(J * K, Rational(N, K + J - 1));
            out.push_back({"x-equal-antennas", "KJN/(K+J-1)", value,
                           DofPoint::matrix_point(J, K, w)});
        }
        if (M == 1) {
            if (K > N) {
                Rational value = Rational(static_cast<std::int64_t>(N) * K * J,
                                          K + static_cast<std::int64_t>(N) * (J - 1));
                std::vector<Rational> w(
                    J * K, Rational(N, K + static_cast<std::int64_t>(N) * (J - 1)));
                out.push_back({"x-simo", "NKJ/(K+N(J-1))", value,
                               DofPoint::matrix_point(J, K, w)});
            } else {
                out.push_back({"x-simo-zeroforcing", "N", Rational(N), std::nullopt});
            }
        }
    }
    return out;
}

bool region_contains(const DofRegion& region, const DofPoint& point) {
    if (point.size() != region.dim) throw SchemaError("DoF point dimension mismatch");
    for (const auto& con : region.constraints)
        if (dot(con.coeffs, point.v) > con.rhs) return false;
    return true;
}

namespace {

// Solves square * x = rhs exactly; empty result when singular.
std::optional<RationalVector> solve_exact(RationalMatrix square, RationalVector rhs) {
    const int n = static_cast<int>(square.rows());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r) {
            if (!square(r, col).is_zero()) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) return std::nullopt;
        if (pivot != col) {
            square.row(pivot).swap(square.row(col));
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            if (square(r, col).is_zero()) continue;
            Rational f = square(r, col) / square(col, col);
            for (int c = col; c < n; ++c) square(r, c) -= f * square(col, c);
            rhs[r] -= f * rhs[col];
        }
    }
    RationalVector x = zero_vec(n);
    for (int r = n - 1; r >= 0; --r) {
        Rational acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= square(r, c) * x[c];
        x[r] = acc / square(r, r);
    }
    return x;
}

struct LexLess {
    bool operator()(const RationalVector& a, const RationalVector& b) const {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a[i] < b[i]) return true;
            if (b[i] < a[i]) return false;
        }
        return false;
    }
};

}  // namespace

std::vector<RationalVector> region_vertices(const DofRegion& region) {
    const int dim = region.dim;
    const int m = static_cast<int>(region.constraints.size());
    if (dim > kMaxVertexDim)
        throw CapError("vertex enumeration capped at dimension " +
                       std::to_string(kMaxVertexDim));
    if (m > kMaxVertexConstraints)
        throw CapError("vertex enumeration capped at " +
                       std::to_string(kMaxVertexConstraints) + " constraints");

    std::set<RationalVector, LexLess> found;
    std::vector<int> pick(dim);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == dim) {
            RationalMatrix sq(dim, dim);
            RationalVector rhs = zero_vec(dim);
            for (int r = 0; r < dim; ++r) {
                for (int c = 0; c < dim; ++c)
                    sq(r, c) = region.constraints[pick[r]].coeffs[c];
                rhs[r] = region.constraints[pick[r]].rhs;
            }
            auto x = solve_exact(std::move(sq), std::move(rhs));
            if (!x) return;
            for (const auto& con : region.constraints)
                if (dot(con.coeffs, *x) > con.rhs) return;
            found.insert(*x);
            return;
        }
        for (int i = start; i <= m - (dim - depth); ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return {found.begin(), found.end()};
}

MaximizeResult region_maximize(const DofRegion& region, const RationalVector& objective) {
    if (objective.size() != region.dim)
        throw SchemaError("objective dimension mismatch");
    auto verts = region_vertices(region);
    if (verts.empty()) throw SchemaError("region has no vertices");
    MaximizeResult best{dot(objective, verts[0]), verts[0]};
    for (const auto& v : verts) {
        Rational val = dot(objective, v);
        if (val > best.value) best = {val, v};
    }
    return best;
}

std::string region_to_json(const DofRegion& region) {
    nlohmann::ordered_json out;
    out["dim"] = region.dim;
    nlohmann::ordered_json cons = nlohmann::ordered_json::array();
    for (const auto& con : region.constraints) {
        nlohmann::ordered_json rec;
        std::vector<std::string> coeffs;
        for (int i = 0; i < region.dim; ++i) coeffs.push_back(con.coeffs[i].to_string());
        rec["coeffs"] = coeffs;
        rec["rhs"] = con.rhs.to_string();
        rec["provenance"] = con.provenance;
        cons.push_back(rec);
    }
    out["constraints"] = cons;
    return out.dump();
}

std::string vertices_to_csv(const std::vector<RationalVector>& vertices) {
    std::ostringstream out;
    for (const auto& v : vertices) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out << v[i].to_string() << (i + 1 < v.size() ? "," : "");
        out << "\n";
    }
    return out.str();
}

}  // namespace ria
