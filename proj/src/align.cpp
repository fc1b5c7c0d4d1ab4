#include "ria/align.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ria/rng.hpp"

namespace ria {

namespace {

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    __int128 l = static_cast<__int128>(a) / std::gcd(a, b) * b;
    if (l > INT64_MAX) throw std::overflow_error("stream allocation rho overflow");
    return static_cast<std::int64_t>(l);
}

// Messages whose signal is interference at `receiver`, together with the
// aligned group they belong to (group == target receiver for X networks,
// -1 otherwise). Pairs are (tx, target).
std::vector<std::pair<int, int>> interfering_messages(const NetworkConfig& config,
                                                      int receiver) {
    std::vector<std::pair<int, int>> out;
    switch (config.kind) {
        case NetworkKind::InterferenceChannel:
            for (int k = 0; k < config.K; ++k)
                if (k != receiver) out.push_back({k, -1});
            break;
        case NetworkKind::GeneralDemand:
            for (int k : config.demand_complement(receiver)) out.push_back({k, -1});
            break;
        case NetworkKind::XNetwork:
            for (int jh = 0; jh < config.J; ++jh) {
                if (jh == receiver) continue;
                for (int k = 0; k < config.K; ++k) out.push_back({k, jh});
            }
            break;
    }
    return out;
}

std::int64_t message_dbar(const NetworkConfig& config, const StreamAllocation& alloc,
                          int tx, int target) {
    if (config.kind == NetworkKind::XNetwork)
        return alloc.dbar_at(target, config.K, tx);
    return alloc.dbar_at(tx);
}

// Messages receiver j decodes: (tx, target == j).
std::vector<std::pair<int, int>> useful_messages(const NetworkConfig& config,
                                                 int receiver) {
    std::vector<std::pair<int, int>> out;
    switch (config.kind) {
        case NetworkKind::InterferenceChannel:
            out.push_back({receiver, receiver});
            break;
        case NetworkKind::GeneralDemand:
            for (int k : config.demands[receiver]) out.push_back({k, receiver});
            break;
        case NetworkKind::XNetwork:
            for (int k = 0; k < config.K; ++k) out.push_back({k, receiver});
            break;
    }
    return out;
}

struct EvalCache {
    // [family][stream] evaluated direction vectors
    std::vector<std::vector<Eigen::VectorXd>> base;
    std::vector<std::vector<Eigen::VectorXd>> ext;
};

EvalCache evaluate_directions(const NetworkDirections& nd, const ChannelMatrix& channel,
                              bool with_extended) {
    EvalCache cache;
    cache.base.resize(nd.families.size());
    cache.ext.resize(nd.families.size());
    for (std::size_t f = 0; f < nd.families.size(); ++f) {
        for (const auto& set : nd.families[f].base)
            cache.base[f].push_back(set.eval_all(channel));
        if (with_extended)
            for (const auto& set : nd.families[f].extended)
                cache.ext[f].push_back(set.eval_all(channel));
    }
    return cache;
}

int family_index(const NetworkConfig& config, int target) {
    return config.kind == NetworkKind::XNetwork ? target : 0;
}

}  // namespace

StreamAllocation allocate_streams(const NetworkConfig& config, const DofPoint& point) {
    const int expected = config.message_count();
    if (point.size() != expected)
        throw SchemaError("DoF point has " + std::to_string(point.size()) +
                          " entries, expected " + std::to_string(expected));
    StreamAllocation alloc;
    alloc.dof_point = point;

    std::vector<Rational> ratios;
    for (int m = 0; m < expected; ++m) {
        const Rational& d = point.v[m];
        if (d < Rational(0)) throw SchemaError("DoF point entries must be >= 0");
        int tx = (config.kind == NetworkKind::XNetwork) ? m % config.K : m;
        ratios.push_back(d / Rational(config.M[tx]));
    }
    std::int64_t rho = 1;
    for (const Rational& r : ratios) rho = lcm_checked(rho, r.den());
    alloc.rho = rho;
    for (const Rational& r : ratios) {
        Rational scaled = r * Rational(rho);
        alloc.dbar.push_back(scaled.num());  // integral by construction of rho
    }
    return alloc;
}

NetworkDirections build_network_directions(const NetworkConfig& config, int n,
                                           const StreamAllocation& alloc,
                                           std::uint64_t seed, std::size_t cap) {
    NetworkDirections nd;
    nd.n = n;
    if (config.kind == NetworkKind::XNetwork) {
        for (int j = 0; j < config.J; ++j) {
            std::int64_t lmax = 1;
            for (int k = 0; k < config.K; ++k)
                lmax = std::max(lmax, alloc.dbar_at(j, config.K, k));
            nd.families.push_back(build_directions(config, n, static_cast<int>(lmax),
                                                   seed, j, cap));
        }
    } else {
        std::int64_t lmax = 1;
        for (std::int64_t d : alloc.dbar) lmax = std::max(lmax, d);
        nd.families.push_back(build_directions(config, n, static_cast<int>(lmax),
                                               seed, -1, cap));
    }
    return nd;
}

AlignmentReport verify_alignment(const NetworkConfig& config,
                                 const NetworkDirections& nd,
                                 const StreamAllocation& alloc, int receiver) {
    AlignmentReport report;
    report.receiver = receiver;

    // Occupancy bitmap per aligned group (target, stream).
    struct GroupState {
        int target, stream;
        std::vector<char> hit;
        long long occupied = 0;
        long long capacity = 0;
    };
    std::vector<GroupState> groups;
    auto group_state = [&](int target, int stream, std::size_t dprime) -> GroupState& {
        for (auto& g : groups)
            if (g.target == target && g.stream == stream) return g;
        groups.push_back({target, stream, std::vector<char>(dprime, 0), 0,
                          static_cast<long long>(dprime)});
        return groups.back();
    };

    std::vector<int> incremented;
    for (auto [tx, target] : interfering_messages(config, receiver)) {
        const DirectionFamily& fam =
            nd.families[family_index(config, target < 0 ? 0 : target)];
        std::int64_t dbar = message_dbar(config, alloc, tx, target);
        for (int l = 0; l < dbar; ++l) {
            const DirectionSet& base = fam.base[l];
            const DirectionSet& ext = fam.extended[l];
            GroupState& group = group_state(target, l, ext.size());
            for (std::size_t i = 0; i < base.size(); ++i) {
                auto row = base.exponents(i);
                incremented.assign(row.begin(), row.end());
                for (int r = 0; r < config.N[receiver]; ++r) {
                    for (int t = 0; t < config.M[tx]; ++t) {
                        int g = fam.gens->find(receiver, tx, r, t);
                        bool ok = g >= 0;
                        long long rank = -1;
                        if (ok) {
                            ++incremented[g];
                            rank = ext.rank_checked(incremented);
                            ok = rank >= 0 &&
                                 ext.delta_exponent(static_cast<std::size_t>(rank)) ==
                                     base.delta_exponent(i);
                            --incremented[g];
                        }
                        ++report.checked;
                        if (!ok) {
                            report.violations.push_back(
                                {receiver, tx, r, t, l, static_cast<long long>(i)});
                        } else if (!group.hit[static_cast<std::size_t>(rank)]) {
                            group.hit[static_cast<std::size_t>(rank)] = 1;
                            ++group.occupied;
                        }
                    }
                }
            }
        }
    }
    for (const auto& g : groups)
        report.groups.push_back({g.target, g.stream, g.occupied, g.capacity});
    return report;
}

long long ReceiveModel::interference_offset(int r, int group_index, int stream,
                                            long long extended_rank) const {
    long long off = useful_cols + static_cast<long long>(r) * antenna_block_width;
    for (int g = 0; g < group_index; ++g)
        off += static_cast<long long>(groups[g].streams) * groups[g].width_per_stream;
    return off + static_cast<long long>(stream) * groups[group_index].width_per_stream +
           extended_rank;
}

ReceiveModel build_receive_model(const NetworkConfig& config,
                                 const ChannelMatrix& channel,
                                 const NetworkDirections& nd,
                                 const StreamAllocation& alloc, int receiver,
                                 std::uint64_t seed, const Caps& caps) {
    ReceiveModel model;
    model.receiver = receiver;
    model.rows = config.N[receiver];

    // Useful layout.
    for (auto [tx, target] : useful_messages(config, receiver)) {
        const DirectionFamily& fam = nd.families[family_index(config, target)];
        std::int64_t dbar = message_dbar(config, alloc, tx, target);
        ReceiveModel::UsefulBlock blk;
        blk.tx = tx;
        blk.target = target;
        blk.offset = model.useful_cols;
        blk.antennas = config.M[tx];
        blk.streams = static_cast<int>(dbar);
        blk.dirs = static_cast<long long>(fam.base[0].size());
        model.useful.push_back(blk);
        model.useful_cols += blk.width();
    }

    // Interference layout: aligned groups in fixed order.
    if (config.kind == NetworkKind::XNetwork) {
        for (int jh = 0; jh < config.J; ++jh) {
            if (jh == receiver) continue;
            std::int64_t lmax = 0;
            for (int k = 0; k < config.K; ++k)
                lmax = std::max(lmax, alloc.dbar_at(jh, config.K, k));
            if (lmax == 0) continue;
            const DirectionFamily& fam = nd.families[jh];
            model.groups.push_back({jh, static_cast<int>(lmax),
                                    static_cast<long long>(fam.extended[0].size())});
        }
    } else {
        std::int64_t lmax = 0;
        for (auto [tx, target] : interfering_messages(config, receiver))
            lmax = std::max(lmax, message_dbar(config, alloc, tx, target));
        if (lmax > 0) {
            const DirectionFamily& fam = nd.families[0];
            model.groups.push_back({-1, static_cast<int>(lmax),
                                    static_cast<long long>(fam.extended[0].size())});
        }
    }
    for (const auto& g : model.groups)
        model.antenna_block_width += static_cast<long long>(g.streams) * g.width_per_stream;
    model.interference_cols = model.antenna_block_width * model.rows;
    model.G = model.useful_cols + model.interference_cols;
    if (model.G > caps.model_columns)
        throw CapError("receive model refused: G=" + std::to_string(model.G) +
                       " exceeds cap " + std::to_string(caps.model_columns));

    EvalCache cache = evaluate_directions(nd, channel, true);

    // Structural generator B.
    model.B = Eigen::MatrixXd::Zero(model.rows, model.G);
    for (const auto& blk : model.useful) {
        const int f = family_index(config, blk.target);
        long long col = blk.offset;
        for (int t = 0; t < blk.antennas; ++t) {
            for (int l = 0; l < blk.streams; ++l) {
                const Eigen::VectorXd& bv = cache.base[f][l];
                for (long long i = 0; i < blk.dirs; ++i, ++col) {
                    for (int r = 0; r < model.rows; ++r)
                        model.B(r, col) = channel.block(receiver, blk.tx)(r, t) * bv[i];
                }
            }
        }
    }
    for (int r = 0; r < model.rows; ++r) {
        for (std::size_t g = 0; g < model.groups.size(); ++g) {
            const auto& group = model.groups[g];
            const int f = family_index(config, group.target < 0 ? 0 : group.target);
            for (int l = 0; l < group.streams; ++l) {
                const Eigen::VectorXd& ev = cache.ext[f][l];
                long long off = model.interference_offset(r, static_cast<int>(g), l, 0);
                for (long long i = 0; i < group.width_per_stream; ++i)
                    model.B(r, off + i) = ev[i];
            }
        }
    }

    // Integer range multipliers.
    model.column_mult = Eigen::VectorXi::Ones(model.G);
    std::vector<int> exps;
    auto interferers = interfering_messages(config, receiver);
    for (int r = 0; r < model.rows; ++r) {
        for (std::size_t g = 0; g < model.groups.size(); ++g) {
            const auto& group = model.groups[g];
            const int f = family_index(config, group.target < 0 ? 0 : group.target);
            const DirectionFamily& fam = nd.families[f];
            for (int l = 0; l < group.streams; ++l) {
                const DirectionSet& base = fam.base[l];
                const DirectionSet& ext = fam.extended[l];
                for (long long ip = 0; ip < group.width_per_stream; ++ip) {
                    auto row = ext.exponents(static_cast<std::size_t>(ip));
                    exps.assign(row.begin(), row.end());
                    int mult = 0;
                    for (auto [tx, target] : interferers) {
                        if (target != group.target) continue;
                        if (message_dbar(config, alloc, tx, target) <= l) continue;
                        for (int t = 0; t < config.M[tx]; ++t) {
                            int gi = fam.gens->find(receiver, tx, r, t);
                            if (gi < 0 || exps[gi] == 0) continue;
                            --exps[gi];
                            if (base.rank_of(exps) >= 0) ++mult;
                            ++exps[gi];
                        }
                    }
                    model.column_mult[model.interference_offset(
                        r, static_cast<int>(g), l, ip)] = mult;
                }
            }
        }
    }

    // Weighting matrix; re-draw on near-singularity and count the re-draws.
    const int n = model.rows;
    if (n == 1) {
        model.W = Eigen::MatrixXd::Identity(1, 1);
        model.det_w = 1.0;
    } else {
        for (int attempt = 0;; ++attempt) {
            Rng rng(derive_seed(seed, Stream::Gamma,
                                static_cast<std::uint64_t>(receiver),
                                static_cast<std::uint64_t>(attempt)));
            model.W = Eigen::MatrixXd::Identity(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    if (r != c) model.W(r, c) = rng.uniform(0.5, 1.0);
            model.det_w = model.W.determinant();
            if (std::abs(model.det_w) > 1e-9) {
                model.w_redraws = attempt;
                break;
            }
        }
    }
    model.A = model.W * model.B;
    return model;
}

SymbolBlocks random_symbols(const NetworkConfig& config, const StreamAllocation& alloc,
                            const NetworkDirections& nd, long Q, double lambda,
                            Rng& rng) {
    SymbolBlocks blocks;
    blocks.lambda = lambda;
    const int messages = config.message_count();
    for (int m = 0; m < messages; ++m) {
        int tx = (config.kind == NetworkKind::XNetwork) ? m % config.K : m;
        int target = (config.kind == NetworkKind::XNetwork) ? m / config.K : -1;
        const int f = family_index(config, target < 0 ? 0 : target);
        const long long D = static_cast<long long>(nd.families[f].base[0].size());
        std::int64_t dbar = alloc.dbar[m];
        Eigen::MatrixXi s(dbar * D, config.M[tx]);
        for (int t = 0; t < config.M[tx]; ++t)
            for (Eigen::Index row = 0; row < s.rows(); ++row)
                s(row, t) = static_cast<int>(rng.next_u64() % (2 * Q + 1)) - Q;
        blocks.s.push_back(std::move(s));
    }
    return blocks;
}

std::vector<Eigen::VectorXd> encode_transmitters(const NetworkConfig& config,
                                                 const ChannelMatrix& channel,
                                                 const NetworkDirections& nd,
                                                 const StreamAllocation& alloc,
                                                 const SymbolBlocks& symbols) {
    EvalCache cache = evaluate_directions(nd, channel, false);
    std::vector<Eigen::VectorXd> x;
    for (int k = 0; k < config.K; ++k)
        x.push_back(Eigen::VectorXd::Zero(config.M[k]));

    const int messages = config.message_count();
    for (int m = 0; m < messages; ++m) {
        int tx = (config.kind == NetworkKind::XNetwork) ? m % config.K : m;
        int target = (config.kind == NetworkKind::XNetwork) ? m / config.K : -1;
        const int f = family_index(config, target < 0 ? 0 : target);
        std::int64_t dbar = alloc.dbar[m];
        const Eigen::MatrixXi& s = symbols.s[m];
        for (int l = 0; l < dbar; ++l) {
            const Eigen::VectorXd& bv = cache.base[f][l];
            const long long D = bv.size();
            for (int t = 0; t < config.M[tx]; ++t) {
                double acc = 0.0;
                for (long long i = 0; i < D; ++i)
                    acc += bv[i] * static_cast<double>(s(l * D + i, t));
                x[tx](t) += acc;
            }
        }
    }
    for (auto& xt : x) xt *= symbols.lambda;
    return x;
}

Eigen::VectorXd propagate(const NetworkConfig& config, const ChannelMatrix& channel,
                          const std::vector<Eigen::VectorXd>& x, int receiver) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(config.N[receiver]);
    for (int k = 0; k < config.K; ++k) y += channel.block(receiver, k) * x[k];
    return y;
}

Eigen::VectorXd receive_integers(const NetworkConfig& config,
                                 const NetworkDirections& nd,
                                 const StreamAllocation& alloc,
                                 const ReceiveModel& model,
                                 const SymbolBlocks& symbols) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(model.G);
    const int j = model.receiver;

    auto message_index = [&](int tx, int target) {
        return config.kind == NetworkKind::XNetwork ? target * config.K + tx : tx;
    };

    for (const auto& blk : model.useful) {
        const Eigen::MatrixXi& s = symbols.s[message_index(blk.tx, blk.target)];
        long long col = blk.offset;
        for (int t = 0; t < blk.antennas; ++t)
            for (int l = 0; l < blk.streams; ++l)
                for (long long i = 0; i < blk.dirs; ++i, ++col)
                    u[col] = static_cast<double>(s(l * blk.dirs + i, t));
    }

    std::vector<int> incremented;
    for (auto [tx, target] : interfering_messages(config, j)) {
        const int f = family_index(config, target < 0 ? 0 : target);
        const DirectionFamily& fam = nd.families[f];
        int group_index = -1;
        for (std::size_t g = 0; g < model.groups.size(); ++g)
            if (model.groups[g].target == target) group_index = static_cast<int>(g);
        const Eigen::MatrixXi& s = symbols.s[message_index(tx, target)];
        std::int64_t dbar = message_dbar(config, alloc, tx, target);
        for (int l = 0; l < dbar; ++l) {
            const DirectionSet& base = fam.base[l];
            const DirectionSet& ext = fam.extended[l];
            const long long D = static_cast<long long>(base.size());
            for (long long i = 0; i < D; ++i) {
                auto row = base.exponents(static_cast<std::size_t>(i));
                incremented.assign(row.begin(), row.end());
                for (int r = 0; r < model.rows; ++r) {
                    for (int t = 0; t < config.M[tx]; ++t) {
                        int g = fam.gens->find(j, tx, r, t);
                        ++incremented[g];
                        long long rank = ext.rank_of(incremented);
                        --incremented[g];
                        u[model.interference_offset(r, group_index, l, rank)] +=
                            static_cast<double>(s(l * D + i, t));
                    }
                }
            }
        }
    }
    return u;
}

std::vector<double> transmit_power_normalizers(const NetworkConfig& config,
                                               const ChannelMatrix& channel,
                                               const NetworkDirections& nd,
                                               const StreamAllocation& alloc) {
    EvalCache cache = evaluate_directions(nd, channel, false);
    std::vector<double> nu2(config.K, 0.0);
    const int messages = config.message_count();
    for (int m = 0; m < messages; ++m) {
        int tx = (config.kind == NetworkKind::XNetwork) ? m % config.K : m;
        int target = (config.kind == NetworkKind::XNetwork) ? m / config.K : -1;
        const int f = family_index(config, target < 0 ? 0 : target);
        for (int l = 0; l < alloc.dbar[m]; ++l)
            nu2[tx] += cache.base[f][l].squaredNorm();
    }
    return nu2;
}

LinkContext build_link_context(const NetworkConfig& config, std::uint64_t seed,
                               int n, const DofPoint& point, const Caps& caps) {
    LinkContext ctx;
    ctx.config = config;
    ctx.channel = sample_channel(config, seed);
    ctx.alloc = allocate_streams(config, point);
    ctx.nd = build_network_directions(config, n, ctx.alloc, seed, caps.directions);
    for (int j = 0; j < config.J; ++j) {
        AlignmentReport report = verify_alignment(config, ctx.nd, ctx.alloc, j);
        if (!report.ok())
            throw std::logic_error("alignment violation at receiver " +
                                   std::to_string(j + 1));
        ctx.models.push_back(
            build_receive_model(config, ctx.channel, ctx.nd, ctx.alloc, j, seed, caps));
    }
    ctx.nu2 = transmit_power_normalizers(config, ctx.channel, ctx.nd, ctx.alloc);
    ctx.nu2_max = *std::max_element(ctx.nu2.begin(), ctx.nu2.end());
    return ctx;
}

std::string receive_model_to_csv(const ReceiveModel& model) {
    std::ostringstream out;
    out << "# receiver=" << model.receiver + 1 << " rows=" << model.rows
        << " G=" << model.G << " useful=" << model.useful_cols
        << " interference=" << model.interference_cols << "\n";
    out << "# useful blocks (tx, offset, antennas, streams, dirs):";
    for (const auto& blk : model.useful)
        out << " (" << blk.tx + 1 << "," << blk.offset << "," << blk.antennas << ","
            << blk.streams << "," << blk.dirs << ")";
    out << "\n# matrix A, row-major\n";
    char buf[32];
    for (int r = 0; r < model.rows; ++r) {
        for (long long c = 0; c < model.G; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", model.A(r, c));
            out << buf << (c + 1 == model.G ? "" : ",");
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace ria
