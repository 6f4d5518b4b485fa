#include "optiring/collectives.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <string>

#include "optiring/analytics.h"
#include "optiring/error.h"

namespace optiring {

namespace {

// Saturating integer power.
long long ipow(long long base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > std::numeric_limits<long long>::max() / base) {
            return std::numeric_limits<long long>::max();
        }
        out *= base;
    }
    return out;
}

long long floor_root(long long n, int k) {
    long long r = std::llround(std::pow(static_cast<double>(n), 1.0 / k));
    r = std::max(r, 1LL);
    while (r > 1 && ipow(r, k) > n) --r;
    while (ipow(r + 1, k) <= n) ++r;
    return r;
}

long long product(const std::vector<int>& radices) {
    long long p = 1;
    for (int m : radices) {
        p *= m;
        if (p > (1LL << 40)) break;
    }
    return p;
}

std::vector<NodeRange> split(NodeRange parent, int radix) {
    const int size = parent.size();
    const int parts = std::min(radix, size);
    const int base = size / parts;
    const int longer = size % parts;
    std::vector<NodeRange> out;
    out.reserve(static_cast<size_t>(parts));
    NodeId lo = parent.lo;
    for (int t = 0; t < parts; ++t) {
        const int len = base + (t < longer ? 1 : 0);
        out.push_back({lo, lo + len - 1});
        lo += len;
    }
    return out;
}

void validate_radices(int n, const std::vector<int>& radices) {
    if (radices.empty()) throw Error(ErrorKind::InvalidPlan, "empty radix vector");
    for (int m : radices) {
        if (m < 2) {
            throw Error(ErrorKind::InvalidPlan, "radix " + std::to_string(m) + " below 2");
        }
    }
    if (product(radices) < n) {
        throw Error(ErrorKind::InvalidPlan,
                    "radix product " + std::to_string(product(radices)) + " cannot cover " +
                        std::to_string(n) + " nodes");
    }
}

TreePlan build_plan(int n, std::vector<int> radices) {
    TreePlan plan;
    plan.n = n;
    plan.radices = std::move(radices);
    std::vector<NodeRange> parents{{0, n - 1}};
    long long multiplicity = 1;
    for (size_t j = 0; j < plan.radices.size(); ++j) {
        StageSpec stage;
        stage.index = static_cast<int>(j) + 1;
        stage.radix = plan.radices[j];
        stage.multiplicity = multiplicity;
        stage.parents = parents;
        for (const NodeRange& parent : parents) {
            const auto children = split(parent, stage.radix);
            stage.groups.insert(stage.groups.end(), children.begin(), children.end());
            const Scope scope = j == 0 ? Scope::ring() : Scope::line(parent.lo, parent.hi);
            const int positions = children.front().size();
            for (int i = 0; i < positions; ++i) {
                Subset subset;
                subset.scope = scope;
                for (const NodeRange& child : children) {
                    if (i < child.size()) {
                        subset.members.push_back(child.lo + i);
                    } else {
                        subset.extra_receivers.push_back(child.lo + i % child.size());
                    }
                }
                stage.subsets.push_back(std::move(subset));
            }
        }
        parents = stage.groups;
        multiplicity *= stage.radix;
        plan.stages.push_back(std::move(stage));
    }
    return plan;
}

std::vector<std::vector<ItemId>> own_items(int n) {
    std::vector<std::vector<ItemId>> holdings(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) holdings[static_cast<size_t>(v)] = {v};
    return holdings;
}

void merge_into(std::vector<ItemId>& into, const std::vector<ItemId>& from) {
    std::vector<ItemId> merged;
    merged.reserve(into.size() + from.size());
    std::set_union(into.begin(), into.end(), from.begin(), from.end(),
                   std::back_inserter(merged));
    into = std::move(merged);
}

void deliver(const Subset& subset, std::vector<std::vector<ItemId>>& holdings) {
    std::vector<ItemId> pooled;
    for (NodeId v : subset.members) merge_into(pooled, holdings[static_cast<size_t>(v)]);
    for (NodeId v : subset.members) holdings[static_cast<size_t>(v)] = pooled;
    for (NodeId v : subset.extra_receivers) merge_into(holdings[static_cast<size_t>(v)], pooled);
}

Schedule pack_subsets(const Topology& topo, AlgorithmKind alg, int w,
                      const std::vector<std::vector<Subset>>& stages) {
    if (w < 1) throw Error(ErrorKind::InvalidConfig, "wavelength budget must be >= 1");
    Schedule schedule;
    schedule.algorithm = alg;
    schedule.n = topo.n_nodes();
    schedule.w = w;
    auto holdings = own_items(topo.n_nodes());
    for (const auto& subsets : stages) {
        std::vector<TransferDemand> demands;
        for (const Subset& subset : subsets) {
            auto part = subset_demands(topo, subset, holdings);
            std::move(part.begin(), part.end(), std::back_inserter(demands));
        }
        Stage stage;
        stage.steps = pack_steps(demands, w);
        schedule.stages.push_back(std::move(stage));
        for (const Subset& subset : subsets) deliver(subset, holdings);
    }
    return schedule;
}

}  // namespace

int max_depth(int n) {
    int k = 0;
    while ((1LL << k) < n) ++k;
    return std::max(k, 1);
}

TreePlan plan_tree(int n, int k, const std::optional<std::vector<int>>& radices) {
    if (n < 2) {
        throw Error(ErrorKind::InvalidConfig, "tree needs at least 2 nodes");
    }
    if (radices) {
        validate_radices(n, *radices);
        if (static_cast<int>(radices->size()) > max_depth(n)) {
            throw Error(ErrorKind::InvalidPlan,
                        "depth " + std::to_string(radices->size()) + " exceeds ceil(log2 " +
                            std::to_string(n) + ")");
        }
        return build_plan(n, *radices);
    }
    if (k < 1 || k > max_depth(n)) {
        throw Error(ErrorKind::InvalidPlan,
                    "depth " + std::to_string(k) + " outside [1, " + std::to_string(max_depth(n)) +
                        "] for " + std::to_string(n) + " nodes");
    }
    if (k == 1) return build_plan(n, {n});

    const long long lo = std::max(2LL, floor_root(n, k));
    const long long hi = ipow(lo, k) >= n ? lo : lo + 1;

    std::optional<std::vector<int>> best;
    long long best_cost = 0;
    const int variants = lo == hi ? 1 : (1 << k);
    for (int mask = 0; mask < variants; ++mask) {
        std::vector<int> candidate(static_cast<size_t>(k));
        for (int j = 0; j < k; ++j) {
            // Bit (k-1-j) selects the larger radix at stage j, so masks run in
            // lexicographic order of the vectors.
            candidate[static_cast<size_t>(j)] =
                static_cast<int>(((mask >> (k - 1 - j)) & 1) ? hi : lo);
        }
        if (product(candidate) < n) continue;
        long long cost = 0;
        for (long long wj : stage_wavelength_demand(n, candidate)) cost += wj;
        if (!best || cost < best_cost) {
            best = candidate;
            best_cost = cost;
        }
    }
    return build_plan(n, *best);
}

std::vector<TransferDemand> subset_demands(const Topology& topo, const Subset& subset,
                                           const std::vector<std::vector<ItemId>>& holdings) {
    std::vector<NodeId> members = subset.members;
    std::sort(members.begin(), members.end());
    const int n = topo.n_nodes();
    std::vector<TransferDemand> out;

    auto route = [&](NodeId src, NodeId dst, TieBreak tie) {
        if (subset.scope.segment) return topo.segment_path(subset.scope.lo, subset.scope.hi, src, dst);
        return topo.ring_shortest_path(src, dst, tie);
    };
    auto emit = [&](NodeId src, NodeId dst, const Path& path) {
        for (ItemId item : holdings[static_cast<size_t>(src)]) {
            out.push_back({src, dst, {item}, path});
        }
    };

    for (size_t p = 0; p < members.size(); ++p) {
        for (size_t q = 0; q < members.size(); ++q) {
            if (p == q) continue;
            const NodeId src = members[p];
            const NodeId dst = members[q];
            TieBreak tie = TieBreak::Clockwise;
            if (!subset.scope.segment && 2 * topo.clockwise_distance(src, dst) == n &&
                std::min(p, q) % 2 == 1) {
                tie = TieBreak::Counterclockwise;
            }
            emit(src, dst, route(src, dst, tie));
        }
    }
    for (NodeId dst : subset.extra_receivers) {
        for (NodeId src : members) {
            if (src == dst) continue;
            emit(src, dst, route(src, dst, TieBreak::Clockwise));
        }
    }
    return out;
}

Schedule optree_schedule(const Topology& topo, const TreePlan& plan, int w) {
    if (plan.n != topo.n_nodes()) {
        throw Error(ErrorKind::InvalidPlan, "plan built for " + std::to_string(plan.n) +
                                                " nodes, ring has " +
                                                std::to_string(topo.n_nodes()));
    }
    validate_radices(plan.n, plan.radices);
    std::vector<std::vector<Subset>> stages;
    stages.reserve(plan.stages.size());
    for (const auto& stage : plan.stages) stages.push_back(stage.subsets);
    Schedule schedule = pack_subsets(topo, AlgorithmKind::OpTree, w, stages);
    schedule.radices = plan.radices;
    return schedule;
}

Schedule one_stage_schedule(const Topology& topo, int w) {
    Subset all;
    all.scope = Scope::ring();
    for (NodeId v = 0; v < topo.n_nodes(); ++v) all.members.push_back(v);
    return pack_subsets(topo, AlgorithmKind::OneStage, w, {{all}});
}

Schedule ring_allgather_schedule(const Topology& topo) {
    const int n = topo.n_nodes();
    Schedule schedule;
    schedule.algorithm = AlgorithmKind::Ring;
    schedule.n = n;
    schedule.w = 1;
    Stage stage;
    for (int t = 1; t <= n - 1; ++t) {
        Step step;
        for (NodeId i = 0; i < n; ++i) {
            const NodeId next = (i + 1) % n;
            const ItemId item = ((i - t + 1) % n + n) % n;
            step.assignments.push_back(
                {{i, next, {item}, topo.directed_path(i, next, Direction::Clockwise)}, 0});
        }
        stage.steps.push_back(std::move(step));
    }
    schedule.stages.push_back(std::move(stage));
    return schedule;
}

Schedule neighbor_exchange_schedule(const Topology& topo) {
    const int n = topo.n_nodes();
    if (n % 2 != 0) {
        throw Error(ErrorKind::UnsupportedConfig,
                    "neighbor exchange needs an even node count, got " + std::to_string(n));
    }
    Schedule schedule;
    schedule.algorithm = AlgorithmKind::NeighborExchange;
    schedule.n = n;
    schedule.w = 1;

    // Even nodes talk to the right neighbour first, odd nodes to the left;
    // sides alternate afterwards.
    auto neighbour = [n](NodeId i, int side) {
        const bool right = (i % 2 == 0) == (side == 0);
        return right ? (i + 1) % n : (i + n - 1) % n;
    };
    auto send = [&](NodeId src, NodeId dst, std::vector<ItemId> items) {
        const Direction dir =
            dst == (src + 1) % n ? Direction::Clockwise : Direction::Counterclockwise;
        return Assignment{{src, dst, std::move(items), topo.directed_path(src, dst, dir)}, 0};
    };

    Stage stage;
    Step first;
    for (NodeId i = 0; i < n; ++i) first.assignments.push_back(send(i, neighbour(i, 0), {i}));
    stage.steps.push_back(std::move(first));

    // last[i]: the pair of items node i acquired most recently; after the
    // first exchange that is the aligned pair {2q, 2q+1} around i.
    std::vector<std::vector<ItemId>> last(static_cast<size_t>(n));
    for (NodeId i = 0; i < n; ++i) {
        const NodeId base = i - i % 2;
        last[static_cast<size_t>(i)] = {base, base + 1};
    }
    for (int t = 1; t < n / 2; ++t) {
        const int side = t % 2;
        Step step;
        std::vector<std::vector<ItemId>> received(static_cast<size_t>(n));
        for (NodeId i = 0; i < n; ++i) {
            const NodeId peer = neighbour(i, side);
            step.assignments.push_back(send(i, peer, last[static_cast<size_t>(i)]));
            received[static_cast<size_t>(peer)] = last[static_cast<size_t>(i)];
        }
        last = std::move(received);
        stage.steps.push_back(std::move(step));
    }
    schedule.stages.push_back(std::move(stage));
    return schedule;
}

}  // namespace optiring
