#pragma once

#include <optional>
#include <vector>

#include "optiring/rwa.h"
#include "optiring/topology.h"

namespace optiring {

/// Contiguous node range [lo, hi].
struct NodeRange {
    NodeId lo = 0;
    NodeId hi = 0;

    int size() const noexcept { return hi - lo + 1; }
    bool contains(NodeId v) const noexcept { return v >= lo && v <= hi; }

    friend bool operator==(const NodeRange&, const NodeRange&) = default;
};

/// Nodes that run one all-to-all exchange inside a stage: the i-th member of
/// each sibling group. `extra_receivers` are members of shorter siblings that
/// have no i-th member; they receive the subset's data without sending, which
/// keeps uneven trees complete.
struct Subset {
    std::vector<NodeId> members;
    std::vector<NodeId> extra_receivers;
    Scope scope;  // full ring on stage 1, parent segment afterwards
};

struct StageSpec {
    int index = 1;  // 1-based
    int radix = 0;
    long long multiplicity = 1;  // items per sender in a full tree, prod of earlier radices
    std::vector<NodeRange> parents;
    std::vector<NodeRange> groups;  // children produced by this stage
    std::vector<Subset> subsets;
};

struct TreePlan {
    int n = 0;
    std::vector<int> radices;
    std::vector<StageSpec> stages;

    int depth() const noexcept { return static_cast<int>(radices.size()); }
};

/// Largest depth accepted for n nodes: ceil(log2 n).
int max_depth(int n);

/// Builds the m-ary tree plan. Without explicit radices each m_j is picked
/// from {floor(n^(1/k)), ceil(n^(1/k))} so the product covers n, minimizing
/// the total per-stage wavelength demand (lexicographically smallest vector on
/// ties). Groups split into balanced contiguous children: the first (s mod m)
/// children get ceil(s/m) nodes, the rest floor(s/m).
TreePlan plan_tree(int n, int k, const std::optional<std::vector<int>>& radices = std::nullopt);

/// Per-stage schedule. Stage j sends every item a node holds to the other
/// members of its subset as separate unit demands, so each wavelength carries
/// one item per step; stage 1 routes by shortest arc, later stages stay in
/// the parent segment. Stages are packed independently.
Schedule optree_schedule(const Topology& topo, const TreePlan& plan, int w);

/// All N(N-1) legs in one stage, shortest-arc routed.
Schedule one_stage_schedule(const Topology& topo, int w);

/// N-1 steps; in step t node i forwards the item of node (i-t+1) to i+1.
Schedule ring_allgather_schedule(const Topology& topo);

/// N/2 steps of alternating neighbour exchanges; N must be even.
Schedule neighbor_exchange_schedule(const Topology& topo);

/// All-to-all unit demands for one subset. `holdings[v]` lists the items node
/// v forwards. Opposite pairs of an evenly spaced ring subset are routed both
/// ways in one direction, alternating by pair position, so every directed
/// link sees the ceil(s^2/8) load of an s-node ring.
std::vector<TransferDemand> subset_demands(const Topology& topo, const Subset& subset,
                                           const std::vector<std::vector<ItemId>>& holdings);

}  // namespace optiring
