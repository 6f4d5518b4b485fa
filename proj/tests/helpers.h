#pragma once

#include <numeric>
#include <vector>

#include "optiring/collectives.h"
#include "optiring/topology.h"

namespace optiring::testing {

inline std::vector<std::vector<ItemId>> own_items(int n) {
    std::vector<std::vector<ItemId>> holdings(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) holdings[static_cast<size_t>(v)] = {v};
    return holdings;
}

inline std::vector<NodeId> iota_nodes(NodeId lo, int count, int stride = 1) {
    std::vector<NodeId> out;
    for (int i = 0; i < count; ++i) out.push_back(lo + i * stride);
    return out;
}

/// All-to-all unit demands among `members`, each sending its own item.
inline std::vector<TransferDemand> all_to_all(const Topology& topo, std::vector<NodeId> members,
                                              Scope scope) {
    Subset subset{std::move(members), {}, scope};
    return subset_demands(topo, subset, own_items(topo.n_nodes()));
}

/// A unit demand along an explicit directed route.
inline TransferDemand demand(const Topology& topo, NodeId src, NodeId dst, Direction dir, ItemId item = 0) {
    return {src, dst, {item}, topo.directed_path(src, dst, dir)};
}

}  // namespace optiring::testing
