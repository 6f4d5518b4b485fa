#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace optiring {

using NodeId = int;
using ItemId = int;  // an All-gather item is identified by the node that owns it
using LinkId = int;  // dense index of a directed link, see Topology::link_id

enum class Direction : std::uint8_t { Clockwise, Counterclockwise };

std::string_view to_string(Direction dir) noexcept;

/// Clockwise link i carries i -> (i+1) mod N, counterclockwise link i carries
/// i -> (i-1) mod N. Both sets are indexed by their tail node.
struct DirectedLink {
    NodeId from = 0;
    Direction dir = Direction::Clockwise;

    friend bool operator==(const DirectedLink&, const DirectedLink&) = default;
};

struct Scope {
    bool segment = false;  // false: full ring
    NodeId lo = 0;
    NodeId hi = 0;

    static Scope ring() { return {}; }
    static Scope line(NodeId lo, NodeId hi) { return {true, lo, hi}; }

    friend bool operator==(const Scope&, const Scope&) = default;
};

/// A route around the ring. Links are implied by (src, direction, hops) so a
/// path stays a few words wide regardless of its length; links() materializes
/// them when needed.
struct Path {
    NodeId src = 0;
    NodeId dst = 0;
    Direction direction = Direction::Clockwise;
    int hops = 0;
    int ring_size = 0;
    Scope scope;

    /// Tail node of the i-th link, 0 <= i < hops.
    NodeId hop_tail(int i) const noexcept;
    LinkId link_at(int i) const noexcept;
    DirectedLink directed_link_at(int i) const noexcept;
    std::vector<LinkId> links() const;
    std::vector<DirectedLink> directed_links() const;

    friend bool operator==(const Path&, const Path&) = default;
};

/// Tie-break applied when a destination sits exactly opposite its source.
enum class TieBreak : std::uint8_t { Clockwise, Counterclockwise };

class Topology {
public:
    /// Throws Error(InvalidConfig) when n_nodes < 2.
    static Topology build(int n_nodes);

    int n_nodes() const noexcept { return n_; }
    int directed_link_count() const noexcept { return 2 * n_; }

    LinkId link_id(DirectedLink link) const noexcept;
    DirectedLink link(LinkId id) const noexcept;
    NodeId head(DirectedLink link) const noexcept;

    /// Shortest arc from src to dst; hop count is min(cw, ccw). Opposite
    /// nodes (N/2 hops either way) use `tie`, clockwise unless told otherwise.
    Path ring_shortest_path(NodeId src, NodeId dst,
                            TieBreak tie = TieBreak::Clockwise) const;

    /// Direct route inside the contiguous segment [lo, hi]; never wraps.
    Path segment_path(NodeId lo, NodeId hi, NodeId src, NodeId dst) const;

    /// Route in an explicit direction (used by neighbour-based collectives).
    Path directed_path(NodeId src, NodeId dst, Direction dir) const;

    int clockwise_distance(NodeId src, NodeId dst) const noexcept;

private:
    explicit Topology(int n) : n_(n) {}
    void check_node(NodeId node) const;

    int n_;
};

/// One point-to-point leg of a broadcast: a path carrying one or more items.
/// Collectives built under the load-balancing rule always carry exactly one
/// item; neighbour exchange carries two on later steps.
struct TransferDemand {
    NodeId src = 0;
    NodeId dst = 0;
    std::vector<ItemId> items;
    Path path;

    int multiplicity() const noexcept { return static_cast<int>(items.size()); }
};

struct CongestionMap {
    std::vector<int> load;  // indexed by LinkId
    int max_load = 0;
};

/// Per-directed-link load, each demand weighted by the number of items it
/// carries.
CongestionMap link_congestion(const Topology& topo,
                              std::span<const TransferDemand> demands);

}  // namespace optiring
