#include "optiring/topology.h"

#include <algorithm>
#include <string>

#include "optiring/error.h"

namespace optiring {

std::string_view to_string(Direction dir) noexcept {
    return dir == Direction::Clockwise ? "cw" : "ccw";
}

NodeId Path::hop_tail(int i) const noexcept {
    if (direction == Direction::Clockwise) return (src + i) % ring_size;
    return ((src - i) % ring_size + ring_size) % ring_size;
}

LinkId Path::link_at(int i) const noexcept {
    const NodeId tail = hop_tail(i);
    return direction == Direction::Clockwise ? tail : ring_size + tail;
}

DirectedLink Path::directed_link_at(int i) const noexcept {
    return {hop_tail(i), direction};
}

std::vector<LinkId> Path::links() const {
    std::vector<LinkId> out;
    out.reserve(static_cast<size_t>(hops));
    for (int i = 0; i < hops; ++i) out.push_back(link_at(i));
    return out;
}

std::vector<DirectedLink> Path::directed_links() const {
    std::vector<DirectedLink> out;
    out.reserve(static_cast<size_t>(hops));
    for (int i = 0; i < hops; ++i) out.push_back(directed_link_at(i));
    return out;
}

Topology Topology::build(int n_nodes) {
    if (n_nodes < 2) {
        throw Error(ErrorKind::InvalidConfig,
                    "ring needs at least 2 nodes, got " + std::to_string(n_nodes));
    }
    return Topology(n_nodes);
}

LinkId Topology::link_id(DirectedLink link) const noexcept {
    return link.dir == Direction::Clockwise ? link.from : n_ + link.from;
}

DirectedLink Topology::link(LinkId id) const noexcept {
    if (id < n_) return {id, Direction::Clockwise};
    return {id - n_, Direction::Counterclockwise};
}

NodeId Topology::head(DirectedLink link) const noexcept {
    if (link.dir == Direction::Clockwise) return (link.from + 1) % n_;
    return (link.from + n_ - 1) % n_;
}

void Topology::check_node(NodeId node) const {
    if (node < 0 || node >= n_) {
        throw Error(ErrorKind::InvalidConfig,
                    "node " + std::to_string(node) + " outside ring of " +
                        std::to_string(n_));
    }
}

int Topology::clockwise_distance(NodeId src, NodeId dst) const noexcept {
    return ((dst - src) % n_ + n_) % n_;
}

Path Topology::ring_shortest_path(NodeId src, NodeId dst, TieBreak tie) const {
    check_node(src);
    check_node(dst);
    if (src == dst) {
        throw Error(ErrorKind::SelfTransfer,
                    "self transfer at node " + std::to_string(src));
    }
    const int cw = clockwise_distance(src, dst);
    const int ccw = n_ - cw;
    Direction dir = Direction::Clockwise;
    if (ccw < cw || (ccw == cw && tie == TieBreak::Counterclockwise)) {
        dir = Direction::Counterclockwise;
    }
    return {src, dst, dir, std::min(cw, ccw), n_, Scope::ring()};
}

Path Topology::segment_path(NodeId lo, NodeId hi, NodeId src, NodeId dst) const {
    check_node(lo);
    check_node(hi);
    if (lo > hi) {
        throw Error(ErrorKind::InvalidConfig, "segment bounds out of order");
    }
    auto inside = [&](NodeId v) { return v >= lo && v <= hi; };
    if (!inside(src) || !inside(dst)) {
        throw Error(ErrorKind::OutOfSegment,
                    "transfer " + std::to_string(src) + "->" + std::to_string(dst) +
                        " leaves segment [" + std::to_string(lo) + "," +
                        std::to_string(hi) + "]");
    }
    if (src == dst) {
        throw Error(ErrorKind::SelfTransfer,
                    "self transfer at node " + std::to_string(src));
    }
    const Direction dir = dst > src ? Direction::Clockwise : Direction::Counterclockwise;
    return {src, dst, dir, dst > src ? dst - src : src - dst, n_, Scope::line(lo, hi)};
}

Path Topology::directed_path(NodeId src, NodeId dst, Direction dir) const {
    check_node(src);
    check_node(dst);
    if (src == dst) {
        throw Error(ErrorKind::SelfTransfer,
                    "self transfer at node " + std::to_string(src));
    }
    const int cw = clockwise_distance(src, dst);
    return {src, dst, dir, dir == Direction::Clockwise ? cw : n_ - cw, n_, Scope::ring()};
}

CongestionMap link_congestion(const Topology& topo,
                              std::span<const TransferDemand> demands) {
    CongestionMap out;
    out.load.assign(static_cast<size_t>(topo.directed_link_count()), 0);
    for (const auto& demand : demands) {
        const int weight = demand.multiplicity();
        for (int i = 0; i < demand.path.hops; ++i) {
            int& slot = out.load[static_cast<size_t>(demand.path.link_at(i))];
            slot += weight;
            out.max_load = std::max(out.max_load, slot);
        }
    }
    return out;
}

}  // namespace optiring
