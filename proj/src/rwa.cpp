#include "optiring/rwa.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>

#include "optiring/error.h"

namespace optiring {

std::string_view to_string(AlgorithmKind alg) noexcept {
    switch (alg) {
        case AlgorithmKind::OpTree: return "optree";
        case AlgorithmKind::OneStage: return "one_stage";
        case AlgorithmKind::Ring: return "ring";
        case AlgorithmKind::NeighborExchange: return "ne";
        case AlgorithmKind::Wrht: return "wrht";
    }
    return "unknown";
}

AlgorithmKind parse_algorithm(std::string_view name) {
    std::string lower(name);
    for (char& c : lower) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == '-') c = '_';
    }
    if (lower == "optree") return AlgorithmKind::OpTree;
    if (lower == "one_stage" || lower == "onestage") return AlgorithmKind::OneStage;
    if (lower == "ring") return AlgorithmKind::Ring;
    if (lower == "ne" || lower == "neighbor_exchange") return AlgorithmKind::NeighborExchange;
    if (lower == "wrht") return AlgorithmKind::Wrht;
    throw Error(ErrorKind::InvalidConfig, "unknown algorithm '" + std::string(name) + "'");
}

int Schedule::total_steps() const noexcept {
    int total = 0;
    for (const auto& stage : stages) total += static_cast<int>(stage.steps.size());
    return total;
}

std::vector<int> Schedule::stage_steps() const {
    std::vector<int> out;
    out.reserve(stages.size());
    for (const auto& stage : stages) out.push_back(static_cast<int>(stage.steps.size()));
    return out;
}

long long min_wavelengths_one_stage(int n, LineScope scope) {
    if (n < 2) {
        throw Error(ErrorKind::InvalidConfig,
                    "wavelength bound needs n >= 2, got " + std::to_string(n));
    }
    const long long sq = static_cast<long long>(n) * n;
    return scope == LineScope::Ring ? (sq + 7) / 8 : sq / 4;
}

namespace {

// Wavelength occupancy of every directed link for every step opened so far.
class Occupancy {
public:
    Occupancy(int links, int w)
        : links_(links), w_(w), words_((w + 63) / 64), first_open_(static_cast<size_t>(links), 0) {}

    int step_count() const noexcept { return static_cast<int>(steps_.size()); }

    // Returns (step, wavelength) and marks the path busy.
    std::pair<int, int> place(const Path& path) {
        int step = 0;
        for (int i = 0; i < path.hops; ++i) {
            step = std::max(step, first_open_[static_cast<size_t>(path.link_at(i))]);
        }
        std::vector<std::uint64_t> busy(static_cast<size_t>(words_));
        for (;; ++step) {
            if (step == step_count()) {
                steps_.emplace_back(static_cast<size_t>(links_) * static_cast<size_t>(words_), 0);
            }
            std::fill(busy.begin(), busy.end(), 0);
            for (int i = 0; i < path.hops; ++i) {
                const auto* row = slot(step, path.link_at(i));
                for (int k = 0; k < words_; ++k) busy[static_cast<size_t>(k)] |= row[k];
            }
            const int lambda = lowest_free(busy.data());
            if (lambda < 0) continue;
            for (int i = 0; i < path.hops; ++i) {
                const LinkId link = path.link_at(i);
                slot(step, link)[lambda / 64] |= std::uint64_t{1} << (lambda % 64);
                advance(link);
            }
            return {step, lambda};
        }
    }

private:
    std::uint64_t* slot(int step, LinkId link) {
        return steps_[static_cast<size_t>(step)].data() +
               static_cast<size_t>(link) * static_cast<size_t>(words_);
    }

    bool full(int step, LinkId link) {
        return lowest_free(slot(step, link)) < 0;
    }

    void advance(LinkId link) {
        int& open = first_open_[static_cast<size_t>(link)];
        while (open < step_count() && full(open, link)) ++open;
    }

    int lowest_free(const std::uint64_t* busy) const {
        for (int k = 0; k < words_; ++k) {
            const std::uint64_t free_bits = ~busy[k];
            if (free_bits == 0) continue;
            const int lambda = k * 64 + std::countr_zero(free_bits);
            return lambda < w_ ? lambda : -1;
        }
        return -1;
    }

    int links_;
    int w_;
    int words_;
    std::vector<int> first_open_;
    std::vector<std::vector<std::uint64_t>> steps_;
};

}  // namespace

namespace {

// First-fit over `order`; returns (step, wavelength) per demand and the
// number of steps opened.
int first_fit(std::span<const TransferDemand> demands, const std::vector<size_t>& order, int w,
              std::vector<std::pair<int, int>>& placement) {
    Occupancy occupancy(2 * demands.front().path.ring_size, w);
    for (size_t idx : order) placement[idx] = occupancy.place(demands[idx].path);
    return occupancy.step_count();
}

int congestion_floor(std::span<const TransferDemand> demands, int w) {
    std::vector<int> load(2 * static_cast<size_t>(demands.front().path.ring_size), 0);
    int peak = 0;
    for (const auto& d : demands) {
        for (int i = 0; i < d.path.hops; ++i) {
            peak = std::max(peak, ++load[static_cast<size_t>(d.path.link_at(i))]);
        }
    }
    return (peak + w - 1) / w;
}

// Visit order that chains arcs into covers of the ring: starting from the
// longest remaining arc, keep taking the longest arc that starts at (or next
// after) the current end and still fits before the starting point. First-fit
// then tends to give each cover its own wavelength class, which is what a
// balanced all-to-all needs to meet its congestion floor.
std::vector<size_t> chained_order(std::span<const TransferDemand> demands) {
    const int n = demands.front().path.ring_size;
    std::vector<size_t> out;
    out.reserve(demands.size());
    for (Direction dir : {Direction::Clockwise, Direction::Counterclockwise}) {
        // Position along the direction of travel of the first link's tail.
        auto position = [&](const Path& p) {
            const NodeId tail = p.hop_tail(0);
            return dir == Direction::Clockwise ? tail : (n - tail) % n;
        };
        // Per start position: (hops, demand) sorted by hops desc then index.
        std::vector<std::vector<std::pair<int, size_t>>> starts(static_cast<size_t>(n));
        size_t remaining = 0;
        for (size_t i = 0; i < demands.size(); ++i) {
            const Path& p = demands[i].path;
            if (p.direction != dir || p.hops == 0) continue;
            starts[static_cast<size_t>(position(p))].push_back({p.hops, i});
            ++remaining;
        }
        for (auto& bucket : starts) {
            std::sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
        }
        // Buckets are consumed from the front in blocks; track taken entries.
        std::vector<std::vector<char>> taken(static_cast<size_t>(n));
        for (int x = 0; x < n; ++x) {
            taken[static_cast<size_t>(x)].assign(starts[static_cast<size_t>(x)].size(), 0);
        }
        auto take_longest = [&](int x, int budget) -> std::optional<std::pair<int, size_t>> {
            auto& bucket = starts[static_cast<size_t>(x)];
            auto& used = taken[static_cast<size_t>(x)];
            for (size_t j = 0; j < bucket.size(); ++j) {
                if (used[j] || bucket[j].first > budget) continue;
                used[j] = 1;
                return bucket[j];
            }
            return std::nullopt;
        };
        while (remaining > 0) {
            int start = 0;
            int longest = -1;
            for (int x = 0; x < n; ++x) {
                const auto& bucket = starts[static_cast<size_t>(x)];
                const auto& used = taken[static_cast<size_t>(x)];
                for (size_t j = 0; j < bucket.size(); ++j) {
                    if (used[j]) continue;
                    if (bucket[j].first > longest) {
                        longest = bucket[j].first;
                        start = x;
                    }
                    break;
                }
            }
            int x = start;
            int budget = n;
            while (budget > 0) {
                std::optional<std::pair<int, size_t>> arc;
                int gap = 0;
                for (; gap < budget && !arc; ++gap) arc = take_longest((x + gap) % n, budget - gap);
                if (!arc) break;
                --gap;
                out.push_back(arc->second);
                --remaining;
                budget -= gap + arc->first;
                x = (x + gap + arc->first) % n;
            }
        }
    }
    for (size_t i = 0; i < demands.size(); ++i) {
        if (demands[i].path.hops == 0) out.push_back(i);
    }
    return out;
}

// Exact ring covers for rotationally symmetric arc sets on an even ring:
// arcs L@x, (n/2-L)@(x+L), L@(x+n/2), (n/2-L)@(x+n/2+L) tile every link of
// one direction once, as do two opposite half-ring arcs. Covers are emitted
// back to back so first-fit gives each its own wavelength class; arcs that
// fit no pattern follow in chained order.
std::vector<size_t> paired_cover_order(std::span<const TransferDemand> demands) {
    const int n = demands.front().path.ring_size;
    const int half = n / 2;
    std::vector<size_t> out;
    out.reserve(demands.size());
    std::vector<char> used(demands.size(), 0);
    for (Direction dir : {Direction::Clockwise, Direction::Counterclockwise}) {
        auto position = [&](const Path& p) {
            const NodeId tail = p.hop_tail(0);
            return dir == Direction::Clockwise ? tail : (n - tail) % n;
        };
        // bucket[start * (half + 1) + hops] -> demand indices, used from the back
        std::vector<std::vector<size_t>> bucket(static_cast<size_t>(n) * static_cast<size_t>(half + 1));
        auto at = [&](int start, int hops) -> std::vector<size_t>& {
            return bucket[static_cast<size_t>(((start % n) + n) % n) * static_cast<size_t>(half + 1) +
                          static_cast<size_t>(hops)];
        };
        for (size_t i = demands.size(); i-- > 0;) {
            const Path& p = demands[i].path;
            if (p.direction != dir || p.hops == 0 || p.hops > half || p.scope.segment) continue;
            at(position(p), p.hops).push_back(i);
        }
        auto take = [&](std::initializer_list<std::pair<int, int>> arcs) {
            for (const auto& [start, hops] : arcs) {
                const auto& b = at(start, hops);
                const long need = std::count(arcs.begin(), arcs.end(), std::make_pair(start, hops));
                if (static_cast<long>(b.size()) < need) return false;
            }
            for (const auto& [start, hops] : arcs) {
                auto& b = at(start, hops);
                out.push_back(b.back());
                used[b.back()] = 1;
                b.pop_back();
            }
            return true;
        };
        for (int x = 0; x < half; ++x) {
            while (take({{x, half}, {x + half, half}})) {
            }
        }
        for (int len = half - 1; len >= 1; --len) {
            for (int x = 0; x < n; ++x) {
                const int rest = half - len;
                while (take({{x, len}, {x + len, rest}, {x + half, len}, {x + half + len, rest}})) {
                }
            }
        }
    }
    std::vector<TransferDemand> leftover;
    std::vector<size_t> origin;
    for (size_t i = 0; i < demands.size(); ++i) {
        if (used[i]) continue;
        leftover.push_back(demands[i]);
        origin.push_back(i);
    }
    if (!leftover.empty()) {
        for (size_t j : chained_order(leftover)) out.push_back(origin[j]);
    }
    return out;
}

}  // namespace

std::vector<Step> pack_steps(std::span<const TransferDemand> demands, int w) {
    if (w < 1) {
        throw Error(ErrorKind::InvalidConfig, "wavelength budget must be >= 1");
    }
    if (demands.empty()) return {};

    std::vector<size_t> order(demands.size());
    std::iota(order.begin(), order.end(), size_t{0});
    auto key = [&](size_t i) {
        const auto& d = demands[i];
        const ItemId item = d.items.empty() ? -1 : d.items.front();
        return std::make_tuple(-d.path.hops, d.src, d.dst, item);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return key(a) < key(b); });

    std::vector<std::pair<int, int>> placement(demands.size());
    int steps_used = first_fit(demands, order, w, placement);

    const int floor = congestion_floor(demands, w);
    std::vector<std::pair<int, int>> trial(demands.size());
    const int n = demands.front().path.ring_size;
    for (int candidate = 0; candidate < 2 && steps_used > floor; ++candidate) {
        if (candidate == 1 && n % 2 != 0) break;
        auto alt = candidate == 0 ? chained_order(demands) : paired_cover_order(demands);
        const int used = first_fit(demands, alt, w, trial);
        if (used < steps_used) {
            steps_used = used;
            placement.swap(trial);
            order.swap(alt);
        }
    }

    // Iterated greedy: replaying first-fit with every (step, wavelength) class
    // kept contiguous can only reuse the same classes or fewer, so the step
    // count never grows. Class orders cycle through reversed, largest-first
    // and seeded shuffles.
    long long hops_per_pass = 0;
    for (const auto& d : demands) hops_per_pass += d.path.hops;
    const long long rounds = std::min<long long>(
        kRefinementRounds, std::max<long long>(1, kRefinementWork / std::max<long long>(hops_per_pass, 1)));
    std::mt19937 rng(0x5eed);
    for (int round = 0; round < rounds && steps_used > floor; ++round) {
        const int classes = steps_used * w;
        std::vector<std::vector<size_t>> members(static_cast<size_t>(classes));
        for (size_t idx : order) {
            const auto [step, lambda] = placement[idx];
            members[static_cast<size_t>(step * w + lambda)].push_back(idx);
        }
        std::vector<size_t> class_order(static_cast<size_t>(classes));
        std::iota(class_order.begin(), class_order.end(), size_t{0});
        switch (round % 3) {
            case 0:
                std::reverse(class_order.begin(), class_order.end());
                break;
            case 1:
                std::stable_sort(class_order.begin(), class_order.end(), [&](size_t a, size_t b) {
                    return members[a].size() > members[b].size();
                });
                break;
            default:
                std::shuffle(class_order.begin(), class_order.end(), rng);
                break;
        }
        std::vector<size_t> next;
        next.reserve(order.size());
        for (size_t c : class_order) next.insert(next.end(), members[c].begin(), members[c].end());
        const int used = first_fit(demands, next, w, trial);
        if (used <= steps_used) {
            steps_used = used;
            placement.swap(trial);
            order.swap(next);
        }
    }

    std::vector<Step> steps(static_cast<size_t>(steps_used));
    for (size_t idx : order) {
        const auto [step, lambda] = placement[idx];
        steps[static_cast<size_t>(step)].assignments.push_back({demands[idx], lambda});
    }
    return steps;
}

ConflictReport verify_conflict_free(const Schedule& schedule) {
    ConflictReport report;
    for (size_t s = 0; s < schedule.stages.size(); ++s) {
        const auto& stage = schedule.stages[s];
        for (size_t t = 0; t < stage.steps.size(); ++t) {
            std::map<std::pair<LinkId, int>, const TransferDemand*> owner;
            for (const auto& a : stage.steps[t].assignments) {
                const auto& path = a.demand.path;
                if (a.wavelength < 0 || a.wavelength >= schedule.w) {
                    ConflictViolation v;
                    v.stage = static_cast<int>(s);
                    v.step = static_cast<int>(t);
                    v.wavelength = a.wavelength;
                    v.second = a.demand;
                    v.message = "wavelength " + std::to_string(a.wavelength) +
                                " outside budget " + std::to_string(schedule.w);
                    report.violations.push_back(std::move(v));
                    continue;
                }
                for (int i = 0; i < path.hops; ++i) {
                    auto [it, fresh] = owner.emplace(std::make_pair(path.link_at(i), a.wavelength),
                                                     &a.demand);
                    if (fresh) continue;
                    ConflictViolation v;
                    v.stage = static_cast<int>(s);
                    v.step = static_cast<int>(t);
                    v.link = path.directed_link_at(i);
                    v.wavelength = a.wavelength;
                    v.first = *it->second;
                    v.second = a.demand;
                    v.message = "link " + std::to_string(v.link.from) + "/" +
                                std::string(to_string(v.link.dir)) + " wavelength " +
                                std::to_string(a.wavelength) + " shared by " +
                                std::to_string(it->second->src) + "->" +
                                std::to_string(it->second->dst) + " and " +
                                std::to_string(a.demand.src) + "->" + std::to_string(a.demand.dst);
                    report.violations.push_back(std::move(v));
                }
            }
        }
    }
    return report;
}

int brute_force_min_steps(std::span<const TransferDemand> demands, int w) {
    if (w < 1) {
        throw Error(ErrorKind::InvalidConfig, "wavelength budget must be >= 1");
    }
    const int count = static_cast<int>(demands.size());
    if (count > kOracleMaxDemands) {
        throw Error(ErrorKind::OracleLimit,
                    "oracle accepts at most " + std::to_string(kOracleMaxDemands) +
                        " demands, got " + std::to_string(count));
    }
    if (count == 0) return 0;

    std::vector<std::vector<LinkId>> links;
    links.reserve(demands.size());
    for (const auto& d : demands) {
        auto l = d.path.links();
        std::sort(l.begin(), l.end());
        links.push_back(std::move(l));
    }
    std::vector<std::uint32_t> adjacent(static_cast<size_t>(count), 0);
    for (int a = 0; a < count; ++a) {
        for (int b = a + 1; b < count; ++b) {
            const auto& la = links[static_cast<size_t>(a)];
            const auto& lb = links[static_cast<size_t>(b)];
            std::vector<LinkId> shared;
            std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(),
                                  std::back_inserter(shared));
            if (!shared.empty()) {
                adjacent[static_cast<size_t>(a)] |= 1u << b;
                adjacent[static_cast<size_t>(b)] |= 1u << a;
            }
        }
    }

    const std::uint32_t all = (1u << count) - 1;
    std::vector<char> independent(static_cast<size_t>(all) + 1, 0);
    independent[0] = 1;
    for (std::uint32_t mask = 1; mask <= all; ++mask) {
        const int low = std::countr_zero(mask);
        const std::uint32_t rest = mask & (mask - 1);
        independent[mask] = independent[rest] && (adjacent[static_cast<size_t>(low)] & rest) == 0;
    }

    // colors[mask] = chromatic number of the induced subgraph; each step peels
    // off an independent set containing the lowest remaining vertex.
    std::vector<std::uint8_t> colors(static_cast<size_t>(all) + 1,
                                     std::numeric_limits<std::uint8_t>::max());
    colors[0] = 0;
    for (std::uint32_t mask = 1; mask <= all; ++mask) {
        const std::uint32_t low = mask & (~mask + 1);
        const std::uint32_t rest = mask ^ low;
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            const std::uint32_t cls = sub | low;
            if (independent[cls]) {
                colors[mask] = std::min<std::uint8_t>(
                    colors[mask], static_cast<std::uint8_t>(colors[mask ^ cls] + 1));
            }
            if (sub == 0) break;
        }
    }
    const int chi = colors[all];
    return (chi + w - 1) / w;
}

}  // namespace optiring
