#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optiring/topology.h"

namespace optiring {

enum class AlgorithmKind { OpTree, OneStage, Ring, NeighborExchange, Wrht };

std::string_view to_string(AlgorithmKind alg) noexcept;
/// Accepts the canonical names ("optree", "one_stage", "ring", "ne", "wrht")
/// plus a few spellings; throws Error(InvalidConfig) otherwise.
AlgorithmKind parse_algorithm(std::string_view name);

enum class LineScope { Ring, Line };

struct Assignment {
    TransferDemand demand;
    int wavelength = 0;
};

/// One communication step (time slot). Conflict-free means no two
/// assignments share a (directed link, wavelength) pair.
struct Step {
    std::vector<Assignment> assignments;
};

struct Stage {
    std::vector<Step> steps;
};

struct Schedule {
    AlgorithmKind algorithm = AlgorithmKind::OpTree;
    int n = 0;
    int w = 0;
    std::vector<int> radices;  // OpTree only
    std::vector<Stage> stages;

    int total_steps() const noexcept;
    std::vector<int> stage_steps() const;
};

/// Lower bound on wavelengths for a one-stage all-to-all among n nodes:
/// ceil(n^2/8) on a ring, floor(n^2/4) on a line.
long long min_wavelengths_one_stage(int n, LineScope scope);

/// Upper bound on iterated-greedy refinement passes in pack_steps. Large
/// instances get fewer: passes x total path hops stays under kRefinementWork.
inline constexpr int kRefinementRounds = 60;
inline constexpr long long kRefinementWork = 20'000'000;

/// Greedy first-fit routing-and-wavelength assignment. Demands are visited by
/// (hop count desc, src, dst, first item) and each takes the lowest
/// wavelength that is free on all of its links in the earliest step that has
/// one. While the result is above the link-congestion floor, two ring-cover
/// visit orders are tried, then first-fit is replayed with demands grouped by
/// their (step, wavelength) class, which never increases the step count.
/// Deterministic; never splits a demand.
std::vector<Step> pack_steps(std::span<const TransferDemand> demands, int w);

struct ConflictViolation {
    int stage = 0;
    int step = 0;  // index within the stage
    DirectedLink link;
    int wavelength = 0;
    std::optional<TransferDemand> first;  // empty for out-of-range wavelengths
    TransferDemand second;
    std::string message;
};

struct ConflictReport {
    std::vector<ConflictViolation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

ConflictReport verify_conflict_free(const Schedule& schedule);

/// Largest instance the exact oracle accepts.
inline constexpr int kOracleMaxDemands = 14;

/// Exact minimum number of conflict-free steps. A step under budget w is a
/// union of w wavelength classes, each a set of link-disjoint demands, so the
/// answer is ceil(chi / w) where chi is the chromatic number of the
/// link-sharing conflict graph; chi is found by exhaustive subset search.
/// Throws Error(OracleLimit) past kOracleMaxDemands demands.
int brute_force_min_steps(std::span<const TransferDemand> demands, int w);

}  // namespace optiring
