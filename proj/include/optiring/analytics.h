#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optiring/rwa.h"

namespace optiring {

/// Per-step cost terms: item size d (bits), per-wavelength bandwidth B
/// (bits/s) and a constant per-step overhead a (s) for MRR reconfiguration
/// plus O/E/O conversion.
struct CostModel {
    double item_bits = 4.0 * 1024 * 1024 * 8;
    double bandwidth_bps = 40e9;
    double step_overhead_s = 25e-6;

    double step_seconds() const noexcept { return item_bits / bandwidth_bps + step_overhead_s; }
};

void validate(const CostModel& model);

struct WrhtParams {
    long long p = 3;      // 2w + 1
    long long theta = 1;  // ceil(log_p N)

    static WrhtParams from(int n, int w);
};

/// Total OpTree steps for a depth-k tree with real-valued radix N^(1/k):
/// ceil((2k-1) N^(1+1/k) / (8w)). k = 1 is the one-stage count ceil(N^2/(8w)).
long long optree_steps_closed_form(int n, int w, int k);

/// Wavelength demand W_j of each stage: (subsets sharing links) x (items per
/// sender) x (one-stage bound of an m_j-node subset, ring on stage 1 and line
/// afterwards). Subsets sharing links = ceil(N / prod_{i<=j} m_i), items per
/// sender = prod_{i<j} m_i.
std::vector<long long> stage_wavelength_demand(int n, const std::vector<int>& radices);

/// ceil(W_j / w) per stage. Throws Error(InvalidPlan) for bad radices.
std::vector<long long> optree_steps_per_stage(int n, int w, const std::vector<int>& radices);

/// Rounded stationary point of the closed form, round-half-up. Throws
/// Error(Domain) when ln n < 2 (n < 8).
int optimal_k_analytic(int n);

enum class StepSource { ClosedForm, Schedule };

struct DepthChoice {
    int k = 1;
    long long steps = 0;
};

/// Argmin over k in [k_min, k_max] (clamped to the valid depth range), ties
/// to the smaller k. Schedule mode builds and packs every candidate tree.
DepthChoice optimal_k_empirical(int n, int w, int k_min, int k_max,
                                StepSource source = StepSource::ClosedForm);

/// Step counts of the baselines: Ring N-1, NE N/2, one-stage ceil(N^2/(8w)),
/// WRHT ceil((N-p)/(p-1)) + ceil((theta-1)N/p) + 1. OpTree is not accepted
/// here; use optree_steps_closed_form.
long long competitor_steps(AlgorithmKind alg, int n, int w);

/// (d/B + a) * steps.
double comm_time(const CostModel& model, long long steps);

struct TableRow {
    std::string algorithm;  // ring, ne, wrht, one_stage, optree_analytic_k, optree_best_k
    int n = 0;
    int w = 0;
    std::optional<int> k;
    long long steps = 0;
    double time_seconds = 0.0;
};

/// One row per algorithm. The OpTree row appears twice: at the analytic k*
/// (omitted when n < 8) and at the closed-form argmin. NE is omitted for odd n.
std::vector<TableRow> comparison_table(int n, int w, const CostModel& model = {});

}  // namespace optiring
