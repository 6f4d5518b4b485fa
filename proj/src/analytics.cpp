#include "optiring/analytics.h"

#include <cmath>
#include <limits>
#include <string>

#include "optiring/collectives.h"
#include "optiring/error.h"
#include "optiring/topology.h"

namespace optiring {

namespace {

// Ceiling that forgives floating-point noise around exact integers, so that
// 3 * 16^1.5 / 16 lands on 12 rather than 13.
long long robust_ceil(long double x) {
    const long double r = std::round(x);
    if (std::fabs(x - r) <= 1e-9L * std::max<long double>(1.0L, std::fabs(x))) {
        return static_cast<long long>(r);
    }
    return static_cast<long long>(std::ceil(x));
}

long long ceil_div(long long num, long long den) {
    // den > 0
    if (num >= 0) return (num + den - 1) / den;
    return -((-num) / den);
}

long long saturating_mul(long long a, long long b) {
    if (a != 0 && b > std::numeric_limits<long long>::max() / a) {
        return std::numeric_limits<long long>::max();
    }
    return a * b;
}

void check_nw(int n, int w) {
    if (n < 2) throw Error(ErrorKind::InvalidConfig, "n must be >= 2, got " + std::to_string(n));
    if (w < 1) throw Error(ErrorKind::InvalidConfig, "w must be >= 1, got " + std::to_string(w));
}

}  // namespace

void validate(const CostModel& model) {
    if (!(model.item_bits > 0)) throw Error(ErrorKind::InvalidConfig, "item size must be positive");
    if (!(model.bandwidth_bps > 0)) throw Error(ErrorKind::InvalidConfig, "bandwidth must be positive");
    if (!(model.step_overhead_s >= 0)) {
        throw Error(ErrorKind::InvalidConfig, "step overhead must be non-negative");
    }
}

WrhtParams WrhtParams::from(int n, int w) {
    check_nw(n, w);
    WrhtParams params;
    params.p = 2LL * w + 1;
    params.theta = 1;
    long long reach = params.p;
    while (reach < n) {
        reach = saturating_mul(reach, params.p);
        ++params.theta;
    }
    return params;
}

long long optree_steps_closed_form(int n, int w, int k) {
    check_nw(n, w);
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "depth must be >= 1");
    if (k == 1) {
        const long long sq = static_cast<long long>(n) * n;
        return ceil_div(sq, 8LL * w);
    }
    const long double nn = n;
    const long double value =
        (2.0L * k - 1.0L) * std::pow(nn, 1.0L + 1.0L / k) / (8.0L * w);
    return robust_ceil(value);
}

std::vector<long long> stage_wavelength_demand(int n, const std::vector<int>& radices) {
    if (n < 2) throw Error(ErrorKind::InvalidConfig, "n must be >= 2");
    if (radices.empty()) throw Error(ErrorKind::InvalidPlan, "empty radix vector");
    long long covered = 1;
    for (int m : radices) {
        if (m < 2) throw Error(ErrorKind::InvalidPlan, "radix " + std::to_string(m) + " below 2");
        covered = saturating_mul(covered, m);
    }
    if (covered < n) {
        throw Error(ErrorKind::InvalidPlan, "radix product cannot cover " + std::to_string(n) + " nodes");
    }

    std::vector<long long> out;
    long long before = 1;  // prod of radices of earlier stages
    for (size_t j = 0; j < radices.size(); ++j) {
        const long long m = radices[j];
        const long long through = saturating_mul(before, m);
        const long long sharing = ceil_div(n, through);
        const long long bound = j == 0 ? ceil_div(m * m, 8) : (m * m) / 4;
        out.push_back(saturating_mul(saturating_mul(sharing, before), bound));
        before = through;
    }
    return out;
}

std::vector<long long> optree_steps_per_stage(int n, int w, const std::vector<int>& radices) {
    check_nw(n, w);
    auto out = stage_wavelength_demand(n, radices);
    for (auto& wj : out) wj = ceil_div(wj, w);
    return out;
}

int optimal_k_analytic(int n) {
    const double ln = std::log(static_cast<double>(n));
    if (n < 2 || ln < 2.0) {
        throw Error(ErrorKind::Domain,
                    "analytic depth needs ln N >= 2 (N >= 8), got N = " + std::to_string(n));
    }
    const double k = (ln + std::sqrt(ln * (ln - 2.0))) / 2.0;
    return static_cast<int>(std::floor(k + 0.5));
}

DepthChoice optimal_k_empirical(int n, int w, int k_min, int k_max, StepSource source) {
    check_nw(n, w);
    k_min = std::max(k_min, 1);
    k_max = std::min(k_max, max_depth(n));
    if (k_min > k_max) {
        throw Error(ErrorKind::InvalidConfig, "empty depth range");
    }
    DepthChoice best{0, 0};
    for (int k = k_min; k <= k_max; ++k) {
        long long steps = 0;
        if (source == StepSource::ClosedForm) {
            steps = optree_steps_closed_form(n, w, k);
        } else {
            const auto topo = Topology::build(n);
            steps = optree_schedule(topo, plan_tree(n, k), w).total_steps();
        }
        if (best.k == 0 || steps < best.steps) best = {k, steps};
    }
    return best;
}

long long competitor_steps(AlgorithmKind alg, int n, int w) {
    check_nw(n, w);
    switch (alg) {
        case AlgorithmKind::Ring:
            return n - 1;
        case AlgorithmKind::NeighborExchange:
            if (n % 2 != 0) {
                throw Error(ErrorKind::UnsupportedConfig,
                            "neighbor exchange needs an even node count, got " + std::to_string(n));
            }
            return n / 2;
        case AlgorithmKind::OneStage:
            return optree_steps_closed_form(n, w, 1);
        case AlgorithmKind::Wrht: {
            const auto params = WrhtParams::from(n, w);
            return ceil_div(n - params.p, params.p - 1) +
                   ceil_div((params.theta - 1) * n, params.p) + 1;
        }
        case AlgorithmKind::OpTree:
            break;
    }
    throw Error(ErrorKind::InvalidConfig, "OpTree steps depend on depth; use the closed form");
}

double comm_time(const CostModel& model, long long steps) {
    validate(model);
    if (steps < 0) throw Error(ErrorKind::InvalidConfig, "negative step count");
    return model.step_seconds() * static_cast<double>(steps);
}

std::vector<TableRow> comparison_table(int n, int w, const CostModel& model) {
    check_nw(n, w);
    std::vector<TableRow> rows;
    auto add = [&](std::string name, std::optional<int> k, long long steps) {
        rows.push_back({std::move(name), n, w, k, steps, comm_time(model, steps)});
    };
    add("ring", std::nullopt, competitor_steps(AlgorithmKind::Ring, n, w));
    if (n % 2 == 0) add("ne", std::nullopt, competitor_steps(AlgorithmKind::NeighborExchange, n, w));
    add("wrht", std::nullopt, competitor_steps(AlgorithmKind::Wrht, n, w));
    add("one_stage", std::nullopt, competitor_steps(AlgorithmKind::OneStage, n, w));
    if (n >= 8) {
        const int k = std::min(optimal_k_analytic(n), max_depth(n));
        add("optree_analytic_k", k, optree_steps_closed_form(n, w, k));
    }
    const auto best = optimal_k_empirical(n, w, 1, max_depth(n));
    add("optree_best_k", best.k, best.steps);
    return rows;
}

}  // namespace optiring
