// Randomized and grid-wide checks of the schedule invariants.
#include <gtest/gtest.h>

#include <random>

#include "helpers.h"
#include "optiring/analytics.h"
#include "optiring/collectives.h"
#include "optiring/parallel.h"
#include "optiring/rwa.h"
#include "optiring/simulator.h"

using namespace optiring;
using optiring::testing::all_to_all;
using optiring::testing::iota_nodes;

namespace {

std::vector<TransferDemand> random_demands(std::mt19937& rng, const Topology& t, int count) {
    std::uniform_int_distribution<int> node(0, t.n_nodes() - 1);
    std::bernoulli_distribution coin(0.5);
    std::vector<TransferDemand> out;
    for (int i = 0; i < count; ++i) {
        const NodeId s = node(rng);
        NodeId d = node(rng);
        while (d == s) d = node(rng);
        const Path p = coin(rng) ? t.ring_shortest_path(s, d)
                                 : t.directed_path(s, d, coin(rng) ? Direction::Clockwise
                                                                   : Direction::Counterclockwise);
        out.push_back({s, d, {s}, p});
    }
    return out;
}

Schedule wrap(std::vector<Step> steps, int n, int w) {
    Schedule s;
    s.n = n;
    s.w = w;
    s.stages.push_back({std::move(steps)});
    return s;
}

SystemConfig config_for(int n, int w) {
    SystemConfig c;
    c.n_nodes = n;
    c.wavelengths = w;
    return c;
}

std::vector<Schedule> grid_schedules(int n, int w) {
    const auto t = Topology::build(n);
    std::vector<Schedule> out;
    for (int k = 1; k <= max_depth(n); ++k) out.push_back(optree_schedule(t, plan_tree(n, k), w));
    out.push_back(one_stage_schedule(t, w));
    out.push_back(ring_allgather_schedule(t));
    if (n % 2 == 0) out.push_back(neighbor_exchange_schedule(t));
    return out;
}

}  // namespace

TEST(Properties, RandomPackingIsConflictFreeAndAboveFloor) {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 20);
        const auto t = Topology::build(n);
        const auto d = random_demands(rng, t, 1 + static_cast<int>(rng() % 60));
        const int w = 1 + static_cast<int>(rng() % 5);
        const auto steps = pack_steps(d, w);
        size_t placed = 0;
        for (const auto& s : steps) placed += s.assignments.size();
        ASSERT_EQ(placed, d.size());
        ASSERT_TRUE(verify_conflict_free(wrap(steps, n, w)).ok()) << "trial " << trial;
        const int congestion = link_congestion(t, d).max_load;
        EXPECT_GE(static_cast<int>(steps.size()), (congestion + w - 1) / w);
    }
}

TEST(Properties, RandomPackingNeverBeatsOracle) {
    std::mt19937 rng(7);
    int gaps = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const auto t = Topology::build(4 + static_cast<int>(rng() % 8));
        const auto d = random_demands(rng, t, 2 + static_cast<int>(rng() % (kOracleMaxDemands - 1)));
        const int w = 1 + static_cast<int>(rng() % 3);
        const int packed = static_cast<int>(pack_steps(d, w).size());
        const int best = brute_force_min_steps(d, w);
        ASSERT_GE(packed, best);
        gaps += packed > best;
    }
    // Greedy gaps on random instances are allowed; record them.
    RecordProperty("random_oracle_gaps", gaps);
}

TEST(Properties, StructuredFamiliesMatchOracle) {
    for (int n : {4, 6, 8, 9, 10, 12, 16}) {
        const auto t = Topology::build(n);
        for (int s = 2; s <= 4; ++s) {
            if (n % s != 0 || s * (s - 1) > kOracleMaxDemands) continue;
            for (int offset = 0; offset < n / s; ++offset) {
                const auto d = all_to_all(t, iota_nodes(offset, s, n / s), Scope::ring());
                for (int w = 1; w <= 4; ++w) {
                    EXPECT_EQ(pack_steps(d, w).size(), static_cast<size_t>(brute_force_min_steps(d, w)))
                        << "strided n=" << n << " s=" << s << " w=" << w;
                }
            }
        }
        for (int s = 2; s <= 4; ++s) {
            for (NodeId lo = 0; lo + s <= n; lo += 3) {
                const auto d = all_to_all(t, iota_nodes(lo, s), Scope::line(lo, lo + s - 1));
                for (int w = 1; w <= 4; ++w) {
                    EXPECT_EQ(pack_steps(d, w).size(), static_cast<size_t>(brute_force_min_steps(d, w)))
                        << "segment n=" << n << " s=" << s << " w=" << w;
                }
            }
        }
    }
}

TEST(Properties, CompletenessCausalityConflictGrid) {
    struct Job {
        int n, w;
    };
    std::vector<Job> jobs;
    for (int n = 4; n <= 64; n += 2) {
        for (int w : {1, 2, 4, 8, 16}) jobs.push_back({n, w});
    }
    std::vector<std::string> failures(jobs.size());
    std::vector<int> counts(jobs.size(), 0);
    parallel_for(jobs.size(), [&](size_t i) {
        const auto [n, w] = jobs[i];
        for (const auto& s : grid_schedules(n, w)) {
            ++counts[i];
            const std::string label = std::string(to_string(s.algorithm)) + " n=" + std::to_string(n) +
                                      " w=" + std::to_string(w) + " depth=" + std::to_string(s.radices.size());
            if (!verify_conflict_free(s).ok()) failures[i] += label + " conflict; ";
            try {
                const auto m = execute(s, config_for(n, w));
                if (!completeness_oracle(m).ok()) failures[i] += label + " incomplete; ";
            } catch (const std::exception& e) {
                failures[i] += label + " " + e.what() + "; ";
            }
        }
    });
    int total = 0;
    for (size_t i = 0; i < jobs.size(); ++i) {
        EXPECT_TRUE(failures[i].empty()) << failures[i];
        total += counts[i];
    }
    EXPECT_GE(total, 200);
}

TEST(Properties, OddRingsComplete) {
    for (int n = 3; n <= 25; n += 2) {
        for (int w : {1, 3}) {
            for (const auto& s : grid_schedules(n, w)) {
                EXPECT_TRUE(verify_conflict_free(s).ok());
                EXPECT_TRUE(execute(s, config_for(n, w)).complete) << to_string(s.algorithm) << " " << n;
            }
        }
    }
}

TEST(Properties, StepCountsOfRingAndNeIgnoreW) {
    for (int n = 4; n <= 32; n += 4) {
        const auto t = Topology::build(n);
        for (int w : {1, 4, 16}) {
            EXPECT_EQ(competitor_steps(AlgorithmKind::Ring, n, w), ring_allgather_schedule(t).total_steps());
            EXPECT_EQ(competitor_steps(AlgorithmKind::NeighborExchange, n, w),
                      neighbor_exchange_schedule(t).total_steps());
        }
    }
}

TEST(Properties, UniformTimeMatchesCommTime) {
    for (int n : {6, 16, 30}) {
        for (int w : {1, 4}) {
            const auto cfg = config_for(n, w);
            for (const auto& s : grid_schedules(n, w)) {
                const auto m = execute(s, cfg);
                EXPECT_DOUBLE_EQ(m.total_time_seconds, comm_time(cost_model(cfg), m.total_steps));
            }
        }
    }
}

TEST(Properties, OptreePayloadAwareEqualsUniform) {
    for (int n : {8, 16, 27, 36, 50}) {
        for (int w : {1, 2, 8}) {
            const auto cfg = config_for(n, w);
            for (int k = 1; k <= max_depth(n); ++k) {
                const auto s = optree_schedule(Topology::build(n), plan_tree(n, k), w);
                const auto uniform = execute(s, cfg, CostMode::Uniform);
                const auto aware = execute(s, cfg, CostMode::PayloadAware);
                for (int p : aware.busiest_wavelength_payload) EXPECT_EQ(p, 1);
                EXPECT_NEAR(aware.total_time_seconds, uniform.total_time_seconds,
                            1e-12 * uniform.total_time_seconds);
            }
        }
    }
}

TEST(Properties, ScheduleNeverBelowStageDemandFloor) {
    for (int n : {16, 24, 32, 48, 64}) {
        for (int w : {1, 2, 4, 8}) {
            for (int k = 2; k <= 3; ++k) {
                const auto plan = plan_tree(n, k);
                const auto s = optree_schedule(Topology::build(n), plan, w);
                const auto m = execute(s, config_for(n, w));
                for (size_t j = 0; j < m.per_stage_steps.size(); ++j) {
                    EXPECT_GE(m.per_stage_steps[j], (m.per_stage_wavelength_demand[j] + w - 1) / w);
                }
            }
        }
    }
}

// Integer per-stage bounds can undercut the real-valued closed form (m = 3),
// so only the excess is bounded.
TEST(Properties, PerfectPowerSchedulesWithinRoundingSlack) {
    struct Case {
        int n;
        std::vector<int> radices;
    };
    for (const auto& c : {Case{16, {4, 4}}, Case{64, {8, 8}}, Case{64, {4, 4, 4}}, Case{81, {3, 3, 3, 3}},
                          Case{256, {16, 16}}}) {
        for (int w : {1, 2, 4, 8}) {
            const int k = static_cast<int>(c.radices.size());
            const auto s = optree_schedule(Topology::build(c.n), plan_tree(c.n, k, c.radices), w);
            const long long closed = optree_steps_closed_form(c.n, w, k);
            EXPECT_LE(s.total_steps(), closed + k) << c.n << " w=" << w;
        }
    }
}
