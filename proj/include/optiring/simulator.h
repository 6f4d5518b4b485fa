#pragma once

#include <optional>
#include <vector>

#include "optiring/analytics.h"
#include "optiring/rwa.h"

namespace optiring {

inline constexpr double kMiB = 1024.0 * 1024.0;

/// System parameters. Defaults describe a single optical rack: 64 wavelengths
/// per direction at 40 Gbps each, 25 us MRR reconfiguration per step, 128 B
/// packets of 32 B flits. O/E/O conversion is folded into the step overhead
/// unless oeo_per_flit_seconds is set.
struct SystemConfig {
    int n_nodes = 1024;
    int wavelengths = 64;
    double bandwidth_bps = 40e9;
    double step_overhead_s = 25e-6;
    double item_bits = 4 * kMiB * 8;
    int packet_bytes = 128;
    int flit_bytes = 32;
    double oeo_per_flit_seconds = 0.0;
};

/// Throws Error(InvalidConfig).
void validate(const SystemConfig& config);

/// Cost model seen by uniform mode: per-step overhead plus the O/E/O cost of
/// one item's flits.
CostModel cost_model(const SystemConfig& config);

enum class CostMode { Uniform, PayloadAware };

struct Metrics {
    AlgorithmKind algorithm = AlgorithmKind::OpTree;
    int n = 0;
    int w = 0;
    std::optional<int> k;  // tree depth for OpTree
    int total_steps = 0;
    std::vector<int> per_stage_steps;
    std::vector<int> per_stage_wavelength_demand;  // peak directed-link load in items
    std::vector<int> busiest_wavelength_payload;   // items, one entry per step
    std::vector<double> per_stage_time_seconds;
    double total_time_seconds = 0.0;
    std::vector<std::vector<ItemId>> per_node_received;  // sorted, includes own item
    bool complete = false;
};

/// Step-by-step executor. Each step reads holdings as they were when the step
/// began; deliveries land at the end of the step.
class Execution {
public:
    Execution(const SystemConfig& config, CostMode mode);

    /// Runs one stage and returns its time. Throws Error(ScheduleInvalid) on a
    /// wavelength conflict or when a source sends an item it does not hold.
    double run_stage(const Stage& stage, int budget_w);

    const Metrics& metrics() const noexcept { return metrics_; }
    Metrics finish();

private:
    double step_seconds(int busiest_items) const;

    SystemConfig config_;
    CostMode mode_;
    std::vector<std::vector<char>> held_;
    Metrics metrics_;
};

/// Executes a whole schedule. The schedule's node count must match the
/// config and its wavelength tag may not exceed the config budget.
Metrics execute(const Schedule& schedule, const SystemConfig& config,
                CostMode mode = CostMode::Uniform);

struct MissingItems {
    NodeId node = 0;
    std::vector<ItemId> items;
};

struct CompletenessReport {
    std::vector<MissingItems> missing;
    bool ok() const noexcept { return missing.empty(); }
};

CompletenessReport completeness_oracle(const Metrics& metrics);

}  // namespace optiring
