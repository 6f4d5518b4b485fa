#include "optiring/simulator.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "optiring/error.h"

namespace optiring {

namespace {

double flits(double bits, int flit_bytes) {
    return std::ceil(bits / (8.0 * flit_bytes));
}

}  // namespace

void validate(const SystemConfig& config) {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
    if (config.n_nodes < 2) fail("n must be >= 2");
    if (config.wavelengths < 1) fail("wavelengths must be >= 1");
    if (!(config.bandwidth_bps > 0)) fail("bandwidth must be positive");
    if (!(config.step_overhead_s >= 0)) fail("step overhead must be non-negative");
    if (!(config.item_bits > 0)) fail("message size must be positive");
    if (config.packet_bytes < 1 || config.flit_bytes < 1) fail("packet and flit sizes must be positive");
    if (config.packet_bytes % config.flit_bytes != 0) fail("packet size must be a multiple of the flit size");
    if (!(config.oeo_per_flit_seconds >= 0)) fail("O/E/O delay must be non-negative");
}

CostModel cost_model(const SystemConfig& config) {
    return {config.item_bits, config.bandwidth_bps,
            config.step_overhead_s +
                config.oeo_per_flit_seconds * flits(config.item_bits, config.flit_bytes)};
}

Execution::Execution(const SystemConfig& config, CostMode mode) : config_(config), mode_(mode) {
    validate(config_);
    const auto n = static_cast<size_t>(config_.n_nodes);
    held_.assign(n, std::vector<char>(n, 0));
    for (size_t v = 0; v < n; ++v) held_[v][v] = 1;
    metrics_.n = config_.n_nodes;
    metrics_.w = config_.wavelengths;
}

double Execution::step_seconds(int busiest_items) const {
    if (mode_ == CostMode::Uniform) return cost_model(config_).step_seconds();
    const double packet_bits = 8.0 * config_.packet_bytes;
    const double payload_bits =
        std::ceil(busiest_items * config_.item_bits / packet_bits) * packet_bits;
    return payload_bits / config_.bandwidth_bps + config_.step_overhead_s +
           config_.oeo_per_flit_seconds * flits(payload_bits, config_.flit_bytes);
}

double Execution::run_stage(const Stage& stage, int budget_w) {
    const int n = config_.n_nodes;
    const int stage_index = static_cast<int>(metrics_.per_stage_steps.size());
    std::vector<int> load(2 * static_cast<size_t>(n), 0);
    std::vector<int> owner(2 * static_cast<size_t>(n) * static_cast<size_t>(budget_w), -1);
    double stage_time = 0.0;

    for (size_t t = 0; t < stage.steps.size(); ++t) {
        const auto& step = stage.steps[t];
        const std::string where = "stage " + std::to_string(stage_index) + " step " + std::to_string(t);
        std::vector<size_t> touched;
        int busiest = 0;
        for (size_t a = 0; a < step.assignments.size(); ++a) {
            const auto& asg = step.assignments[a];
            const auto& d = asg.demand;
            if (d.path.ring_size != n || d.src < 0 || d.src >= n || d.dst < 0 || d.dst >= n) {
                throw Error(ErrorKind::ScheduleInvalid, where + ": transfer outside the ring");
            }
            if (asg.wavelength < 0 || asg.wavelength >= budget_w) {
                throw Error(ErrorKind::ScheduleInvalid,
                            where + ": wavelength " + std::to_string(asg.wavelength) +
                                " outside budget " + std::to_string(budget_w));
            }
            for (ItemId item : d.items) {
                if (item < 0 || item >= n || !held_[static_cast<size_t>(d.src)][static_cast<size_t>(item)]) {
                    throw Error(ErrorKind::ScheduleInvalid,
                                where + " transfer " + std::to_string(a) + ": node " +
                                    std::to_string(d.src) + " sends item " + std::to_string(item) +
                                    " it does not hold");
                }
            }
            for (int i = 0; i < d.path.hops; ++i) {
                const auto link = static_cast<size_t>(d.path.link_at(i));
                const size_t slot = link * static_cast<size_t>(budget_w) + static_cast<size_t>(asg.wavelength);
                if (owner[slot] >= 0) {
                    throw Error(ErrorKind::ScheduleInvalid,
                                where + ": transfers " + std::to_string(owner[slot]) + " and " +
                                    std::to_string(a) + " share link " + std::to_string(link) +
                                    " on wavelength " + std::to_string(asg.wavelength));
                }
                owner[slot] = static_cast<int>(a);
                touched.push_back(slot);
                load[link] += d.multiplicity();
            }
            busiest = std::max(busiest, d.multiplicity());
        }
        for (size_t slot : touched) owner[slot] = -1;
        for (const auto& asg : step.assignments) {
            for (ItemId item : asg.demand.items) {
                held_[static_cast<size_t>(asg.demand.dst)][static_cast<size_t>(item)] = 1;
            }
        }
        metrics_.busiest_wavelength_payload.push_back(busiest);
        stage_time += step_seconds(busiest);
    }
    // Uniform steps all cost the same; multiply rather than sum so the total
    // matches comm_time bit for bit.
    if (mode_ == CostMode::Uniform) {
        stage_time = static_cast<double>(stage.steps.size()) * step_seconds(0);
    }

    metrics_.per_stage_steps.push_back(static_cast<int>(stage.steps.size()));
    metrics_.per_stage_wavelength_demand.push_back(
        load.empty() ? 0 : *std::max_element(load.begin(), load.end()));
    metrics_.per_stage_time_seconds.push_back(stage_time);
    metrics_.total_steps += static_cast<int>(stage.steps.size());
    if (mode_ == CostMode::Uniform) {
        metrics_.total_time_seconds = metrics_.total_steps * step_seconds(0);
    } else {
        metrics_.total_time_seconds += stage_time;
    }
    return stage_time;
}

Metrics Execution::finish() {
    const auto n = static_cast<size_t>(config_.n_nodes);
    metrics_.per_node_received.assign(n, {});
    metrics_.complete = true;
    for (size_t v = 0; v < n; ++v) {
        for (size_t item = 0; item < n; ++item) {
            if (held_[v][item]) metrics_.per_node_received[v].push_back(static_cast<ItemId>(item));
        }
        metrics_.complete = metrics_.complete && metrics_.per_node_received[v].size() == n;
    }
    return metrics_;
}

Metrics execute(const Schedule& schedule, const SystemConfig& config, CostMode mode) {
    validate(config);
    if (schedule.n != config.n_nodes) {
        throw Error(ErrorKind::InvalidConfig, "schedule built for " + std::to_string(schedule.n) +
                                                  " nodes, config has " +
                                                  std::to_string(config.n_nodes));
    }
    if (schedule.w > config.wavelengths) {
        throw Error(ErrorKind::InvalidConfig, "schedule uses " + std::to_string(schedule.w) +
                                                  " wavelengths, config offers " +
                                                  std::to_string(config.wavelengths));
    }
    Execution run(config, mode);
    for (const auto& stage : schedule.stages) run.run_stage(stage, std::max(schedule.w, 1));
    Metrics metrics = run.finish();
    metrics.algorithm = schedule.algorithm;
    if (schedule.algorithm == AlgorithmKind::OpTree) {
        metrics.k = static_cast<int>(schedule.radices.size());
    }
    return metrics;
}

CompletenessReport completeness_oracle(const Metrics& metrics) {
    CompletenessReport report;
    for (size_t v = 0; v < metrics.per_node_received.size(); ++v) {
        const auto& got = metrics.per_node_received[v];
        MissingItems gap{static_cast<NodeId>(v), {}};
        size_t j = 0;
        for (ItemId item = 0; item < metrics.n; ++item) {
            while (j < got.size() && got[j] < item) ++j;
            if (j == got.size() || got[j] != item) gap.items.push_back(item);
        }
        if (!gap.items.empty()) report.missing.push_back(std::move(gap));
    }
    if (metrics.per_node_received.size() != static_cast<size_t>(metrics.n)) {
        for (auto v = static_cast<NodeId>(metrics.per_node_received.size()); v < metrics.n; ++v) {
            MissingItems gap{v, {}};
            for (ItemId item = 0; item < metrics.n; ++item) gap.items.push_back(item);
            report.missing.push_back(std::move(gap));
        }
    }
    return report;
}

}  // namespace optiring
