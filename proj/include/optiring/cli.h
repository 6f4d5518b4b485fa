#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optiring/analytics.h"
#include "optiring/report.h"
#include "optiring/rwa.h"
#include "optiring/simulator.h"

namespace optiring::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kInvalidConfig = 2 };

/// One experiment. Cost fields use CLI units (Gbps, us, ns, bytes); system()
/// converts them to SI.
struct RunSpec {
    AlgorithmKind algorithm = AlgorithmKind::OpTree;
    int n = 1024;
    int w = 64;
    std::optional<int> depth;
    std::optional<std::vector<int>> radices;
    double message_bytes = 4 * kMiB;
    double bandwidth_gbps = 40.0;
    double reconfig_delay_us = 25.0;
    double oeo_per_flit_ns = 0.0;
    CostMode cost_mode = CostMode::Uniform;
    std::string output;  // empty: stdout
    OutputFormat format = OutputFormat::Csv;
    std::uint64_t seed = 1;

    SystemConfig system() const;
};

/// `key = value` lines, '#' starts a comment. Keys: n, wavelengths,
/// bandwidth_gbps, reconfig_delay_us, oeo_per_flit_ns, message_bytes,
/// algorithm, depth, radices, cost_mode, output, format, seed. Unknown keys
/// and malformed values throw Error(InvalidConfig).
RunSpec parse_config(std::istream& in, RunSpec base = {});
RunSpec load_config_file(const std::string& path, RunSpec base = {});

/// "4194304", "4MiB", "4M", "512KiB", "1GiB" (binary multiples) -> bytes.
double parse_message_size(const std::string& text);
/// Comma-separated sizes.
std::vector<double> parse_size_list(const std::string& text);
/// "1,2,4", "4..32" or "4..32:2"; items may mix both forms.
std::vector<int> parse_int_list(const std::string& text);
CostMode parse_cost_mode(const std::string& text);

/// When to build explicit schedules: Auto builds them up to kAutoScheduleNodes.
enum class ScheduleMode { Auto, On, Off };
inline constexpr int kAutoScheduleNodes = 256;

/// Formula steps, schedule-derived steps and time for one algorithm.
Table cmd_steps(const RunSpec& run, ScheduleMode mode = ScheduleMode::Auto);

enum class SweepSource { Auto, Formula, Schedule };

struct SweepDepthArgs {
    std::vector<int> n_list;
    int w = 64;
    int k_min = 1;
    std::optional<int> k_max;  // default ceil(log2 n)
    SweepSource source = SweepSource::Auto;
};

/// Rows n,w,k,steps,source,time_seconds,normalized_time; normalization
/// divides by the best time of the same n.
Table cmd_sweep_depth(const SweepDepthArgs& args, const RunSpec& base);

struct CompareArgs {
    std::vector<int> n_list;
    std::vector<int> w_list;
    std::vector<double> message_bytes;
    SweepSource source = SweepSource::Formula;
};

struct CompareResult {
    Table rows;     // algorithm,n,w,message_bytes,k,steps,time_seconds,normalized_time
    Table summary;  // baseline,points,mean_reduction_percent
};

/// OpTree at its best depth against WRHT, Ring, NE and one-stage.
/// normalized_time divides by OpTree's time at the smallest message size of
/// the same (n, w).
CompareResult cmd_compare(const CompareArgs& args, const RunSpec& base);

enum class Fault { None, DropStep };

struct VerifyArgs {
    int n_min = 4;
    int n_max = 32;
    std::vector<int> w_list{1, 2, 4};
    int congestion_max = 12;
    std::uint64_t seed = 1;
    Fault fault = Fault::None;
};

struct VerifyResult {
    bool passed = true;
    int checks = 0;
    std::vector<std::string> lines;  // one per property; failures name the config
};

/// Completeness, conflict-freeness, causality, congestion bounds, the
/// packing floor and oracle agreement over the requested grid.
VerifyResult cmd_verify(const VerifyArgs& args);

/// Builds the explicit schedule for run.algorithm (WRHT has none).
Schedule build_schedule(const RunSpec& run);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optiring::cli
