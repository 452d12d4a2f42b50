#pragma once

#include "l4l/vdf.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace l4l::bench {

struct BenchReport {
    std::string operation;
    std::uint64_t iterations = 0;
    std::vector<double> samples_ms;
    double mean = 0, median = 0, p25 = 0, p75 = 0, min = 0, max = 0;
};

/// Linear-interpolation percentile of an ascending sample, q in [0, 1].
double percentile(const std::vector<double>& sorted, double q);

BenchReport summarize(std::string operation, std::uint64_t iterations, std::vector<double> samples_ms);

/// For each t: times eval, verify of the valid transcript, and the screened
/// check (fast_reject then verify) of a proof whose declared prime length is
/// off by one. Reports carry the effective (power-of-two) t.
std::vector<BenchReport> run_vdf_bench(const vdf::SecurityParams& base, const std::vector<std::uint64_t>& iterations,
                                       std::size_t samples);

inline constexpr const char* kBenchCsvHeader = "operation,iterations,kind,index,ms";

/// `kind` is sample (with index) or one of mean/median/p25/p75/min/max.
std::string bench_csv(const std::vector<BenchReport>& reports);

struct OverheadReport {
    double per_validator_seconds = 0;
    double network_seconds = 0;
    /// Network verification seconds over total validator-seconds, in percent.
    double fraction_percent = 0;
};

/// Throws Error{InvalidArgument} for negative times or zero validators /
/// epoch length.
OverheadReport compute_overhead(double verify_ms, std::uint64_t proofs_per_epoch, std::uint64_t validators,
                                double epoch_seconds);

std::string format_overhead(const OverheadReport& report);

}  // namespace l4l::bench
