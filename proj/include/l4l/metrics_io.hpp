#pragma once

#include "l4l/sim.hpp"

#include <string>

namespace l4l::sim {

inline constexpr const char* kMetricsCsvHeader =
    "epoch,committed_blocks,timeouts,validator_count,nakamoto_liveness,jailed_count,released_count,"
    "reconfiguration_skipped,min_liveliness,validator_set,jailed,released";

/// One row per epoch after the header; list columns are ';'-joined.
std::string metrics_csv(const SimMetrics& metrics);

/// Canonical JSON document with totals, recovery time and per-epoch detail.
std::string metrics_summary_json(const SimMetrics& metrics);

}  // namespace l4l::sim
