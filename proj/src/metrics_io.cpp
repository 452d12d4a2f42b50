#include "l4l/metrics_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace l4l::sim {

namespace {

std::string join(const std::vector<Address>& items) {
    std::string out;
    for (const auto& a : items) {
        if (!out.empty()) out += ';';
        out += a;
    }
    return out;
}

}  // namespace

std::string metrics_csv(const SimMetrics& metrics) {
    std::ostringstream out;
    out << kMetricsCsvHeader << '\n';
    for (const auto& e : metrics.epochs) {
        std::string min_live;
        if (!e.liveliness.empty()) {
            auto it = std::min_element(e.liveliness.begin(), e.liveliness.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
            min_live = ledger::format_rational(it->second);
        }
        out << e.epoch << ',' << e.committed_blocks << ',' << e.timeouts << ',' << e.validator_set.size() << ','
            << e.nakamoto_liveness << ',' << e.jailed.size() << ',' << e.released.size() << ','
            << (e.reconfiguration_skipped ? 1 : 0) << ',' << min_live << ',' << join(e.validator_set) << ','
            << join(e.jailed) << ',' << join(e.released) << '\n';
    }
    return out.str();
}

std::string metrics_summary_json(const SimMetrics& metrics) {
    using nlohmann::json;
    json j;
    j["scenario"] = metrics.scenario;
    j["seed"] = metrics.seed;
    j["epochs"] = metrics.epochs.size();
    j["rounds_per_epoch"] = metrics.rounds_per_epoch;
    j["total_committed"] = metrics.total_committed;
    j["total_timeouts"] = metrics.total_timeouts;
    if (auto rt = recovery_time(metrics)) {
        j["recovery_time"] = *rt;
    } else {
        j["recovery_time"] = "never";
    }
    json per_epoch = json::array();
    for (const auto& e : metrics.epochs) {
        json live = json::object();
        for (const auto& [a, r] : e.liveliness) live[a] = ledger::format_rational(r);
        per_epoch.push_back({
            {"epoch", e.epoch},
            {"committed_blocks", e.committed_blocks},
            {"timeouts", e.timeouts},
            {"validator_set", e.validator_set},
            {"jailed", e.jailed},
            {"released", e.released},
            {"liveliness", std::move(live)},
            {"nakamoto_liveness", e.nakamoto_liveness},
            {"reconfiguration_skipped", e.reconfiguration_skipped},
        });
    }
    j["per_epoch"] = std::move(per_epoch);
    return j.dump(2) + "\n";
}

}  // namespace l4l::sim
