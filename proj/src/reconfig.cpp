#include "l4l/reconfig.hpp"

#include "l4l/error.hpp"

#include <algorithm>
#include <set>

namespace l4l::reconfig {

std::string_view to_string(LifecycleState s) {
    switch (s) {
    case LifecycleState::Node: return "Node";
    case LifecycleState::FullNode: return "FullNode";
    case LifecycleState::Miner: return "Miner";
    case LifecycleState::ValidatorCandidate: return "ValidatorCandidate";
    case LifecycleState::Validator: return "Validator";
    case LifecycleState::Jailed: return "Jailed";
    }
    return "Unknown";
}

bool is_legal_transition(LifecycleState from, LifecycleState to) {
    using S = LifecycleState;
    if (from == to) return true;
    switch (from) {
    case S::Node: return to == S::FullNode;
    case S::FullNode: return to == S::Miner;
    case S::Miner: return to == S::ValidatorCandidate;
    case S::ValidatorCandidate: return to == S::Miner || to == S::Validator;
    case S::Validator: return to == S::Jailed || to == S::Miner;
    case S::Jailed: return to == S::Miner;
    }
    return false;
}

bool ranks_before(const RankKey& a, const RankKey& b) {
    if (a.primary != b.primary) return a.primary > b.primary;
    return a.tiebreak < b.tiebreak;
}

RankKey rank_key(const LedgerState& state, const Address& address) {
    const auto& ms = state.miner(address);
    const std::uint64_t primary =
        state.config.ranking == ledger::Ranking::ByTowerHeight ? ms.height : ms.compliant_epochs;
    return {primary, address};
}

std::vector<Address> jail_failed_validators(LedgerState& state) {
    std::vector<Address> jailed;
    if (state.epoch_blocks_total == 0) return jailed;
    for (const auto& v : state.validator_set) {
        if (ledger::liveliness(state, v) <= state.config.liveliness_threshold) jailed.push_back(v);
    }
    for (const auto& v : jailed) {
        auto& ms = state.miner_pool.at(v);
        ms.jailed = true;
        ms.jail_sentence = state.config.jail_sentence_epochs;
        state.jail_set.insert(v);
    }
    return jailed;
}

std::vector<Address> get_validator_universe(LedgerState& state) {
    std::vector<Address> universe;
    for (auto& [addr, ms] : state.miner_pool) {
        if (ms.num > state.config.mining_threshold && !state.jail_set.contains(addr)) universe.push_back(addr);
        ms.num = 0;
    }
    return universe;
}

std::vector<Address> propose_validator_set(const LedgerState& state, const std::vector<Address>& universe) {
    std::vector<RankKey> keys;
    keys.reserve(universe.size());
    for (const auto& a : universe) keys.push_back(rank_key(state, a));
    std::sort(keys.begin(), keys.end(), ranks_before);
    const std::size_t n = std::min<std::size_t>(keys.size(), state.config.max_validators);
    std::vector<Address> proposed;
    proposed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) proposed.push_back(std::move(keys[i].tiebreak));
    return proposed;
}

EpochSummary advance_epoch(LedgerState& state) {
    LedgerState next = state;
    const auto& cfg = next.config;
    EpochSummary summary;
    summary.epoch = next.epoch;

    // Mining progress is read before num is reset by the universe extraction.
    std::vector<Address> serving;
    for (auto& [addr, ms] : next.miner_pool) {
        const bool compliant = ms.num > cfg.mining_threshold;
        if (compliant) ++ms.compliant_epochs;
        if (ms.jailed && compliant) serving.push_back(addr);
    }

    summary.jailed = jail_failed_validators(next);
    std::vector<Address> universe = get_validator_universe(next);
    summary.proposed = propose_validator_set(next, universe);

    summary.reconfiguration_skipped = summary.proposed.size() < 4;
    if (!summary.reconfiguration_skipped) next.validator_set = summary.proposed;

    const std::set<Address> jailed_now(summary.jailed.begin(), summary.jailed.end());
    for (const auto& addr : serving) {
        // A fresh sentence this epoch replaces the old one, and members of a
        // retained validator set serve no time until they leave it.
        if (jailed_now.contains(addr) || next.is_validator(addr)) continue;
        auto& ms = next.miner_pool.at(addr);
        if (--ms.jail_sentence == 0) {
            ms.jailed = false;
            next.jail_set.erase(addr);
            summary.released.push_back(addr);
        }
    }

    next.epoch += 1;
    next.epoch_blocks_total = 0;
    next.epoch_signatures.clear();
    summary.validator_set = next.validator_set;
    state = std::move(next);
    return summary;
}

LifecycleState lifecycle_of(const LedgerState& state, const Address& address, bool ledger_synced) {
    auto it = state.miner_pool.find(address);
    if (it == state.miner_pool.end()) return ledger_synced ? LifecycleState::FullNode : LifecycleState::Node;
    const auto& ms = it->second;
    if (ms.jailed) return LifecycleState::Jailed;
    if (state.is_validator(address)) return LifecycleState::Validator;
    if (ms.num > state.config.mining_threshold) return LifecycleState::ValidatorCandidate;
    return LifecycleState::Miner;
}

}  // namespace l4l::reconfig
