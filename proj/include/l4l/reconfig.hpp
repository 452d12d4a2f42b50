#pragma once

#include "l4l/ledger.hpp"

#include <string_view>
#include <vector>

namespace l4l::reconfig {

using ledger::Address;
using ledger::LedgerState;

enum class LifecycleState { Node, FullNode, Miner, ValidatorCandidate, Validator, Jailed };

std::string_view to_string(LifecycleState s);

/// Node lifecycle edges; staying in the same state is always legal.
bool is_legal_transition(LifecycleState from, LifecycleState to);

/// Ranking key: larger `primary` first, then ascending address bytes.
struct RankKey {
    std::uint64_t primary = 0;
    Address tiebreak;
};

bool ranks_before(const RankKey& a, const RankKey& b);

RankKey rank_key(const LedgerState& state, const Address& address);

/// Jails every validator whose liveliness is at or below the threshold.
/// No-op (returns empty) when the epoch committed no blocks.
std::vector<Address> jail_failed_validators(LedgerState& state);

/// Unjailed miners with num above the mining threshold, in address order.
/// Resets num to 0 for every miner in the pool.
std::vector<Address> get_validator_universe(LedgerState& state);

/// Top `max_validators` of `universe` by rank key.
std::vector<Address> propose_validator_set(const LedgerState& state, const std::vector<Address>& universe);

struct EpochSummary {
    std::uint64_t epoch = 0;  // the epoch that just ended
    std::vector<Address> jailed;
    std::vector<Address> released;
    std::vector<Address> proposed;
    std::vector<Address> validator_set;  // installed for the next epoch
    bool reconfiguration_skipped = false;

    friend bool operator==(const EpochSummary&, const EpochSummary&) = default;
};

/// End-of-epoch pipeline. Applied atomically: `state` is replaced only once
/// every step has succeeded.
EpochSummary advance_epoch(LedgerState& state);

/// `ledger_synced` distinguishes FullNode from Node for unregistered addresses.
LifecycleState lifecycle_of(const LedgerState& state, const Address& address, bool ledger_synced = true);

}  // namespace l4l::reconfig
