#pragma once

#include "l4l/ledger.hpp"
#include "l4l/reconfig.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace l4l::sim {

using ledger::Address;
using ledger::Rational;

struct Honest {
    friend bool operator==(const Honest&, const Honest&) = default;
};

/// Signs and proposes nothing from `from_round` (global round index) on.
struct Crashed {
    std::uint64_t from_round = 0;
    friend bool operator==(const Crashed&, const Crashed&) = default;
};

/// Participates in each round (as leader and as signer) with the given
/// probability, drawn independently per (epoch, round, address).
struct Silent {
    Rational sign_probability{1};
    friend bool operator==(const Silent&, const Silent&) = default;
};

using Behavior = std::variant<Honest, Crashed, Silent>;

/// Proofs accepted per epoch. With `real_vdf` set the miner builds an actual
/// delay tower and submits each proof through the ledger.
struct Mining {
    std::uint64_t rate = 0;
    bool real_vdf = false;
    friend bool operator==(const Mining&, const Mining&) = default;
};

struct Participant {
    Address address;
    Behavior behavior = Honest{};
    Mining mining;
    std::uint64_t initial_height = 1;
    std::uint64_t join_epoch = 0;
    friend bool operator==(const Participant&, const Participant&) = default;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    std::uint64_t epochs = 1;
    std::uint64_t rounds_per_epoch = 1;
    std::vector<Participant> population;
    ledger::EpochConfig epoch_config;
    std::vector<Address> genesis_validators;
    /// Genesis VDF parameters; only exercised by real_vdf miners.
    vdf::SecurityParams security{512, 512, 256, 0};

    /// Throws Error{InvalidScenario}.
    void validate() const;
};

struct EpochMetrics {
    std::uint64_t epoch = 0;
    std::uint64_t committed_blocks = 0;
    std::uint64_t timeouts = 0;
    /// The set that ran this epoch.
    std::vector<Address> validator_set;
    std::vector<Address> jailed;
    std::vector<Address> released;
    /// Empty when the epoch committed nothing.
    std::map<Address, Rational> liveliness;
    std::uint64_t nakamoto_liveness = 0;
    bool reconfiguration_skipped = false;

    friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct SimMetrics {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint64_t rounds_per_epoch = 0;
    std::vector<EpochMetrics> epochs;
    std::uint64_t total_committed = 0;
    std::uint64_t total_timeouts = 0;

    friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

enum class Phase {
    EpochStart,             // after admissions, before the first round
    BeforeReconfiguration,  // after mining, before advance_epoch
};

using Observer = std::function<void(Phase, std::uint64_t epoch, const ledger::LedgerState&)>;

SimMetrics run(const Scenario& scenario, const Observer& observer = {});

/// floor((n - 1) / 3).
std::uint64_t nakamoto_liveness(std::uint64_t n);

/// Epochs from the first epoch with a timeout to the next epoch without one;
/// 0 for a run that never timed out, nullopt if it never recovered.
std::optional<std::uint64_t> recovery_time(const SimMetrics& metrics);

/// Uniform 64-bit draw keyed by (seed, epoch, round, address).
std::uint64_t keyed_draw(std::uint64_t seed, std::uint64_t epoch, std::uint64_t round, const Address& address);

}  // namespace l4l::sim
