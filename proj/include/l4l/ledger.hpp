#pragma once

#include "l4l/signature.hpp"
#include "l4l/tower.hpp"
#include "l4l/vdf.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace l4l::ledger {

using Address = std::string;
using Rational = boost::rational<std::int64_t>;

/// Accepts "p/q" or a plain decimal such as "0.9".
std::optional<Rational> parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

enum class Ranking { ByTowerHeight, ByCompliantEpochs };

std::string_view to_string(Ranking r);
std::optional<Ranking> parse_ranking(std::string_view text);

struct EpochConfig {
    std::uint64_t rounds_per_epoch = 100;
    std::uint64_t max_validators = 100;
    Rational liveliness_threshold{9, 10};
    std::uint64_t mining_threshold = 24;
    std::uint64_t jail_sentence_epochs = 1;
    std::uint64_t growth_cap = 48;
    Ranking ranking = Ranking::ByTowerHeight;

    /// Throws Error{InvalidArgument} naming the offending field.
    void validate() const;

    friend bool operator==(const EpochConfig&, const EpochConfig&) = default;
};

struct MinerState {
    std::uint64_t height = 0;
    Digest hash{};
    std::uint64_t num = 0;
    bool jailed = false;
    std::uint64_t jail_sentence = 0;
    /// Epochs in which num exceeded the mining threshold; ranking input for
    /// Ranking::ByCompliantEpochs.
    std::uint64_t compliant_epochs = 0;
    Bytes public_key;
    Digest input_digest{};

    friend bool operator==(const MinerState&, const MinerState&) = default;
};

struct LedgerState {
    std::uint64_t epoch = 0;
    std::vector<Address> validator_set;
    std::map<Address, MinerState> miner_pool;
    std::set<Address> jail_set;
    std::uint64_t epoch_blocks_total = 0;
    std::map<Address, std::uint64_t> epoch_signatures;
    EpochConfig config;
    vdf::SecurityParams security;
    vdf::BigInt modulus;

    bool is_validator(const Address& a) const;
    const MinerState& miner(const Address& a) const;

    friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

/// Empty ledger for a network with the given genesis parameters.
LedgerState make_genesis(const EpochConfig& config, const vdf::SecurityParams& security);

/// Bootstrap entry for a miner that predates the chain (genesis allocation
/// and simulated mining). Skips proof checks.
struct GenesisMiner {
    Address address;
    Bytes public_key;
    Bytes endpoint;
    std::uint64_t height = 1;
    Digest hash{};
};

void admit_genesis_miner(LedgerState& state, const GenesisMiner& miner);

/// Installs the genesis validator set; requires >= 4 registered members.
void install_genesis_validators(LedgerState& state, const std::vector<Address>& validators);

struct Registration {
    Address address;
    Bytes public_key;
    Bytes endpoint;
    tower::ProofRecord first_proof;
    Bytes signature;
};

Bytes registration_message(const Registration& reg);

/// Initialises a miner state from a setup proof. Throws AlreadyRegistered,
/// InvalidSignature or InvalidProof and leaves `state` unchanged on failure.
void register_miner(LedgerState& state, const Registration& reg, const SignatureVerifier& verifier);

struct ProofSubmission {
    Address address;
    std::uint64_t claimed_height = 0;
    Digest previous_proof_hash{};
    tower::ProofRecord record;
    Bytes signature;
};

Bytes submission_message(const ProofSubmission& sub);

/// Builds a signed submission for `tower`'s newest record.
ProofSubmission make_submission(const Address& address, const tower::Tower& tower, ByteView signing_key);

/// Proof-submission validation: signature, chain guard, height guard, then
/// fast_reject and verify. Returns false and leaves `state` unchanged on
/// any failure; throws Error{UnknownMiner} for unregistered addresses.
bool submit_proof(LedgerState& state, const ProofSubmission& sub, const SignatureVerifier& verifier);

/// ceil(2n/3).
std::uint64_t quorum(std::uint64_t validator_count);

/// Commits a block iff the signers reach quorum. Throws Error{ForeignSigner}
/// if any signer is outside the validator set.
bool record_block(LedgerState& state, const std::set<Address>& signers);

/// Signed / committed blocks this epoch. Throws Error{NoBlocksThisEpoch}
/// when nothing was committed.
Rational liveliness(const LedgerState& state, const Address& address);

/// Throws Error{InvalidLedger} describing the first broken invariant.
void check_invariants(const LedgerState& state);

}  // namespace l4l::ledger
