#include "l4l/ledger.hpp"

#include "l4l/error.hpp"

#include <algorithm>
#include <charconv>

namespace l4l::ledger {

namespace {

[[noreturn]] void invalid_ledger(const std::string& why) { throw Error(ErrorCode::InvalidLedger, why); }

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

MinerState& miner_or_throw(LedgerState& state, const Address& a) {
    auto it = state.miner_pool.find(a);
    if (it == state.miner_pool.end()) throw Error(ErrorCode::UnknownMiner, "no miner state for '" + a + "'");
    return it->second;
}

void write_record(ByteWriter& w, const tower::ProofRecord& r) {
    w.u64(r.index);
    w.prefixed(vdf::to_bytes(r.input));
    w.prefixed(vdf::to_bytes(r.output));
    w.prefixed(vdf::serialize_proof(r.proof));
}

vdf::PublicParams params_for(const LedgerState& state, const Digest& input_digest) {
    return {state.modulus, input_digest, vdf::effective_iterations(state.security.iterations),
            state.security.prime_length_bits};
}

bool proof_valid(const LedgerState& state, const vdf::PublicParams& pp, const tower::ProofRecord& r) {
    return !vdf::fast_reject(state.security, r.proof) && vdf::verify(pp, r.input, r.output, r.proof);
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    if (text.empty()) return std::nullopt;
    try {
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            auto p = parse_int(text.substr(0, slash));
            auto q = parse_int(text.substr(slash + 1));
            if (!p || !q || *q == 0) return std::nullopt;
            return Rational(*p, *q);
        }
        auto dot = text.find('.');
        if (dot == std::string_view::npos) {
            auto p = parse_int(text);
            if (!p) return std::nullopt;
            return Rational(*p);
        }
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos) {
            return std::nullopt;
        }
        bool negative = !whole.empty() && whole.front() == '-';
        std::int64_t w = 0;
        if (!whole.empty() && whole != "-") {
            auto parsed = parse_int(whole);
            if (!parsed) return std::nullopt;
            w = *parsed;
        }
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        auto f = parse_int(frac);
        if (!f) return std::nullopt;
        Rational out(w);
        Rational part(*f, scale);
        return negative ? out - part : out + part;
    } catch (const boost::bad_rational&) {
        return std::nullopt;
    }
}

std::string format_rational(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string_view to_string(Ranking r) {
    return r == Ranking::ByTowerHeight ? "tower_height" : "compliant_epochs";
}

std::optional<Ranking> parse_ranking(std::string_view text) {
    if (text == "tower_height") return Ranking::ByTowerHeight;
    if (text == "compliant_epochs") return Ranking::ByCompliantEpochs;
    return std::nullopt;
}

void EpochConfig::validate() const {
    auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, "epoch config: " + why); };
    if (rounds_per_epoch < 1) bad("rounds_per_epoch must be >= 1");
    if (max_validators < 4) bad("max_validators must be >= 4");
    if (liveliness_threshold < 0 || liveliness_threshold > 1) bad("liveliness_threshold must lie in [0, 1]");
    if (mining_threshold < 1) bad("mining_threshold must be >= 1");
    if (jail_sentence_epochs < 1) bad("jail_sentence_epochs must be >= 1");
    if (growth_cap < mining_threshold) bad("growth_cap must be >= mining_threshold");
}

bool LedgerState::is_validator(const Address& a) const {
    return std::find(validator_set.begin(), validator_set.end(), a) != validator_set.end();
}

const MinerState& LedgerState::miner(const Address& a) const {
    auto it = miner_pool.find(a);
    if (it == miner_pool.end()) throw Error(ErrorCode::UnknownMiner, "no miner state for '" + a + "'");
    return it->second;
}

LedgerState make_genesis(const EpochConfig& config, const vdf::SecurityParams& security) {
    config.validate();
    security.validate();
    LedgerState state;
    state.config = config;
    state.security = security;
    state.modulus = vdf::derive_modulus(security.modulus_bits, security.genesis_seed);
    return state;
}

void admit_genesis_miner(LedgerState& state, const GenesisMiner& miner) {
    if (miner.address.empty()) throw Error(ErrorCode::InvalidArgument, "genesis miner address must be non-empty");
    if (state.miner_pool.contains(miner.address)) {
        throw Error(ErrorCode::AlreadyRegistered, "'" + miner.address + "' already registered");
    }
    MinerState ms;
    ms.height = miner.height;
    ms.hash = miner.hash;
    ms.public_key = miner.public_key;
    ms.input_digest = vdf::derive_input_digest(miner.public_key, miner.endpoint);
    state.miner_pool.emplace(miner.address, std::move(ms));
}

void install_genesis_validators(LedgerState& state, const std::vector<Address>& validators) {
    std::set<Address> unique(validators.begin(), validators.end());
    if (unique.size() != validators.size()) throw Error(ErrorCode::InvalidArgument, "duplicate genesis validator");
    if (validators.size() < 4) throw Error(ErrorCode::InvalidArgument, "genesis validator set needs >= 4 members");
    for (const auto& v : validators) {
        if (!state.miner_pool.contains(v)) {
            throw Error(ErrorCode::InvalidArgument, "genesis validator '" + v + "' is not a registered miner");
        }
    }
    state.validator_set = validators;
}

Bytes registration_message(const Registration& reg) {
    ByteWriter w;
    w.prefixed(as_bytes(std::string_view("l4l/ledger/register/v1")));
    w.prefixed(as_bytes(reg.address));
    w.prefixed(reg.public_key);
    w.prefixed(reg.endpoint);
    write_record(w, reg.first_proof);
    return std::move(w).take();
}

void register_miner(LedgerState& state, const Registration& reg, const SignatureVerifier& verifier) {
    if (state.miner_pool.contains(reg.address)) {
        throw Error(ErrorCode::AlreadyRegistered, "'" + reg.address + "' already registered");
    }
    if (reg.address.empty() || !verifier.verify(reg.public_key, registration_message(reg), reg.signature)) {
        throw Error(ErrorCode::InvalidSignature, "registration signature rejected for '" + reg.address + "'");
    }
    const Digest input_digest = vdf::derive_input_digest(reg.public_key, reg.endpoint);
    const vdf::PublicParams pp = params_for(state, input_digest);
    const auto& first = reg.first_proof;
    if (first.index != 0 || first.input != vdf::hash_to_group(input_digest, state.modulus) ||
        !proof_valid(state, pp, first)) {
        throw Error(ErrorCode::InvalidProof, "setup proof rejected for '" + reg.address + "'");
    }
    MinerState ms;
    ms.height = 1;
    ms.hash = tower::digest(first);
    ms.num = 1;
    ms.public_key = reg.public_key;
    ms.input_digest = input_digest;
    state.miner_pool.emplace(reg.address, std::move(ms));
}

Bytes submission_message(const ProofSubmission& sub) {
    ByteWriter w;
    w.prefixed(as_bytes(std::string_view("l4l/ledger/submit/v1")));
    w.prefixed(as_bytes(sub.address));
    w.u64(sub.claimed_height);
    w.raw(as_bytes(sub.previous_proof_hash));
    write_record(w, sub.record);
    return std::move(w).take();
}

ProofSubmission make_submission(const Address& address, const tower::Tower& tower, ByteView signing_key) {
    if (tower.records.size() < 2) throw Error(ErrorCode::InvalidArgument, "submission needs a tower of height >= 2");
    ProofSubmission sub;
    sub.address = address;
    sub.claimed_height = tower.height();
    sub.previous_proof_hash = tower::digest(tower.records[tower.records.size() - 2]);
    sub.record = tower.records.back();
    sub.signature = KeyedHashScheme::sign(signing_key, submission_message(sub));
    return sub;
}

bool submit_proof(LedgerState& state, const ProofSubmission& sub, const SignatureVerifier& verifier) {
    MinerState& ms = miner_or_throw(state, sub.address);
    if (!verifier.verify(ms.public_key, submission_message(sub), sub.signature)) return false;
    if (ms.hash != sub.previous_proof_hash || !(ms.height < sub.claimed_height)) return false;

    // The proof must be the next tower record built on the stored hash.
    const auto& r = sub.record;
    if (r.index != ms.height || r.input != tower::chained_input(ms.hash, state.modulus)) return false;
    if (!proof_valid(state, params_for(state, ms.input_digest), r)) return false;

    ms.height += 1;
    ms.num = std::min(ms.num + 1, state.config.growth_cap);
    ms.hash = tower::digest(r);
    return true;
}

std::uint64_t quorum(std::uint64_t validator_count) { return (2 * validator_count + 2) / 3; }

bool record_block(LedgerState& state, const std::set<Address>& signers) {
    for (const auto& s : signers) {
        if (!state.is_validator(s)) throw Error(ErrorCode::ForeignSigner, "'" + s + "' is not in the validator set");
    }
    if (signers.size() < quorum(state.validator_set.size())) return false;
    ++state.epoch_blocks_total;
    for (const auto& s : signers) ++state.epoch_signatures[s];
    return true;
}

Rational liveliness(const LedgerState& state, const Address& address) {
    if (!state.is_validator(address)) {
        throw Error(ErrorCode::InvalidArgument, "'" + address + "' is not in the validator set");
    }
    if (state.epoch_blocks_total == 0) throw Error(ErrorCode::NoBlocksThisEpoch, "no committed blocks this epoch");
    auto it = state.epoch_signatures.find(address);
    const std::uint64_t signed_blocks = it == state.epoch_signatures.end() ? 0 : it->second;
    return Rational(static_cast<std::int64_t>(signed_blocks), static_cast<std::int64_t>(state.epoch_blocks_total));
}

void check_invariants(const LedgerState& state) {
    if (state.validator_set.size() < 4) invalid_ledger("validator set has fewer than 4 members");
    std::set<Address> seen;
    for (const auto& v : state.validator_set) {
        if (!seen.insert(v).second) invalid_ledger("duplicate validator '" + v + "'");
        if (!state.miner_pool.contains(v)) invalid_ledger("validator '" + v + "' has no miner state");
    }
    std::set<Address> jailed;
    for (const auto& [addr, ms] : state.miner_pool) {
        if (ms.jailed) jailed.insert(addr);
        if (!ms.jailed && ms.jail_sentence != 0) invalid_ledger("'" + addr + "' is free with a pending sentence");
        if (ms.num > state.config.growth_cap) invalid_ledger("'" + addr + "' exceeds the growth cap");
    }
    if (jailed != state.jail_set) invalid_ledger("jail set out of sync with miner states");
    for (const auto& [addr, count] : state.epoch_signatures) {
        if (count > state.epoch_blocks_total) invalid_ledger("'" + addr + "' signed more blocks than were committed");
    }
}

}  // namespace l4l::ledger
