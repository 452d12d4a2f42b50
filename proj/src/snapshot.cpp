#include "l4l/snapshot.hpp"

#include "l4l/error.hpp"

#include <json.hpp>

namespace l4l::ledger {

namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "l4l-ledger-snapshot";
constexpr int kVersion = 1;

Bytes hex_field(const json& j, const char* key) {
    auto bytes = from_hex(j.at(key).get<std::string>());
    if (!bytes) throw Error(ErrorCode::InvalidLedger, std::string("field '") + key + "' is not hex");
    return *bytes;
}

Digest digest_field(const json& j, const char* key) {
    Bytes b = hex_field(j, key);
    if (b.size() != 32) throw Error(ErrorCode::InvalidLedger, std::string("field '") + key + "' must be 32 bytes");
    Digest d{};
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

}  // namespace

std::string export_snapshot(const LedgerState& state) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["epoch"] = state.epoch;
    j["validator_set"] = state.validator_set;
    j["jail_set"] = state.jail_set;
    j["epoch_blocks_total"] = state.epoch_blocks_total;
    j["epoch_signatures"] = state.epoch_signatures;
    const auto& c = state.config;
    j["config"] = {
        {"rounds_per_epoch", c.rounds_per_epoch},
        {"max_validators", c.max_validators},
        {"liveliness_threshold", format_rational(c.liveliness_threshold)},
        {"mining_threshold", c.mining_threshold},
        {"jail_sentence_epochs", c.jail_sentence_epochs},
        {"growth_cap", c.growth_cap},
        {"ranking", to_string(c.ranking)},
    };
    const auto& s = state.security;
    j["security"] = {
        {"modulus_bits", s.modulus_bits},
        {"prime_length_bits", s.prime_length_bits},
        {"iterations", s.iterations},
        {"genesis_seed", s.genesis_seed},
    };
    j["modulus"] = to_hex(vdf::to_bytes(state.modulus));
    json miners = json::object();
    for (const auto& [addr, ms] : state.miner_pool) {
        miners[addr] = {
            {"height", ms.height},
            {"hash", to_hex(as_bytes(ms.hash))},
            {"num", ms.num},
            {"jailed", ms.jailed},
            {"jail_sentence", ms.jail_sentence},
            {"compliant_epochs", ms.compliant_epochs},
            {"public_key", to_hex(ms.public_key)},
            {"input_digest", to_hex(as_bytes(ms.input_digest))},
        };
    }
    j["miners"] = std::move(miners);
    return j.dump(2) + "\n";
}

LedgerState import_snapshot(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (j.at("format").get<std::string>() != kFormat || j.at("version").get<int>() != kVersion) {
            throw Error(ErrorCode::InvalidLedger, "unsupported snapshot format or version");
        }
        LedgerState state;
        state.epoch = j.at("epoch").get<std::uint64_t>();
        state.validator_set = j.at("validator_set").get<std::vector<Address>>();
        state.epoch_blocks_total = j.at("epoch_blocks_total").get<std::uint64_t>();
        state.epoch_signatures = j.at("epoch_signatures").get<std::map<Address, std::uint64_t>>();

        const json& c = j.at("config");
        state.config.rounds_per_epoch = c.at("rounds_per_epoch").get<std::uint64_t>();
        state.config.max_validators = c.at("max_validators").get<std::uint64_t>();
        auto pi = parse_rational(c.at("liveliness_threshold").get<std::string>());
        auto ranking = parse_ranking(c.at("ranking").get<std::string>());
        if (!pi || !ranking) throw Error(ErrorCode::InvalidLedger, "bad liveliness_threshold or ranking");
        state.config.liveliness_threshold = *pi;
        state.config.ranking = *ranking;
        state.config.mining_threshold = c.at("mining_threshold").get<std::uint64_t>();
        state.config.jail_sentence_epochs = c.at("jail_sentence_epochs").get<std::uint64_t>();
        state.config.growth_cap = c.at("growth_cap").get<std::uint64_t>();

        const json& s = j.at("security");
        state.security.modulus_bits = s.at("modulus_bits").get<std::uint32_t>();
        state.security.prime_length_bits = s.at("prime_length_bits").get<std::uint32_t>();
        state.security.iterations = s.at("iterations").get<std::uint64_t>();
        state.security.genesis_seed = s.at("genesis_seed").get<std::uint64_t>();
        state.modulus = vdf::from_bytes(hex_field(j, "modulus"));

        for (const auto& [addr, m] : j.at("miners").items()) {
            MinerState ms;
            ms.height = m.at("height").get<std::uint64_t>();
            ms.hash = digest_field(m, "hash");
            ms.num = m.at("num").get<std::uint64_t>();
            ms.jailed = m.at("jailed").get<bool>();
            ms.jail_sentence = m.at("jail_sentence").get<std::uint64_t>();
            ms.compliant_epochs = m.at("compliant_epochs").get<std::uint64_t>();
            ms.public_key = hex_field(m, "public_key");
            ms.input_digest = digest_field(m, "input_digest");
            if (ms.jailed) state.jail_set.insert(addr);
            state.miner_pool.emplace(addr, std::move(ms));
        }
        if (j.at("jail_set").get<std::set<Address>>() != state.jail_set) {
            throw Error(ErrorCode::InvalidLedger, "jail_set disagrees with miner states");
        }
        try {
            state.config.validate();
            state.security.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidLedger, e.what());
        }
        return state;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidLedger, std::string("malformed snapshot: ") + e.what());
    }
}

}  // namespace l4l::ledger
