#pragma once

#include "l4l/vdf.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace l4l::tower {

using vdf::BigInt;

struct ProofRecord {
    std::uint64_t index = 0;
    BigInt input;
    BigInt output;
    vdf::VdfProof proof;
    std::uint64_t created_epoch = 0;

    friend bool operator==(const ProofRecord&, const ProofRecord&) = default;
};

/// Hash of (index, input, output, serialized proof). The creation epoch is
/// local bookkeeping and deliberately not part of the chain.
Digest digest(const ProofRecord& record);

/// Input of the record that follows a record with digest `parent`.
BigInt chained_input(const Digest& parent, const BigInt& modulus);

struct Tower {
    Bytes owner_public_key;
    Bytes endpoint;
    vdf::SecurityParams security;
    vdf::PublicParams params;
    std::vector<ProofRecord> records;

    std::uint64_t height() const { return records.size(); }

    friend bool operator==(const Tower&, const Tower&) = default;
};

Tower init_tower(const vdf::SecurityParams& security, ByteView public_key, ByteView endpoint,
                 std::uint64_t created_epoch = 0, const vdf::EvalControl& control = {});

/// Appends one record chained from the current tip. Throws
/// Error{CorruptTower} if the tower does not validate. The creation epoch
/// defaults to the tip's.
Tower extend(Tower tower, std::optional<std::uint64_t> created_epoch = std::nullopt,
             const vdf::EvalControl& control = {});

struct ChainCheck {
    bool ok = true;
    std::optional<std::size_t> bad_index;
    std::string reason;

    explicit operator bool() const { return ok; }
};

/// Per-record hook, called after each record's proof check with its duration.
using RecordObserver = std::function<void(std::size_t index, std::chrono::nanoseconds elapsed)>;

/// Full validation with the first offending record reported.
ChainCheck check_chain(const Tower& tower, const RecordObserver& observer = {});

bool validate_chain(const Tower& tower);

inline constexpr std::uint8_t kTowerFormatVersion = 1;

/// Version byte, security params, identity, public params, records, then a
/// trailing SHA-256 over everything before it.
Bytes serialize_tower(const Tower& tower);

/// Parses and checks the framing checksum only; no chain validation.
/// Throws Error{CorruptTower}.
Tower parse_tower(ByteView bytes);

/// Writes atomically (temporary file, then rename). Throws Error{IoError}.
void save_tower(const Tower& tower, const std::filesystem::path& path);

/// Reads without chain validation. Throws Error{IoError} / Error{CorruptTower}.
Tower read_tower(const std::filesystem::path& path);

/// Reads and runs check_chain; corrupt files are refused with CorruptTower.
Tower load_tower(const std::filesystem::path& path);

}  // namespace l4l::tower
