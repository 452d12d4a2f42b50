#pragma once

#include "l4l/bytes.hpp"
#include "l4l/hash.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stop_token>
#include <vector>

namespace l4l::vdf {

using BigInt = mpz_class;

/// Minimal big-endian magnitude; zero encodes as an empty string.
Bytes to_bytes(const BigInt& v);
BigInt from_bytes(ByteView bytes);
std::uint32_t bit_length(const BigInt& v);

/// Network-wide parameters fixed at genesis. `genesis_seed` drives the
/// trusted setup of the RSA modulus so every participant derives the same
/// group.
struct SecurityParams {
    std::uint32_t modulus_bits = 512;
    std::uint32_t prime_length_bits = 512;
    std::uint64_t iterations = 4096;
    std::uint64_t genesis_seed = 0;

    /// Throws Error{InvalidSecurityParams} when a bound is violated.
    void validate() const;

    static SecurityParams test_profile() { return {512, 512, 1u << 12, 0}; }
    static SecurityParams production_profile() { return {2048, 512, 1u << 12, 0}; }

    friend bool operator==(const SecurityParams&, const SecurityParams&) = default;
};

struct PublicParams {
    BigInt modulus;
    Digest input_digest{};
    std::uint64_t iterations = 0;
    std::uint32_t prime_length_bits = 512;

    friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

struct VdfProof {
    BigInt output;
    /// One halving midpoint per recursion round, outermost first.
    std::vector<BigInt> checkpoints;
    std::uint32_t embedded_prime_length_bits = 0;

    friend bool operator==(const VdfProof&, const VdfProof&) = default;
};

struct Evaluation {
    BigInt output;
    VdfProof proof;
};

/// Smallest power of two >= requested (requested >= 1).
std::uint64_t effective_iterations(std::uint64_t requested);

/// Number of halving rounds the proof carries for `iterations` squarings.
std::uint32_t expected_checkpoints(std::uint64_t iterations);

/// Deterministic RSA modulus of exactly `bits` bits, product of two primes
/// derived from `seed`. Results are memoised per (bits, seed).
BigInt derive_modulus(std::uint32_t bits, std::uint64_t seed);

/// Domain-separated binding of participant key and endpoint.
Digest derive_input_digest(ByteView public_key, ByteView endpoint);

/// Maps a digest into [2, modulus - 1) by counter-extended rejection sampling.
BigInt hash_to_group(const Digest& digest, const BigInt& modulus);

PublicParams setup(const SecurityParams& security, ByteView public_key, ByteView endpoint);

struct EvalControl {
    std::stop_token stop;
    /// Called every `progress_interval` squarings with (done, total).
    std::function<void(std::uint64_t, std::uint64_t)> on_progress;
    std::uint64_t progress_interval = 1u << 14;
};

/// Resumable state of the sequential squaring loop.
struct EvalCheckpoint {
    BigInt input;
    BigInt current;
    std::uint64_t completed = 0;
    std::optional<BigInt> midpoint;

    Bytes serialize() const;
    static std::optional<EvalCheckpoint> parse(ByteView bytes);

    friend bool operator==(const EvalCheckpoint&, const EvalCheckpoint&) = default;
};

/// Sequential evaluator. `advance` runs the squaring loop in slices so a
/// caller can persist `checkpoint()` between slices and resume later.
class Evaluator {
public:
    Evaluator(const PublicParams& pp, const BigInt& input);
    Evaluator(const PublicParams& pp, EvalCheckpoint resume);

    /// Performs at most `max_squarings` squarings; returns how many ran.
    std::uint64_t advance(std::uint64_t max_squarings);

    bool squarings_done() const { return state_.completed == pp_.iterations; }
    std::uint64_t completed() const { return state_.completed; }
    std::uint64_t total() const { return pp_.iterations; }
    const EvalCheckpoint& checkpoint() const { return state_; }

    /// Builds the proof once all squarings are done. Honors `stop`.
    Evaluation finish(std::stop_token stop = {}) const;

private:
    std::uint64_t midpoint_step() const;

    PublicParams pp_;
    EvalCheckpoint state_;
};

/// output = input^(2^t) mod N with a halving proof. Throws
/// Error{InputOutOfRange} unless 1 <= input < N, Error{Cancelled} on stop.
Evaluation eval(const PublicParams& pp, const BigInt& input, const EvalControl& control = {});

/// Pure; malformed transcripts yield false.
bool verify(const PublicParams& pp, const BigInt& input, const BigInt& output, const VdfProof& proof);

/// Constant-time structural screen run before verify; true means reject.
bool fast_reject(const SecurityParams& security, const VdfProof& proof);

/// Versioned canonical encoding: version byte, declared prime length,
/// checkpoint count, then length-prefixed big-endian output and checkpoints.
Bytes serialize_proof(const VdfProof& proof);
std::optional<VdfProof> parse_proof(ByteView bytes);

inline constexpr std::uint8_t kProofFormatVersion = 1;

}  // namespace l4l::vdf
