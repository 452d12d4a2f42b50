#include "l4l/vdf.hpp"

#include "l4l/error.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace l4l::vdf {

namespace {

constexpr std::uint32_t kMaxModulusBits = 16384;
constexpr std::uint64_t kMaxIterations = std::uint64_t{1} << 62;
constexpr std::size_t kMaxElementBytes = kMaxModulusBits / 8;
constexpr std::uint32_t kMaxCheckpoints = 64;
constexpr std::uint64_t kStopPollInterval = 1024;

void square_mod(BigInt& v, const BigInt& modulus) {
    mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), modulus.get_mpz_t());
}

BigInt pow_mod(const BigInt& base, const BigInt& exp, const BigInt& modulus) {
    BigInt out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), modulus.get_mpz_t());
    return out;
}

/// Fiat-Shamir challenge for one halving round (128 bits).
BigInt challenge(const BigInt& modulus, const BigInt& x, const BigInt& y, const BigInt& mid,
                 std::uint32_t round) {
    Sha256 h("l4l/vdf/challenge/v1");
    h.update_prefixed(to_bytes(modulus));
    h.update_prefixed(to_bytes(x));
    h.update_prefixed(to_bytes(y));
    h.update_prefixed(to_bytes(mid));
    h.update_u32(round);
    Digest d = h.finish();
    return from_bytes(ByteView(d.data(), 16));
}

bool in_group(const BigInt& v, const BigInt& modulus) { return v >= 1 && v < modulus; }

// Minimal encodings only, so parse followed by serialize is the identity.
std::optional<ByteView> read_element(ByteReader& r) {
    auto field = r.prefixed(kMaxElementBytes);
    if (!field || (!field->empty() && (*field)[0] == 0)) return std::nullopt;
    return field;
}

bool well_formed_modulus(const BigInt& modulus) { return modulus > 3 && mpz_odd_p(modulus.get_mpz_t()); }

BigInt prime_candidate(std::uint32_t bits, std::uint64_t seed, std::uint32_t which, std::uint32_t attempt) {
    const std::size_t nbytes = (bits + 7) / 8;
    Bytes stream;
    for (std::uint32_t block = 0; stream.size() < nbytes; ++block) {
        Sha256 h("l4l/vdf/modulus/v1");
        h.update_u64(seed).update_u32(bits).update_u32(which).update_u32(attempt).update_u32(block);
        Digest d = h.finish();
        stream.insert(stream.end(), d.begin(), d.end());
    }
    stream.resize(nbytes);
    BigInt v = from_bytes(stream);
    // Keep exactly `bits` bits with the top two set, so the product of two
    // such primes has exactly the requested length.
    mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
    mpz_setbit(v.get_mpz_t(), bits - 1);
    mpz_setbit(v.get_mpz_t(), bits - 2);
    mpz_setbit(v.get_mpz_t(), 0);
    return v;
}

BigInt derive_prime(std::uint32_t bits, std::uint64_t seed, std::uint32_t which) {
    for (std::uint32_t attempt = 0;; ++attempt) {
        BigInt p;
        BigInt c = prime_candidate(bits, seed, which, attempt);
        mpz_nextprime(p.get_mpz_t(), c.get_mpz_t());
        if (bit_length(p) == bits) return p;
    }
}

}  // namespace

Bytes to_bytes(const BigInt& v) {
    if (v == 0) return {};
    std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    Bytes out(count);
    mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    out.resize(count);
    return out;
}

BigInt from_bytes(ByteView bytes) {
    BigInt v;
    if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
    return v;
}

std::uint32_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return static_cast<std::uint32_t>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

void SecurityParams::validate() const {
    if (iterations < 1 || iterations > kMaxIterations) {
        throw Error(ErrorCode::InvalidSecurityParams, "iterations must be in [1, 2^62]");
    }
    if (modulus_bits < 64 || modulus_bits > kMaxModulusBits) {
        throw Error(ErrorCode::InvalidSecurityParams, "modulus_bits must be in [64, 16384]");
    }
    if (prime_length_bits < 16) {
        throw Error(ErrorCode::InvalidSecurityParams, "prime_length_bits must be >= 16");
    }
}

std::uint64_t effective_iterations(std::uint64_t requested) {
    std::uint64_t t = 1;
    while (t < requested) t <<= 1;
    return t;
}

std::uint32_t expected_checkpoints(std::uint64_t iterations) {
    std::uint32_t rounds = 0;
    while (iterations > 1) {
        iterations = (iterations + 1) / 2;
        ++rounds;
    }
    return rounds;
}

BigInt derive_modulus(std::uint32_t bits, std::uint64_t seed) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, std::uint64_t>, BigInt> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({bits, seed}); it != cache.end()) return it->second;
    }
    const std::uint32_t p_bits = (bits + 1) / 2;
    const std::uint32_t q_bits = bits - p_bits;
    BigInt p = derive_prime(p_bits, seed, 0);
    BigInt q = derive_prime(q_bits, seed, 1);
    for (std::uint32_t which = 2; p == q; ++which) q = derive_prime(q_bits, seed, which);
    BigInt n = p * q;
    std::lock_guard lock(mu);
    cache.emplace(std::pair{bits, seed}, n);
    return n;
}

Digest derive_input_digest(ByteView public_key, ByteView endpoint) {
    return Sha256("l4l/vdf/input/v1").update_prefixed(public_key).update_prefixed(endpoint).finish();
}

BigInt hash_to_group(const Digest& digest, const BigInt& modulus) {
    if (!well_formed_modulus(modulus)) {
        throw Error(ErrorCode::InvalidArgument, "hash_to_group: modulus must be odd and > 3");
    }
    const std::uint32_t bits = bit_length(modulus);
    const std::size_t nbytes = (bits + 7) / 8;
    const BigInt upper = modulus - 1;
    for (std::uint32_t counter = 0;; ++counter) {
        Bytes stream;
        for (std::uint32_t block = 0; stream.size() < nbytes; ++block) {
            Digest d = Sha256("l4l/vdf/hash-to-group/v1")
                           .update(as_bytes(digest))
                           .update_u32(counter)
                           .update_u32(block)
                           .finish();
            stream.insert(stream.end(), d.begin(), d.end());
        }
        stream.resize(nbytes);
        BigInt v = from_bytes(stream);
        mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
        if (v >= 2 && v < upper) return v;
    }
}

PublicParams setup(const SecurityParams& security, ByteView public_key, ByteView endpoint) {
    security.validate();
    if (public_key.empty()) throw Error(ErrorCode::InvalidArgument, "setup: public key must be non-empty");
    PublicParams pp;
    pp.modulus = derive_modulus(security.modulus_bits, security.genesis_seed);
    pp.input_digest = derive_input_digest(public_key, endpoint);
    pp.iterations = effective_iterations(security.iterations);
    pp.prime_length_bits = security.prime_length_bits;
    return pp;
}

Bytes EvalCheckpoint::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.prefixed(to_bytes(input));
    w.prefixed(to_bytes(current));
    w.u64(completed);
    w.u8(midpoint ? 1 : 0);
    if (midpoint) w.prefixed(to_bytes(*midpoint));
    return std::move(w).take();
}

std::optional<EvalCheckpoint> EvalCheckpoint::parse(ByteView bytes) {
    ByteReader r(bytes);
    EvalCheckpoint cp;
    auto version = r.u8();
    if (!version || *version != 1) return std::nullopt;
    auto input = read_element(r);
    auto current = read_element(r);
    auto completed = r.u64();
    auto has_mid = r.u8();
    if (!input || !current || !completed || !has_mid || *has_mid > 1) return std::nullopt;
    cp.input = from_bytes(*input);
    cp.current = from_bytes(*current);
    cp.completed = *completed;
    if (*has_mid == 1) {
        auto mid = read_element(r);
        if (!mid) return std::nullopt;
        cp.midpoint = from_bytes(*mid);
    }
    if (!r.done()) return std::nullopt;
    return cp;
}

Evaluator::Evaluator(const PublicParams& pp, const BigInt& input) : pp_(pp) {
    if (!well_formed_modulus(pp.modulus)) throw Error(ErrorCode::InvalidArgument, "eval: modulus must be odd and > 3");
    if (pp.iterations < 1) throw Error(ErrorCode::InvalidArgument, "eval: iterations must be >= 1");
    if (!in_group(input, pp.modulus)) throw Error(ErrorCode::InputOutOfRange, "eval: input must lie in [1, N)");
    state_.input = input;
    state_.current = input;
}

Evaluator::Evaluator(const PublicParams& pp, EvalCheckpoint resume) : Evaluator(pp, resume.input) {
    if (resume.completed > pp.iterations || !in_group(resume.current, pp.modulus) ||
        resume.midpoint.has_value() != (midpoint_step() != 0 && resume.completed >= midpoint_step())) {
        throw Error(ErrorCode::InvalidArgument, "eval: checkpoint inconsistent with parameters");
    }
    state_ = std::move(resume);
}

std::uint64_t Evaluator::midpoint_step() const {
    return pp_.iterations >= 2 ? (pp_.iterations + 1) / 2 : 0;
}

std::uint64_t Evaluator::advance(std::uint64_t max_squarings) {
    const std::uint64_t mid = midpoint_step();
    std::uint64_t ran = 0;
    while (ran < max_squarings && state_.completed < pp_.iterations) {
        square_mod(state_.current, pp_.modulus);
        ++state_.completed;
        ++ran;
        if (state_.completed == mid) state_.midpoint = state_.current;
    }
    return ran;
}

Evaluation Evaluator::finish(std::stop_token stop) const {
    if (!squarings_done()) throw Error(ErrorCode::InvalidArgument, "eval: squarings not complete");
    const BigInt& modulus = pp_.modulus;

    Evaluation result;
    result.output = state_.current;
    result.proof.output = state_.current;
    result.proof.embedded_prime_length_bits = pp_.prime_length_bits;

    BigInt x = state_.input;
    BigInt y = state_.current;
    std::uint64_t t = pp_.iterations;
    for (std::uint32_t round = 0; t > 1; ++round) {
        if (t % 2 == 1) {
            square_mod(y, modulus);
            ++t;
        }
        const std::uint64_t half = t / 2;
        BigInt mid;
        if (round == 0) {
            mid = *state_.midpoint;
        } else {
            mid = x;
            for (std::uint64_t i = 0; i < half; ++i) {
                if (i % kStopPollInterval == 0 && stop.stop_requested()) {
                    throw Error(ErrorCode::Cancelled, "eval: cancelled while building proof");
                }
                square_mod(mid, modulus);
            }
        }
        const BigInt r = challenge(modulus, x, y, mid, round);
        x = pow_mod(x, r, modulus) * mid % modulus;
        y = pow_mod(mid, r, modulus) * y % modulus;
        result.proof.checkpoints.push_back(std::move(mid));
        t = half;
    }
    return result;
}

Evaluation eval(const PublicParams& pp, const BigInt& input, const EvalControl& control) {
    Evaluator ev(pp, input);
    const std::uint64_t slice = std::min<std::uint64_t>(kStopPollInterval, std::max<std::uint64_t>(1, control.progress_interval));
    std::uint64_t since_report = 0;
    while (!ev.squarings_done()) {
        if (control.stop.stop_requested()) throw Error(ErrorCode::Cancelled, "eval: cancelled");
        since_report += ev.advance(slice);
        if (control.on_progress && (since_report >= control.progress_interval || ev.squarings_done())) {
            control.on_progress(ev.completed(), ev.total());
            since_report = 0;
        }
    }
    return ev.finish(control.stop);
}

bool verify(const PublicParams& pp, const BigInt& input, const BigInt& output, const VdfProof& proof) {
    const BigInt& modulus = pp.modulus;
    if (!well_formed_modulus(modulus) || pp.iterations < 1) return false;
    if (proof.embedded_prime_length_bits != pp.prime_length_bits) return false;
    if (proof.output != output) return false;
    if (!in_group(input, modulus) || !in_group(output, modulus)) return false;
    if (proof.checkpoints.size() != expected_checkpoints(pp.iterations)) return false;
    for (const auto& c : proof.checkpoints) {
        if (!in_group(c, modulus)) return false;
    }

    BigInt x = input;
    BigInt y = output;
    std::uint64_t t = pp.iterations;
    for (std::uint32_t round = 0; t > 1; ++round) {
        if (t % 2 == 1) {
            square_mod(y, modulus);
            ++t;
        }
        const BigInt& mid = proof.checkpoints[round];
        const BigInt r = challenge(modulus, x, y, mid, round);
        x = pow_mod(x, r, modulus) * mid % modulus;
        y = pow_mod(mid, r, modulus) * y % modulus;
        t /= 2;
    }
    square_mod(x, modulus);
    return x == y;
}

bool fast_reject(const SecurityParams& security, const VdfProof& proof) {
    if (proof.embedded_prime_length_bits != security.prime_length_bits) return true;
    if (security.iterations < 1 || security.iterations > kMaxIterations) return true;
    if (proof.checkpoints.size() != expected_checkpoints(effective_iterations(security.iterations))) return true;
    auto bad = [&](const BigInt& v) { return v < 1 || bit_length(v) > security.modulus_bits; };
    if (bad(proof.output)) return true;
    for (const auto& c : proof.checkpoints) {
        if (bad(c)) return true;
    }
    return false;
}

Bytes serialize_proof(const VdfProof& proof) {
    ByteWriter w;
    w.u8(kProofFormatVersion);
    w.u32(proof.embedded_prime_length_bits);
    w.u32(static_cast<std::uint32_t>(proof.checkpoints.size()));
    w.prefixed(to_bytes(proof.output));
    for (const auto& c : proof.checkpoints) w.prefixed(to_bytes(c));
    return std::move(w).take();
}

std::optional<VdfProof> parse_proof(ByteView bytes) {
    ByteReader r(bytes);
    auto version = r.u8();
    if (!version || *version != kProofFormatVersion) return std::nullopt;
    auto prime_bits = r.u32();
    auto count = r.u32();
    if (!prime_bits || !count || *count > kMaxCheckpoints) return std::nullopt;
    VdfProof proof;
    proof.embedded_prime_length_bits = *prime_bits;
    auto out = read_element(r);
    if (!out) return std::nullopt;
    proof.output = from_bytes(*out);
    for (std::uint32_t i = 0; i < *count; ++i) {
        auto c = read_element(r);
        if (!c) return std::nullopt;
        proof.checkpoints.push_back(from_bytes(*c));
    }
    if (!r.done()) return std::nullopt;
    return proof;
}

}  // namespace l4l::vdf
