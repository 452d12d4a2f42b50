#include "l4l/error.hpp"
#include "l4l/vdf.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

using namespace l4l;
using namespace l4l::vdf;
using l4l::testing::brute_pow2;

namespace {

PublicParams toy_params(std::uint64_t n, std::uint64_t t) { return {BigInt(n), Digest{}, t, 512}; }

PublicParams test_params(std::uint64_t t, const std::string& who = "alice") {
    SecurityParams s = SecurityParams::test_profile();
    s.iterations = t;
    return setup(s, l4l::testing::key_for(who), l4l::testing::endpoint_for(who));
}

bool throws_code(ErrorCode code, auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST(Eval, SmallModulusExample) {
    auto ev = eval(toy_params(35, 3), BigInt(2));
    EXPECT_EQ(ev.output, 11);
    EXPECT_EQ(ev.output, brute_pow2(2, 3, 35));
    EXPECT_TRUE(verify(toy_params(35, 3), BigInt(2), ev.output, ev.proof));
}

TEST(Eval, Deterministic) {
    auto a = eval(toy_params(35, 3), BigInt(2));
    auto b = eval(toy_params(35, 3), BigInt(2));
    EXPECT_EQ(a.output, b.output);
    EXPECT_EQ(a.proof, b.proof);
}

TEST(Eval, OneIsFixedPoint) {
    for (std::uint64_t t : {1u, 2u, 7u, 64u, 1000u}) {
        auto pp = test_params(t);
        EXPECT_EQ(eval(pp, BigInt(1)).output, 1) << t;
    }
    EXPECT_EQ(eval(toy_params(35, 5), BigInt(1)).output, 1);
}

TEST(Eval, InputOutOfRange) {
    auto pp = toy_params(35, 4);
    EXPECT_TRUE(throws_code(ErrorCode::InputOutOfRange, [&] { eval(pp, BigInt(0)); }));
    EXPECT_TRUE(throws_code(ErrorCode::InputOutOfRange, [&] { eval(pp, BigInt(35)); }));
    EXPECT_TRUE(throws_code(ErrorCode::InputOutOfRange, [&] { eval(pp, BigInt(-3)); }));
}

TEST(Eval, MatchesBruteForceOnSmallModuli) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint64_t n = 5 + 2 * (rng() % 32000);
        const std::uint64_t x = 1 + rng() % (n - 1);
        const std::uint64_t t = 1 + rng() % 256;
        auto pp = toy_params(n, t);
        auto ev = eval(pp, BigInt(x));
        ASSERT_EQ(ev.output, brute_pow2(x, t, n)) << n << " " << x << " " << t;
        ASSERT_TRUE(verify(pp, BigInt(x), ev.output, ev.proof)) << n << " " << x << " " << t;
    }
}

TEST(Eval, CheckpointCountIsLogOfPowerOfTwo) {
    EXPECT_EQ(expected_checkpoints(1), 0u);
    EXPECT_EQ(expected_checkpoints(2), 1u);
    EXPECT_EQ(expected_checkpoints(1024), 10u);
    auto pp = test_params(1024);
    EXPECT_EQ(eval(pp, BigInt(5)).proof.checkpoints.size(), 10u);
}

TEST(Verify, RoundTripOnTestModulus) {
    for (std::uint64_t t : {1u, 2u, 4u, 256u, 1024u}) {
        auto pp = test_params(t);
        BigInt x = hash_to_group(pp.input_digest, pp.modulus);
        auto ev = eval(pp, x);
        EXPECT_TRUE(verify(pp, x, ev.output, ev.proof)) << t;
    }
}

TEST(Verify, OutputPlusOneFails) {
    auto pp = test_params(1024);
    BigInt x = hash_to_group(pp.input_digest, pp.modulus);
    auto ev = eval(pp, x);
    EXPECT_FALSE(verify(pp, x, ev.output + 1, ev.proof));
    auto proof = ev.proof;
    proof.output += 1;
    EXPECT_FALSE(verify(pp, x, ev.output, proof));
}

TEST(Verify, EachCheckpointReplacedByOneFails) {
    auto pp = test_params(1024);
    BigInt x = hash_to_group(pp.input_digest, pp.modulus);
    auto ev = eval(pp, x);
    for (std::size_t i = 0; i < ev.proof.checkpoints.size(); ++i) {
        auto proof = ev.proof;
        ASSERT_NE(proof.checkpoints[i], 1);
        proof.checkpoints[i] = 1;
        EXPECT_FALSE(verify(pp, x, ev.output, proof)) << "checkpoint " << i;
    }
}

TEST(Verify, MalformedTranscriptsAreFalse) {
    auto pp = test_params(256);
    BigInt x = hash_to_group(pp.input_digest, pp.modulus);
    auto ev = eval(pp, x);
    auto proof = ev.proof;
    proof.checkpoints.pop_back();
    EXPECT_FALSE(verify(pp, x, ev.output, proof));
    proof = ev.proof;
    proof.checkpoints.push_back(BigInt(2));
    EXPECT_FALSE(verify(pp, x, ev.output, proof));
    proof = ev.proof;
    proof.checkpoints[0] = pp.modulus;
    EXPECT_FALSE(verify(pp, x, ev.output, proof));
    EXPECT_FALSE(verify(pp, BigInt(0), ev.output, ev.proof));
    EXPECT_FALSE(verify(pp, x + 1, ev.output, ev.proof));
    auto other = pp;
    other.iterations = 512;
    EXPECT_FALSE(verify(other, x, ev.output, ev.proof));
    proof = ev.proof;
    proof.embedded_prime_length_bits = 511;
    EXPECT_FALSE(verify(pp, x, ev.output, proof));
}

TEST(Verify, ConcurrentCallsAgree) {
    auto pp = test_params(1024);
    BigInt x = hash_to_group(pp.input_digest, pp.modulus);
    auto ev = eval(pp, x);
    auto bad = ev.proof;
    bad.checkpoints[3] += 1;
    SecurityParams s = SecurityParams::test_profile();
    s.iterations = 1024;
    std::atomic<int> mismatches{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] {
            for (int k = 0; k < 20; ++k) {
                if (!verify(pp, x, ev.output, ev.proof)) ++mismatches;
                if (verify(pp, x, ev.output, bad)) ++mismatches;
                if (fast_reject(s, bad)) ++mismatches;
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(mismatches.load(), 0);
}

TEST(FastReject, PrimeLengthMismatch) {
    SecurityParams s = SecurityParams::test_profile();
    s.iterations = 1024;
    auto pp = setup(s, as_bytes("k"), as_bytes("e"));
    auto ev = eval(pp, BigInt(3));
    EXPECT_FALSE(fast_reject(s, ev.proof));
    auto proof = ev.proof;
    proof.embedded_prime_length_bits = 511;
    EXPECT_TRUE(fast_reject(s, proof));
}

TEST(FastReject, StructuralBounds) {
    SecurityParams s = SecurityParams::test_profile();
    s.iterations = 1024;
    auto pp = setup(s, as_bytes("k"), as_bytes("e"));
    auto ev = eval(pp, BigInt(3));
    auto proof = ev.proof;
    proof.checkpoints.clear();
    EXPECT_TRUE(fast_reject(s, proof));
    proof = ev.proof;
    proof.output = 0;
    EXPECT_TRUE(fast_reject(s, proof));
    proof = ev.proof;
    proof.checkpoints[1] = BigInt(1) << 600;
    EXPECT_TRUE(fast_reject(s, proof));
}

TEST(Setup, DeterministicAndKeyBound) {
    SecurityParams s{512, 512, 1024, 0};
    auto a = setup(s, as_bytes("K1"), as_bytes("E1"));
    auto b = setup(s, as_bytes("K1"), as_bytes("E1"));
    auto c = setup(s, as_bytes("K2"), as_bytes("E1"));
    auto d = setup(s, as_bytes("K1"), as_bytes("E2"));
    EXPECT_EQ(a, b);
    EXPECT_NE(a.input_digest, c.input_digest);
    EXPECT_NE(a.input_digest, d.input_digest);
    EXPECT_EQ(a.modulus, c.modulus);
}

TEST(Setup, ModulusShape) {
    for (std::uint32_t bits : {64u, 256u, 512u}) {
        BigInt n = derive_modulus(bits, 3);
        EXPECT_EQ(bit_length(n), bits);
        EXPECT_TRUE(mpz_odd_p(n.get_mpz_t()));
        EXPECT_EQ(mpz_probab_prime_p(n.get_mpz_t(), 30), 0) << "modulus must be composite";
    }
    EXPECT_NE(derive_modulus(256, 1), derive_modulus(256, 2));
}

TEST(Setup, RoundsIterationsUp) {
    EXPECT_EQ(effective_iterations(1), 1u);
    EXPECT_EQ(effective_iterations(3), 4u);
    EXPECT_EQ(effective_iterations(1024), 1024u);
    EXPECT_EQ(effective_iterations(1025), 2048u);
    auto pp = setup({512, 512, 1000, 0}, as_bytes("k"), as_bytes("e"));
    EXPECT_EQ(pp.iterations, 1024u);
}

TEST(Setup, RejectsBadSecurityParams) {
    EXPECT_TRUE(throws_code(ErrorCode::InvalidSecurityParams,
                            [] { setup({32, 512, 1024, 0}, as_bytes("k"), as_bytes("e")); }));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidSecurityParams,
                            [] { setup({512, 512, 0, 0}, as_bytes("k"), as_bytes("e")); }));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidSecurityParams,
                            [] { setup({512, 8, 1024, 0}, as_bytes("k"), as_bytes("e")); }));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidArgument, [] { setup({512, 512, 16, 0}, Bytes{}, as_bytes("e")); }));
}

TEST(HashToGroup, RangeAndDeterminism) {
    BigInt n = derive_modulus(64, 0);
    for (int i = 0; i < 100; ++i) {
        Digest d = sha256(as_bytes(std::to_string(i)));
        BigInt g = hash_to_group(d, n);
        EXPECT_GE(g, 2);
        EXPECT_LT(g, n - 1);
        EXPECT_EQ(g, hash_to_group(d, n));
    }
}

TEST(Serialization, ProofRoundTrip) {
    auto pp = test_params(256);
    auto ev = eval(pp, BigInt(7));
    Bytes bytes = serialize_proof(ev.proof);
    EXPECT_EQ(bytes.front(), kProofFormatVersion);
    auto back = parse_proof(bytes);
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, ev.proof);
}

TEST(Serialization, RejectsMalformedProofs) {
    auto pp = test_params(256);
    Bytes bytes = serialize_proof(eval(pp, BigInt(7)).proof);
    EXPECT_FALSE(parse_proof(Bytes{}));
    Bytes wrong_version = bytes;
    wrong_version[0] = 9;
    EXPECT_FALSE(parse_proof(wrong_version));
    Bytes truncated(bytes.begin(), bytes.end() - 1);
    EXPECT_FALSE(parse_proof(truncated));
    Bytes trailing = bytes;
    trailing.push_back(0);
    EXPECT_FALSE(parse_proof(trailing));
}

TEST(Evaluator, ResumeFromCheckpointMatchesOneShot) {
    auto pp = test_params(1000);
    BigInt x = hash_to_group(pp.input_digest, pp.modulus);
    auto direct = eval(pp, x);

    Evaluator first(pp, x);
    first.advance(300);
    EXPECT_EQ(first.completed(), 300u);
    Bytes saved = first.checkpoint().serialize();
    auto restored = EvalCheckpoint::parse(saved);
    ASSERT_TRUE(restored);
    EXPECT_EQ(*restored, first.checkpoint());

    Evaluator second(pp, *restored);
    while (!second.squarings_done()) second.advance(97);
    auto resumed = second.finish();
    EXPECT_EQ(resumed.output, direct.output);
    EXPECT_EQ(resumed.proof, direct.proof);
}

TEST(Evaluator, CancellationAndProgress) {
    auto pp = test_params(1u << 14);
    std::stop_source src;
    std::uint64_t last = 0;
    EvalControl control{src.get_token(), [&](std::uint64_t done, std::uint64_t total) {
                            last = done;
                            EXPECT_EQ(total, 1u << 14);
                            if (done >= 4096) src.request_stop();
                        },
                        1024};
    EXPECT_TRUE(throws_code(ErrorCode::Cancelled, [&] { eval(pp, BigInt(3), control); }));
    EXPECT_EQ(last, 4096u);
}
