#include "l4l/error.hpp"
#include "l4l/tower.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <random>

using namespace l4l;
using namespace l4l::tower;
using l4l::testing::build_tower;
using l4l::testing::endpoint_for;
using l4l::testing::fast_security;
using l4l::testing::key_for;
using l4l::testing::TempDir;

namespace {

Bytes read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, const Bytes& b) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no l4l::Error thrown";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(InitTower, HeightOne) {
    auto t = init_tower(fast_security(), key_for("a"), endpoint_for("a"));
    ASSERT_EQ(t.height(), 1u);
    EXPECT_EQ(t.records[0].index, 0u);
    EXPECT_EQ(t.records[0].input, vdf::hash_to_group(t.params.input_digest, t.params.modulus));
    EXPECT_TRUE(validate_chain(t));
}

TEST(InitTower, Deterministic) {
    auto a = init_tower(fast_security(), key_for("a"), endpoint_for("a"));
    auto b = init_tower(fast_security(), key_for("a"), endpoint_for("a"));
    EXPECT_EQ(digest(a.records[0]), digest(b.records[0]));
}

TEST(InitTower, KeysGiveDifferentInputs) {
    auto a = init_tower(fast_security(), key_for("a"), endpoint_for("x"));
    auto b = init_tower(fast_security(), key_for("b"), endpoint_for("x"));
    EXPECT_NE(a.records[0].input, b.records[0].input);
}

TEST(Extend, ChainsFromParentDigest) {
    auto t = build_tower("a", 2);
    ASSERT_EQ(t.height(), 2u);
    EXPECT_EQ(t.records[1].input, vdf::hash_to_group(digest(t.records[0]), t.params.modulus));
    EXPECT_EQ(t.records[1].input, chained_input(digest(t.records[0]), t.params.modulus));
}

TEST(Extend, HeightGrowsByOneEachTime) {
    auto t = build_tower("a", 1);
    for (std::uint64_t k = 1; k <= 6; ++k) {
        t = extend(std::move(t));
        ASSERT_EQ(t.height(), k + 1);
        for (std::size_t i = 0; i < t.records.size(); ++i) EXPECT_EQ(t.records[i].index, i);
    }
}

TEST(Extend, TamperedTowerIsRefused) {
    auto t = build_tower("a", 2);
    t.records[0].output += 1;
    EXPECT_EQ(code_of([&] { extend(t); }), ErrorCode::CorruptTower);
}

TEST(Extend, CreatedEpochIsRecordedButNotHashed) {
    auto t = build_tower("a", 1);
    t = extend(std::move(t), 9);
    EXPECT_EQ(t.records[1].created_epoch, 9u);
    auto copy = t.records[1];
    copy.created_epoch = 3;
    EXPECT_EQ(digest(copy), digest(t.records[1]));
}

TEST(ValidateChain, Height5Tower) {
    auto t = build_tower("a", 5);
    EXPECT_TRUE(validate_chain(t));
}

TEST(ValidateChain, SwappedRecordsFail) {
    auto t = build_tower("a", 5);
    std::swap(t.records[2], t.records[3]);
    auto check = check_chain(t);
    EXPECT_FALSE(check);
    EXPECT_EQ(check.bad_index, 2u);
}

TEST(ValidateChain, TamperedOutputFails) {
    auto t = build_tower("a", 5);
    t.records[4].output += 1;
    auto check = check_chain(t);
    EXPECT_FALSE(check);
    EXPECT_EQ(check.bad_index, 4u);
}

TEST(ValidateChain, ExhaustiveSingleRecordTampering) {
    const auto good = build_tower("a", 8);
    for (std::size_t i = 0; i < good.records.size(); ++i) {
        for (int field = 0; field < 4; ++field) {
            auto t = good;
            auto& r = t.records[i];
            switch (field) {
            case 0: r.input += 1; break;
            case 1: r.output += 1; break;
            case 2: r.proof.checkpoints.back() += 1; break;
            case 3: r.index += 1; break;
            }
            EXPECT_FALSE(validate_chain(t)) << "record " << i << " field " << field;
        }
        // Re-proving record i on a different input leaves it internally valid
        // but breaks the link from record i - 1 or to record i + 1.
        if (i + 1 < good.records.size()) {
            auto t = good;
            auto& r = t.records[i];
            r.input = r.input + 1;
            auto ev = vdf::eval(t.params, r.input);
            r.output = ev.output;
            r.proof = ev.proof;
            EXPECT_FALSE(validate_chain(t)) << "re-proved record " << i;
        }
    }
}

TEST(ValidateChain, TowerDoesNotTransferToAnotherKey) {
    auto t = build_tower("a", 3);
    t.owner_public_key = key_for("b");
    auto check = check_chain(t);
    EXPECT_FALSE(check);
    t.params.input_digest = vdf::derive_input_digest(key_for("b"), t.endpoint);
    check = check_chain(t);
    EXPECT_FALSE(check);
    EXPECT_EQ(check.bad_index, 0u);
}

TEST(ValidateChain, EmptyTowerFails) {
    auto t = build_tower("a", 1);
    t.records.clear();
    EXPECT_FALSE(validate_chain(t));
}

TEST(ValidateChain, ObserverSeesEveryRecord) {
    auto t = build_tower("a", 4);
    std::vector<std::size_t> seen;
    auto check = check_chain(t, [&](std::size_t i, std::chrono::nanoseconds) { seen.push_back(i); });
    EXPECT_TRUE(check);
    EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Persistence, SaveLoadRoundTrip) {
    TempDir dir;
    auto t = build_tower("a", 10);
    save_tower(t, dir / "t.bin");
    EXPECT_EQ(load_tower(dir / "t.bin"), t);
    EXPECT_EQ(serialize_tower(parse_tower(serialize_tower(t))), serialize_tower(t));
    EXPECT_EQ(read_file(dir / "t.bin").front(), kTowerFormatVersion);
}

TEST(Persistence, TruncatedFileIsCorrupt) {
    TempDir dir;
    auto t = build_tower("a", 3);
    save_tower(t, dir / "t.bin");
    Bytes b = read_file(dir / "t.bin");
    for (std::size_t len : {std::size_t{0}, std::size_t{1}, b.size() / 2, b.size() - 1}) {
        write_file(dir / "cut.bin", Bytes(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(len)));
        EXPECT_EQ(code_of([&] { load_tower(dir / "cut.bin"); }), ErrorCode::CorruptTower) << len;
    }
}

TEST(Persistence, FlippedByteIsCorrupt) {
    TempDir dir;
    auto t = build_tower("a", 3);
    save_tower(t, dir / "t.bin");
    const Bytes b = read_file(dir / "t.bin");
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        Bytes m = b;
        m[rng() % m.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        write_file(dir / "flip.bin", m);
        EXPECT_EQ(code_of([&] { load_tower(dir / "flip.bin"); }), ErrorCode::CorruptTower) << trial;
    }
}

TEST(Persistence, ValidFramingWithBadChainIsCorrupt) {
    TempDir dir;
    auto t = build_tower("a", 3);
    t.records[1].output += 1;
    save_tower(t, dir / "t.bin");
    EXPECT_NO_THROW(read_tower(dir / "t.bin"));
    try {
        load_tower(dir / "t.bin");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CorruptTower);
        EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
    }
}

TEST(Persistence, MissingFileIsIoError) {
    TempDir dir;
    EXPECT_EQ(code_of([&] { load_tower(dir / "nope.bin"); }), ErrorCode::IoError);
    auto t = build_tower("a", 1);
    EXPECT_EQ(code_of([&] { save_tower(t, dir / "no" / "such" / "dir" / "t.bin"); }), ErrorCode::IoError);
}
