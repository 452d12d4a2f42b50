#include "l4l/tower.hpp"

#include "l4l/error.hpp"

#include <fstream>
#include <iterator>

namespace l4l::tower {

namespace {

constexpr std::size_t kMaxField = 1u << 20;

ProofRecord evaluate_record(const vdf::PublicParams& params, std::uint64_t index, BigInt input,
                            std::uint64_t created_epoch, const vdf::EvalControl& control) {
    auto evaluation = vdf::eval(params, input, control);
    ProofRecord record;
    record.index = index;
    record.input = std::move(input);
    record.output = std::move(evaluation.output);
    record.proof = std::move(evaluation.proof);
    record.created_epoch = created_epoch;
    return record;
}

ChainCheck fail(std::optional<std::size_t> index, std::string reason) {
    return ChainCheck{false, index, std::move(reason)};
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptTower, why); }

}  // namespace

Digest digest(const ProofRecord& record) {
    return Sha256("l4l/tower/record/v1")
        .update_u64(record.index)
        .update_prefixed(vdf::to_bytes(record.input))
        .update_prefixed(vdf::to_bytes(record.output))
        .update_prefixed(vdf::serialize_proof(record.proof))
        .finish();
}

BigInt chained_input(const Digest& parent, const BigInt& modulus) { return vdf::hash_to_group(parent, modulus); }

Tower init_tower(const vdf::SecurityParams& security, ByteView public_key, ByteView endpoint,
                 std::uint64_t created_epoch, const vdf::EvalControl& control) {
    Tower tower;
    tower.params = vdf::setup(security, public_key, endpoint);
    tower.owner_public_key.assign(public_key.begin(), public_key.end());
    tower.endpoint.assign(endpoint.begin(), endpoint.end());
    tower.security = security;
    BigInt input = vdf::hash_to_group(tower.params.input_digest, tower.params.modulus);
    tower.records.push_back(evaluate_record(tower.params, 0, std::move(input), created_epoch, control));
    return tower;
}

Tower extend(Tower tower, std::optional<std::uint64_t> created_epoch, const vdf::EvalControl& control) {
    if (auto check = check_chain(tower); !check) {
        throw Error(ErrorCode::CorruptTower, "extend: " + check.reason);
    }
    const ProofRecord& tip = tower.records.back();
    BigInt input = chained_input(digest(tip), tower.params.modulus);
    const std::uint64_t epoch = created_epoch.value_or(tip.created_epoch);
    tower.records.push_back(evaluate_record(tower.params, tower.height(), std::move(input), epoch, control));
    return tower;
}

ChainCheck check_chain(const Tower& tower, const RecordObserver& observer) {
    try {
        tower.security.validate();
    } catch (const Error& e) {
        return fail(std::nullopt, e.what());
    }
    if (tower.owner_public_key.empty()) return fail(std::nullopt, "empty owner public key");
    const vdf::PublicParams& pp = tower.params;
    if (pp.modulus != vdf::derive_modulus(tower.security.modulus_bits, tower.security.genesis_seed) ||
        pp.iterations != vdf::effective_iterations(tower.security.iterations) ||
        pp.prime_length_bits != tower.security.prime_length_bits) {
        return fail(std::nullopt, "public parameters do not match the security parameters");
    }
    if (pp.input_digest != vdf::derive_input_digest(tower.owner_public_key, tower.endpoint)) {
        return fail(0, "input digest is not bound to the owner key and endpoint");
    }
    if (tower.records.empty()) return fail(std::nullopt, "tower has no records");

    for (std::size_t i = 0; i < tower.records.size(); ++i) {
        const ProofRecord& record = tower.records[i];
        if (record.index != i) return fail(i, "record index out of sequence");
        const BigInt expected_input = i == 0 ? vdf::hash_to_group(pp.input_digest, pp.modulus)
                                             : chained_input(digest(tower.records[i - 1]), pp.modulus);
        if (record.input != expected_input) {
            return fail(i, i == 0 ? "record 0 input does not match setup" : "record does not chain from its parent");
        }
        const auto start = std::chrono::steady_clock::now();
        const bool valid = !vdf::fast_reject(tower.security, record.proof) &&
                           vdf::verify(pp, record.input, record.output, record.proof);
        if (observer) observer(i, std::chrono::steady_clock::now() - start);
        if (!valid) return fail(i, "proof does not verify");
    }
    return {};
}

bool validate_chain(const Tower& tower) { return static_cast<bool>(check_chain(tower)); }

Bytes serialize_tower(const Tower& tower) {
    ByteWriter w;
    w.u8(kTowerFormatVersion);
    w.u32(tower.security.modulus_bits);
    w.u32(tower.security.prime_length_bits);
    w.u64(tower.security.iterations);
    w.u64(tower.security.genesis_seed);
    w.prefixed(tower.owner_public_key);
    w.prefixed(tower.endpoint);
    w.prefixed(vdf::to_bytes(tower.params.modulus));
    w.raw(as_bytes(tower.params.input_digest));
    w.u64(tower.params.iterations);
    w.u32(tower.params.prime_length_bits);
    w.u64(tower.records.size());
    for (const auto& r : tower.records) {
        w.u64(r.index);
        w.u64(r.created_epoch);
        w.prefixed(vdf::to_bytes(r.input));
        w.prefixed(vdf::to_bytes(r.output));
        w.prefixed(vdf::serialize_proof(r.proof));
    }
    Digest checksum = sha256(w.bytes());
    w.raw(as_bytes(checksum));
    return std::move(w).take();
}

Tower parse_tower(ByteView bytes) {
    if (bytes.size() < 1 + 32) corrupt("file too short");
    const ByteView body = bytes.first(bytes.size() - 32);
    const Digest checksum = sha256(body);
    if (!std::equal(checksum.begin(), checksum.end(), bytes.end() - 32)) corrupt("checksum mismatch");

    ByteReader r(body);
    auto version = r.u8();
    if (!version || *version != kTowerFormatVersion) corrupt("unsupported format version");

    Tower t;
    auto modulus_bits = r.u32();
    auto prime_bits = r.u32();
    auto iterations = r.u64();
    auto seed = r.u64();
    auto owner = r.prefixed(kMaxField);
    auto endpoint = r.prefixed(kMaxField);
    auto modulus = r.prefixed(kMaxField);
    auto input_digest = r.raw(32);
    auto eff_iterations = r.u64();
    auto pp_prime_bits = r.u32();
    auto count = r.u64();
    if (!modulus_bits || !prime_bits || !iterations || !seed || !owner || !endpoint || !modulus || !input_digest ||
        !eff_iterations || !pp_prime_bits || !count) {
        corrupt("truncated header");
    }
    t.security = {*modulus_bits, *prime_bits, *iterations, *seed};
    t.owner_public_key.assign(owner->begin(), owner->end());
    t.endpoint.assign(endpoint->begin(), endpoint->end());
    t.params.modulus = vdf::from_bytes(*modulus);
    std::copy(input_digest->begin(), input_digest->end(), t.params.input_digest.begin());
    t.params.iterations = *eff_iterations;
    t.params.prime_length_bits = *pp_prime_bits;
    if (*count > r.remaining()) corrupt("record count exceeds file size");

    t.records.reserve(*count);
    for (std::uint64_t i = 0; i < *count; ++i) {
        ProofRecord rec;
        auto index = r.u64();
        auto epoch = r.u64();
        auto input = r.prefixed(kMaxField);
        auto output = r.prefixed(kMaxField);
        auto proof = r.prefixed(kMaxField);
        if (!index || !epoch || !input || !output || !proof) corrupt("truncated record " + std::to_string(i));
        auto parsed = vdf::parse_proof(*proof);
        if (!parsed) corrupt("malformed proof in record " + std::to_string(i));
        rec.index = *index;
        rec.created_epoch = *epoch;
        rec.input = vdf::from_bytes(*input);
        rec.output = vdf::from_bytes(*output);
        rec.proof = std::move(*parsed);
        t.records.push_back(std::move(rec));
    }
    if (!r.done()) corrupt("trailing bytes");
    return t;
}

void save_tower(const Tower& tower, const std::filesystem::path& path) {
    const Bytes bytes = serialize_tower(tower);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "rename to " + path.string() + " failed: " + ec.message());
}

Tower read_tower(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());
    return parse_tower(bytes);
}

Tower load_tower(const std::filesystem::path& path) {
    Tower t = read_tower(path);
    if (auto check = check_chain(t); !check) {
        std::string where = check.bad_index ? " at record " + std::to_string(*check.bad_index) : "";
        throw Error(ErrorCode::CorruptTower, check.reason + where);
    }
    return t;
}

}  // namespace l4l::tower
