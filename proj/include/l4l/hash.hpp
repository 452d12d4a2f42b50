#pragma once

#include "l4l/bytes.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

namespace l4l {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256. Every protocol hash starts with a domain tag so
/// digests from different contexts never collide by construction.
class Sha256 {
public:
    Sha256();
    explicit Sha256(std::string_view domain_tag);
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(ByteView bytes);
    Sha256& update_u32(std::uint32_t v);
    Sha256& update_u64(std::uint64_t v);
    /// u32 length then bytes, so adjacent fields cannot alias.
    Sha256& update_prefixed(ByteView bytes);

    Digest finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Digest sha256(ByteView bytes);

inline ByteView as_bytes(const Digest& d) { return {d.data(), d.size()}; }

}  // namespace l4l
