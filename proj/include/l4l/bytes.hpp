#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace l4l {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes bytes_of(std::string_view s) {
    auto v = as_bytes(s);
    return {v.begin(), v.end()};
}

std::string to_hex(ByteView bytes);
std::optional<Bytes> from_hex(std::string_view hex);

/// Big-endian writer for the canonical wire encodings.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
    /// u32 length prefix followed by the bytes.
    void prefixed(ByteView bytes);

    const Bytes& bytes() const& { return out_; }
    Bytes take() && { return std::move(out_); }

private:
    Bytes out_;
};

/// Bounds-checked reader; every accessor returns nullopt past the end
/// instead of reading out of range.
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::optional<std::uint8_t> u8();
    std::optional<std::uint32_t> u32();
    std::optional<std::uint64_t> u64();
    std::optional<ByteView> raw(std::size_t n);
    /// Reads a u32-prefixed field, refusing lengths above `max_len`.
    std::optional<ByteView> prefixed(std::size_t max_len);

    std::size_t remaining() const { return in_.size() - pos_; }
    bool done() const { return pos_ == in_.size(); }

private:
    ByteView in_;
    std::size_t pos_ = 0;
};

}  // namespace l4l
