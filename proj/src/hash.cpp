#include "l4l/hash.hpp"

#include "l4l/error.hpp"

#include <openssl/evp.h>

namespace l4l {

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
    ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
    impl_->ctx = EVP_MD_CTX_new();
    if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: context initialisation failed");
    }
}

Sha256::Sha256(std::string_view domain_tag) : Sha256() { update_prefixed(as_bytes(domain_tag)); }

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(ByteView bytes) {
    if (!bytes.empty()) EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size());
    return *this;
}

Sha256& Sha256::update_u32(std::uint32_t v) {
    ByteWriter w;
    w.u32(v);
    return update(w.bytes());
}

Sha256& Sha256::update_u64(std::uint64_t v) {
    ByteWriter w;
    w.u64(v);
    return update(w.bytes());
}

Sha256& Sha256::update_prefixed(ByteView bytes) {
    update_u32(static_cast<std::uint32_t>(bytes.size()));
    return update(bytes);
}

Digest Sha256::finish() {
    Digest out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx, out.data(), &len);
    return out;
}

Digest sha256(ByteView bytes) { return Sha256().update(bytes).finish(); }

}  // namespace l4l
