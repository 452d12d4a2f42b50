#pragma once

#include "l4l/bytes.hpp"

namespace l4l {

/// Any EUF-CMA scheme can sit behind this interface.
class SignatureVerifier {
public:
    virtual ~SignatureVerifier() = default;
    virtual bool verify(ByteView public_key, ByteView message, ByteView signature) const = 0;
};

/// Deterministic keyed-hash stand-in used by tests and the simulator. The
/// public key doubles as the signing key, so it offers no unforgeability
/// against anyone who has seen the key; it only exercises the sig/verify
/// plumbing.
class KeyedHashScheme final : public SignatureVerifier {
public:
    static Bytes sign(ByteView key, ByteView message);
    bool verify(ByteView public_key, ByteView message, ByteView signature) const override;
};

}  // namespace l4l
