#include "l4l/signature.hpp"

#include "l4l/hash.hpp"

#include <algorithm>

namespace l4l {

Bytes KeyedHashScheme::sign(ByteView key, ByteView message) {
    Digest d = Sha256("l4l/sig/keyed-hash/v1").update_prefixed(key).update_prefixed(message).finish();
    return {d.begin(), d.end()};
}

bool KeyedHashScheme::verify(ByteView public_key, ByteView message, ByteView signature) const {
    if (public_key.empty()) return false;
    const Bytes expected = sign(public_key, message);
    return std::equal(expected.begin(), expected.end(), signature.begin(), signature.end());
}

}  // namespace l4l
