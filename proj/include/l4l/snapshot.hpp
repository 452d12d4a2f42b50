#pragma once

#include "l4l/ledger.hpp"

#include <string>
#include <string_view>

namespace l4l::ledger {

/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
/// Byte strings are lowercase hex; rationals are "p/q". Addresses must be
/// valid UTF-8. The format is documented in docs/formats.md.
std::string export_snapshot(const LedgerState& state);

/// Inverse of export_snapshot. Throws Error{InvalidLedger} on malformed input.
LedgerState import_snapshot(std::string_view text);

}  // namespace l4l::ledger
