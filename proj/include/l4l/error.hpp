#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l4l {

enum class ErrorCode {
    InvalidSecurityParams,
    InvalidArgument,
    InputOutOfRange,
    Cancelled,
    CorruptTower,
    IoError,
    AlreadyRegistered,
    InvalidSignature,
    InvalidProof,
    UnknownMiner,
    ForeignSigner,
    NoBlocksThisEpoch,
    InvalidLedger,
    InvalidScenario,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace l4l
