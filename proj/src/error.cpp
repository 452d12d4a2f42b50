#include "l4l/error.hpp"

namespace l4l {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidSecurityParams: return "InvalidSecurityParams";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InputOutOfRange: return "InputOutOfRange";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::CorruptTower: return "CorruptTower";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::AlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::InvalidSignature: return "InvalidSignature";
    case ErrorCode::InvalidProof: return "InvalidProof";
    case ErrorCode::UnknownMiner: return "UnknownMiner";
    case ErrorCode::ForeignSigner: return "ForeignSigner";
    case ErrorCode::NoBlocksThisEpoch: return "NoBlocksThisEpoch";
    case ErrorCode::InvalidLedger: return "InvalidLedger";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    }
    return "Unknown";
}

}  // namespace l4l
