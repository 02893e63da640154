#include "csgnash/error.hpp"

namespace csgnash {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Syntax: return "SyntaxError";
        case ErrorCode::UndeclaredSymbol: return "UndeclaredSymbol";
        case ErrorCode::Type: return "TypeError";
        case ErrorCode::AlphabetViolation: return "AlphabetViolation";
        case ErrorCode::UndefinedConstant: return "UndefinedConstant";
        case ErrorCode::UpdateClash: return "UpdateClash";
        case ErrorCode::ProbabilitySum: return "ProbabilitySum";
        case ErrorCode::RangeOverflow: return "RangeOverflow";
        case ErrorCode::UnknownPlayer: return "UnknownPlayer";
        case ErrorCode::CoalitionNotPartition: return "CoalitionNotPartition";
        case ErrorCode::UnknownReward: return "UnknownReward";
        case ErrorCode::BadThreshold: return "BadThreshold";
        case ErrorCode::EmptyCoalition: return "EmptyCoalition";
        case ErrorCode::FullCoalition: return "FullCoalition";
        case ErrorCode::EmptyList: return "EmptyList";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IncompleteStrategy: return "IncompleteStrategy";
        case ErrorCode::InfiniteValue: return "InfiniteValue";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::Unsupported: return "UnsupportedOperator";
        case ErrorCode::AssumptionViolation: return "AssumptionViolation";
        case ErrorCode::Io: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Internal: return "InternalError";
    }
    return "Error";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, SourcePos pos) {
    std::string out = error_code_name(code);
    if (pos.valid()) out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
    out += ": ";
    out += message;
    return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, SourcePos pos)
    : std::runtime_error(compose(code, message, pos)), code_(code), pos_(pos), detail_(message) {}

void fail(ErrorCode code, const std::string& message, SourcePos pos) { throw Error(code, message, pos); }

}  // namespace csgnash
