#pragma once

#include <stdexcept>
#include <string>

namespace csgnash {

enum class ErrorCode {
    Syntax,
    UndeclaredSymbol,
    Type,
    AlphabetViolation,
    UndefinedConstant,
    UpdateClash,
    ProbabilitySum,
    RangeOverflow,
    UnknownPlayer,
    CoalitionNotPartition,
    UnknownReward,
    BadThreshold,
    EmptyCoalition,
    FullCoalition,
    EmptyList,
    DimensionMismatch,
    IncompleteStrategy,
    InfiniteValue,
    NotConverged,
    Unsupported,
    AssumptionViolation,
    Io,
    InvalidArgument,
    Internal,
};

const char* error_code_name(ErrorCode code);

struct SourcePos {
    int line = 0;
    int column = 0;
    bool valid() const { return line > 0; }
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, SourcePos pos = {});

    ErrorCode code() const noexcept { return code_; }
    SourcePos pos() const noexcept { return pos_; }
    // Message without the "Kind: " prefix or position.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    SourcePos pos_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message, SourcePos pos = {});

}  // namespace csgnash
