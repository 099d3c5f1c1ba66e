#pragma once

#include <stdexcept>
#include <string>

namespace crosstask {

/// Failure categories surfaced by the library. The CLI maps these onto
/// exit codes and machine-readable error JSON.
enum class ErrorCode {
    kParse,        // malformed input bytes (CSV cell, JSONL line, CoNLL-U row)
    kSchema,       // well-formed bytes violating a structural contract
    kConfig,       // missing/contradictory configuration (baseline row, alias map)
    kLookup,       // unknown label, row or profile
    kArgument,     // out-of-range parameter
    kNumeric,      // non-finite values or solver failure
    kInfeasible,   // request cannot be satisfied by the data (rebalance, corrupt)
    kEmptyInput,   // operation requires at least one element
    kIo,           // file could not be opened/read/written
    kTransport,    // HTTP failure after retries
    kJudgeFormat,  // judge reply without a parsable 0/1
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace crosstask
