#include "crosstask/errors.hpp"

namespace crosstask {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kParse: return "parse_error";
        case ErrorCode::kSchema: return "schema_error";
        case ErrorCode::kConfig: return "config_error";
        case ErrorCode::kLookup: return "lookup_error";
        case ErrorCode::kArgument: return "argument_error";
        case ErrorCode::kNumeric: return "numeric_error";
        case ErrorCode::kInfeasible: return "infeasible_error";
        case ErrorCode::kEmptyInput: return "empty_input_error";
        case ErrorCode::kIo: return "io_error";
        case ErrorCode::kTransport: return "transport_error";
        case ErrorCode::kJudgeFormat: return "judge_format_error";
    }
    return "unknown_error";
}

}  // namespace crosstask
