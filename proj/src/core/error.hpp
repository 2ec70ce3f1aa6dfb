#pragma once

#include <stdexcept>
#include <string>

namespace bedsim {

enum class ErrorCode {
    InvalidArgument,
    InvalidState,
    Io,
    ResetFailed,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

inline void requireArg(bool cond, const std::string& what) {
    require(cond, ErrorCode::InvalidArgument, what);
}

inline void requireState(bool cond, const std::string& what) {
    require(cond, ErrorCode::InvalidState, what);
}

}  // namespace bedsim
