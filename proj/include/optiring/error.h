#pragma once

#include <stdexcept>
#include <string>

namespace optiring {

enum class ErrorKind {
    InvalidConfig,
    SelfTransfer,
    OutOfSegment,
    InvalidPlan,
    UnsupportedConfig,
    OracleLimit,
    Domain,
    ScheduleInvalid,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace optiring
