#include "optiring/error.h"

namespace optiring {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidConfig: return "invalid-config";
        case ErrorKind::SelfTransfer: return "self-transfer";
        case ErrorKind::OutOfSegment: return "out-of-segment";
        case ErrorKind::InvalidPlan: return "invalid-plan";
        case ErrorKind::UnsupportedConfig: return "unsupported-config";
        case ErrorKind::OracleLimit: return "oracle-limit";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::ScheduleInvalid: return "schedule-invalid";
    }
    return "unknown";
}

}  // namespace optiring
