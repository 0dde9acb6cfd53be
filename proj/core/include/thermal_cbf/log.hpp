#pragma once

#include <spdlog/logger.h>

namespace thermal_cbf {

/// Process-wide diagnostics logger writing to standard error.
/// Level comes from THERMAL_CBF_LOG (error|warn|info|debug), default warn.
spdlog::logger& logger();

}  // namespace thermal_cbf
