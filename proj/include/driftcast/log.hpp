#pragma once

#include <spdlog/logger.h>

#include <memory>

namespace driftcast {

/// Shared stderr logger. Level comes from DRIFTCAST_LOG
/// (trace|debug|info|warn|error|off), default warn.
std::shared_ptr<spdlog::logger> logger();

} // namespace driftcast
