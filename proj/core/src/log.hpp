#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace netweave::detail {

/// Library diagnostics. Always writes to stderr so stdout stays data-only.
spdlog::logger& log();

}  // namespace netweave::detail
