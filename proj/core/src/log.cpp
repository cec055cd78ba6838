#include "log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "netweave/logging.hpp"

namespace netweave {

namespace detail {

spdlog::logger& log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = std::make_shared<spdlog::logger>(
        "netweave", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    return l;
  }();
  return *logger;
}

}  // namespace detail

void set_log_level(LogLevel level) {
  switch (level) {
    case LogLevel::Error: detail::log().set_level(spdlog::level::err); break;
    case LogLevel::Warn: detail::log().set_level(spdlog::level::warn); break;
    case LogLevel::Info: detail::log().set_level(spdlog::level::info); break;
    case LogLevel::Debug: detail::log().set_level(spdlog::level::debug); break;
  }
}

}  // namespace netweave
