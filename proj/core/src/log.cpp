#include "thermal_cbf/log.hpp"

#include <cstdlib>
#include <memory>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace thermal_cbf {
namespace {

spdlog::level::level_enum level_from_env() {
  const char* raw = std::getenv("THERMAL_CBF_LOG");
  if (raw == nullptr) return spdlog::level::warn;
  const std::string_view v(raw);
  if (v == "error") return spdlog::level::err;
  if (v == "warn") return spdlog::level::warn;
  if (v == "info") return spdlog::level::info;
  if (v == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

}  // namespace

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto lg = std::make_shared<spdlog::logger>("thermal_cbf", sink);
    lg->set_pattern("[%l] %v");
    lg->set_level(level_from_env());
    return lg;
  }();
  return *instance;
}

}  // namespace thermal_cbf
