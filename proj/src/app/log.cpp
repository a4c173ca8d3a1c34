#include "costru/app/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <string>

namespace costru::app {

void init_logging() {
    auto logger = spdlog::get("costru");
    if (!logger) logger = spdlog::stderr_color_mt("costru");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("COSTRU_LOG");
    const std::string level = env ? env : "info";
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level == "error") spdlog::set_level(spdlog::level::err);
    else spdlog::set_level(spdlog::level::info);
}

}  // namespace costru::app
