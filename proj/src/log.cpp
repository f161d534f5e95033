#include "driftcast/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

namespace driftcast {

std::shared_ptr<spdlog::logger> logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
        auto lg = std::make_shared<spdlog::logger>("driftcast", sink);
        lg->set_pattern("[%l] %v");
        lg->set_level(spdlog::level::warn);
        if (const char* env = std::getenv("DRIFTCAST_LOG")) {
            lg->set_level(spdlog::level::from_str(env));
        }
        return lg;
    }();
    return instance;
}

} // namespace driftcast
