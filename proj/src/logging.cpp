#include "corrlearn/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

namespace corrlearn {

void init_logging() {
  spdlog::set_level(spdlog::level::info);
  const char* env = std::getenv("CORRLEARN_LOG");
  if (!env) return;
  const auto level = spdlog::level::from_str(env);
  // from_str maps unknown names to "off"; only accept the literal.
  if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
}

}  // namespace corrlearn
