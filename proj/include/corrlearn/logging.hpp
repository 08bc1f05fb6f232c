#pragma once

namespace corrlearn {

/// Sets the spdlog level from CORRLEARN_LOG (trace, debug, info, warn,
/// error, critical, off). Unset or unknown values leave "info".
void init_logging();

}  // namespace corrlearn
