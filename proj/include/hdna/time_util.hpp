#pragma once

#include <chrono>
#include <string>

namespace hdna {

// "2024-05-01T12:34:56.789Z"
std::string rfc3339_utc(std::chrono::system_clock::time_point t);

}  // namespace hdna
