#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace toolseek {

using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

// RFC 3339 UTC form, e.g. 2016-10-18T14:57:00Z.
std::string format_timestamp(Timestamp t);
// Throws Error(MalformedDocument) on anything but the form above.
Timestamp parse_timestamp(std::string_view text);

}  // namespace toolseek
