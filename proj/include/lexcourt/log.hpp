#pragma once

#include <string_view>

namespace lexcourt {

/// Prints "warning: <message>" to stderr unless warnings are silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace lexcourt
