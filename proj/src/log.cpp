#include "lexcourt/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace lexcourt {

namespace {
std::atomic<bool> g_enabled{true};
std::mutex g_mutex;
}  // namespace

void set_warnings_enabled(bool enabled) { g_enabled = enabled; }

void warn(std::string_view message) {
    if (!g_enabled) return;
    std::lock_guard lock(g_mutex);
    std::cerr << "warning: " << message << '\n';
}

}  // namespace lexcourt
