#pragma once

#include <atomic>
#include <iostream>
#include <string_view>

namespace lrdfield {

inline std::atomic<bool>& warnings_enabled() {
  static std::atomic<bool> enabled{true};
  return enabled;
}

inline void log_warning(std::string_view message) {
  if (warnings_enabled().load(std::memory_order_relaxed)) {
    std::clog << "[lrdfield] warning: " << message << '\n';
  }
}

}  // namespace lrdfield
