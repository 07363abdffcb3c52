#pragma once

#include <cstdlib>
#include <thread>

namespace leafwise {

// Worker cap for internally parallel loops. LEAFWISE_THREADS wins when set
// to a positive integer; otherwise hardware concurrency (min 1).
inline int max_threads() {
  if (const char* env = std::getenv("LEAFWISE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace leafwise
