#include "pwspd/parallel.hpp"

namespace pwspd {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned threads) noexcept { g_threads = threads; }

unsigned thread_count() noexcept {
  const unsigned t = g_threads;
  if (t != 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace pwspd
