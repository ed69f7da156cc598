#include "pilotforge/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pilotforge {

int configured_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  const int fallback = hw == 0 ? 1 : static_cast<int>(hw);
  const char* env = std::getenv("PILOTFORGE_THREADS");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    const int value = std::stoi(env);
    return value >= 1 ? value : fallback;
  } catch (const std::exception&) {
    return fallback;
  }
}

void apply_thread_limit() { set_threads(configured_threads()); }

void set_threads(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads < 1 ? 1 : threads);
#else
  (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace pilotforge
