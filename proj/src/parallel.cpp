#include "specreg/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace specreg {

int threadCount() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void setThreadCap(int threads) {
  if (threads < 1) return;
#ifdef _OPENMP
  static const int available = omp_get_max_threads();
  omp_set_num_threads(threads < available ? threads : available);
#endif
}

std::optional<int> applyThreadEnv() {
  const char* env = std::getenv("SPECREG_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    const int value = std::stoi(env);
    setThreadCap(value);
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace specreg
