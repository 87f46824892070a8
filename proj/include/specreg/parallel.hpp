#pragma once

#include <optional>

namespace specreg {

/// Worker count used by the OpenMP kernels (1 when built without OpenMP).
int threadCount();

/// Caps the worker count. Values < 1 are ignored.
void setThreadCap(int threads);

/// Reads SPECREG_THREADS and applies it as a cap. Returns the parsed value.
std::optional<int> applyThreadEnv();

}  // namespace specreg
