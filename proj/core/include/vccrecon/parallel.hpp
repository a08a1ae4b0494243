#pragma once

#include "vccrecon/types.hpp"

#include <functional>

namespace vcc {

/// Caps the worker count for all subsequent parallel loops (0 restores the default).
void set_max_threads(int n);
int max_threads();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; bodies must not
/// share mutable state, which keeps results independent of the schedule.
void parallel_for(Index n, std::function<void(Index)> const &body);

} // namespace vcc
