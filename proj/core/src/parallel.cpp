#include "vccrecon/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <memory>
#include <mutex>

namespace vcc {

namespace {

std::mutex control_mutex;
std::unique_ptr<tbb::global_control> control;
int thread_cap = 0;

} // namespace

void set_max_threads(int n)
{
  std::lock_guard lock(control_mutex);
  control.reset();
  thread_cap = n > 0 ? n : 0;
  if (thread_cap > 0) {
    control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, thread_cap);
  }
}

int max_threads()
{
  std::lock_guard lock(control_mutex);
  return thread_cap > 0 ? thread_cap : tbb::this_task_arena::max_concurrency();
}

void parallel_for(Index n, std::function<void(Index)> const &body)
{
  tbb::parallel_for(tbb::blocked_range<Index>(0, n), [&](tbb::blocked_range<Index> const &r) {
    for (Index i = r.begin(); i != r.end(); ++i) {
      body(i);
    }
  });
}

} // namespace vcc
