#include "mincomp/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mincomp {

void parallel_for(long long count, int workers,
                  const std::function<void(long long)>& body) {
  if (count < 0) throw std::invalid_argument("parallel_for: negative count");
  if (workers < 1) throw std::invalid_argument("parallel_for: workers must be >= 1");
  if (count == 0) return;
  workers = static_cast<int>(std::min<long long>(workers, count));
  if (workers == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const long long begin = count * w / workers;
    const long long end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (long long i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mincomp
