#include "ftsp/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace ftsp {

std::size_t worker_count(std::size_t tasks) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FTSP_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) workers = std::min(workers, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::min(workers, tasks));
}

}  // namespace ftsp
