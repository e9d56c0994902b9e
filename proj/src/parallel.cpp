#include "gsimg/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace gsimg {

namespace {
int g_default_workers = omp_get_max_threads();
}

void set_worker_count(int n) { omp_set_num_threads(n > 0 ? n : g_default_workers); }

int worker_count() { return omp_get_max_threads(); }

int worker_count_from_env() {
  const char* v = std::getenv("GSIMG_WORKERS");
  if (v == nullptr) return 0;
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace gsimg
