#include "landau_ee/parallel.hpp"

#include <cstdlib>
#include <string>

namespace landau_ee {

int default_threads() {
  const char* env = std::getenv("LANDAU_EE_THREADS");
  if (env == nullptr) return 1;
  try {
    int n = std::stoi(env);
    return n > 0 ? n : 1;
  } catch (...) {
    return 1;
  }
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace landau_ee
