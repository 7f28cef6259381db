#include "lrlattice/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lrl {

int configure_threads() {
  const char* env = std::getenv("LRLATTICE_THREADS");
  if (env != nullptr && *env != '\0') {
    std::size_t pos = 0;
    int n = 0;
    try {
      n = std::stoi(env, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != std::string(env).size() || n < 1) {
      throw std::invalid_argument("LRLATTICE_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

}  // namespace lrl
