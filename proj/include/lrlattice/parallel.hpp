#ifndef LRLATTICE_PARALLEL_HPP
#define LRLATTICE_PARALLEL_HPP

namespace lrl {

// Applies LRLATTICE_THREADS (a positive integer) as the OpenMP thread cap.
// Returns the thread count in effect. Throws std::invalid_argument on a
// malformed value.
int configure_threads();

}  // namespace lrl

#endif  // LRLATTICE_PARALLEL_HPP
