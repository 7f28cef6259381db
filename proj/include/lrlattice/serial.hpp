#ifndef LRLATTICE_SERIAL_HPP
#define LRLATTICE_SERIAL_HPP

// Single-threaded reference versions of the parallel kernels. They use the
// direct formulas (no separable contraction, no FFT) and exist for tests and
// the benchmark.

#include <array>
#include <vector>

#include "lrlattice/field.hpp"
#include "lrlattice/harmonic.hpp"
#include "lrlattice/lattice.hpp"

namespace lrl::serial {

// Direct d-dimensional trapezoid sum over the full offset grid, same layout
// as lrl::kernel_grid_sums.
std::array<std::vector<double>, 3> kernel_grid_sums(const HarmonicParameters& params, double t, int window,
                                                    int points_per_axis);

// Convolution propagator with a plain double loop over output sites.
Field apply_convolution(const Field& f, const PropagatorKernels& kernels);

// Torus propagator as a real-space convolution with kernels from a direct
// O(N^2) DFT.
Field apply_propagator_torus(const Field& f, const HarmonicParameters& params, double t);

// max over separations |s|_1 <= window of convolution_ratio, no symmetry
// reduction.
double convolution_constant(const DecayProfile& profile, int window);

}  // namespace lrl::serial

#endif  // LRLATTICE_SERIAL_HPP
