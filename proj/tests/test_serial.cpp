#include "doctest.h"

#include <random>

#include "lrlattice/harmonic.hpp"
#include "lrlattice/serial.hpp"
#include "oracles.hpp"

using namespace lrl;

TEST_CASE("parallel and serial kernel grid sums agree") {
  for (int d : {1, 2}) {
    const HarmonicParameters p{0.6, std::vector<double>(d, 1.0)};
    const auto a = kernel_grid_sums(p, 0.8, 6, 40);
    const auto b = serial::kernel_grid_sums(p, 0.8, 6, 40);
    for (int m = 0; m < 3; ++m) {
      REQUIRE(a[m].size() == b[m].size());
      for (std::size_t i = 0; i < a[m].size(); ++i) CHECK(std::abs(a[m][i] - b[m][i]) <= 1e-14);
    }
  }
}

TEST_CASE("parallel and serial convolution agree") {
  const HarmonicParameters p{1.0, {1.0, 1.0}};
  std::mt19937_64 rng(2);
  const Field f = oracle::random_field(LatticeGeometry::infinite(2, 2), rng, 5);
  const auto k = make_propagator_kernels(p, 0.7, 12);
  const Field a = apply_convolution(f, k);
  const Field b = serial::apply_convolution(f, k);
  CHECK(l2_distance(a, b) <= 1e-14);
}

TEST_CASE("FFT and direct-DFT torus propagators agree") {
  const HarmonicParameters p{0.9, {1.0}};
  std::mt19937_64 rng(9);
  const Field f = oracle::random_field(LatticeGeometry::torus(1, 16), rng, 6);
  CHECK(l2_distance(apply_propagator_torus(f, p, 1.7), serial::apply_propagator_torus(f, p, 1.7)) <= 1e-12);
}

TEST_CASE("parallel and serial convolution constants agree") {
  for (int d : {1, 2}) {
    const DecayProfile prof(d, 1.0, 0.5);
    const int w = d == 1 ? 20 : 5;
    CHECK(convolution_constant(prof, w).value == doctest::Approx(serial::convolution_constant(prof, w)).epsilon(1e-14));
  }
}
