#include "doctest.h"

#include <random>

#include "lrlattice/errors.hpp"
#include "lrlattice/harmonic.hpp"
#include "lrlattice/serial.hpp"
#include "oracles.hpp"

using namespace lrl;

namespace {

HarmonicParameters chain(double w, int d = 1, double l = 1.0) { return {w, std::vector<double>(d, l)}; }

Field sample_label(const LatticeGeometry& g) {
  Field f(g);
  f.set(make_site({0}), cplx(0.7, -0.2));
  f.set(make_site({1}), cplx(-0.4, 0.5));
  f.set(make_site({-2}), cplx(0.1, 0.3));
  return f;
}

}  // namespace

TEST_CASE("Bogoliubov identity on quadrature nodes") {
  for (double w : {0.3, 1.0, 2.0}) {
    const auto p = chain(w, 2);
    const auto nodes = quadrature_nodes(32);
    for (double k0 : nodes) {
      for (double k1 : nodes) {
        const auto b = bogoliubov_multipliers(p, Momentum{k0, k1, 0, 0});
        CHECK(0.25 * (b.gamma_plus * b.gamma_plus - b.gamma_minus * b.gamma_minus) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(bogoliubov_multipliers(chain(0.0), Momentum{}), SingularPointError);
}

TEST_CASE("multipliers are regular at zero frequency") {
  CHECK(kernel_multiplier(-1, 0.0, 0.7) == doctest::Approx(-1.4));
  CHECK(kernel_multiplier(0, 0.0, 0.7) == doctest::Approx(1.0));
  CHECK(kernel_multiplier(1, 0.0, 0.7) == doctest::Approx(0.0));
  CHECK(kernel_multiplier(-1, 1e-9, 0.7) == doctest::Approx(-1.4).epsilon(1e-12));
}

TEST_CASE("kernels at t = 0 are delta, 0, 0") {
  for (int d : {1, 2}) {
    for (double w : {0.0, 1.0}) {
      const auto k = compute_kernels(chain(w, d), 0.0, 6);
      for (std::size_t i = 0; i < k[1].samples.size(); ++i) {
        const bool origin = l1_norm(k[1].window.site(i), d) == 0;
        CHECK(std::abs(k[1].samples[i] - (origin ? 1.0 : 0.0)) <= 1e-10);
        CHECK(std::abs(k[0].samples[i]) <= 1e-10);
        CHECK(std::abs(k[2].samples[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("massless chain H0 equals the Bessel function J_2x(4t)") {
  for (double t : {0.5, 1.0, 3.0}) {
    const auto k = compute_kernel(chain(0.0), 0, t, 30);
    for (int x = -30; x <= 30; ++x) CHECK(std::abs(k(make_site({x})) - oracle::massless_chain_h0(x, t)) <= 1e-12);
  }
}

TEST_CASE("kernels agree with a long double midpoint rule in d = 2") {
  const auto p = HarmonicParameters{0.8, {1.0, 0.5}};
  const auto k = compute_kernels(p, 0.9, 5);
  for (int m = -1; m <= 1; ++m) {
    for (const Site& x : {make_site({0, 0}), make_site({1, 2}), make_site({-3, 1}), make_site({5, -5})}) {
      CHECK(std::abs(k[m + 1](x) - oracle::kernel_midpoint(p, m, 0.9, x, 160)) <= 1e-12);
    }
  }
}

TEST_CASE("series kernels match quadrature inside the cone") {
  const auto p = chain(1.0);
  const auto s = series_kernels(p, 1.0, 32);
  const auto q = compute_kernels(p, 1.0, 32);
  for (int m = -1; m <= 1; ++m) {
    for (std::size_t i = 0; i < q[0].samples.size(); ++i) {
      CHECK(std::abs(static_cast<double>(s.values[m + 1][i]) - q[m + 1].samples[i]) <= 1e-13);
    }
  }
}

TEST_CASE("decoupled chain: every site rotates independently") {
  for (double w : {0.5, 1.0, 2.0}) {
    const auto p = HarmonicParameters{w, {0.0}};
    for (double t : {0.25, 1.0, 4.0}) {
      const Field f = sample_label(LatticeGeometry::infinite(1, 2));
      const Field tf = apply_propagator_convolution(f, p, t);
      const Field tt = apply_propagator_torus(sample_label(LatticeGeometry::torus(1, 8)), p, t);
      for (int x = -4; x <= 4; ++x) {
        const cplx expected = oracle::decoupled_rotation(f(make_site({x})), w, t);
        CHECK(std::abs(tf(make_site({x})) - expected) <= 1e-10);
        CHECK(std::abs(tt(make_site({x})) - expected) <= 1e-10);
      }
    }
  }
}

TEST_CASE("torus propagator solves the equations of motion") {
  for (double w : {1.0, 0.0}) {
    const auto p = HarmonicParameters{w, {1.0, 0.6}};
    const auto g = LatticeGeometry::torus(2, 5);
    std::mt19937_64 rng(3);
    Field f = oracle::random_field(g, rng, 6);
    if (w == 0.0) f = oracle::zero_mean(f);
    const double t = 1.3;
    const Field exact = oracle::evolve_rk4(f, p, t, 4000);
    CHECK(l2_distance(apply_propagator_torus(f, p, t), exact) <= 1e-10);
    CHECK(l2_distance(serial::apply_propagator_torus(f, p, t), exact) <= 1e-10);
  }
}

TEST_CASE("convolution propagator solves the equations of motion on Z") {
  const auto p = chain(0.7);
  const Field f = sample_label(LatticeGeometry::infinite(1, 2));
  const double t = 2.0;
  const Field exact = oracle::evolve_rk4(f.embed(LatticeGeometry::infinite(1, 120)), p, t, 4000);
  const Field tf = apply_propagator_convolution(f, p, t);
  CHECK(max_abs_difference(tf, exact, LatticeGeometry::infinite(1, 40)) <= 1e-10);
}

TEST_CASE("fused and composed torus propagators agree") {
  const auto p = chain(1.3, 2);
  std::mt19937_64 rng(11);
  const Field f = oracle::random_field(LatticeGeometry::torus(2, 6), rng, 8);
  for (double t : {0.1, 1.0, 5.0}) {
    CHECK(l2_distance(apply_propagator_torus(f, p, t), apply_propagator_torus_composed(f, p, t)) <= 1e-12);
  }
}

TEST_CASE("group law and symplectic invariance") {
  const auto p = chain(1.0);
  const auto g = LatticeGeometry::torus(1, 32);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const Field f = oracle::random_field(g, rng, 4);
    const Field h = oracle::random_field(g, rng, 4);
    const double s = 0.3 + 0.1 * k, t = 1.1 - 0.05 * k;
    const Field lhs = apply_propagator_torus(f, p, s + t);
    const Field rhs = apply_propagator_torus(apply_propagator_torus(f, p, t), p, s);
    CHECK(l2_distance(lhs, rhs) <= 1e-8);
    CHECK(std::abs(symplectic_form(apply_propagator_torus(f, p, t), apply_propagator_torus(h, p, t)) -
                   symplectic_form(f, h)) <= 1e-8);
  }
}

TEST_CASE("massless torus labels must have zero position mean") {
  const Field f = Field::delta(LatticeGeometry::torus(1, 4), make_site({0}));
  CHECK_THROWS_AS(apply_propagator_torus(f, chain(0.0), 1.0), D0ViolationError);
  CHECK_NOTHROW(apply_propagator_torus(cplx(0, 1) * f, chain(0.0), 1.0));
}

TEST_CASE("certified kernel radius bounds the dropped tail") {
  const auto p = chain(1.0);
  for (double t : {0.5, 2.0}) {
    const double tol = 1e-10;
    const int r = certified_kernel_radius(p, t, tol, 2048);
    const auto big = series_kernels(p, t, r + 60);
    long double tail = 0.0L;
    for (std::size_t i = 0; i < big.window.size(); ++i) {
      if (l1_norm(big.window.site(i), 1) <= r) continue;
      for (int m = 0; m < 3; ++m) tail += std::abs(big.values[m][i]);
    }
    CHECK(static_cast<double>(tail) <= tol);
  }
  CHECK_THROWS_AS(certified_kernel_radius(p, 50.0, 1e-12, 16), WindowTooSmallError);
}

TEST_CASE("quadrature refinement failure is reported") {
  QuadratureSpec q;
  q.max_refinements = 1;
  q.refinement_tolerance = 1e-300;
  CHECK_THROWS_AS(compute_kernels(chain(1.0), 5.0, 4, q), QuadratureError);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(HarmonicParameters({-1.0, {1.0}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(HarmonicParameters({0.0, {0.0}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(HarmonicParameters({1.0, {}}).validate(), std::invalid_argument);
}
