#include "doctest.h"

#include <cmath>

#include "lrlattice/lattice.hpp"
#include "oracles.hpp"

using namespace lrl;

TEST_CASE("index and site are inverse on windows and tori") {
  for (const auto& g : {LatticeGeometry::infinite(2, 3), LatticeGeometry::torus(2, 3), LatticeGeometry::torus(3, 2)}) {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.index(g.site(i)) == i);
  }
  CHECK(LatticeGeometry::infinite(2, 3).size() == 49);
  CHECK(LatticeGeometry::torus(2, 3).size() == 36);
  CHECK_THROWS_AS(LatticeGeometry::infinite(1, 2).index(make_site({3})), std::domain_error);
}

TEST_CASE("torus wrap lands in (-L, L]") {
  const auto g = LatticeGeometry::torus(1, 4);
  CHECK(g.wrap(make_site({-4}))[0] == 4);
  CHECK(g.wrap(make_site({5}))[0] == -3);
  CHECK(g.wrap(make_site({12}))[0] == 4);
}

TEST_CASE("distance is the l1 metric, quotient on the torus") {
  const auto z = LatticeGeometry::infinite(2, 10);
  CHECK(distance(z, make_site({1, -2}), make_site({-3, 4})) == 10);
  const auto t = LatticeGeometry::torus(1, 4);
  CHECK(distance(t, make_site({-3}), make_site({4})) == 1);
  CHECK(distance(t, make_site({0}), make_site({4})) == 4);
  // metric axioms on a small torus
  const auto t2 = LatticeGeometry::torus(2, 2);
  for (std::size_t i = 0; i < t2.size(); ++i) {
    for (std::size_t j = 0; j < t2.size(); ++j) {
      const Site x = t2.site(i), y = t2.site(j);
      CHECK(distance(t2, x, y) == distance(t2, y, x));
      CHECK((distance(t2, x, y) == 0) == (i == j));
      for (std::size_t k = 0; k < t2.size(); k += 3) {
        CHECK(distance(t2, x, y) <= distance(t2, x, t2.site(k)) + distance(t2, t2.site(k), y));
      }
    }
  }
}

TEST_CASE("decay profile values") {
  const DecayProfile p(2, 0.5, 1.5);
  CHECK(p(0.0) == doctest::Approx(1.0));
  CHECK(p(3.0) == doctest::Approx(oracle::decay(3.0, 2, 0.5, 1.5)).epsilon(1e-14));
  CHECK_THROWS_AS(p(-1.0), std::domain_error);
}

TEST_CASE("l1 ball size matches shell counts and brute force") {
  for (int d = 1; d <= 3; ++d) {
    for (int r = 0; r <= 5; ++r) {
      double expected = 0;
      for (int s = 0; s <= r; ++s) expected += shell_count(d, s);
      CHECK(l1_ball(d, r).size() == static_cast<std::size_t>(expected));
      std::size_t brute = 0;
      const auto cube = LatticeGeometry::infinite(d, std::max(r, 1));
      for (std::size_t i = 0; i < cube.size(); ++i) brute += l1_norm(cube.site(i), d) <= r;
      CHECK(brute == static_cast<std::size_t>(expected));
    }
  }
}

TEST_CASE("uniform norm: window sum plus tail bound covers the larger window") {
  const DecayProfile p(1, 1.0, 0.3);
  const auto small = uniform_norm(p, 20);
  double direct = 0.0;
  for (int x = -400; x <= 400; ++x) direct += oracle::decay(std::abs(x), 1, 1.0, 0.3);
  CHECK(small.value <= direct);
  CHECK(direct <= small.value + small.tail_bound);
}

TEST_CASE("convolution constant matches the naive double sum") {
  for (int d : {1, 2}) {
    for (double a : {0.0, 1.0}) {
      const DecayProfile p(d, 1.0, a);
      const int w = d == 1 ? 24 : 6;
      const auto c = convolution_constant(p, w);
      CHECK(c.value == doctest::Approx(oracle::convolution_constant(d, 1.0, a, w)).epsilon(1e-12));
      CHECK(c.value >= 1.0);
    }
  }
}

TEST_CASE("convolution ratio is invariant under signed permutations") {
  const DecayProfile p(2, 1.0, 0.5);
  const double r = convolution_ratio(p, make_site({2, 3}), 6);
  CHECK(convolution_ratio(p, make_site({3, 2}), 6) == doctest::Approx(r).epsilon(1e-14));
  CHECK(convolution_ratio(p, make_site({-2, 3}), 6) == doctest::Approx(r).epsilon(1e-14));
  CHECK(convolution_ratio(p, make_site({3, -2}), 6) == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("convolution constant reports window convergence") {
  const auto c = convolution_constant(DecayProfile(1, 1.0, 1.0), 64);
  CHECK(c.converged);
  CHECK(c.relative_change <= kConvolutionConvergenceTol);
}
