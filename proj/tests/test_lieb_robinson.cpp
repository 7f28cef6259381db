#include "doctest.h"

#include <random>

#include "lrlattice/lieb_robinson.hpp"
#include "lrlattice/weyl.hpp"
#include "oracles.hpp"

using namespace lrl;

TEST_CASE("kernel envelopes hold on a small grid") {
  for (double w : {1.0, 0.0}) {
    const auto check = verify_kernel_bounds({w, {1.0}}, {0.5, 1.0, 2.0}, {0.0, 0.5, 1.0, 2.0}, 30);
    CHECK(check.pass());
    CHECK(check.max_ratio <= 1.0 + kKernelBoundSlack);
    CHECK(check.quadrature_discrepancy <= 1e-12);
  }
}

TEST_CASE("velocity bound and prefactor follow the closed forms") {
  const HarmonicParameters p{0.5, {1.0, 2.0}};
  const double c = std::sqrt(0.25 + 4.0 * 3.0);
  CHECK(p.c() == doctest::Approx(c));
  for (double mu : {0.5, 1.0, 3.0}) {
    CHECK(velocity_bound(c, mu) == doctest::Approx(c * std::max(2.0 / mu, std::exp(mu / 2 + 1))));
    const auto cert = derive_constants(p, DecayProfile(2, 1.0, 0.25), mu);
    CHECK(cert.prefactor == doctest::Approx(1.0 + 2.0 * std::exp(mu / 2.0) * c + 2.0 / c));
    CHECK(cert.v_a == doctest::Approx(mu * cert.velocity_bound));
    CHECK(cert.c_a == doctest::Approx(cert.prefactor * cert.absorption));
    CHECK(std::isinf(cert.a0));
  }
}

TEST_CASE("absorption constant is the supremum of (1+r)^p e^{-eta r}") {
  const HarmonicParameters p{1.0, {1.0}};
  for (double eta : {0.1, 0.5, 1.0, 3.0}) {
    const auto cert = derive_constants(p, DecayProfile(1, 1.0, 0.2), 0.2 + eta);
    double sup = 0.0;
    for (int i = 0; i <= 400000; ++i) {
      const double r = i * 1e-3;
      sup = std::max(sup, std::pow(1.0 + r, 2.0) * std::exp(-eta * r));
    }
    CHECK(cert.absorption == doctest::Approx(sup).epsilon(1e-6));
  }
}

TEST_CASE("derive_constants needs mu above the decay rate") {
  CHECK_THROWS_AS(derive_constants({1.0, {1.0}}, DecayProfile(1, 1.0, 1.0), 1.0), std::invalid_argument);
  CHECK(derive_constants_default({1.0, {1.0}}, DecayProfile(1, 1.0, 1.0)).mu == doctest::Approx(2.0));
}

TEST_CASE("commutators of evolved deltas stay below the pointwise bound") {
  for (double w : {1.0, 0.0}) {
    const HarmonicParameters p{w, {1.0}};
    const auto g = LatticeGeometry::infinite(1, 1);
    for (double t : {0.5, 2.0, 5.0}) {
      const Field tf = apply_propagator_convolution(Field::delta(g, Site{}), p, t);
      for (int x = 0; x <= 60; ++x) {
        const double sig = std::abs(std::imag(tf(make_site({x}))));  // sigma(T f, i delta_x) up to sign
        const double s2 = std::abs(std::real(tf(make_site({x}))));
        CHECK(std::max(sig, s2) <= pointwise_bound(p, kDefaultMuGrid, t, x) * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("harmonic bound dominates commutator norms") {
  const HarmonicParameters p{1.0, {1.0, 1.0}};
  const DecayProfile prof(2, 1.0, 0.5);
  const auto cert = derive_constants_default(p, prof);
  std::mt19937_64 rng(12);
  const auto g = LatticeGeometry::infinite(2, 2);
  for (int k = 0; k < 5; ++k) {
    const Field f = oracle::random_field(g, rng, 3);
    Field h = oracle::random_field(g, rng, 3);
    h = h.embed(LatticeGeometry::infinite(2, 8));
    Field shifted(LatticeGeometry::infinite(2, 8));
    for (std::size_t i = 0; i < h.size(); ++i) {
      Site x = h.geometry().site(i);
      if (h.values()[i] == cplx(0.0)) continue;
      x[0] += 5;
      shifted.set(x, h.values()[i]);
    }
    for (double t : {0.2, 1.0}) {
      CHECK(commutator_norm(f, shifted, p, t) <= harmonic_bound(f, shifted, t, cert, prof));
    }
  }
}

TEST_CASE("massless chain light cone spreads at speed 2") {
  std::vector<double> ts;
  for (int i = 1; i <= 20; ++i) ts.push_back(i);
  const auto scan = cone_scan({0.0, {1.0}}, 60, ts);
  const auto est = estimate_velocity(scan);
  CHECK(est.velocity >= 1.8);
  CHECK(est.velocity <= 2.1);
  // the front never outruns the derived velocity
  for (std::size_t i = 0; i < est.t.size(); ++i) CHECK(est.front[i] <= 1.0 + velocity_bound(2.0, 1.0) * est.t[i]);
}

TEST_CASE("velocity fit needs three crossings") {
  const auto scan = cone_scan({0.0, {1.0}}, 10, {1.0, 2.0}, 0.1);
  CHECK_THROWS_AS(estimate_velocity(scan), std::runtime_error);
  CHECK_THROWS_AS(cone_scan({0.0, {1.0}}, 10, {}, 0.1), std::invalid_argument);
}
