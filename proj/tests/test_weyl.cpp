#include "doctest.h"

#include <random>

#include "lrlattice/errors.hpp"
#include "lrlattice/fock.hpp"
#include "lrlattice/weyl.hpp"
#include "oracles.hpp"

using namespace lrl;

namespace {

HarmonicParameters chain(double w) { return {w, {1.0}}; }

// Vacuum vector of the truncated ring Hamiltonian.
Eigen::VectorXcd fock_vacuum(const FockSystem& s) {
  Eigen::MatrixXcd v;
  Eigen::VectorXd e;
  s.eigensystem(v, e);
  Eigen::Index k;
  e.minCoeff(&k);
  return v.col(k);
}

}  // namespace

TEST_CASE("Weyl relation and adjoint") {
  const auto g = LatticeGeometry::torus(1, 4);
  std::mt19937_64 rng(1);
  const Field f = oracle::random_field(g, rng, 3), h = oracle::random_field(g, rng, 3);
  const WeylOperator prod = multiply(WeylOperator(f), WeylOperator(h));
  CHECK(l2_distance(prod.label(), f + h) == doctest::Approx(0.0));
  CHECK(std::abs(prod.phase() - std::polar(1.0, -0.5 * oracle::sigma(f, h))) <= 1e-14);
  const WeylOperator id = multiply(WeylOperator(f, std::polar(1.0, 0.3)), adjoint(WeylOperator(f, std::polar(1.0, 0.3))));
  CHECK(id.label().is_zero());
  CHECK(std::abs(id.phase() - 1.0) <= 1e-14);
  CHECK_THROWS_AS(WeylOperator(f, 2.0), std::invalid_argument);
}

TEST_CASE("reduce_word is associative") {
  const auto g = LatticeGeometry::torus(2, 2);
  std::mt19937_64 rng(4);
  const WeylOperator a(oracle::random_field(g, rng, 2)), b(oracle::random_field(g, rng, 2)),
      c(oracle::random_field(g, rng, 2));
  const WeylOperator left = multiply(multiply(a, b), c), right = multiply(a, multiply(b, c));
  CHECK(std::abs(left.phase() - right.phase()) <= 1e-14);
  CHECK(std::abs(reduce_word({a, b, c}).phase() - left.phase()) <= 1e-14);
}

TEST_CASE("commutator norm follows the evolved symplectic form") {
  const auto p = chain(0.5);
  const auto g = LatticeGeometry::infinite(1, 2);
  const Field f = Field::delta(g, make_site({0}), cplx(0.6, 0.1));
  const Field h = Field::delta(g, make_site({2}), cplx(-0.2, 0.7));
  for (double t : {0.3, 1.0, 2.5}) {
    const Field tf = oracle::evolve_rk4(f.embed(LatticeGeometry::infinite(1, 100)), p, t, 4000);
    CHECK(std::abs(commutator_norm(f, h, p, t) - oracle::commutator(oracle::sigma(tf, h))) <= 1e-10);
  }
  CHECK(commutator_norm_from_sigma(std::numbers::pi) == doctest::Approx(2.0));
}

TEST_CASE("vacuum state is invariant under the dynamics") {
  const auto p = chain(1.0);
  const QuasiFreeState state(p, LatticeGeometry::torus(1, 16));
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const Field f = oracle::random_field(state.geometry(), rng, 3);
    const cplx before = state_eval(state, WeylOperator(f));
    for (double t : {0.4, 3.0}) {
      CHECK(std::abs(state_eval(state, WeylOperator(apply_propagator_torus(f, p, t))) - before) <= 1e-12);
    }
    CHECK(state.quadratic_form(f) == doctest::Approx(state.quadratic_form_composed(f)).epsilon(1e-12));
  }
}

TEST_CASE("state functional equals the Fock vacuum expectation") {
  FockConfig c;
  c.sites = 2;
  c.cutoff = 30;
  const FockSystem sys(c);
  const Eigen::VectorXcd vac = fock_vacuum(sys);
  const QuasiFreeState state(c.params, LatticeGeometry::torus(1, 1));
  Field f(state.geometry());
  f.set(make_site({0}), cplx(0.4, -0.3));
  f.set(make_site({1}), cplx(0.2, 0.5));
  const cplx fock = vac.dot(Eigen::VectorXcd(weyl_product(c, fock_label(c, f)).apply(vac)));
  CHECK(std::abs(fock - state_eval(state, WeylOperator(f))) <= 1e-10);
}

TEST_CASE("three-point function equals the Fock vacuum matrix element") {
  FockConfig c;
  c.sites = 2;
  c.cutoff = 22;
  const FockSystem sys(c);
  const Eigen::VectorXcd vac = fock_vacuum(sys);
  const auto g = LatticeGeometry::torus(1, 1);
  const QuasiFreeState state(c.params, g);
  const Field g1 = Field::delta(g, make_site({0}), cplx(0.3, 0.2));
  const Field f = Field::delta(g, make_site({1}), cplx(-0.25, 0.35));
  const Field g2 = Field::delta(g, make_site({1}), cplx(0.1, -0.4));
  for (double t : {0.0, 0.35, 1.2}) {
    const DenseOperator wf = sys.heisenberg_evolve(weyl_matrix(c, f), t);
    const cplx fock = vac.dot(weyl_matrix(c, g1) * wf * weyl_matrix(c, g2) * vac);
    CHECK(std::abs(fock - three_point(state, g1, f, g2, t)) <= 1e-9);
  }
}

TEST_CASE("three-point continuity modulus shrinks linearly") {
  const auto p = chain(1.0);
  const auto g = LatticeGeometry::torus(1, 16);
  const QuasiFreeState state(p, g);
  const auto scan = three_point_continuity(state, Field::delta(g, make_site({0}), 0.5),
                                           Field::delta(g, make_site({1}), cplx(-0.5, 0.4)),
                                           Field::delta(g, make_site({-1}), cplx(0, 0.5)), 0.0, 1.0, 8);
  REQUIRE(scan.ratios.size() == scan.moduli.size() - 1);
  for (std::size_t i = 1; i < scan.moduli.size(); ++i) CHECK(scan.moduli[i] < scan.moduli[i - 1]);
  CHECK(scan.ratios.back() >= 1.9);
}

TEST_CASE("massless state and the D0 domain") {
  const auto g = LatticeGeometry::torus(1, 8);
  const Field bad = Field::delta(g, make_site({0}), 1.0);
  CHECK_THROWS_AS(state_eval(QuasiFreeState(chain(0.0), g), WeylOperator(bad)), D0ViolationError);
  CHECK(state_eval(QuasiFreeState(chain(0.0), g, true), WeylOperator(bad)) == cplx(0.0));
  const Field good = bad - Field::delta(g, make_site({3}), 1.0);
  const cplx v = state_eval(QuasiFreeState(chain(0.0), g), WeylOperator(good));
  CHECK(std::abs(v) > 0.0);
  CHECK(std::abs(v) <= 1.0);
}
