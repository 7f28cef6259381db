#include "doctest.h"

#include <algorithm>

#include "lrlattice/errors.hpp"
#include "lrlattice/fock.hpp"
#include "lrlattice/weyl.hpp"
#include "oracles.hpp"

using namespace lrl;

namespace {

FockConfig ring(int sites, int cutoff, double w = 1.0) {
  FockConfig c;
  c.sites = sites;
  c.cutoff = cutoff;
  c.params = {w, {1.0}};
  return c;
}

// Sorted sums of gamma_k (2 n_k + 1) over occupation patterns with sum n <= 8.
std::vector<double> normal_mode_levels(const std::vector<double>& gammas) {
  std::vector<double> out;
  const std::size_t n = gammas.size();
  std::vector<int> occ(n, 0);
  const auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == n) {
      double e = 0;
      for (std::size_t k = 0; k < n; ++k) e += gammas[k] * (2 * occ[k] + 1);
      out.push_back(e);
      return;
    }
    for (int o = 0; o <= left; ++o) {
      occ[i] = o;
      self(self, i + 1, left - o);
    }
  };
  rec(rec, 0, 8);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("single-site matrices") {
  const auto q = position_matrix(4);
  const auto p = momentum_matrix(4);
  CHECK(q(0, 1) == doctest::Approx(std::sqrt(0.5)));
  // [q, p] = i away from the truncation edge
  const DenseOperator comm = q.cast<cplx>() * p - p * q.cast<cplx>();
  for (int i = 0; i < 4; ++i) CHECK(std::abs(comm(i, i) - cplx(0, 1)) <= 1e-14);
}

TEST_CASE("two-site ring ground energy is 1 + sqrt 5") {
  const FockSystem s(ring(2, 30));
  CHECK(s.parity_blocked());
  CHECK(s.real());
  CHECK(s.eigenvalues()(0) == doctest::Approx(1.0 + std::sqrt(5.0)).epsilon(1e-10));
}

TEST_CASE("low spectrum is the normal-mode ladder") {
  // 2-ring: k = 0, pi; 3-ring: k = 0, +-2pi/3; gamma^2 = w^2 + 4 sin^2(k/2) (doubled bond on the 2-ring)
  struct Case {
    FockConfig config;
    std::vector<double> gammas;
    double tol;
  };
  const std::vector<Case> cases{
      {ring(2, 40), {1.0, std::sqrt(5.0)}, 1e-9},
      {ring(3, 15), {1.0, 2.0, 2.0}, 1e-4},
      {ring(2, 40, 0.5), {0.5, std::sqrt(4.25)}, 1e-9},
  };
  for (const auto& [config, gammas, tol] : cases) {
    const auto ev = FockSystem(config).eigenvalues();
    const auto levels = normal_mode_levels(gammas);
    for (std::size_t i = 0; i < 6; ++i) CHECK(ev(static_cast<Eigen::Index>(i)) == doctest::Approx(levels[i]).epsilon(tol));
  }
}

TEST_CASE("product operator application matches the dense Kronecker product") {
  const auto c = ring(3, 4);
  const ProductOperator w = weyl_product(c, {cplx(0.2, 0.1), cplx(0), cplx(-0.3, 0.2)});
  const Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(static_cast<Eigen::Index>(c.dimension()), 3);
  CHECK((w.apply(x) - w.to_dense() * x).norm() <= 1e-12);
  CHECK((w.adjoint().to_dense() - w.to_dense().adjoint()).norm() <= 1e-12);
  const DenseOperator u = single_site_weyl(8, cplx(0.4, -0.7));
  CHECK((u * u.adjoint() - DenseOperator::Identity(9, 9)).norm() <= 1e-12);
}

TEST_CASE("commutator oracle converges to the exact value") {
  const auto g = LatticeGeometry::torus(1, 1);
  const Field f = Field::delta(g, make_site({0}), cplx(0.4, 0.2));
  const Field h = Field::delta(g, make_site({1}), cplx(-0.1, 0.45));
  const HarmonicParameters p{1.0, {1.0}};
  const FockSystem s(ring(2, 40));
  for (double t : {0.2, 0.7}) {
    const double exact = commutator_norm(f, h, p, t);
    CHECK(std::abs(commutator_oracle(s, f, h, t) - exact) <= 1e-4 * exact);
  }
}

TEST_CASE("truncation guard") {
  const auto c = ring(2, 8);
  CHECK_THROWS_AS(check_truncation(c, {cplx(3.0), cplx(0)}), TruncationError);
  CHECK_NOTHROW(check_truncation(c, {cplx(0.05), cplx(0)}));
  FockConfig big = ring(3, 80);
  CHECK_THROWS_AS(big.validate(), std::invalid_argument);
}

TEST_CASE("cosine perturbation matrix") {
  const auto c = ring(2, 12);
  PerturbationFamily fam(LatticeGeometry::infinite(1, 1));
  fam.add(AtomicWeylMeasure::cosine(make_site({1}), cplx(0.3, 0.1), 0.7));
  const DenseOperator pm = perturbation_matrix(c, fam);
  const DenseOperator local = 0.7 * (single_site_weyl(12, cplx(0.3, 0.1)) + single_site_weyl(12, cplx(-0.3, -0.1)));
  const DenseOperator expected = ProductOperator({DenseOperator::Identity(13, 13), local}).to_dense();
  CHECK((pm - expected).norm() <= 1e-12);
  CHECK((pm - pm.adjoint()).norm() <= 1e-12);
  const FockSystem s(c, fam);
  CHECK(s.parity_blocked());
}

TEST_CASE("bounded interactions") {
  const auto c = ring(2, 6);
  BoundedInteraction inter;
  const Eigen::MatrixXd q = position_matrix(6);
  inter.add({make_site({0})}, (0.1 * q).cast<cplx>());
  CHECK_THROWS_AS(inter.add({make_site({0})}, DenseOperator::Identity(3, 4)), std::invalid_argument);
  CHECK_THROWS_AS(inter.add({make_site({0})}, momentum_matrix(6) * cplx(0, 1)), std::invalid_argument);
  const FockSystem s(c, inter);
  CHECK_FALSE(s.parity_blocked());  // q is odd under number parity
  const double na = interaction_norm_a(inter, DecayProfile(1), LatticeGeometry::infinite(1, 2));
  CHECK(na == doctest::Approx(operator_norm((0.1 * q).cast<cplx>())));
}

TEST_CASE("Dyson identity and the perturbation estimate") {
  const auto c = ring(2, 12);
  PerturbationFamily fam(LatticeGeometry::infinite(1, 1));
  fam.add(AtomicWeylMeasure::cosine(make_site({0}), cplx(0.2, 0.0)));
  Field f(LatticeGeometry::torus(1, 1));
  f.set(make_site({1}), cplx(0.2, 0.1));
  const DenseOperator a = weyl_matrix(c, f);
  const auto coarse = perturbed_evolve(c, fam, a, 0.2, 8);
  const auto fine = perturbed_evolve(c, fam, a, 0.2, 16);
  CHECK(fine.dyson_residual < coarse.dyson_residual / 4.0);
  CHECK(fine.difference_norm <= 2.0 * 0.2 * fine.perturbation_norm * operator_norm(a));
  CHECK_THROWS_AS(perturbed_evolve(c, fam, a, 0.2, 7), std::invalid_argument);
}

TEST_CASE("volume comparison modes") {
  const auto small = ring(1, 10);
  const auto large = ring(2, 10);
  PerturbationFamily fam(LatticeGeometry::infinite(1, 1));
  fam.add(AtomicWeylMeasure::cosine(make_site({0}), 0.2));
  const DenseOperator a = single_site_weyl(10, cplx(0.1, 0.1));
  // perturbation entirely inside the small region: no difference
  const auto same = volume_compare(small, large, fam, a, {0.2, 0.5});
  CHECK(same.max_difference <= 1e-12);
  fam.add(AtomicWeylMeasure::cosine(make_site({1}), 0.2));
  const auto diff = volume_compare(small, large, fam, a, {0.2, 0.5});
  CHECK(diff.max_difference > 1e-8);
  VolumeCompareOptions sub;
  sub.mode = VolumeMode::subsystem;
  const auto s = volume_compare(small, large, fam, a, {0.2}, sub);
  CHECK(s.differences.size() == 1);
  CHECK_THROWS_AS(volume_compare(large, small, fam, a, {0.2}), std::invalid_argument);
}
