#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "lrlattice/perturbations.hpp"
#include "oracles.hpp"

using namespace lrl;

namespace {

PerturbationFamily two_site_family() {
  PerturbationFamily fam(LatticeGeometry::infinite(1, 10));
  fam.add(AtomicWeylMeasure::from_atoms({make_site({0}), make_site({2})},
                                        {{{cplx(0.3, 0), cplx(0, 0.4)}, 0.5}, {{cplx(-0.3, 0), cplx(0, -0.4)}, 0.5}}));
  fam.add(AtomicWeylMeasure::cosine(make_site({2}), cplx(0.1, 0.1), 2.0));
  return fam;
}

}  // namespace

TEST_CASE("even closure merges listed pairs and rejects uneven weights") {
  const auto m = AtomicWeylMeasure::from_atoms({make_site({0})}, {{{cplx(0.2)}, 1.0}, {{cplx(-0.2)}, 1.0}, {{cplx(0.5)}, 0.3}});
  CHECK(m.representatives().size() == 2);
  CHECK(m.total_mass() == doctest::Approx(2.6));
  int visits = 0;
  m.for_each_atom([&](const std::vector<cplx>&, double) { ++visits; });
  CHECK(visits == 4);
  CHECK_THROWS_AS(AtomicWeylMeasure::from_atoms({make_site({0})}, {{{cplx(0.2)}, 1.0}, {{cplx(-0.2)}, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(AtomicWeylMeasure::from_atoms({make_site({0})}, {{{cplx(0.2)}, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AtomicWeylMeasure({make_site({0}), make_site({0})}, {}), std::invalid_argument);
}

TEST_CASE("family supports must lie in the volume") {
  PerturbationFamily fam(LatticeGeometry::infinite(1, 3));
  CHECK_THROWS_AS(fam.add(AtomicWeylMeasure::cosine(make_site({4}), 0.1)), std::invalid_argument);
}

TEST_CASE("JSON round trip and strict keys") {
  const auto fam = two_site_family();
  const auto back = family_from_json(family_to_json(fam), fam.volume());
  CHECK(family_to_json(back) == family_to_json(fam));
  const auto doc = nlohmann::json::parse(R"([{"sites": [1], "atoms": [{"z": [[0.2, 0.0]], "weight": 1.0}]}])");
  CHECK(family_from_json(doc, LatticeGeometry::infinite(1, 2)).on_site());
  const auto bad = nlohmann::json::parse(R"([{"sites": [1], "atoms": [], "extra": 1}])");
  CHECK_THROWS_AS(family_from_json(bad, LatticeGeometry::infinite(1, 2)), std::invalid_argument);
  const std::string path = "perturbation_roundtrip_test.json";
  std::ofstream(path) << family_to_json(fam).dump();
  CHECK(family_to_json(load_family(path, fam.volume())) == family_to_json(fam));
  std::remove(path.c_str());
}

TEST_CASE("moments of a uniform cosine family") {
  const auto fam = PerturbationFamily::uniform_cosine(LatticeGeometry::infinite(1, 8), cplx(0.2, 0.1), 1.5);
  CHECK(fam.on_site());
  CHECK(second_moment(fam) == doctest::Approx(2 * 0.05 * 1.5));
  CHECK(first_moment(fam) == doctest::Approx(2 * std::sqrt(0.05) * 1.5));
  const auto pm = pair_moment(fam, DecayProfile(1, 1.0, 1.0), 8);
  CHECK(pm.kappa_a == doctest::Approx(second_moment(fam)));
  CHECK(pm.stabilized);
}

TEST_CASE("pair moment of a two-site family by hand") {
  const auto fam = two_site_family();
  const DecayProfile prof(1, 1.0, 0.5);
  // pairs (0,0): 0.09; (2,2): 0.16 + 2*2*0.02 = 0.24; (0,2): 0.12 / F(2)
  const double cross = 0.3 * 0.4 / oracle::decay(2, 1, 1.0, 0.5);
  const auto pm = pair_moment(fam, prof, 10);
  CHECK(pm.kappa_a == doctest::Approx(std::max({0.09, 0.24, cross})));
  CHECK_THROWS_AS(second_moment(fam), std::invalid_argument);
  CHECK(first_moment(fam) == doctest::Approx(0.4 + 2 * 2 * std::sqrt(0.02)));
}

TEST_CASE("empirical a1 takes the largest stabilising rate") {
  const auto fam = PerturbationFamily::uniform_cosine(LatticeGeometry::infinite(1, 8), 0.2);
  CHECK(empirical_a1(fam, DecayProfile(1), 8, {0.5, 1.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("volume sequences and boxes") {
  CHECK_THROWS_AS(VolumeSequence({4, 4}), std::invalid_argument);
  CHECK_THROWS_AS(VolumeSequence({}), std::invalid_argument);
  CHECK(VolumeSequence::in_box(make_site({4, -3}), 2, 4));
  CHECK_FALSE(VolumeSequence::in_box(make_site({-4, 0}), 2, 4));
}

TEST_CASE("convergence tail decreases along dyadic boxes") {
  const HarmonicParameters p{1.0, {1.0}};
  const DecayProfile prof(1, 1.0, 1.0);
  const auto cert = derive_constants_default(p, prof);
  const VolumeSequence seq({4, 8, 16, 32, 64});
  const Field f = Field::delta(LatticeGeometry::infinite(1, 1), Site{});
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < 4; ++m) {
    const double tail = convergence_tail(f, seq, 4, m, 0.5, 0.4, cert, 0.08, 3.0, prof);
    CHECK(tail < prev);
    prev = tail;
  }
  CHECK(prev < 1e-5);
  CHECK(convergence_tail(f, seq, 4, 4, 0.5, 0.4, cert, 0.08, 3.0, prof) == 0.0);
  CHECK_THROWS_AS(convergence_tail(f, seq, 1, 2, 0.5, 0.4, cert, 0.08, 3.0, prof), std::invalid_argument);
}

TEST_CASE("tail over an explicit site list matches the box form") {
  const HarmonicParameters p{1.0, {1.0}};
  const DecayProfile prof(1, 1.0, 1.0);
  const auto cert = derive_constants_default(p, prof);
  const VolumeSequence seq({2, 3});
  const Field f = Field::delta(LatticeGeometry::infinite(1, 1), Site{});
  const double rate = perturbed_rate(cert, 0.1, 2.0);
  // (-3, 3] minus (-2, 2] = {-2, 3}
  const double sites = convergence_tail_sites(f, {make_site({-2}), make_site({3})}, LatticeGeometry::infinite(1, 4), 0.3,
                                              0.4, cert, rate, prof);
  CHECK(convergence_tail_with_rate(f, seq, 1, 0, 0.3, 0.4, cert, rate, prof) == doctest::Approx(sites));
  const double expected = 0.4 * cert.c_a * 0.3 * std::exp(rate * 0.3) * (prof(2) + prof(3));
  CHECK(sites == doctest::Approx(expected));
}
