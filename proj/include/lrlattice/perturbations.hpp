#ifndef LRLATTICE_PERTURBATIONS_HPP
#define LRLATTICE_PERTURBATIONS_HPP

// Perturbations P_X = int W(z . delta_X) dmu_X(z) with finite, even, atomic
// measures mu_X, and the moment constants and bounds built from them.

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lrlattice/field.hpp"
#include "lrlattice/lattice.hpp"
#include "lrlattice/lieb_robinson.hpp"

namespace lrl {

struct WeylAtom {
  std::vector<cplx> z;  // one entry per support site
  double weight = 0.0;
};

// Stores one representative per pair {z, -z}; iteration visits both.
class AtomicWeylMeasure {
 public:
  AtomicWeylMeasure(std::vector<Site> support, std::vector<WeylAtom> representatives);

  // Builds the even closure of an explicit atom list: mirrors missing
  // partners and merges listed pairs. Throws std::invalid_argument when z and
  // -z are both listed with different weights, or on malformed atoms.
  static AtomicWeylMeasure from_atoms(std::vector<Site> support, const std::vector<WeylAtom>& atoms);

  // w (e^{i(a q + b p)} + e^{-i(a q + b p)}) = 2 w cos(a q + b p) at one site
  static AtomicWeylMeasure cosine(const Site& x, cplx z, double weight = 1.0);

  const std::vector<Site>& support() const { return support_; }
  const std::vector<WeylAtom>& representatives() const { return reps_; }

  // Visits (z, w) and (-z, w) for every representative.
  void for_each_atom(const std::function<void(const std::vector<cplx>&, double)>& visit) const;
  double total_mass() const;

 private:
  std::vector<Site> support_;
  std::vector<WeylAtom> reps_;
};

class PerturbationFamily {
 public:
  explicit PerturbationFamily(LatticeGeometry volume);

  const LatticeGeometry& volume() const { return volume_; }
  const std::vector<AtomicWeylMeasure>& measures() const { return measures_; }
  // Throws std::invalid_argument if a support site lies outside the volume.
  void add(AtomicWeylMeasure measure);
  bool on_site() const;
  bool empty() const { return measures_.empty(); }

  // Terms whose support lies inside `region` (a sub-window of the volume).
  PerturbationFamily restricted_to(const std::function<bool(const Site&)>& region) const;

  // Cosine 2 w cos(Re z q_x + Im z p_x) at every site of the volume.
  static PerturbationFamily uniform_cosine(const LatticeGeometry& volume, cplx z, double weight = 1.0);

 private:
  LatticeGeometry volume_;
  std::vector<AtomicWeylMeasure> measures_;
};

// JSON list of {sites: [[x..], ...], atoms: [{z: [[re, im], ...], weight: w}]}
PerturbationFamily family_from_json(const nlohmann::json& doc, const LatticeGeometry& volume);
PerturbationFamily load_family(const std::string& path, const LatticeGeometry& volume);
nlohmann::json family_to_json(const PerturbationFamily& family);

class VolumeSequence {
 public:
  explicit VolumeSequence(std::vector<int> half_sides);
  const std::vector<int>& half_sides() const { return half_sides_; }
  std::size_t size() const { return half_sides_.size(); }
  // Box (-L, L]^d.
  static bool in_box(const Site& x, int dimension, int half_side);

 private:
  std::vector<int> half_sides_;
};

// kappa = max_x sum_atoms |z|^2 w. Throws std::invalid_argument for
// non-singleton supports.
double second_moment(const PerturbationFamily& family);

struct PairMoment {
  double kappa_a = 0.0;
  Site worst_x1{};
  Site worst_x2{};
  double half_window_value = 0.0;
  bool stabilized = false;  // window and window / 2 agree to 1e-9 relative
};

// max over pairs with |x1|, |x2| <= window (sup norm) of
// sum_{X ∋ x1, x2} sum_atoms |z_x1| |z_x2| w / F_a(d(x1, x2)).
PairMoment pair_moment(const PerturbationFamily& family, const DecayProfile& profile, int window);

// M = max_x sum_{X ∋ x} sum_atoms |z_x| w.
double first_moment(const PerturbationFamily& family);

// Largest a on the grid for which pair_moment stabilises.
double empirical_a1(const PerturbationFamily& family, const DecayProfile& profile, int window,
                    const std::vector<double>& a_grid);

// c_a e^{(v_a + c_a kappa_a C_a^2) |t|} sum |f||g| F_a.
double perturbed_bound(const Field& f, const Field& g, double t, const DecayCertificate& cert, double kappa_a,
                       double c_conv, const DecayProfile& profile);
// On-site form: c_a e^{(v_a + c_a kappa C_a) |t|} sum |f||g| F_a.
double perturbed_bound_onsite(const Field& f, const Field& g, double t, const DecayCertificate& cert, double kappa,
                              double c_conv, const DecayProfile& profile);

// Growth rates of the perturbed bounds: v_a + c_a kappa_a C_a^2 in general,
// v_a + c_a kappa C_a for on-site families.
double perturbed_rate(const DecayCertificate& cert, double kappa_a, double c_conv);
double perturbed_rate_onsite(const DecayCertificate& cert, double kappa, double c_conv);

// M c_a |t| e^{rate |t|} sum_x |f(x)| sum_{y in box(L_n) \ box(L_m)} F_a(|x - y|)
// with rate = perturbed_rate(cert, kappa_a, C_a). Throws std::invalid_argument
// if n < m or an index is out of range.
double convergence_tail(const Field& f, const VolumeSequence& seq, std::size_t n, std::size_t m, double t, double M,
                        const DecayCertificate& cert, double kappa_a, double c_conv, const DecayProfile& profile);
double convergence_tail_with_rate(const Field& f, const VolumeSequence& seq, std::size_t n, std::size_t m, double t,
                                  double M, const DecayCertificate& cert, double rate, const DecayProfile& profile);

// Same tail for an explicit finite set of added sites, distances in `metric`.
double convergence_tail_sites(const Field& f, const std::vector<Site>& added, const LatticeGeometry& metric, double t,
                              double M, const DecayCertificate& cert, double rate, const DecayProfile& profile);

}  // namespace lrl

#endif  // LRLATTICE_PERTURBATIONS_HPP
