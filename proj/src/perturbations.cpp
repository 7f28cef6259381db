#include "lrlattice/perturbations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lrlattice/compensated_sum.hpp"
#include "lrlattice/errors.hpp"

namespace lrl {

namespace {

bool is_negation(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != -b[i]) return false;
  }
  return true;
}

void check_atom(const WeylAtom& atom, std::size_t support_size) {
  if (atom.z.size() != support_size) throw std::invalid_argument("atom z has a different length than its support");
  if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) throw std::invalid_argument("atom weights must be positive");
  for (const cplx& v : atom.z) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::invalid_argument("atom z must be finite");
  }
}

}  // namespace

AtomicWeylMeasure::AtomicWeylMeasure(std::vector<Site> support, std::vector<WeylAtom> representatives)
    : support_(std::move(support)), reps_(std::move(representatives)) {
  if (support_.empty()) throw std::invalid_argument("measure support must not be empty");
  std::set<Site> seen(support_.begin(), support_.end());
  if (seen.size() != support_.size()) throw std::invalid_argument("measure support lists a site twice");
  for (const auto& a : reps_) check_atom(a, support_.size());
}

AtomicWeylMeasure AtomicWeylMeasure::from_atoms(std::vector<Site> support, const std::vector<WeylAtom>& atoms) {
  for (const auto& a : atoms) check_atom(a, support.size());
  std::vector<WeylAtom> reps;
  std::vector<bool> used(atoms.size(), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (used[j] || !is_negation(atoms[i].z, atoms[j].z)) continue;
      if (atoms[i].weight != atoms[j].weight) {
        throw std::invalid_argument("atoms z and -z listed with different weights: the measure is not even");
      }
      used[j] = true;
      break;
    }
    reps.push_back(atoms[i]);
  }
  return AtomicWeylMeasure(std::move(support), std::move(reps));
}

AtomicWeylMeasure AtomicWeylMeasure::cosine(const Site& x, cplx z, double weight) {
  return AtomicWeylMeasure({x}, {WeylAtom{{z}, weight}});
}

void AtomicWeylMeasure::for_each_atom(const std::function<void(const std::vector<cplx>&, double)>& visit) const {
  std::vector<cplx> neg;
  for (const auto& a : reps_) {
    visit(a.z, a.weight);
    neg.resize(a.z.size());
    for (std::size_t i = 0; i < a.z.size(); ++i) neg[i] = -a.z[i];
    visit(neg, a.weight);
  }
}

double AtomicWeylMeasure::total_mass() const {
  NeumaierSum<double> s;
  for (const auto& a : reps_) s += 2.0 * a.weight;
  return s.value();
}

PerturbationFamily::PerturbationFamily(LatticeGeometry volume) : volume_(volume) {}

void PerturbationFamily::add(AtomicWeylMeasure measure) {
  for (const Site& x : measure.support()) {
    if (!volume_.contains(x)) throw std::invalid_argument("perturbation support site outside the volume");
  }
  measures_.push_back(std::move(measure));
}

bool PerturbationFamily::on_site() const {
  return std::all_of(measures_.begin(), measures_.end(), [](const auto& m) { return m.support().size() == 1; });
}

PerturbationFamily PerturbationFamily::restricted_to(const std::function<bool(const Site&)>& region) const {
  PerturbationFamily out(volume_);
  for (const auto& m : measures_) {
    if (std::all_of(m.support().begin(), m.support().end(), region)) out.measures_.push_back(m);
  }
  return out;
}

PerturbationFamily PerturbationFamily::uniform_cosine(const LatticeGeometry& volume, cplx z, double weight) {
  PerturbationFamily fam(volume);
  for (std::size_t i = 0; i < volume.size(); ++i) fam.add(AtomicWeylMeasure::cosine(volume.site(i), z, weight));
  return fam;
}

namespace {

Site site_from_json(const nlohmann::json& j, int d) {
  Site x{};
  if (j.is_number_integer()) {
    if (d != 1) throw std::invalid_argument("scalar site given for dimension > 1");
    x[0] = j.get<int>();
    return x;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw std::invalid_argument("site must have d integer coordinates");
  for (int a = 0; a < d; ++a) x[a] = j.at(a).get<int>();
  return x;
}

}  // namespace

PerturbationFamily family_from_json(const nlohmann::json& doc, const LatticeGeometry& volume) {
  if (!doc.is_array()) throw std::invalid_argument("perturbation file must hold a JSON list of terms");
  const int d = volume.dimension();
  PerturbationFamily fam(volume);
  for (const auto& term : doc) {
    for (const auto& [key, value] : term.items()) {
      if (key != "sites" && key != "atoms") throw std::invalid_argument("unknown key in perturbation term: " + key);
    }
    std::vector<Site> support;
    for (const auto& s : term.at("sites")) support.push_back(site_from_json(s, d));
    std::vector<WeylAtom> atoms;
    for (const auto& a : term.at("atoms")) {
      for (const auto& [key, value] : a.items()) {
        if (key != "z" && key != "weight") throw std::invalid_argument("unknown key in perturbation atom: " + key);
      }
      WeylAtom atom;
      atom.weight = a.at("weight").get<double>();
      for (const auto& z : a.at("z")) {
        if (!z.is_array() || z.size() != 2) throw std::invalid_argument("atom z entries must be [re, im] pairs");
        atom.z.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
      }
      atoms.push_back(std::move(atom));
    }
    fam.add(AtomicWeylMeasure::from_atoms(std::move(support), atoms));
  }
  return fam;
}

PerturbationFamily load_family(const std::string& path, const LatticeGeometry& volume) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open perturbation file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("perturbation file is not valid JSON: " + std::string(e.what()));
  }
  return family_from_json(doc, volume);
}

nlohmann::json family_to_json(const PerturbationFamily& family) {
  nlohmann::json doc = nlohmann::json::array();
  const int d = family.volume().dimension();
  for (const auto& m : family.measures()) {
    nlohmann::json term;
    term["sites"] = nlohmann::json::array();
    for (const Site& x : m.support()) term["sites"].push_back(std::vector<int>(x.begin(), x.begin() + d));
    term["atoms"] = nlohmann::json::array();
    for (const auto& a : m.representatives()) {
      nlohmann::json atom;
      atom["weight"] = a.weight;
      atom["z"] = nlohmann::json::array();
      for (const cplx& v : a.z) atom["z"].push_back({v.real(), v.imag()});
      term["atoms"].push_back(atom);
    }
    doc.push_back(term);
  }
  return doc;
}

VolumeSequence::VolumeSequence(std::vector<int> half_sides) : half_sides_(std::move(half_sides)) {
  if (half_sides_.empty()) throw std::invalid_argument("volume sequence must not be empty");
  for (std::size_t i = 0; i < half_sides_.size(); ++i) {
    if (half_sides_[i] < 1) throw std::invalid_argument("box half-sides must be >= 1");
    if (i > 0 && half_sides_[i] <= half_sides_[i - 1]) throw std::invalid_argument("box half-sides must increase strictly");
  }
}

bool VolumeSequence::in_box(const Site& x, int dimension, int half_side) {
  for (int a = 0; a < dimension; ++a) {
    if (x[a] <= -half_side || x[a] > half_side) return false;
  }
  return true;
}

double second_moment(const PerturbationFamily& family) {
  if (!family.on_site()) throw std::invalid_argument("second_moment needs an on-site family; use pair_moment");
  std::map<Site, NeumaierSum<double>> per_site;
  for (const auto& m : family.measures()) {
    m.for_each_atom([&](const std::vector<cplx>& z, double w) { per_site[m.support()[0]] += std::norm(z[0]) * w; });
  }
  double kappa = 0.0;
  for (const auto& [x, s] : per_site) kappa = std::max(kappa, s.value());
  return kappa;
}

namespace {

using PairKey = std::pair<Site, Site>;

std::map<PairKey, NeumaierSum<double>> pair_numerators(const PerturbationFamily& family) {
  std::map<PairKey, NeumaierSum<double>> num;
  for (const auto& m : family.measures()) {
    const auto& sup = m.support();
    m.for_each_atom([&](const std::vector<cplx>& z, double w) {
      for (std::size_t i = 0; i < sup.size(); ++i) {
        for (std::size_t j = 0; j < sup.size(); ++j) num[{sup[i], sup[j]}] += std::abs(z[i]) * std::abs(z[j]) * w;
      }
    });
  }
  return num;
}

bool in_window(const Site& x, int d, int window) {
  for (int a = 0; a < d; ++a) {
    if (std::abs(x[a]) > window) return false;
  }
  return true;
}

struct PairMax {
  double value = 0.0;
  Site x1{}, x2{};
};

PairMax pair_max(const std::vector<std::pair<PairKey, double>>& entries, const LatticeGeometry& metric,
                 const DecayProfile& profile, int window) {
  const int d = metric.dimension();
  std::vector<double> ratio(entries.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(entries.size()); ++i) {
    const auto& [key, numerator] = entries[i];
    if (!in_window(key.first, d, window) || !in_window(key.second, d, window)) continue;
    ratio[i] = numerator / profile(distance(metric, key.first, key.second));
  }
  PairMax best;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (ratio[i] > best.value) best = {ratio[i], entries[i].first.first, entries[i].first.second};
  }
  return best;
}

}  // namespace

PairMoment pair_moment(const PerturbationFamily& family, const DecayProfile& profile, int window) {
  if (window < 0) throw std::invalid_argument("pair_moment window must be >= 0");
  if (profile.dimension() != family.volume().dimension()) throw std::invalid_argument("decay profile dimension mismatch");
  std::vector<std::pair<PairKey, double>> entries;
  for (const auto& [key, s] : pair_numerators(family)) entries.emplace_back(key, s.value());
  const PairMax full = pair_max(entries, family.volume(), profile, window);
  const PairMax half = pair_max(entries, family.volume(), profile, window / 2);
  PairMoment out;
  out.kappa_a = full.value;
  out.worst_x1 = full.x1;
  out.worst_x2 = full.x2;
  out.half_window_value = half.value;
  out.stabilized = std::abs(full.value - half.value) <= 1e-9 * std::max(full.value, 1e-300) || full.value == 0.0;
  return out;
}

double first_moment(const PerturbationFamily& family) {
  std::map<Site, NeumaierSum<double>> per_site;
  for (const auto& m : family.measures()) {
    const auto& sup = m.support();
    m.for_each_atom([&](const std::vector<cplx>& z, double w) {
      for (std::size_t i = 0; i < sup.size(); ++i) per_site[sup[i]] += std::abs(z[i]) * w;
    });
  }
  double M = 0.0;
  for (const auto& [x, s] : per_site) M = std::max(M, s.value());
  return M;
}

double empirical_a1(const PerturbationFamily& family, const DecayProfile& profile, int window,
                    const std::vector<double>& a_grid) {
  double best = 0.0;
  for (double a : a_grid) {
    if (pair_moment(family, profile.with_rate(a), window).stabilized) best = std::max(best, a);
  }
  return best;
}

namespace {

double weighted_pair_sum(const Field& f, const Field& g, const DecayProfile& profile) {
  if (!f.geometry().compatible(g.geometry())) throw std::invalid_argument("labels on incompatible geometries");
  NeumaierSum<double> sum;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fa = std::abs(f.values()[i]);
    if (fa == 0.0) continue;
    const Site x = f.geometry().site(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double ga = std::abs(g.values()[j]);
      if (ga != 0.0) sum += fa * ga * profile(distance(f.geometry(), x, g.geometry().site(j)));
    }
  }
  return sum.value();
}

}  // namespace

double perturbed_rate(const DecayCertificate& cert, double kappa_a, double c_conv) {
  return cert.v_a + cert.c_a * kappa_a * c_conv * c_conv;
}

double perturbed_rate_onsite(const DecayCertificate& cert, double kappa, double c_conv) {
  return cert.v_a + cert.c_a * kappa * c_conv;
}

double perturbed_bound(const Field& f, const Field& g, double t, const DecayCertificate& cert, double kappa_a,
                       double c_conv, const DecayProfile& profile) {
  return cert.c_a * std::exp(perturbed_rate(cert, kappa_a, c_conv) * std::abs(t)) * weighted_pair_sum(f, g, profile);
}

double perturbed_bound_onsite(const Field& f, const Field& g, double t, const DecayCertificate& cert, double kappa,
                              double c_conv, const DecayProfile& profile) {
  return cert.c_a * std::exp(perturbed_rate_onsite(cert, kappa, c_conv) * std::abs(t)) *
         weighted_pair_sum(f, g, profile);
}

double convergence_tail_sites(const Field& f, const std::vector<Site>& added, const LatticeGeometry& metric, double t,
                              double M, const DecayCertificate& cert, double rate, const DecayProfile& profile) {
  NeumaierSum<double> sum;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fa = std::abs(f.values()[i]);
    if (fa == 0.0) continue;
    const Site x = f.geometry().site(i);
    NeumaierSum<double> inner;
    for (const Site& y : added) inner += profile(distance(metric, x, y));
    sum += fa * inner.value();
  }
  return M * cert.c_a * std::abs(t) * std::exp(rate * std::abs(t)) * sum.value();
}

double convergence_tail_with_rate(const Field& f, const VolumeSequence& seq, std::size_t n, std::size_t m, double t,
                                  double M, const DecayCertificate& cert, double rate, const DecayProfile& profile) {
  if (n < m) throw std::invalid_argument("convergence_tail needs m <= n");
  if (n >= seq.size()) throw std::invalid_argument("volume index out of range");
  if (f.geometry().is_torus()) throw std::invalid_argument("convergence_tail works with Z^d labels");
  if (n == m) return 0.0;
  const int d = f.dimension();
  const int ln = seq.half_sides()[n];
  const int lm = seq.half_sides()[m];
  // (-L_n, L_n]^d enumerated lexicographically, minus the inner box
  const auto box = LatticeGeometry::torus(d, ln);
  std::vector<Site> shell;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site y = box.site(i);
    if (!VolumeSequence::in_box(y, d, lm)) shell.push_back(y);
  }
  return convergence_tail_sites(f, shell, LatticeGeometry::infinite(d, ln + 1), t, M, cert, rate, profile);
}

double convergence_tail(const Field& f, const VolumeSequence& seq, std::size_t n, std::size_t m, double t, double M,
                        const DecayCertificate& cert, double kappa_a, double c_conv, const DecayProfile& profile) {
  return convergence_tail_with_rate(f, seq, n, m, t, M, cert, perturbed_rate(cert, kappa_a, c_conv), profile);
}

}  // namespace lrl
