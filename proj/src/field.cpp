#include "lrlattice/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrlattice/compensated_sum.hpp"

namespace lrl {

Field::Field(LatticeGeometry geometry) : geometry_(geometry), values_(geometry.size()) {}

Field::Field(LatticeGeometry geometry, std::vector<cplx> values)
    : geometry_(geometry), values_(std::move(values)) {
  if (values_.size() != geometry_.size()) throw std::invalid_argument("field value count does not match geometry");
}

Field Field::delta(const LatticeGeometry& geometry, const Site& x, cplx value) {
  Field f(geometry);
  f.set(x, value);
  return f;
}

cplx Field::operator()(const Site& x) const {
  const Site y = geometry_.wrap(x);
  if (!geometry_.contains(y)) return 0.0;
  return values_[geometry_.index(y)];
}

void Field::set(const Site& x, cplx value) { values_[geometry_.index(geometry_.wrap(x))] = value; }

void Field::add(const Site& x, cplx value) { values_[geometry_.index(geometry_.wrap(x))] += value; }

Field Field::conj() const {
  Field out(geometry_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = std::conj(values_[i]);
  return out;
}

Field Field::real_part() const {
  Field out(geometry_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = values_[i].real();
  return out;
}

Field Field::imag_part() const {
  Field out(geometry_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = values_[i].imag();
  return out;
}

double Field::l1_norm() const {
  NeumaierSum<double> s;
  for (const auto& v : values_) s += std::abs(v);
  return s.value();
}

double Field::l2_norm() const {
  NeumaierSum<double> s;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s.value());
}

double Field::position_sum() const {
  NeumaierSum<double> s;
  for (const auto& v : values_) s += v.real();
  return s.value();
}

bool Field::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](cplx v) { return v == cplx(0.0); });
}

int Field::support_radius() const {
  int r = -1;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != cplx(0.0)) r = std::max(r, l1_norm_of(i));
  }
  return r;
}

int Field::l1_norm_of(std::size_t i) const { return lrl::l1_norm(geometry_.site(i), geometry_.dimension()); }

Field Field::embed(const LatticeGeometry& target) const {
  if (!geometry_.compatible(target)) throw std::invalid_argument("cannot embed field into incompatible geometry");
  if (target == geometry_) return *this;
  Field out(target);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == cplx(0.0)) continue;
    const Site x = geometry_.site(i);
    if (!target.contains(x)) throw std::domain_error("embedding would drop nonzero field entries");
    out.values_[target.index(x)] = values_[i];
  }
  return out;
}

namespace {

LatticeGeometry union_geometry(const LatticeGeometry& a, const LatticeGeometry& b) {
  if (!a.compatible(b)) throw std::invalid_argument("fields live on incompatible geometries");
  return a.extent() >= b.extent() ? a : b;
}

}  // namespace

Field& Field::operator+=(const Field& other) {
  const auto g = union_geometry(geometry_, other.geometry_);
  if (!(g == geometry_)) *this = embed(g);
  if (other.geometry_ == geometry_) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  } else {
    for (std::size_t i = 0; i < other.values_.size(); ++i) {
      if (other.values_[i] != cplx(0.0)) values_[geometry_.index(other.geometry_.site(i))] += other.values_[i];
    }
  }
  return *this;
}

Field& Field::operator-=(const Field& other) { return *this += -other; }

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(const Field& f, const Field& g) {
  Field out = f;
  out += g;
  return out;
}

Field operator-(const Field& f, const Field& g) {
  Field out = f;
  out -= g;
  return out;
}

Field operator-(const Field& f) {
  Field out = f;
  out *= -1.0;
  return out;
}

Field operator*(cplx s, const Field& f) {
  Field out = f;
  out *= s;
  return out;
}

double symplectic_form(const Field& f, const Field& g) {
  if (!f.geometry().compatible(g.geometry())) throw std::invalid_argument("symplectic form of fields on incompatible geometries");
  const Field& small = f.geometry().extent() <= g.geometry().extent() ? f : g;
  NeumaierSum<double> s;
  if (f.geometry() == g.geometry()) {
    for (std::size_t i = 0; i < f.size(); ++i) s += std::imag(std::conj(f.values()[i]) * g.values()[i]);
  } else {
    for (std::size_t i = 0; i < small.size(); ++i) {
      const Site x = small.geometry().site(i);
      s += std::imag(std::conj(f(x)) * g(x));
    }
  }
  return s.value();
}

double l2_distance(const Field& f, const Field& g) { return (f - g).l2_norm(); }

double max_abs_difference(const Field& f, const Field& g, const LatticeGeometry& region) {
  double m = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const Site x = region.site(i);
    m = std::max(m, std::abs(f(x) - g(x)));
  }
  return m;
}

}  // namespace lrl
