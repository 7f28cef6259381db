#ifndef LRLATTICE_FIELD_HPP
#define LRLATTICE_FIELD_HPP

#include <complex>
#include <vector>

#include "lrlattice/lattice.hpp"

namespace lrl {

using cplx = std::complex<double>;

// Complex function on the sites of a geometry. On Z^d the geometry is a
// finite window [-R, R]^d and the field is zero outside it; Re f pairs with
// the positions and Im f with the momenta of a Weyl label.
class Field {
 public:
  explicit Field(LatticeGeometry geometry);
  Field(LatticeGeometry geometry, std::vector<cplx> values);

  static Field delta(const LatticeGeometry& geometry, const Site& x, cplx value = 1.0);

  const LatticeGeometry& geometry() const { return geometry_; }
  int dimension() const { return geometry_.dimension(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }

  // Zero outside an infinite-mode window; torus sites are wrapped.
  cplx operator()(const Site& x) const;
  void set(const Site& x, cplx value);
  void add(const Site& x, cplx value);

  Field conj() const;
  Field real_part() const;
  Field imag_part() const;  // returned as a real field

  double l1_norm() const;
  double l2_norm() const;
  // Sum of Re f over all sites.
  double position_sum() const;
  bool is_zero() const;
  // Largest l1 norm of a site carrying a nonzero entry; -1 for the zero field.
  int support_radius() const;

  // Copy into another compatible geometry (infinite mode: a different
  // window). Throws std::domain_error if nonzero entries would be dropped.
  Field embed(const LatticeGeometry& target) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx s);

 private:
  int l1_norm_of(std::size_t i) const;

  LatticeGeometry geometry_;
  std::vector<cplx> values_;
};

Field operator+(const Field& f, const Field& g);
Field operator-(const Field& f, const Field& g);
Field operator-(const Field& f);
Field operator*(cplx s, const Field& f);

// sigma(f, g) = Im sum_x conj(f(x)) g(x). Throws std::invalid_argument for
// incompatible geometries.
double symplectic_form(const Field& f, const Field& g);

// l2 norm of f - g over the union of the two windows.
double l2_distance(const Field& f, const Field& g);
// max_x |f(x) - g(x)| over the sites of `region` (an infinite window or torus).
double max_abs_difference(const Field& f, const Field& g, const LatticeGeometry& region);

}  // namespace lrl

#endif  // LRLATTICE_FIELD_HPP
