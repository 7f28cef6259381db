#ifndef LRLATTICE_WEYL_HPP
#define LRLATTICE_WEYL_HPP

// Weyl operators W(f) as (phase, label) pairs with
//   W(f) W(g) = e^{-i sigma(f,g)/2} W(f + g),   W(f)* = W(-f),
// the free dynamics tau_t(W(f)) = W(T_t f), and the vacuum state
//   rho(W(f)) = exp(-||(U* - V*) f||^2 / 4)
// on a torus.

#include <vector>

#include "lrlattice/field.hpp"
#include "lrlattice/harmonic.hpp"

namespace lrl {

class WeylOperator {
 public:
  explicit WeylOperator(Field label, cplx phase = 1.0);
  static WeylOperator identity(const LatticeGeometry& geometry);

  const Field& label() const { return label_; }
  cplx phase() const { return phase_; }

 private:
  Field label_;
  cplx phase_;
};

WeylOperator multiply(const WeylOperator& a, const WeylOperator& b);
WeylOperator adjoint(const WeylOperator& a);
// Left fold of multiply over a non-empty word.
WeylOperator reduce_word(const std::vector<WeylOperator>& word);

// Torus labels use the spectral propagator, Z^d labels the certified
// convolution propagator.
Field evolve_label(const Field& f, const HarmonicParameters& params, double t, const ConvolutionOptions& options = {});
WeylOperator free_evolve(const WeylOperator& a, const HarmonicParameters& params, double t,
                         const ConvolutionOptions& options = {});

// |1 - e^{i sigma(T_t f, g)}|, the norm of [tau_t(W(f)), W(g)].
double commutator_norm(const Field& f, const Field& g, const HarmonicParameters& params, double t,
                       const ConvolutionOptions& options = {});
double commutator_norm_from_sigma(double sigma);

class QuasiFreeState {
 public:
  // zero_outside_domain: at w = 0, return 0 for labels outside the massless
  // domain instead of throwing D0ViolationError.
  QuasiFreeState(HarmonicParameters params, LatticeGeometry torus, bool zero_outside_domain = false);

  const HarmonicParameters& params() const { return params_; }
  const LatticeGeometry& geometry() const { return geometry_; }
  bool zero_outside_domain() const { return zero_outside_domain_; }

  // ||(U* - V*) f||^2 = sum_k |g^{1/2} F(Im f)(k) - i g^{-1/2} F(Re f)(k)|^2.
  double quadratic_form(const Field& f) const;
  // Same quantity from the literal composition of the U, V maps (w > 0).
  double quadratic_form_composed(const Field& f) const;

 private:
  HarmonicParameters params_;
  LatticeGeometry geometry_;
  bool zero_outside_domain_;
};

cplx state_eval(const QuasiFreeState& state, const WeylOperator& a);

// rho(W(g1) W(T_t f) W(g2)), with the phase fixed by the Weyl relation.
cplx three_point(const QuasiFreeState& state, const Field& g1, const Field& f, const Field& g2, double t);

struct ContinuityScan {
  std::vector<double> spacings;  // h_n = (t1 - t0) / 2^(n + 1)
  std::vector<double> moduli;    // max_{grid} |F(s + h_n) - F(s)|
  std::vector<double> ratios;    // moduli[n - 1] / moduli[n]
};

// Modulus of continuity of t -> three_point(g1, f, g2, t) on [t0, t1] along
// successively halved grids.
ContinuityScan three_point_continuity(const QuasiFreeState& state, const Field& g1, const Field& f, const Field& g2,
                                      double t0, double t1, int levels);

}  // namespace lrl

#endif  // LRLATTICE_WEYL_HPP
