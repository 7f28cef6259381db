#include "lrlattice/weyl.hpp"

#include <cmath>
#include <stdexcept>

#include "lrlattice/compensated_sum.hpp"
#include "lrlattice/errors.hpp"
#include "torus_fft.hpp"

namespace lrl {

namespace {

cplx renormalize(cplx z) {
  const double r = std::abs(z);
  return r == 0.0 ? z : z / r;
}

}  // namespace

WeylOperator::WeylOperator(Field label, cplx phase) : label_(std::move(label)), phase_(renormalize(phase)) {
  if (std::abs(std::abs(phase) - 1.0) > 1e-8) throw std::invalid_argument("Weyl phase must have unit modulus");
}

WeylOperator WeylOperator::identity(const LatticeGeometry& geometry) { return WeylOperator(Field(geometry)); }

WeylOperator multiply(const WeylOperator& a, const WeylOperator& b) {
  const double s = symplectic_form(a.label(), b.label());
  return WeylOperator(a.label() + b.label(), a.phase() * b.phase() * std::polar(1.0, -0.5 * s));
}

WeylOperator adjoint(const WeylOperator& a) { return WeylOperator(-a.label(), std::conj(a.phase())); }

WeylOperator reduce_word(const std::vector<WeylOperator>& word) {
  if (word.empty()) throw std::invalid_argument("empty Weyl word");
  WeylOperator acc = word.front();
  for (std::size_t i = 1; i < word.size(); ++i) acc = multiply(acc, word[i]);
  return acc;
}

Field evolve_label(const Field& f, const HarmonicParameters& params, double t, const ConvolutionOptions& options) {
  if (f.geometry().is_torus()) return apply_propagator_torus(f, params, t);
  return apply_propagator_convolution(f, params, t, options);
}

WeylOperator free_evolve(const WeylOperator& a, const HarmonicParameters& params, double t,
                         const ConvolutionOptions& options) {
  return WeylOperator(evolve_label(a.label(), params, t, options), a.phase());
}

double commutator_norm_from_sigma(double sigma) { return 2.0 * std::abs(std::sin(0.5 * sigma)); }

double commutator_norm(const Field& f, const Field& g, const HarmonicParameters& params, double t,
                       const ConvolutionOptions& options) {
  return commutator_norm_from_sigma(symplectic_form(evolve_label(f, params, t, options), g));
}

QuasiFreeState::QuasiFreeState(HarmonicParameters params, LatticeGeometry torus, bool zero_outside_domain)
    : params_(std::move(params)), geometry_(torus), zero_outside_domain_(zero_outside_domain) {
  params_.validate();
  if (!geometry_.is_torus()) throw std::invalid_argument("the vacuum state is evaluated on a torus");
  if (geometry_.dimension() != params_.dimension()) throw std::invalid_argument("state geometry dimension mismatch");
}

double QuasiFreeState::quadratic_form(const Field& f) const {
  if (!(f.geometry() == geometry_)) throw std::invalid_argument("label geometry does not match the state");
  if (params_.omega == 0.0 && !in_massless_domain(f)) {
    throw D0ViolationError("omega = 0: label outside the massless domain (nonzero position mean)");
  }
  const detail::TorusFft fft(geometry_);
  auto buf = fft.to_buffer(f);
  fft.forward(buf);
  NeumaierSum<double> sum;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const cplx mirror = std::conj(buf[fft.mirror(i)]);
    const cplx a = 0.5 * (buf[i] + mirror);
    const cplx b = cplx(0.0, -0.5) * (buf[i] - mirror);
    const double g = gamma(params_, fft.momentum(i));
    // At g = 0 the position mean is zero in the massless domain; only the
    // momentum term survives and it carries the factor g^{1/2} = 0.
    if (g == 0.0) continue;
    const double r = std::sqrt(g);
    sum += std::norm(r * b - cplx(0.0, 1.0) * a / r);
  }
  return sum.value();
}

double QuasiFreeState::quadratic_form_composed(const Field& f) const {
  const Field h = bogoliubov_u_adjoint(f, params_) - bogoliubov_v(f, params_);
  const double n = h.l2_norm();
  return n * n;
}

cplx state_eval(const QuasiFreeState& state, const WeylOperator& a) {
  try {
    return a.phase() * std::exp(-0.25 * state.quadratic_form(a.label()));
  } catch (const D0ViolationError&) {
    if (state.zero_outside_domain()) return 0.0;
    throw;
  }
}

cplx three_point(const QuasiFreeState& state, const Field& g1, const Field& f, const Field& g2, double t) {
  const WeylOperator evolved(apply_propagator_torus(f, state.params(), t));
  const WeylOperator word = reduce_word({WeylOperator(g1), evolved, WeylOperator(g2)});
  return state_eval(state, word);
}

ContinuityScan three_point_continuity(const QuasiFreeState& state, const Field& g1, const Field& f, const Field& g2,
                                      double t0, double t1, int levels) {
  if (levels < 2) throw std::invalid_argument("continuity scan needs at least two levels");
  if (!(t1 > t0)) throw std::invalid_argument("continuity scan needs t1 > t0");
  const std::size_t fine = std::size_t{1} << levels;
  std::vector<cplx> values(fine + 1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i <= static_cast<std::ptrdiff_t>(fine); ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(fine);
    values[i] = three_point(state, g1, f, g2, t);
  }
  ContinuityScan scan;
  for (int n = 0; n < levels; ++n) {
    const std::size_t stride = fine >> (n + 1);
    double m = 0.0;
    for (std::size_t i = 0; i + stride <= fine; i += stride) m = std::max(m, std::abs(values[i + stride] - values[i]));
    scan.spacings.push_back((t1 - t0) / static_cast<double>(std::size_t{1} << (n + 1)));
    scan.moduli.push_back(m);
    if (n > 0) scan.ratios.push_back(scan.moduli[n - 1] / m);
  }
  return scan;
}

}  // namespace lrl
