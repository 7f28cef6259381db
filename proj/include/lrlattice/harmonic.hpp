#ifndef LRLATTICE_HARMONIC_HPP
#define LRLATTICE_HARMONIC_HPP

// Dispersion, Bogoliubov multipliers, the kernels H_t^(m) and the symplectic
// propagator T_t for H = sum_x p_x^2 + w^2 q_x^2 + sum_{x,j} l_j (q_x - q_{x+e_j})^2.
//
// Kernels are H_t^(m)(x) = (2 pi)^-d int cos(k.x) m_t(k) dk with the real,
// even multipliers
//   m = 0:  cos(2 g t)      m = -1:  -sin(2 g t) / g      m = 1:  -g sin(2 g t)
// and the propagator on Z^d is
//   T_t f = f * conj(H0 + i/2 (H-1 + H1)) + conj(f) * (i/2 (H1 - H-1)).

#include <array>
#include <vector>

#include "lrlattice/field.hpp"
#include "lrlattice/lattice.hpp"

namespace lrl {

using Momentum = std::array<double, kMaxDim>;

struct HarmonicParameters {
  double omega = 1.0;
  std::vector<double> lambda;  // one coupling per axis

  int dimension() const { return static_cast<int>(lambda.size()); }
  // c = (w^2 + 4 sum_j l_j)^(1/2)
  double c() const;
  // gamma(k)^2 = w^2 + 4 sum_j l_j sin^2(k_j / 2)
  double gamma_squared(const Momentum& k) const;
  // Throws std::invalid_argument on negative parameters, d outside
  // [1, kMaxDim] or c = 0.
  void validate() const;
};

double gamma(const HarmonicParameters& params, const Momentum& k);

struct BogoliubovMultipliers {
  double gamma_plus;   // g^(-1/2) + g^(1/2)
  double gamma_minus;  // g^(-1/2) - g^(1/2)
};

// Throws SingularPointError when gamma vanishes (w = 0, k = 0).
BogoliubovMultipliers bogoliubov_multipliers(const HarmonicParameters& params, const Momentum& k);
BogoliubovMultipliers multipliers_from_gamma(double g);

// m_t(g) for m in {-1, 0, 1}; finite at g = 0.
double kernel_multiplier(int m, double g, double t);

struct QuadratureSpec {
  int points_per_axis = 16;
  double refinement_tolerance = 1e-12;
  int max_refinements = 10;

  void validate() const;
};

// Half-cell offset nodes k_j = -pi + (j + 1/2) 2 pi / M; k = 0 is never a node.
std::vector<double> quadrature_nodes(int points_per_axis);

struct Kernel {
  int m = 0;
  double t = 0.0;
  LatticeGeometry window = LatticeGeometry::infinite(1, 1);  // cube [-R, R]^d
  std::vector<double> samples;                               // indexed like window
  int quadrature_points_per_axis = 0;
  double est_quadrature_error = 0.0;

  int window_radius() const { return window.extent(); }
  // Zero outside the window.
  double operator()(const Site& x) const;
};

// Grid sum at a fixed resolution M (even), no refinement. Separable
// axis-by-axis contraction, OpenMP-parallel.
std::array<std::vector<double>, 3> kernel_grid_sums(const HarmonicParameters& params, double t, int window,
                                                    int points_per_axis);

// All three kernels, index m + 1. M starts at max(quad.points_per_axis,
// 2 (window + 1)) and doubles until successive grids agree to the tolerance.
std::array<Kernel, 3> compute_kernels(const HarmonicParameters& params, double t, int window,
                                      const QuadratureSpec& quad = {});
Kernel compute_kernel(const HarmonicParameters& params, int m, double t, int window,
                      const QuadratureSpec& quad = {});

// Kernels from the Taylor series of the multipliers in powers of the lattice
// operator S with symbol gamma^2, evaluated exactly on the lattice in long
// double. Accurate far outside the light cone, where grid quadrature only
// resolves roundoff.
struct SeriesKernels {
  LatticeGeometry window = LatticeGeometry::infinite(1, 1);
  std::array<std::vector<long double>, 3> values;  // index m + 1
  int terms = 0;

  long double operator()(int m, const Site& x) const;
};

SeriesKernels series_kernels(const HarmonicParameters& params, double t, int window);

// Exponential envelope: |H_t^(m)(x)| <= A_m e^{-mu (|x| - v |t|)} with
// v = c max(2 / mu, e^{mu/2 + 1}), A_0 = 1, A_-1 = 1 / c, A_1 = c e^{mu/2}.
double velocity_bound(double c, double mu);
double kernel_envelope(const HarmonicParameters& params, int m, double mu, double t, int l1_distance);

struct ConvolutionOptions {
  double tolerance = 1e-12;     // certified l1 truncation error of T_t f
  int max_kernel_window = 2048;
  QuadratureSpec quad{};
};

// Smallest kernel radius R with sum_{|z| > R} (|H0| + |H-1| + |H1|)(z) <= tol,
// minimising the envelope bound over mu. Throws WindowTooSmallError carrying
// the minimal radius when it exceeds max_window.
int certified_kernel_radius(const HarmonicParameters& params, double t, double tol, int max_window);

struct PropagatorKernels {
  double t = 0.0;
  std::array<Kernel, 3> h;
  int radius = 0;
};

PropagatorKernels make_propagator_kernels(const HarmonicParameters& params, double t, int radius,
                                          const QuadratureSpec& quad = {});

// Convolution with precomputed kernels; the output window is
// support_radius(f) + kernel radius. f must be an infinite-mode field.
Field apply_convolution(const Field& f, const PropagatorKernels& kernels);

Field apply_propagator_convolution(const Field& f, const HarmonicParameters& params, double t,
                                   const ConvolutionOptions& options = {});

// Exact evolution on a torus via unitary DFTs. At w = 0 the position part must
// have zero mean (D0ViolationError otherwise).
Field apply_propagator_torus(const Field& f, const HarmonicParameters& params, double t);

// The factors of T_t = (U + V) F^-1 M_t F (U* - V*) on a torus, w > 0:
//   U f = (i/2) G+ f,  U* f = -(i/2) G+ f,  V f = V* f = (i/2) G- conj(f),
// with G+- the convolutions with multiplier Gamma_+-.
Field bogoliubov_u(const Field& f, const HarmonicParameters& params);
Field bogoliubov_u_adjoint(const Field& f, const HarmonicParameters& params);
Field bogoliubov_v(const Field& f, const HarmonicParameters& params);
Field free_multiplier(const Field& f, const HarmonicParameters& params, double t);  // F^-1 M_t F
Field apply_propagator_torus_composed(const Field& f, const HarmonicParameters& params, double t);

// |sum_x Re f(x)| <= 1e-12 ||f||_1
bool in_massless_domain(const Field& f);

}  // namespace lrl

#endif  // LRLATTICE_HARMONIC_HPP
