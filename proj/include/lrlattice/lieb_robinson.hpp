#ifndef LRLATTICE_LIEB_ROBINSON_HPP
#define LRLATTICE_LIEB_ROBINSON_HPP

#include <vector>

#include "lrlattice/harmonic.hpp"
#include "lrlattice/lattice.hpp"

namespace lrl {

inline constexpr double kKernelBoundSlack = 1e-9;

struct KernelBoundCheck {
  double max_ratio = 0.0;
  int worst_m = 0;
  double worst_t = 0.0;
  double worst_mu = 0.0;
  Site worst_x{};
  // max |quadrature - series| over points where both are evaluated
  double quadrature_discrepancy = 0.0;
  bool pass() const { return max_ratio <= 1.0 + kKernelBoundSlack; }
};

// max over m, mu, t and |x|_1 <= window of |H_t^(m)(x)| / envelope. Kernel
// values come from the lattice series; the quadrature kernels are evaluated
// alongside and their largest deviation from the series is reported.
KernelBoundCheck verify_kernel_bounds(const HarmonicParameters& params, const std::vector<double>& mus,
                                      const std::vector<double>& t_grid, int window,
                                      const QuadratureSpec& quad = {});

struct DecayCertificate {
  double a = 0.0;
  double mu = 0.0;
  double eta = 0.0;             // mu - a
  double velocity_bound = 0.0;  // c max(2/mu, e^{mu/2 + 1})
  double prefactor = 0.0;       // 1 + 2 e^{mu/2} c + 2 / c
  double absorption = 0.0;      // sup_r (1+r)^{d+eps} e^{-eta r}
  double c_a = 0.0;             // prefactor * absorption
  double v_a = 0.0;             // mu * velocity_bound
  double a0 = 0.0;              // +inf for this model
  double a1 = 0.0;              // filled in from a perturbation family, 0 if unknown
};

// c_a, v_a with |sigma(T_t f, g)| <= c_a e^{v_a |t|} sum |f(x)| |g(y)| F_a(|x - y|).
// Requires mu > a = profile.a(); throws std::invalid_argument otherwise.
DecayCertificate derive_constants(const HarmonicParameters& params, const DecayProfile& profile, double mu);
DecayCertificate derive_constants_default(const HarmonicParameters& params, const DecayProfile& profile,
                                          double eta = 1.0);

// Right-hand side c_a e^{v_a |t|} sum_{x,y} |f(x)| |g(y)| F_a(d(x, y)).
double harmonic_bound(const Field& f, const Field& g, double t, const DecayCertificate& cert,
                      const DecayProfile& profile);

// min over mu of prefactor(mu) e^{-mu (r - v(mu) |t|)}, the pointwise bound
// for commutators of delta labels at distance r.
double pointwise_bound(const HarmonicParameters& params, const std::vector<double>& mus, double t, int r);

inline const std::vector<double> kDefaultMuGrid{0.25, 0.5, 1.0, 2.0, 4.0};

enum class ProbeKind { position, momentum };  // g = delta_x or i delta_x

struct ConeScan {
  HarmonicParameters params;
  std::vector<int> x;        // -x_max .. x_max (d = 1 axis, or first axis)
  std::vector<double> t;
  std::vector<std::vector<double>> values;  // values[ti][xi]
  double threshold = 0.1;
  ProbeKind probe = ProbeKind::position;
};

// Commutator norms |1 - e^{i sigma(T_t delta_0, g)}| with g on the first
// axis, |x| <= x_max. Parallel over time slices and cells.
ConeScan cone_scan(const HarmonicParameters& params, int x_max, const std::vector<double>& t_grid,
                   double threshold = 0.1, ProbeKind probe = ProbeKind::position,
                   const ConvolutionOptions& options = {});

struct VelocityEstimate {
  double velocity = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;  // root-mean-square residual of the front positions
  std::vector<double> t;
  std::vector<double> front;
};

// Front x_theta(t) = max{|x| : value >= theta}; least-squares slope over
// slices with a crossing. Throws std::runtime_error with fewer than 3.
VelocityEstimate estimate_velocity(const ConeScan& scan);
VelocityEstimate estimate_velocity(const ConeScan& scan, double threshold);

}  // namespace lrl

#endif  // LRLATTICE_LIEB_ROBINSON_HPP
