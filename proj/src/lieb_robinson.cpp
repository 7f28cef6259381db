#include "lrlattice/lieb_robinson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrlattice/compensated_sum.hpp"
#include "lrlattice/weyl.hpp"

namespace lrl {

KernelBoundCheck verify_kernel_bounds(const HarmonicParameters& params, const std::vector<double>& mus,
                                      const std::vector<double>& t_grid, int window, const QuadratureSpec& quad) {
  params.validate();
  if (mus.empty() || t_grid.empty()) throw std::invalid_argument("kernel bound check needs mu and t grids");
  for (double mu : mus) {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  }
  const int d = params.dimension();
  KernelBoundCheck out;
  out.max_ratio = -1.0;
  for (double t : t_grid) {
    const SeriesKernels series = series_kernels(params, t, window);
    const auto quadk = compute_kernels(params, t, window, quad);
    for (std::size_t i = 0; i < series.window.size(); ++i) {
      const Site x = series.window.site(i);
      const int r = l1_norm(x, d);
      if (r > window) continue;
      for (int m = -1; m <= 1; ++m) {
        const double h = static_cast<double>(series.values[m + 1][i]);
        out.quadrature_discrepancy = std::max(out.quadrature_discrepancy, std::abs(h - quadk[m + 1].samples[i]));
        for (double mu : mus) {
          const double ratio = std::abs(h) / kernel_envelope(params, m, mu, t, r);
          if (ratio > out.max_ratio) {
            out.max_ratio = ratio;
            out.worst_m = m;
            out.worst_t = t;
            out.worst_mu = mu;
            out.worst_x = x;
          }
        }
      }
    }
  }
  return out;
}

namespace {

double absorption_constant(double p, double eta) {
  // sup_{r >= 0} (1+r)^p e^{-eta r}; interior maximum at 1 + r = p / eta
  if (p / eta <= 1.0) return 1.0;
  return std::pow(p / eta, p) * std::exp(eta - p);
}

}  // namespace

DecayCertificate derive_constants(const HarmonicParameters& params, const DecayProfile& profile, double mu) {
  params.validate();
  if (profile.dimension() != params.dimension()) throw std::invalid_argument("decay profile dimension mismatch");
  if (!(mu > profile.a())) {
    throw std::invalid_argument("no admissible mu: the envelope rate mu must exceed the decay rate a");
  }
  const double c = params.c();
  DecayCertificate cert;
  cert.a = profile.a();
  cert.mu = mu;
  cert.eta = mu - profile.a();
  cert.velocity_bound = velocity_bound(c, mu);
  cert.prefactor = 1.0 + 2.0 * std::exp(mu / 2.0) * c + 2.0 / c;
  cert.absorption = absorption_constant(profile.dimension() + profile.epsilon(), cert.eta);
  cert.c_a = cert.prefactor * cert.absorption;
  cert.v_a = mu * cert.velocity_bound;
  // Every a > 0 admits mu = a + eta, so the ceiling is infinite.
  cert.a0 = std::numeric_limits<double>::infinity();
  cert.a1 = 0.0;
  return cert;
}

DecayCertificate derive_constants_default(const HarmonicParameters& params, const DecayProfile& profile, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  return derive_constants(params, profile, profile.a() + eta);
}

double harmonic_bound(const Field& f, const Field& g, double t, const DecayCertificate& cert,
                      const DecayProfile& profile) {
  if (!f.geometry().compatible(g.geometry())) throw std::invalid_argument("labels on incompatible geometries");
  NeumaierSum<double> sum;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fa = std::abs(f.values()[i]);
    if (fa == 0.0) continue;
    const Site x = f.geometry().site(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double ga = std::abs(g.values()[j]);
      if (ga == 0.0) continue;
      sum += fa * ga * profile(distance(f.geometry(), x, g.geometry().site(j)));
    }
  }
  return cert.c_a * std::exp(cert.v_a * std::abs(t)) * sum.value();
}

double pointwise_bound(const HarmonicParameters& params, const std::vector<double>& mus, double t, int r) {
  const double c = params.c();
  double best = std::numeric_limits<double>::infinity();
  for (double mu : mus) {
    const double pref = 1.0 + 2.0 * std::exp(mu / 2.0) * c + 2.0 / c;
    best = std::min(best, pref * std::exp(-mu * (r - velocity_bound(c, mu) * std::abs(t))));
  }
  return best;
}

ConeScan cone_scan(const HarmonicParameters& params, int x_max, const std::vector<double>& t_grid, double threshold,
                   ProbeKind probe, const ConvolutionOptions& options) {
  params.validate();
  if (x_max < 1) throw std::invalid_argument("cone scan needs x_max >= 1");
  if (t_grid.empty()) throw std::invalid_argument("cone scan needs a non-empty t grid");
  if (!(threshold > 0.0 && threshold < 2.0)) throw std::invalid_argument("cone threshold must lie in (0, 2)");
  const int d = params.dimension();
  ConeScan scan;
  scan.params = params;
  scan.threshold = threshold;
  scan.probe = probe;
  scan.t = t_grid;
  for (int x = -x_max; x <= x_max; ++x) scan.x.push_back(x);
  scan.values.assign(t_grid.size(), std::vector<double>(scan.x.size(), 0.0));

  const Field f = Field::delta(LatticeGeometry::infinite(d, 1), Site{});
  const cplx probe_value = probe == ProbeKind::position ? cplx(1.0) : cplx(0.0, 1.0);
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const Field tf = apply_propagator_convolution(f, params, t_grid[ti], options);
    auto& row = scan.values[ti];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t xi = 0; xi < static_cast<std::ptrdiff_t>(scan.x.size()); ++xi) {
      Site xs{};
      xs[0] = scan.x[xi];
      // sigma(T f, c delta_x) = Im(conj(T f(x)) c)
      const double sigma = std::imag(std::conj(tf(xs)) * probe_value);
      row[xi] = commutator_norm_from_sigma(sigma);
    }
  }
  return scan;
}

VelocityEstimate estimate_velocity(const ConeScan& scan) { return estimate_velocity(scan, scan.threshold); }

VelocityEstimate estimate_velocity(const ConeScan& scan, double threshold) {
  VelocityEstimate est;
  for (std::size_t ti = 0; ti < scan.t.size(); ++ti) {
    int front = -1;
    for (std::size_t xi = 0; xi < scan.x.size(); ++xi) {
      if (scan.values[ti][xi] >= threshold) front = std::max(front, std::abs(scan.x[xi]));
    }
    if (front >= 0) {
      est.t.push_back(scan.t[ti]);
      est.front.push_back(front);
    }
  }
  if (est.t.size() < 3) throw std::runtime_error("velocity fit needs at least 3 time slices with threshold crossings");
  const double n = static_cast<double>(est.t.size());
  NeumaierSum<double> st, sx, stt, stx;
  for (std::size_t i = 0; i < est.t.size(); ++i) {
    st += est.t[i];
    sx += est.front[i];
    stt += est.t[i] * est.t[i];
    stx += est.t[i] * est.front[i];
  }
  const double denom = n * stt.value() - st.value() * st.value();
  if (!(denom > 0.0)) throw std::runtime_error("velocity fit needs distinct time slices");
  est.velocity = (n * stx.value() - st.value() * sx.value()) / denom;
  est.intercept = (sx.value() - est.velocity * st.value()) / n;
  NeumaierSum<double> ss;
  for (std::size_t i = 0; i < est.t.size(); ++i) {
    const double r = est.front[i] - (est.intercept + est.velocity * est.t[i]);
    ss += r * r;
  }
  est.fit_residual = std::sqrt(ss.value() / n);
  return est;
}

}  // namespace lrl
