#include "lrlattice/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lrlattice/compensated_sum.hpp"
#include "lrlattice/errors.hpp"
#include "torus_fft.hpp"

namespace lrl {

double HarmonicParameters::c() const {
  double s = omega * omega;
  for (double l : lambda) s += 4.0 * l;
  return std::sqrt(s);
}

double HarmonicParameters::gamma_squared(const Momentum& k) const {
  double s = omega * omega;
  for (int j = 0; j < dimension(); ++j) {
    const double h = std::sin(0.5 * k[j]);
    s += 4.0 * lambda[j] * h * h;
  }
  return s;
}

void HarmonicParameters::validate() const {
  if (dimension() < 1 || dimension() > kMaxDim) {
    throw std::invalid_argument("number of couplings must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be finite and >= 0");
  for (double l : lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("couplings must be finite and >= 0");
  }
  if (!(c() > 0.0)) throw std::invalid_argument("c = (omega^2 + 4 sum lambda)^(1/2) must be positive");
}

double gamma(const HarmonicParameters& params, const Momentum& k) { return std::sqrt(params.gamma_squared(k)); }

BogoliubovMultipliers multipliers_from_gamma(double g) {
  if (!(g > 0.0)) throw SingularPointError("Bogoliubov multipliers undefined where gamma(k) = 0");
  const double r = std::sqrt(g);
  return {1.0 / r + r, 1.0 / r - r};
}

BogoliubovMultipliers bogoliubov_multipliers(const HarmonicParameters& params, const Momentum& k) {
  return multipliers_from_gamma(gamma(params, k));
}

double kernel_multiplier(int m, double g, double t) {
  const double arg = 2.0 * g * t;
  switch (m) {
    case 0:
      return std::cos(arg);
    case -1:
      // -sin(2 g t) / g, with the g -> 0 limit -2t
      if (std::abs(arg) < 1e-8) return -2.0 * t * (1.0 - arg * arg / 6.0);
      return -std::sin(arg) / g;
    case 1:
      return -g * std::sin(arg);
    default:
      throw std::invalid_argument("kernel index m must be -1, 0 or 1");
  }
}

void QuadratureSpec::validate() const {
  if (points_per_axis < 8) throw std::invalid_argument("quadrature points_per_axis must be >= 8");
  if (!(refinement_tolerance > 0.0)) throw std::invalid_argument("quadrature tolerance must be > 0");
  if (max_refinements < 1) throw std::invalid_argument("quadrature max_refinements must be >= 1");
}

std::vector<double> quadrature_nodes(int points_per_axis) {
  std::vector<double> k(static_cast<std::size_t>(points_per_axis));
  const double h = 2.0 * std::numbers::pi / points_per_axis;
  for (int j = 0; j < points_per_axis; ++j) k[j] = -std::numbers::pi + (j + 0.5) * h;
  return k;
}

double Kernel::operator()(const Site& x) const {
  if (!window.contains(x)) return 0.0;
  return samples[window.index(x)];
}

namespace {

// Contract axis `axis` of a tensor laid out as (P, n_in, Q) with matrix
// C (n_out x n_in): out(p, o, q) = sum_i C(o, i) in(p, i, q). Each output
// entry is summed serially in index order.
std::vector<double> contract_axis(const std::vector<double>& in, std::size_t p_count, std::size_t n_in,
                                  std::size_t q_count, const std::vector<double>& c, std::size_t n_out) {
  std::vector<double> out(p_count * n_out * q_count, 0.0);
  const auto outer = static_cast<std::ptrdiff_t>(p_count * n_out);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t po = 0; po < outer; ++po) {
    const std::size_t p = static_cast<std::size_t>(po) / n_out;
    const std::size_t o = static_cast<std::size_t>(po) % n_out;
    double* dst = out.data() + (p * n_out + o) * q_count;
    for (std::size_t i = 0; i < n_in; ++i) {
      const double w = c[o * n_in + i];
      const double* src = in.data() + (p * n_in + i) * q_count;
      for (std::size_t q = 0; q < q_count; ++q) dst[q] += w * src[q];
    }
  }
  return out;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

std::array<std::vector<double>, 3> kernel_grid_sums(const HarmonicParameters& params, double t, int window,
                                                    int points_per_axis) {
  params.validate();
  if (points_per_axis % 2 != 0) throw std::invalid_argument("grid sums need an even number of points per axis");
  const int d = params.dimension();
  const std::size_t half = static_cast<std::size_t>(points_per_axis / 2);
  const std::size_t nx = static_cast<std::size_t>(window) + 1;
  const double h = 2.0 * std::numbers::pi / points_per_axis;

  // Positive half of the offset grid; the multipliers are even in every k_j.
  std::vector<double> kappa(half);
  for (std::size_t i = 0; i < half; ++i) kappa[i] = (i + 0.5) * h;
  std::vector<double> cosines(nx * half);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t i = 0; i < half; ++i) cosines[x * half + i] = std::cos(kappa[i] * static_cast<double>(x));
  }

  const std::size_t grid = ipow(half, d);
  std::array<std::vector<double>, 3> tensors;
  for (auto& v : tensors) v.resize(grid);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t gi = 0; gi < static_cast<std::ptrdiff_t>(grid); ++gi) {
    Momentum k{};
    std::size_t rem = static_cast<std::size_t>(gi);
    for (int a = d - 1; a >= 0; --a) {
      k[a] = kappa[rem % half];
      rem /= half;
    }
    const double g = std::sqrt(params.gamma_squared(k));
    for (int m = -1; m <= 1; ++m) tensors[m + 1][gi] = kernel_multiplier(m, g, t);
  }

  // Each axis: 2 (fold) / M (trapezoid weight) = 1 / half.
  const double scale = std::pow(1.0 / static_cast<double>(half), d);
  std::array<std::vector<double>, 3> corner;  // x_j >= 0 only, layout (nx)^d
  for (int m = 0; m < 3; ++m) {
    std::vector<double> cur = std::move(tensors[m]);
    for (int a = 0; a < d; ++a) {
      const std::size_t p = ipow(nx, a);
      const std::size_t q = ipow(half, d - a - 1);
      cur = contract_axis(cur, p, half, q, cosines, nx);
    }
    for (auto& v : cur) v *= scale;
    corner[m] = std::move(cur);
  }

  // Mirror into the full cube [-R, R]^d.
  const auto cube = LatticeGeometry::infinite(d, window);
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.resize(cube.size());
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const Site x = cube.site(i);
    std::size_t j = 0;
    for (int a = 0; a < d; ++a) j = j * nx + static_cast<std::size_t>(std::abs(x[a]));
    for (int m = 0; m < 3; ++m) out[m][i] = corner[m][j];
  }
  return out;
}

std::array<Kernel, 3> compute_kernels(const HarmonicParameters& params, double t, int window,
                                      const QuadratureSpec& quad) {
  params.validate();
  quad.validate();
  if (window < 1) throw std::invalid_argument("kernel window must be >= 1");
  int m_points = std::max(quad.points_per_axis, 2 * (window + 1));
  m_points += m_points % 2;
  auto prev = kernel_grid_sums(params, t, window, m_points);
  double diff = std::numeric_limits<double>::infinity();
  int refinements = 0;
  while (true) {
    if (refinements >= quad.max_refinements) {
      throw QuadratureError("kernel quadrature did not reach tolerance " + std::to_string(quad.refinement_tolerance) +
                                " (achieved " + std::to_string(diff) + ")",
                            diff, m_points);
    }
    m_points *= 2;
    ++refinements;
    auto next = kernel_grid_sums(params, t, window, m_points);
    diff = 0.0;
    for (int m = 0; m < 3; ++m) {
      for (std::size_t i = 0; i < next[m].size(); ++i) diff = std::max(diff, std::abs(next[m][i] - prev[m][i]));
    }
    prev = std::move(next);
    if (diff <= quad.refinement_tolerance) break;
  }
  std::array<Kernel, 3> out;
  for (int m = -1; m <= 1; ++m) {
    Kernel& k = out[m + 1];
    k.m = m;
    k.t = t;
    k.window = LatticeGeometry::infinite(params.dimension(), window);
    k.samples = std::move(prev[m + 1]);
    k.quadrature_points_per_axis = m_points;
    k.est_quadrature_error = diff;
  }
  return out;
}

Kernel compute_kernel(const HarmonicParameters& params, int m, double t, int window, const QuadratureSpec& quad) {
  if (m < -1 || m > 1) throw std::invalid_argument("kernel index m must be -1, 0 or 1");
  auto all = compute_kernels(params, t, window, quad);
  return std::move(all[m + 1]);
}

long double SeriesKernels::operator()(int m, const Site& x) const {
  if (!window.contains(x)) throw std::domain_error("site outside series kernel window");
  return values[m + 1][window.index(x)];
}

SeriesKernels series_kernels(const HarmonicParameters& params, double t, int window) {
  params.validate();
  if (window < 1) throw std::invalid_argument("series kernel window must be >= 1");
  const int d = params.dimension();
  const long double c = params.c();
  const long double tt = 2.0L * std::abs(static_cast<long double>(t));
  const long double sign_t = t < 0 ? -1.0L : 1.0L;

  // Number of terms: bound (2tc)^j / j! on the j-th Taylor coefficient
  // (times c for H1) until it is negligible and past its peak.
  int terms = 1;
  {
    long double b = 1.0L;
    for (int j = 1;; ++j) {
      b *= tt * c / j;
      if (j > 2 * window + 40 && j > tt * c && b * std::max(1.0L, c) < 1e-120L) {
        terms = j / 2 + 2;
        break;
      }
    }
  }

  // s_n = S^n delta_0 with S f(x) = (w^2 + 2 sum l) f(x) - sum_j l_j (f(x+e_j) + f(x-e_j)).
  // Working cube radius window + terms keeps the inner window exact.
  const auto big = LatticeGeometry::infinite(d, window + terms + 1);
  const std::size_t n = big.size();
  long double diag = static_cast<long double>(params.omega) * params.omega;
  for (double l : params.lambda) diag += 2.0L * l;
  std::vector<std::ptrdiff_t> stride(d);
  {
    std::ptrdiff_t s = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride[a] = s;
      s *= big.side();
    }
  }
  std::vector<long double> s_cur(n, 0.0L), s_next(n, 0.0L);
  s_cur[big.index(Site{})] = 1.0L;
  std::array<std::vector<long double>, 3> acc;
  for (auto& v : acc) v.assign(n, 0.0L);

  // coefficient of s_n:  H0: (-1)^n (2t)^{2n}/(2n)!,  H-1: -(-1)^n (2t)^{2n+1}/(2n+1)!
  // and H1 uses s_{n+1} with the H-1 coefficient.
  long double even_coef = 1.0L;             // (2t)^{2n}/(2n)!
  long double odd_coef = tt;                // (2t)^{2n+1}/(2n+1)!
  for (int step = 0; step <= terms; ++step) {
    const long double sgn = (step % 2 == 0) ? 1.0L : -1.0L;
    // apply S to s_cur (needed for H1 at this step and for the next step)
    const int lo = big.lower() + 1;
    const int hi = big.upper() - 1;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const Site x = big.site(static_cast<std::size_t>(i));
      bool interior = true;
      for (int a = 0; a < d; ++a) interior = interior && x[a] >= lo && x[a] <= hi;
      if (!interior) {
        s_next[i] = 0.0L;
        continue;
      }
      long double v = diag * s_cur[i];
      for (int a = 0; a < d; ++a) v -= params.lambda[a] * (s_cur[i + stride[a]] + s_cur[i - stride[a]]);
      s_next[i] = v;
    }
    for (std::size_t i = 0; i < n; ++i) {
      acc[1][i] += sgn * even_coef * s_cur[i];
      acc[0][i] -= sign_t * sgn * odd_coef * s_cur[i];
      acc[2][i] -= sign_t * sgn * odd_coef * s_next[i];
    }
    std::swap(s_cur, s_next);
    const long double j = 2.0L * step;
    even_coef *= tt * tt / ((j + 1.0L) * (j + 2.0L));
    odd_coef *= tt * tt / ((j + 2.0L) * (j + 3.0L));
  }

  SeriesKernels out;
  out.window = LatticeGeometry::infinite(d, window);
  out.terms = terms;
  for (auto& v : out.values) v.resize(out.window.size());
  for (std::size_t i = 0; i < out.window.size(); ++i) {
    const std::size_t j = big.index(out.window.site(i));
    for (int m = 0; m < 3; ++m) out.values[m][i] = acc[m][j];
  }
  return out;
}

double velocity_bound(double c, double mu) { return c * std::max(2.0 / mu, std::exp(mu / 2.0 + 1.0)); }

double kernel_envelope(const HarmonicParameters& params, int m, double mu, double t, int l1_distance) {
  const double c = params.c();
  const double base = std::exp(-mu * (l1_distance - velocity_bound(c, mu) * std::abs(t)));
  switch (m) {
    case 0:
      return base;
    case -1:
      return base / c;
    case 1:
      return c * std::exp(mu / 2.0) * base;
    default:
      throw std::invalid_argument("kernel index m must be -1, 0 or 1");
  }
}

namespace {

// sum_{r > R} S_d(r) e^{-mu r}, using S_d(r) <= K (1+r)^(d-1) beyond a few
// exact terms and a geometric majorant for the rest.
double shell_exp_tail(int d, double mu, int radius) {
  double sum = 0.0;
  int r = radius + 1;
  for (int i = 0; i < 64; ++i, ++r) sum += shell_count(d, r) * std::exp(-mu * r);
  // remaining terms r >= R + 65: ratio of successive majorant terms
  const double q = std::pow((2.0 + r) / (1.0 + r), d - 1) * std::exp(-mu);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  double k_d = 0.0, fact = 1.0, binom = 1.0;
  for (int k = 1; k <= d; ++k) {
    if (k > 1) fact *= (k - 1);
    binom = binom * (d - k + 1) / k;
    k_d += std::pow(2.0, k) * binom / fact;
  }
  const double first = k_d * std::pow(1.0 + r, d - 1) * std::exp(-mu * r);
  return sum + first / (1.0 - q);
}

}  // namespace

int certified_kernel_radius(const HarmonicParameters& params, double t, double tol, int max_window) {
  params.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("truncation tolerance must be > 0");
  const double c = params.c();
  const int d = params.dimension();
  const int search_cap = std::max(max_window, 1) * 64 + 1024;
  int best = std::numeric_limits<int>::max();
  for (int i = 0; i <= 80; ++i) {
    const double mu = 0.05 * std::pow(400.0, i / 80.0);  // 0.05 .. 20
    const double pref = (1.0 + 1.0 / c + c * std::exp(mu / 2.0)) *
                        std::exp(mu * velocity_bound(c, mu) * std::abs(t));
    if (!std::isfinite(pref)) continue;
    // bound decreases in R; bisection on [0, best)
    int lo = 0, hi = std::min(best, search_cap);
    if (pref * shell_exp_tail(d, mu, hi) > tol) continue;
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (pref * shell_exp_tail(d, mu, mid) <= tol) hi = mid;
      else lo = mid + 1;
    }
    best = std::min(best, lo);
  }
  if (best == std::numeric_limits<int>::max()) {
    throw WindowTooSmallError("no certified kernel radius below the search limit", search_cap);
  }
  best = std::max(best, 1);
  if (best > max_window) {
    throw WindowTooSmallError("certified kernel radius " + std::to_string(best) + " exceeds the allowed window " +
                                  std::to_string(max_window),
                              best);
  }
  return best;
}

PropagatorKernels make_propagator_kernels(const HarmonicParameters& params, double t, int radius,
                                          const QuadratureSpec& quad) {
  PropagatorKernels k;
  k.t = t;
  k.radius = radius;
  k.h = compute_kernels(params, t, radius, quad);
  return k;
}

Field apply_convolution(const Field& f, const PropagatorKernels& kernels) {
  if (f.geometry().is_torus()) throw std::invalid_argument("convolution propagator acts on Z^d fields");
  const int d = f.dimension();
  if (kernels.h[1].window.dimension() != d) throw std::invalid_argument("kernel dimension does not match field");
  const int supp = f.support_radius();
  const auto out_geom = LatticeGeometry::infinite(d, std::max(supp, 0) + kernels.radius);
  Field out(out_geom);
  if (supp < 0) return out;

  struct Source {
    Site y;
    cplx v;
  };
  std::vector<Source> sources;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values()[i] != cplx(0.0)) sources.push_back({f.geometry().site(i), f.values()[i]});
  }
  const Kernel& hm = kernels.h[0];
  const Kernel& h0 = kernels.h[1];
  const Kernel& hp = kernels.h[2];
  const cplx half_i(0.0, 0.5);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t xi = 0; xi < static_cast<std::ptrdiff_t>(out_geom.size()); ++xi) {
    const Site x = out_geom.site(static_cast<std::size_t>(xi));
    NeumaierSum<cplx> acc;
    for (const Source& s : sources) {
      Site z{};
      for (int a = 0; a < d; ++a) z[a] = x[a] - s.y[a];
      if (!h0.window.contains(z)) continue;
      const std::size_t j = h0.window.index(z);
      const double a0 = h0.samples[j], am = hm.samples[j], ap = hp.samples[j];
      const cplx k1 = a0 - half_i * (am + ap);
      const cplx k2 = half_i * (ap - am);
      acc += s.v * k1 + std::conj(s.v) * k2;
    }
    out.values()[xi] = acc.value();
  }
  return out;
}

Field apply_propagator_convolution(const Field& f, const HarmonicParameters& params, double t,
                                   const ConvolutionOptions& options) {
  params.validate();
  if (f.dimension() != params.dimension()) throw std::invalid_argument("field dimension does not match parameters");
  const double norm1 = f.l1_norm();
  if (norm1 == 0.0) return Field(LatticeGeometry::infinite(f.dimension(), 1));
  const int radius = certified_kernel_radius(params, t, options.tolerance / norm1, options.max_kernel_window);
  return apply_convolution(f, make_propagator_kernels(params, t, radius, options.quad));
}

bool in_massless_domain(const Field& f) { return std::abs(f.position_sum()) <= 1e-12 * f.l1_norm(); }

namespace {

void require_torus(const Field& f, const HarmonicParameters& params) {
  params.validate();
  if (!f.geometry().is_torus()) throw std::invalid_argument("torus propagator needs a torus field");
  if (f.dimension() != params.dimension()) throw std::invalid_argument("field dimension does not match parameters");
}

// F(Re f) and F(Im f) from F f using F(conj f)(k) = conj(F f(-k)).
void split_real_imag(const detail::TorusFft& fft, const std::vector<cplx>& ff, std::vector<cplx>& a,
                     std::vector<cplx>& b) {
  a.resize(ff.size());
  b.resize(ff.size());
  for (std::size_t i = 0; i < ff.size(); ++i) {
    const cplx mirror = std::conj(ff[fft.mirror(i)]);
    a[i] = 0.5 * (ff[i] + mirror);
    b[i] = cplx(0.0, -0.5) * (ff[i] - mirror);
  }
}

// Convolution with a real even multiplier m(gamma).
template <class Mult>
Field apply_multiplier(const Field& f, const HarmonicParameters& params, Mult&& mult) {
  const detail::TorusFft fft(f.geometry());
  auto buf = fft.to_buffer(f);
  fft.forward(buf);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= mult(gamma(params, fft.momentum(i)));
  fft.backward(buf);
  return fft.from_buffer(buf);
}

}  // namespace

Field apply_propagator_torus(const Field& f, const HarmonicParameters& params, double t) {
  require_torus(f, params);
  if (params.omega == 0.0 && !in_massless_domain(f)) {
    throw D0ViolationError("omega = 0: position part of the label has nonzero mean");
  }
  const detail::TorusFft fft(f.geometry());
  auto buf = fft.to_buffer(f);
  fft.forward(buf);
  std::vector<cplx> a, b;
  split_real_imag(fft, buf, a, b);
  const double two_t = 2.0 * t;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const double g = gamma(params, fft.momentum(i));
    const double cs = std::cos(two_t * g);
    // sin(2gt)/g and g sin(2gt); both are -kernel_multiplier
    const double sinc = -kernel_multiplier(-1, g, t);
    const double gsin = -kernel_multiplier(1, g, t);
    const cplx a2 = cs * a[i] - gsin * b[i];
    const cplx b2 = sinc * a[i] + cs * b[i];
    buf[i] = a2 + cplx(0.0, 1.0) * b2;
  }
  fft.backward(buf);
  return fft.from_buffer(buf);
}

Field bogoliubov_u(const Field& f, const HarmonicParameters& params) {
  require_torus(f, params);
  return cplx(0.0, 0.5) * apply_multiplier(f, params, [](double g) { return multipliers_from_gamma(g).gamma_plus; });
}

Field bogoliubov_u_adjoint(const Field& f, const HarmonicParameters& params) {
  require_torus(f, params);
  return cplx(0.0, -0.5) * apply_multiplier(f, params, [](double g) { return multipliers_from_gamma(g).gamma_plus; });
}

Field bogoliubov_v(const Field& f, const HarmonicParameters& params) {
  require_torus(f, params);
  return cplx(0.0, 0.5) *
         apply_multiplier(f.conj(), params, [](double g) { return multipliers_from_gamma(g).gamma_minus; });
}

Field free_multiplier(const Field& f, const HarmonicParameters& params, double t) {
  require_torus(f, params);
  const detail::TorusFft fft(f.geometry());
  auto buf = fft.to_buffer(f);
  fft.forward(buf);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] *= std::polar(1.0, 2.0 * gamma(params, fft.momentum(i)) * t);
  }
  fft.backward(buf);
  return fft.from_buffer(buf);
}

Field apply_propagator_torus_composed(const Field& f, const HarmonicParameters& params, double t) {
  require_torus(f, params);
  const Field h = bogoliubov_u_adjoint(f, params) - bogoliubov_v(f, params);
  const Field m = free_multiplier(h, params, t);
  return bogoliubov_u(m, params) + bogoliubov_v(m, params);
}

}  // namespace lrl
