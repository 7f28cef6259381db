#include "lrlattice/serial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lrlattice/compensated_sum.hpp"
#include "lrlattice/errors.hpp"

namespace lrl::serial {

std::array<std::vector<double>, 3> kernel_grid_sums(const HarmonicParameters& params, double t, int window,
                                                    int points_per_axis) {
  params.validate();
  if (points_per_axis % 2 != 0) throw std::invalid_argument("grid sums need an even number of points per axis");
  const int d = params.dimension();
  const auto nodes = quadrature_nodes(points_per_axis);
  const std::size_t m = nodes.size();
  std::size_t grid = 1;
  for (int a = 0; a < d; ++a) grid *= m;

  std::vector<Momentum> ks(grid);
  std::array<std::vector<double>, 3> mult;
  for (auto& v : mult) v.resize(grid);
  for (std::size_t gi = 0; gi < grid; ++gi) {
    std::size_t rem = gi;
    for (int a = d - 1; a >= 0; --a) {
      ks[gi][a] = nodes[rem % m];
      rem /= m;
    }
    const double g = std::sqrt(params.gamma_squared(ks[gi]));
    for (int j = -1; j <= 1; ++j) mult[j + 1][gi] = kernel_multiplier(j, g, t);
  }

  const auto cube = LatticeGeometry::infinite(d, window);
  const double w = 1.0 / static_cast<double>(grid);
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.resize(cube.size());
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const Site x = cube.site(i);
    std::array<NeumaierSum<double>, 3> acc;
    for (std::size_t gi = 0; gi < grid; ++gi) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += ks[gi][a] * x[a];
      const double c = std::cos(phase);
      for (int j = 0; j < 3; ++j) acc[j] += mult[j][gi] * c;
    }
    for (int j = 0; j < 3; ++j) out[j][i] = w * acc[j].value();
  }
  return out;
}

Field apply_convolution(const Field& f, const PropagatorKernels& kernels) {
  if (f.geometry().is_torus()) throw std::invalid_argument("convolution propagator acts on Z^d fields");
  const int d = f.dimension();
  const int supp = f.support_radius();
  const auto out_geom = LatticeGeometry::infinite(d, std::max(supp, 0) + kernels.radius);
  Field out(out_geom);
  if (supp < 0) return out;
  const cplx half_i(0.0, 0.5);
  for (std::size_t xi = 0; xi < out_geom.size(); ++xi) {
    const Site x = out_geom.site(xi);
    NeumaierSum<cplx> acc;
    for (std::size_t yi = 0; yi < f.size(); ++yi) {
      const cplx v = f.values()[yi];
      if (v == cplx(0.0)) continue;
      const Site y = f.geometry().site(yi);
      Site z{};
      for (int a = 0; a < d; ++a) z[a] = x[a] - y[a];
      const double hm = kernels.h[0](z), h0 = kernels.h[1](z), hp = kernels.h[2](z);
      acc += v * (h0 - half_i * (hm + hp)) + std::conj(v) * (half_i * (hp - hm));
    }
    out.values()[xi] = acc.value();
  }
  return out;
}

Field apply_propagator_torus(const Field& f, const HarmonicParameters& params, double t) {
  params.validate();
  const auto& geom = f.geometry();
  if (!geom.is_torus()) throw std::invalid_argument("torus propagator needs a torus field");
  if (params.omega == 0.0 && !in_massless_domain(f)) {
    throw D0ViolationError("omega = 0: position part of the label has nonzero mean");
  }
  const int d = geom.dimension();
  const int n = geom.side();
  const std::size_t size = geom.size();

  // Kernels on the torus: (1/N) sum_k m(gamma(k)) cos(k . x).
  std::vector<Momentum> ks(size);
  for (std::size_t i = 0; i < size; ++i) {
    const Site s = geom.site(i);
    for (int a = 0; a < d; ++a) ks[i][a] = 2.0 * std::numbers::pi * s[a] / n;
  }
  std::array<std::vector<double>, 3> h;
  for (auto& v : h) v.assign(size, 0.0);
  for (std::size_t xi = 0; xi < size; ++xi) {
    const Site x = geom.site(xi);
    std::array<NeumaierSum<double>, 3> acc;
    for (std::size_t ki = 0; ki < size; ++ki) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += ks[ki][a] * x[a];
      const double c = std::cos(phase);
      const double g = std::sqrt(params.gamma_squared(ks[ki]));
      for (int j = -1; j <= 1; ++j) acc[j + 1] += kernel_multiplier(j, g, t) * c;
    }
    for (int j = 0; j < 3; ++j) h[j][xi] = acc[j].value() / static_cast<double>(size);
  }

  const cplx half_i(0.0, 0.5);
  Field out(geom);
  for (std::size_t xi = 0; xi < size; ++xi) {
    const Site x = geom.site(xi);
    NeumaierSum<cplx> acc;
    for (std::size_t yi = 0; yi < size; ++yi) {
      const cplx v = f.values()[yi];
      if (v == cplx(0.0)) continue;
      const Site y = geom.site(yi);
      Site z{};
      for (int a = 0; a < d; ++a) z[a] = x[a] - y[a];
      const std::size_t zi = geom.index(geom.wrap(z));
      const double hm = h[0][zi], h0 = h[1][zi], hp = h[2][zi];
      acc += v * (h0 - half_i * (hm + hp)) + std::conj(v) * (half_i * (hp - hm));
    }
    out.values()[xi] = acc.value();
  }
  return out;
}

double convolution_constant(const DecayProfile& profile, int window) {
  double best = 0.0;
  for (const Site& s : l1_ball(profile.dimension(), window)) best = std::max(best, convolution_ratio(profile, s, window));
  return best;
}

}  // namespace lrl::serial
