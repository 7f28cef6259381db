#include "lrlattice/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lrlattice/compensated_sum.hpp"

namespace lrl {

Site make_site(std::initializer_list<int> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument("site has more than " + std::to_string(kMaxDim) + " coordinates");
  }
  Site s{};
  std::size_t j = 0;
  for (int c : coords) s[j++] = c;
  return s;
}

LatticeGeometry::LatticeGeometry(int dimension, LatticeMode mode, int extent)
    : dimension_(dimension), mode_(mode), extent_(extent) {
  if (dimension < 1 || dimension > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (extent < 1) throw std::invalid_argument("lattice extent must be >= 1");
}

LatticeGeometry LatticeGeometry::infinite(int dimension, int window_radius) {
  return LatticeGeometry(dimension, LatticeMode::infinite, window_radius);
}

LatticeGeometry LatticeGeometry::torus(int dimension, int half_side) {
  return LatticeGeometry(dimension, LatticeMode::torus, half_side);
}

std::size_t LatticeGeometry::size() const {
  std::size_t n = 1;
  for (int j = 0; j < dimension_; ++j) n *= static_cast<std::size_t>(side());
  return n;
}

bool LatticeGeometry::contains(const Site& x) const {
  for (int j = 0; j < dimension_; ++j) {
    if (x[j] < lower() || x[j] > upper()) return false;
  }
  for (int j = dimension_; j < kMaxDim; ++j) {
    if (x[j] != 0) return false;
  }
  return true;
}

std::size_t LatticeGeometry::index(const Site& x) const {
  if (!contains(x)) throw std::domain_error("site outside lattice range");
  std::size_t idx = 0;
  const auto n = static_cast<std::size_t>(side());
  for (int j = 0; j < dimension_; ++j) idx = idx * n + static_cast<std::size_t>(x[j] - lower());
  return idx;
}

Site LatticeGeometry::site(std::size_t index) const {
  Site x{};
  const auto n = static_cast<std::size_t>(side());
  for (int j = dimension_ - 1; j >= 0; --j) {
    x[j] = static_cast<int>(index % n) + lower();
    index /= n;
  }
  return x;
}

bool LatticeGeometry::compatible(const LatticeGeometry& other) const {
  if (dimension_ != other.dimension_ || mode_ != other.mode_) return false;
  return mode_ == LatticeMode::infinite || extent_ == other.extent_;
}

Site LatticeGeometry::wrap(const Site& x) const {
  if (!is_torus()) return x;
  Site y = x;
  const int n = 2 * extent_;
  for (int j = 0; j < dimension_; ++j) {
    int r = ((x[j] % n) + n) % n;  // [0, 2L)
    if (r > extent_) r -= n;        // (-L, L]
    y[j] = r;
  }
  return y;
}

int distance(const LatticeGeometry& geometry, const Site& x, const Site& y) {
  if (geometry.is_torus() && (!geometry.contains(x) || !geometry.contains(y))) {
    throw std::domain_error("site outside torus range");
  }
  int total = 0;
  for (int j = 0; j < geometry.dimension(); ++j) {
    int diff = std::abs(x[j] - y[j]);
    if (geometry.is_torus()) diff = std::min(diff, 2 * geometry.extent() - diff);
    total += diff;
  }
  return total;
}

int l1_norm(const Site& x, int dimension) {
  int total = 0;
  for (int j = 0; j < dimension; ++j) total += std::abs(x[j]);
  return total;
}

DecayProfile::DecayProfile(int dimension, double epsilon, double a)
    : dimension_(dimension), epsilon_(epsilon), a_(a) {
  if (dimension < 1) throw std::invalid_argument("decay profile dimension must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("decay profile epsilon must be > 0");
  if (!(a >= 0.0)) throw std::invalid_argument("decay profile rate a must be >= 0");
}

double DecayProfile::operator()(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("decay function evaluated at negative distance");
  const double poly = std::pow(1.0 + r, -(dimension_ + epsilon_));
  if (r == 0.0) return poly;
  return std::exp(-a_ * r) * poly;
}

double decay_value(const DecayProfile& profile, double r) { return profile(r); }

namespace {

double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double b = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  return b < 9e15 ? std::round(b) : b;
}

// S_d(r) <= K_d (1 + r)^(d-1) with K_d = sum_k 2^k C(d,k) / (k-1)!.
double shell_envelope_constant(int d) {
  double k_d = 0.0;
  double fact = 1.0;  // (k-1)!
  for (int k = 1; k <= d; ++k) {
    if (k > 1) fact *= (k - 1);
    k_d += std::pow(2.0, k) * binomial(d, k) / fact;
  }
  return k_d;
}

}  // namespace

double shell_count(int dimension, std::int64_t r) {
  if (r < 0) return 0.0;
  if (r == 0) return 1.0;
  double total = 0.0;
  for (int k = 1; k <= dimension && k <= r; ++k) {
    total += std::pow(2.0, k) * binomial(dimension, k) * binomial(r - 1, k - 1);
  }
  return total;
}

UniformNorm uniform_norm(const DecayProfile& profile, int window) {
  if (window < 0) throw std::invalid_argument("uniform_norm window must be >= 0");
  const int d = profile.dimension();
  NeumaierSum<double> sum;
  for (int r = 0; r <= window; ++r) sum += shell_count(d, r) * profile(r);
  UniformNorm out;
  out.value = sum.value();
  const double w = window;
  // sum_{r > W} K (1+r)^-(1+eps) e^{-a r} <= K e^{-a (W+1)} (1+W)^-eps / eps
  out.tail_bound = shell_envelope_constant(d) * std::exp(-profile.a() * (w + 1.0)) *
                   std::pow(1.0 + w, -profile.epsilon()) / profile.epsilon();
  return out;
}

std::vector<Site> l1_ball(int dimension, int radius) {
  std::vector<Site> out;
  Site cur{};
  // lexicographic enumeration of the shell |z| = r, coordinate by coordinate
  auto fill = [&](auto&& self, int j, int budget) -> void {
    if (j == dimension - 1) {
      if (budget == 0) {
        cur[j] = 0;
        out.push_back(cur);
      } else {
        cur[j] = -budget;
        out.push_back(cur);
        cur[j] = budget;
        out.push_back(cur);
      }
      return;
    }
    for (int c = -budget; c <= budget; ++c) {
      cur[j] = c;
      self(self, j + 1, budget - std::abs(c));
    }
  };
  for (int r = 0; r <= radius; ++r) fill(fill, 0, r);
  return out;
}

namespace {

struct DecayTables {
  std::vector<double> poly;  // (1+r)^-(d+eps)
  double a;
};

DecayTables make_tables(const DecayProfile& profile, int max_r) {
  DecayTables t;
  t.a = profile.a();
  t.poly.resize(static_cast<std::size_t>(max_r) + 1);
  for (int r = 0; r <= max_r; ++r) t.poly[r] = std::pow(1.0 + r, -(profile.dimension() + profile.epsilon()));
  return t;
}

int l1_diff(const Site& s, const Site& z, int d) {
  int total = 0;
  for (int j = 0; j < d; ++j) total += std::abs(s[j] - z[j]);
  return total;
}

double ratio_sum(const DecayTables& tab, const std::vector<Site>& ball, const Site& s, int d) {
  const int rs = l1_norm(s, d);
  NeumaierSum<double> sum;
  for (const Site& z : ball) {
    const int rz = l1_norm(z, d);
    const int rsz = l1_diff(s, z, d);
    const int excess = rz + rsz - rs;  // >= 0 by the triangle inequality
    double term = tab.poly[rz] * tab.poly[rsz] / tab.poly[rs];
    if (excess > 0 && tab.a > 0.0) term *= std::exp(-tab.a * excess);
    sum += term;
  }
  return sum.value();
}

// Sites with 0 <= s_0 <= s_1 <= ... and |s| <= radius; every separation is
// a signed permutation of one of these, and the sum is invariant under both.
std::vector<Site> fundamental_separations(int d, int radius) {
  std::vector<Site> out;
  for (const Site& s : l1_ball(d, radius)) {
    bool ok = true;
    for (int j = 0; j < d && ok; ++j) {
      if (s[j] < 0) ok = false;
      if (j > 0 && s[j] < s[j - 1]) ok = false;
    }
    if (ok) out.push_back(s);
  }
  return out;
}

struct MaxResult {
  double value;
  Site where;
};

MaxResult max_ratio(const DecayProfile& profile, int window) {
  const int d = profile.dimension();
  const auto tab = make_tables(profile, 3 * window);
  const auto ball = l1_ball(d, 2 * window);
  const auto seps = fundamental_separations(d, window);
  std::vector<double> values(seps.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seps.size()); ++i) {
    values[i] = ratio_sum(tab, ball, seps[i], d);
  }
  MaxResult best{-std::numeric_limits<double>::infinity(), Site{}};
  for (std::size_t i = 0; i < seps.size(); ++i) {
    if (values[i] > best.value) best = {values[i], seps[i]};
  }
  return best;
}

}  // namespace

double convolution_ratio(const DecayProfile& profile, const Site& separation, int window) {
  const int d = profile.dimension();
  const int rs = l1_norm(separation, d);
  const auto tab = make_tables(profile, rs + 2 * window);
  return ratio_sum(tab, l1_ball(d, 2 * window), separation, d);
}

ConvolutionConstant convolution_constant(const DecayProfile& profile, int window) {
  if (window < 1) throw std::invalid_argument("convolution_constant window must be >= 1");
  ConvolutionConstant out;
  const MaxResult full = max_ratio(profile, window);
  out.value = full.value;
  out.worst_separation = full.where;
  out.half_window_value = window >= 2 ? max_ratio(profile, window / 2).value : full.value;
  out.relative_change = std::abs(out.value - out.half_window_value) / out.value;
  out.converged = out.relative_change <= kConvolutionConvergenceTol;
  return out;
}

}  // namespace lrl
