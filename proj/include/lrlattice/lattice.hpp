#ifndef LRLATTICE_LATTICE_HPP
#define LRLATTICE_LATTICE_HPP

// Lattice geometry (Z^d windows and periodic tori), the l1 metric, the decay
// functions F(r) = (1+r)^-(d+eps) and F_a(r) = exp(-a r) F(r), and the
// summability constants ||F_a|| and C_a.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lrl {

inline constexpr int kMaxDim = 4;

// Integer coordinates; entries at positions >= dimension are zero.
using Site = std::array<int, kMaxDim>;

Site make_site(std::initializer_list<int> coords);

enum class LatticeMode { infinite, torus };

class LatticeGeometry {
 public:
  // Z^d observed through the cube [-R, R]^d.
  static LatticeGeometry infinite(int dimension, int window_radius);
  // (-L, L]^d with periodic identification.
  static LatticeGeometry torus(int dimension, int half_side);

  int dimension() const { return dimension_; }
  LatticeMode mode() const { return mode_; }
  bool is_torus() const { return mode_ == LatticeMode::torus; }
  // R for infinite mode, L for torus mode.
  int extent() const { return extent_; }
  int side() const { return is_torus() ? 2 * extent_ : 2 * extent_ + 1; }
  int lower() const { return is_torus() ? -extent_ + 1 : -extent_; }
  int upper() const { return extent_; }
  std::size_t size() const;

  bool contains(const Site& x) const;
  // Lexicographic position (axis 0 slowest). Throws std::domain_error for
  // sites outside the stored range.
  std::size_t index(const Site& x) const;
  Site site(std::size_t index) const;

  // Same metric space: same mode and dimension, and same L on a torus.
  // Infinite-mode windows may differ.
  bool compatible(const LatticeGeometry& other) const;

  // Torus sites are reduced into (-L, L]; infinite sites are returned as is.
  Site wrap(const Site& x) const;

  bool operator==(const LatticeGeometry&) const = default;

 private:
  LatticeGeometry(int dimension, LatticeMode mode, int extent);

  int dimension_;
  LatticeMode mode_;
  int extent_;
};

// l1 distance on Z^d, quotient l1 distance on the torus.
int distance(const LatticeGeometry& geometry, const Site& x, const Site& y);

// l1 norm of the first `dimension` coordinates.
int l1_norm(const Site& x, int dimension);

class DecayProfile {
 public:
  DecayProfile(int dimension, double epsilon = 1.0, double a = 0.0);

  int dimension() const { return dimension_; }
  double epsilon() const { return epsilon_; }
  double a() const { return a_; }
  DecayProfile with_rate(double a) const { return DecayProfile(dimension_, epsilon_, a); }

  // exp(-a r) (1 + r)^-(d + eps); throws std::domain_error for r < 0.
  double operator()(double r) const;

 private:
  int dimension_;
  double epsilon_;
  double a_;
};

double decay_value(const DecayProfile& profile, double r);

// Number of z in Z^d with |z|_1 = r.
double shell_count(int dimension, std::int64_t r);

struct UniformNorm {
  double value = 0.0;       // sum over |z| <= window
  double tail_bound = 0.0;  // rigorous bound on the omitted part
};

UniformNorm uniform_norm(const DecayProfile& profile, int window);

struct ConvolutionConstant {
  double value = 0.0;
  Site worst_separation{};
  double half_window_value = 0.0;
  double relative_change = 0.0;  // |value - half_window_value| / value
  bool converged = false;        // relative_change <= kConvolutionConvergenceTol
};

inline constexpr double kConvolutionConvergenceTol = 1e-3;

// max over |s| <= window of sum_{|z| <= 2 window} F_a(|z|) F_a(|s - z|) / F_a(|s|),
// with a convergence flag from comparing against window / 2. OpenMP-parallel
// over separations; each inner sum runs serially in a fixed order.
ConvolutionConstant convolution_constant(const DecayProfile& profile, int window);

// The inner sum for one separation s (exposed for symmetry checks).
double convolution_ratio(const DecayProfile& profile, const Site& separation, int window);

// All sites of Z^d with |z|_1 <= radius, in shell order (increasing |z|_1,
// lexicographic inside a shell).
std::vector<Site> l1_ball(int dimension, int radius);

}  // namespace lrl

#endif  // LRLATTICE_LATTICE_HPP
