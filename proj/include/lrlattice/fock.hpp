#ifndef LRLATTICE_FOCK_HPP
#define LRLATTICE_FOCK_HPP

// Truncated Fock space of 1-3 oscillators on a ring: dense operators,
// exact evolution from Hermitian eigendecompositions, and brute-force
// versions of the commutator, Dyson and volume quantities.
//
// Basis states |n_0 ... n_{s-1}>, 0 <= n_x <= N, site 0 slowest.
//
// Operator norms of Weyl-type operators do not converge in the full
// truncated space (the truncation edge always sees the unbounded
// generators), so the oracle quantities are measured on the sector of
// states with every occupation <= K: ||X Pi_K||, the norm of X restricted
// to that subspace. The norm is exact in the N -> infinity limit for
// scalar multiples of unitaries, which is what the commutators are.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "lrlattice/field.hpp"
#include "lrlattice/harmonic.hpp"
#include "lrlattice/lattice.hpp"
#include "lrlattice/perturbations.hpp"

namespace lrl {

using DenseOperator = Eigen::MatrixXcd;

inline constexpr std::size_t kMaxFockDimension = 250000;
// Full dense matrices are only formed below this dimension.
inline constexpr std::size_t kMaxDenseDimension = 4096;

enum class FockBoundary { periodic, open };

struct FockConfig {
  int sites = 2;
  int cutoff = 60;
  HarmonicParameters params{1.0, {1.0}};
  FockBoundary boundary = FockBoundary::periodic;

  int local_dimension() const { return cutoff + 1; }
  std::size_t dimension() const;
  // 1 <= sites <= 3, cutoff >= 1, d = 1 parameters, dimension guard.
  void validate() const;
  // Ring position of a lattice site: x mod sites.
  int site_index(const Site& x) const;
  // Nearest-neighbour bonds (x, y); a 2-site ring has the bond twice.
  std::vector<std::pair<int, int>> bonds() const;
};

// Single-site truncated operators, (N+1) x (N+1).
Eigen::MatrixXd ladder_matrix(int cutoff);    // a[i, i+1] = sqrt(i+1)
Eigen::MatrixXd position_matrix(int cutoff);  // (a + a*) / sqrt 2
DenseOperator momentum_matrix(int cutoff);    // i (a* - a) / sqrt 2

struct SiteOperators {
  std::vector<DenseOperator> q, p, a, a_dag;
};

// Full-space embeddings; needs dimension <= kMaxDenseDimension.
SiteOperators build_site_operators(const FockConfig& config);
DenseOperator build_hamiltonian(const FockConfig& config);

// Tensor product of single-site factors.
class ProductOperator {
 public:
  explicit ProductOperator(std::vector<DenseOperator> factors);
  const std::vector<DenseOperator>& factors() const { return factors_; }
  std::size_t dimension() const { return dim_; }
  // Columns of `block` are state vectors.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& block) const;
  ProductOperator adjoint() const;
  DenseOperator to_dense() const;

 private:
  std::vector<DenseOperator> factors_;
  std::size_t dim_;
};

// Ring coefficients of a label: entry x mod sites accumulates f(x).
std::vector<cplx> fock_label(const FockConfig& config, const Field& f);

// exp(i (a q + b p)) on one site by Hermitian eigendecomposition.
DenseOperator single_site_weyl(int cutoff, cplx z);
ProductOperator weyl_product(const FockConfig& config, const std::vector<cplx>& label);
// ||(1 - Pi_{N-5}) W(f) |0>||, Pi_M = every occupation <= M.
double vacuum_leakage(const FockConfig& config, const std::vector<cplx>& label);
inline constexpr double kMaxLeakage = 1e-6;
// Throws TruncationError if the leakage exceeds kMaxLeakage.
void check_truncation(const FockConfig& config, const std::vector<cplx>& label);
DenseOperator weyl_matrix(const FockConfig& config, const Field& f);

// Bounded interaction terms Phi(X), each a self-adjoint matrix on the sites
// of X (local dimension (N+1)^|X|).
struct InteractionTerm {
  std::vector<Site> sites;
  DenseOperator op;
};

class BoundedInteraction {
 public:
  // Throws std::invalid_argument if op is not square, not self-adjoint to
  // 1e-12 or its size is not a power matching the number of sites.
  void add(std::vector<Site> sites, DenseOperator op);
  const std::vector<InteractionTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<InteractionTerm> terms_;
};

// sup_{x,y} sum_{X ∋ x, y} ||Phi(X)|| / F_a(d(x, y)).
double interaction_norm_a(const BoundedInteraction& interaction, const DecayProfile& profile,
                          const LatticeGeometry& geometry);

using Perturbation = std::variant<std::monostate, PerturbationFamily, BoundedInteraction>;

// Perturbation matrix P on the full space (dimension <= kMaxDenseDimension).
DenseOperator perturbation_matrix(const FockConfig& config, const Perturbation& perturbation);

// H = harmonic + perturbation with its eigendecomposition, blocked by total
// number parity when the Hamiltonian conserves it.
class FockSystem {
 public:
  explicit FockSystem(FockConfig config, const Perturbation& perturbation = std::monostate{});

  const FockConfig& config() const { return config_; }
  std::size_t dimension() const { return dim_; }
  bool parity_blocked() const { return blocks_.size() > 1; }
  bool real() const { return real_; }
  Eigen::VectorXd eigenvalues() const;  // ascending
  // Full eigenvector matrix (columns) and matching eigenvalues, block order.
  void eigensystem(Eigen::MatrixXcd& vectors, Eigen::VectorXd& values) const;

  // e^{-i H t} applied to the columns of `block`.
  Eigen::MatrixXcd propagate(const Eigen::MatrixXcd& block, double t) const;
  DenseOperator propagator(double t) const;
  // e^{i H t} A e^{-i H t}
  DenseOperator heisenberg_evolve(const DenseOperator& a, double t) const;
  // Columns e^{iHt} A e^{-iHt} X for an operator given by its action.
  Eigen::MatrixXcd evolve_apply(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& a,
                                const Eigen::MatrixXcd& block, double t) const;

 private:
  struct Block {
    std::vector<Eigen::Index> basis;
    Eigen::VectorXd values;
    Eigen::MatrixXd real_vectors;
    Eigen::MatrixXcd complex_vectors;
  };

  FockConfig config_;
  std::size_t dim_;
  bool real_ = true;
  std::vector<Block> blocks_;
};

// Columns are the basis states with every occupation <= k.
Eigen::MatrixXcd sector_basis(const FockConfig& config, int k);
// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

struct OracleOptions {
  int sector_occupation = 1;
  bool check_leakage = true;
};

// ||[tau_t(W(f)), W(g)] Pi_K|| for labels on a torus with 2L = sites (or
// on Z windows mapped to the ring).
double commutator_oracle(const FockConfig& config, const Field& f, const Field& g, double t,
                         const OracleOptions& options = {});
double commutator_oracle(const FockSystem& system, const Field& f, const Field& g, double t,
                         const OracleOptions& options = {});

struct PerturbedEvolution {
  DenseOperator perturbed;    // alpha_t^P(A)
  DenseOperator unperturbed;  // alpha_t(A)
  double perturbation_norm = 0.0;
  double difference_norm = 0.0;  // ||alpha_t^P(A) - alpha_t(A)||
  double dyson_residual = 0.0;
};

// Full dense evolution under H + P and the residual of
// alpha_t^P(A) = alpha_t(A) + i int_0^t alpha_s^P([P, alpha_{t-s}(A)]) ds with
// composite Simpson on quad_steps (even) intervals.
PerturbedEvolution perturbed_evolve(const FockConfig& config, const Perturbation& perturbation, const DenseOperator& a,
                                    double t, int quad_steps);

enum class VolumeMode {
  // Harmonic dynamics of the large configuration in both cases; the
  // perturbation is restricted to the small sites or taken in full.
  perturbation_region,
  // Separate small and large systems; A ⊗ 1 in the large one.
  subsystem,
};

struct VolumeCompareOptions {
  VolumeMode mode = VolumeMode::perturbation_region;
  // perturbation_region uses the sector norm; subsystem uses full norms.
  int sector_occupation = 1;
};

struct VolumeComparison {
  std::vector<double> t;
  std::vector<double> differences;
  double max_difference = 0.0;
};

// A acts on the small system (dimension of `small`). The small sites are
// ring positions 0 .. small.sites - 1 of the large ring.
VolumeComparison volume_compare(const FockConfig& small, const FockConfig& large, const Perturbation& perturbation,
                                const DenseOperator& a, const std::vector<double>& t_grid,
                                const VolumeCompareOptions& options = {});

}  // namespace lrl

#endif  // LRLATTICE_FOCK_HPP
