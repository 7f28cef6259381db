#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "lrlattice/errors.hpp"
#include "lrlattice/fock.hpp"

namespace lrl {

std::size_t FockConfig::dimension() const {
  std::size_t d = 1;
  for (int i = 0; i < sites; ++i) d *= static_cast<std::size_t>(local_dimension());
  return d;
}

void FockConfig::validate() const {
  if (sites < 1 || sites > 3) throw std::invalid_argument("Fock oracle supports 1 to 3 sites");
  if (cutoff < 1) throw std::invalid_argument("Fock cutoff must be >= 1");
  params.validate();
  if (params.dimension() != 1) throw std::invalid_argument("Fock oracle works on a one-dimensional ring");
  if (std::pow(static_cast<double>(local_dimension()), sites) > static_cast<double>(kMaxFockDimension)) {
    throw std::invalid_argument("Fock space dimension exceeds the desk-scale guard of " +
                                std::to_string(kMaxFockDimension));
  }
}

int FockConfig::site_index(const Site& x) const { return ((x[0] % sites) + sites) % sites; }

std::vector<std::pair<int, int>> FockConfig::bonds() const {
  std::vector<std::pair<int, int>> out;
  if (boundary == FockBoundary::open) {
    for (int x = 0; x + 1 < sites; ++x) out.emplace_back(x, x + 1);
  } else if (sites > 1) {
    for (int x = 0; x < sites; ++x) out.emplace_back(x, (x + 1) % sites);
  }
  return out;
}

Eigen::MatrixXd ladder_matrix(int cutoff) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int i = 0; i < cutoff; ++i) a(i, i + 1) = std::sqrt(static_cast<double>(i + 1));
  return a;
}

Eigen::MatrixXd position_matrix(int cutoff) {
  const Eigen::MatrixXd a = ladder_matrix(cutoff);
  return (a + a.transpose()) / std::sqrt(2.0);
}

DenseOperator momentum_matrix(int cutoff) {
  const Eigen::MatrixXd a = ladder_matrix(cutoff);
  return cplx(0.0, 1.0 / std::sqrt(2.0)) * (a.transpose() - a).cast<cplx>();
}

namespace {

template <class Mat>
Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

void require_dense(const FockConfig& config) {
  config.validate();
  if (config.dimension() > kMaxDenseDimension) {
    throw std::invalid_argument("dense operator requested above dimension " + std::to_string(kMaxDenseDimension));
  }
}

std::vector<std::size_t> strides(const FockConfig& config) {
  std::vector<std::size_t> stride(static_cast<std::size_t>(config.sites));
  std::size_t s = 1;
  for (int x = config.sites - 1; x >= 0; --x) {
    stride[x] = s;
    s *= static_cast<std::size_t>(config.local_dimension());
  }
  return stride;
}

// target += coef * (local acting on ring positions `sites`, identity elsewhere)
template <class Mat, class Local>
void embed_local(Mat& target, const Local& local, const std::vector<int>& sites, const FockConfig& config,
                 typename Mat::Scalar coef) {
  const std::size_t ld = static_cast<std::size_t>(config.local_dimension());
  const std::size_t dim = config.dimension();
  const std::size_t local_dim = static_cast<std::size_t>(local.rows());
  const auto stride = strides(config);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(dim); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    std::size_t r = 0;
    std::size_t base = i;
    for (int x : sites) {
      const std::size_t digit = (i / stride[x]) % ld;
      r = r * ld + digit;
      base -= digit * stride[x];
    }
    for (std::size_t c = 0; c < local_dim; ++c) {
      const auto v = local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v == typename Local::Scalar(0)) continue;
      std::size_t j = base;
      std::size_t rem = c;
      for (int k = static_cast<int>(sites.size()) - 1; k >= 0; --k) {
        j += (rem % ld) * stride[sites[k]];
        rem /= ld;
      }
      target(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += coef * v;
    }
  }
}

Eigen::MatrixXd harmonic_real(const FockConfig& config) {
  config.validate();
  const auto dim = static_cast<Eigen::Index>(config.dimension());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::MatrixXd q = position_matrix(config.cutoff);
  const Eigen::MatrixXd a = ladder_matrix(config.cutoff);
  const Eigen::MatrixXd pa = (a.transpose() - a) / std::sqrt(2.0);  // p = i pa
  const Eigen::MatrixXd p2 = -pa * pa;
  const Eigen::MatrixXd q2 = q * q;
  const double w2 = config.params.omega * config.params.omega;
  const double lambda = config.params.lambda[0];
  const Eigen::MatrixXd onsite = p2 + w2 * q2;
  for (int x = 0; x < config.sites; ++x) embed_local(h, onsite, {x}, config, 1.0);
  if (lambda != 0.0) {
    const Eigen::MatrixXd qq = kron(q, q);
    for (const auto& [x, y] : config.bonds()) {
      embed_local(h, q2, {x}, config, lambda);
      embed_local(h, q2, {y}, config, lambda);
      embed_local(h, qq, {x, y}, config, -2.0 * lambda);
    }
  }
  return h;
}

}  // namespace

SiteOperators build_site_operators(const FockConfig& config) {
  require_dense(config);
  const auto dim = static_cast<Eigen::Index>(config.dimension());
  const DenseOperator q = position_matrix(config.cutoff).cast<cplx>();
  const DenseOperator p = momentum_matrix(config.cutoff);
  const DenseOperator a = ladder_matrix(config.cutoff).cast<cplx>();
  const DenseOperator ad = a.adjoint();
  SiteOperators ops;
  for (int x = 0; x < config.sites; ++x) {
    auto embed = [&](const DenseOperator& local) {
      DenseOperator m = DenseOperator::Zero(dim, dim);
      embed_local(m, local, {x}, config, cplx(1.0));
      return m;
    };
    ops.q.push_back(embed(q));
    ops.p.push_back(embed(p));
    ops.a.push_back(embed(a));
    ops.a_dag.push_back(embed(ad));
  }
  return ops;
}

DenseOperator build_hamiltonian(const FockConfig& config) {
  require_dense(config);
  return harmonic_real(config).cast<cplx>();
}

ProductOperator::ProductOperator(std::vector<DenseOperator> factors) : factors_(std::move(factors)), dim_(1) {
  if (factors_.empty()) throw std::invalid_argument("product operator needs at least one factor");
  for (const auto& f : factors_) {
    if (f.rows() != f.cols() || f.rows() != factors_.front().rows()) {
      throw std::invalid_argument("product operator factors must be square and of equal size");
    }
    dim_ *= static_cast<std::size_t>(f.rows());
  }
}

Eigen::MatrixXcd ProductOperator::apply(const Eigen::MatrixXcd& block) const {
  if (static_cast<std::size_t>(block.rows()) != dim_) throw std::invalid_argument("product operator size mismatch");
  const Eigen::Index ld = factors_.front().rows();
  Eigen::MatrixXcd out = block;
  const int n = static_cast<int>(factors_.size());
  // Apply factor x along tensor axis x: view each column as (outer, ld, inner).
  Eigen::Index inner = static_cast<Eigen::Index>(dim_);
  for (int x = 0; x < n; ++x) {
    inner /= ld;
    const Eigen::Index outer = static_cast<Eigen::Index>(dim_) / (inner * ld);
    const DenseOperator& f = factors_[x];
    if (f.isIdentity(0.0)) continue;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      for (Eigen::Index o = 0; o < outer; ++o) {
        // slice(i, k) = out(o * ld * inner + k * inner + i, c), an inner x ld matrix
        Eigen::Map<Eigen::MatrixXcd> slice(out.col(c).data() + o * ld * inner, inner, ld);
        slice = (slice * f.transpose()).eval();
      }
    }
  }
  return out;
}

ProductOperator ProductOperator::adjoint() const {
  std::vector<DenseOperator> adj;
  for (const auto& f : factors_) adj.push_back(f.adjoint());
  return ProductOperator(std::move(adj));
}

DenseOperator ProductOperator::to_dense() const {
  DenseOperator out = factors_.front();
  for (std::size_t i = 1; i < factors_.size(); ++i) out = kron(out, factors_[i]);
  return out;
}

std::vector<cplx> fock_label(const FockConfig& config, const Field& f) {
  if (f.dimension() != 1) throw std::invalid_argument("Fock labels live on one-dimensional lattices");
  std::vector<cplx> out(static_cast<std::size_t>(config.sites), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values()[i] != cplx(0.0)) out[config.site_index(f.geometry().site(i))] += f.values()[i];
  }
  return out;
}

DenseOperator single_site_weyl(int cutoff, cplx z) {
  // exp(i G) with G = Re z q + Im z p Hermitian
  const DenseOperator g = z.real() * position_matrix(cutoff).cast<cplx>() + z.imag() * momentum_matrix(cutoff);
  if (z == cplx(0.0)) return DenseOperator::Identity(cutoff + 1, cutoff + 1);
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(g);
  const Eigen::VectorXcd phases = (cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ProductOperator weyl_product(const FockConfig& config, const std::vector<cplx>& label) {
  config.validate();
  if (static_cast<int>(label.size()) != config.sites) throw std::invalid_argument("label length must equal site count");
  std::vector<DenseOperator> factors;
  for (const cplx& z : label) factors.push_back(single_site_weyl(config.cutoff, z));
  return ProductOperator(std::move(factors));
}

double vacuum_leakage(const FockConfig& config, const std::vector<cplx>& label) {
  const ProductOperator w = weyl_product(config, label);
  Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(config.dimension()), 1);
  vac(0, 0) = 1.0;
  const Eigen::MatrixXcd psi = w.apply(vac);
  const int keep = config.cutoff - 5;
  const auto stride = strides(config);
  const std::size_t ld = static_cast<std::size_t>(config.local_dimension());
  double leak = 0.0;
  for (std::size_t i = 0; i < config.dimension(); ++i) {
    bool inside = true;
    for (int x = 0; x < config.sites; ++x) inside = inside && static_cast<int>((i / stride[x]) % ld) <= keep;
    if (!inside) leak += std::norm(psi(static_cast<Eigen::Index>(i), 0));
  }
  return std::sqrt(leak);
}

void check_truncation(const FockConfig& config, const std::vector<cplx>& label) {
  const double leak = vacuum_leakage(config, label);
  if (leak > kMaxLeakage) {
    throw TruncationError("Fock cutoff " + std::to_string(config.cutoff) + " too small for the label (leakage " +
                          std::to_string(leak) + ")");
  }
}

DenseOperator weyl_matrix(const FockConfig& config, const Field& f) {
  require_dense(config);
  const auto label = fock_label(config, f);
  check_truncation(config, label);
  return weyl_product(config, label).to_dense();
}

void BoundedInteraction::add(std::vector<Site> sites, DenseOperator op) {
  if (sites.empty()) throw std::invalid_argument("interaction term needs at least one site");
  if (op.rows() != op.cols()) throw std::invalid_argument("interaction term must be square");
  const double local = std::pow(static_cast<double>(op.rows()), 1.0 / static_cast<double>(sites.size()));
  if (std::abs(local - std::round(local)) > 1e-9) {
    throw std::invalid_argument("interaction term size is not a power of the local dimension");
  }
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, op.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("interaction term must be self-adjoint");
  }
  terms_.push_back({std::move(sites), std::move(op)});
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double interaction_norm_a(const BoundedInteraction& interaction, const DecayProfile& profile,
                          const LatticeGeometry& geometry) {
  std::map<std::pair<Site, Site>, double> sums;
  for (const auto& term : interaction.terms()) {
    const double norm = operator_norm(term.op);
    for (const Site& x : term.sites) {
      for (const Site& y : term.sites) sums[{x, y}] += norm;
    }
  }
  double best = 0.0;
  for (const auto& [key, s] : sums) best = std::max(best, s / profile(distance(geometry, key.first, key.second)));
  return best;
}

namespace {

std::vector<int> ring_positions(const FockConfig& config, const std::vector<Site>& sites) {
  std::vector<int> out;
  for (const Site& x : sites) out.push_back(config.site_index(x));
  std::set<int> unique(out.begin(), out.end());
  if (unique.size() != out.size()) throw std::invalid_argument("term support maps twice onto one ring position");
  return out;
}

// Adds the perturbation to `target` (complex, full dimension).
void add_perturbation(DenseOperator& target, const FockConfig& config, const Perturbation& perturbation) {
  if (const auto* fam = std::get_if<PerturbationFamily>(&perturbation)) {
    for (const auto& m : fam->measures()) {
      // positions may coincide on a small ring; labels then add up
      std::vector<int> pos;
      for (const Site& x : m.support()) pos.push_back(config.site_index(x));
      std::vector<int> unique = pos;
      std::sort(unique.begin(), unique.end());
      unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
      m.for_each_atom([&](const std::vector<cplx>& z, double w) {
        std::vector<cplx> acc(unique.size(), 0.0);
        for (std::size_t i = 0; i < pos.size(); ++i) {
          acc[std::lower_bound(unique.begin(), unique.end(), pos[i]) - unique.begin()] += z[i];
        }
        DenseOperator local = single_site_weyl(config.cutoff, acc[0]);
        for (std::size_t i = 1; i < acc.size(); ++i) local = kron(local, single_site_weyl(config.cutoff, acc[i]));
        embed_local(target, local, unique, config, cplx(w));
      });
    }
  } else if (const auto* inter = std::get_if<BoundedInteraction>(&perturbation)) {
    for (const auto& term : inter->terms()) {
      const auto pos = ring_positions(config, term.sites);
      const double expected = std::pow(static_cast<double>(config.local_dimension()), static_cast<double>(pos.size()));
      if (static_cast<double>(term.op.rows()) != expected) {
        throw std::invalid_argument("interaction term size does not match the Fock cutoff");
      }
      embed_local(target, term.op, pos, config, cplx(1.0));
    }
  }
}

bool perturbation_present(const Perturbation& p) {
  if (const auto* fam = std::get_if<PerturbationFamily>(&p)) return !fam->empty();
  if (const auto* inter = std::get_if<BoundedInteraction>(&p)) return !inter->empty();
  return false;
}

}  // namespace

DenseOperator perturbation_matrix(const FockConfig& config, const Perturbation& perturbation) {
  require_dense(config);
  const auto dim = static_cast<Eigen::Index>(config.dimension());
  DenseOperator p = DenseOperator::Zero(dim, dim);
  add_perturbation(p, config, perturbation);
  return p;
}

namespace {

void eigh_real(Eigen::MatrixXd& a, Eigen::VectorXd& w) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  if (n == 0) return;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
}

void eigh_complex(Eigen::MatrixXcd& a, Eigen::VectorXd& w) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  if (n == 0) return;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
}

int number_parity(std::size_t i, const FockConfig& config) {
  const std::size_t ld = static_cast<std::size_t>(config.local_dimension());
  int total = 0;
  for (int x = 0; x < config.sites; ++x) {
    total += static_cast<int>(i % ld);
    i /= ld;
  }
  return total & 1;
}

}  // namespace

FockSystem::FockSystem(FockConfig config, const Perturbation& perturbation)
    : config_(std::move(config)), dim_(0) {
  config_.validate();
  dim_ = config_.dimension();
  const auto n = static_cast<Eigen::Index>(dim_);

  Eigen::MatrixXd hr = harmonic_real(config_);
  Eigen::MatrixXcd hc;
  if (perturbation_present(perturbation)) {
    DenseOperator p = DenseOperator::Zero(n, n);
    add_perturbation(p, config_, perturbation);
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    // mirrored atoms of real labels give a real matrix up to eigensolver roundoff
    if (p.imag().cwiseAbs().maxCoeff() <= 1e-13 * scale) {
      hr += p.real();
    } else {
      real_ = false;
      hc = hr.cast<cplx>() + p;
      hr.resize(0, 0);
    }
  }

  // Parity blocks when the coupling between even and odd states vanishes.
  std::vector<int> parity(dim_);
  for (std::size_t i = 0; i < dim_; ++i) parity[i] = number_parity(i, config_);
  double cross = 0.0, scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = real_ ? std::abs(hr(i, j)) : std::abs(hc(i, j));
      scale = std::max(scale, v);
      if (parity[i] != parity[j]) cross = std::max(cross, v);
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  if (cross <= 1e-13 * std::max(scale, 1.0)) {
    groups.resize(2);
    for (Eigen::Index i = 0; i < n; ++i) groups[parity[i]].push_back(i);
  } else {
    groups.resize(1);
    for (Eigen::Index i = 0; i < n; ++i) groups[0].push_back(i);
  }

  for (auto& basis : groups) {
    if (basis.empty()) continue;
    Block b;
    b.basis = basis;
    const auto m = static_cast<Eigen::Index>(basis.size());
    if (real_) {
      b.real_vectors.resize(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) b.real_vectors(i, j) = hr(basis[i], basis[j]);
      }
      eigh_real(b.real_vectors, b.values);
    } else {
      b.complex_vectors.resize(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) b.complex_vectors(i, j) = hc(basis[i], basis[j]);
      }
      eigh_complex(b.complex_vectors, b.values);
    }
    blocks_.push_back(std::move(b));
  }
}

Eigen::VectorXd FockSystem::eigenvalues() const {
  std::vector<double> all;
  for (const auto& b : blocks_) all.insert(all.end(), b.values.data(), b.values.data() + b.values.size());
  std::sort(all.begin(), all.end());
  return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

void FockSystem::eigensystem(Eigen::MatrixXcd& vectors, Eigen::VectorXd& values) const {
  if (dim_ > kMaxDenseDimension) throw std::invalid_argument("dense eigensystem requested above the dense guard");
  const auto n = static_cast<Eigen::Index>(dim_);
  vectors = Eigen::MatrixXcd::Zero(n, n);
  values.resize(n);
  Eigen::Index col = 0;
  for (const auto& b : blocks_) {
    const auto m = static_cast<Eigen::Index>(b.basis.size());
    for (Eigen::Index k = 0; k < m; ++k, ++col) {
      values(col) = b.values(k);
      for (Eigen::Index i = 0; i < m; ++i) {
        vectors(b.basis[i], col) = real_ ? cplx(b.real_vectors(i, k)) : b.complex_vectors(i, k);
      }
    }
  }
}

Eigen::MatrixXcd FockSystem::propagate(const Eigen::MatrixXcd& block, double t) const {
  if (static_cast<std::size_t>(block.rows()) != dim_) throw std::invalid_argument("state block has wrong dimension");
  Eigen::MatrixXcd out(block.rows(), block.cols());
  for (const auto& b : blocks_) {
    const auto m = static_cast<Eigen::Index>(b.basis.size());
    Eigen::MatrixXcd xb(m, block.cols());
    for (Eigen::Index i = 0; i < m; ++i) xb.row(i) = block.row(b.basis[i]);
    Eigen::MatrixXcd coeff;
    if (real_) {
      const Eigen::MatrixXd re = b.real_vectors.transpose() * xb.real();
      const Eigen::MatrixXd im = b.real_vectors.transpose() * xb.imag();
      coeff = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    } else {
      coeff = b.complex_vectors.adjoint() * xb;
    }
    for (Eigen::Index k = 0; k < m; ++k) coeff.row(k) *= std::polar(1.0, -b.values(k) * t);
    Eigen::MatrixXcd yb;
    if (real_) {
      const Eigen::MatrixXd re = b.real_vectors * coeff.real();
      const Eigen::MatrixXd im = b.real_vectors * coeff.imag();
      yb = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    } else {
      yb = b.complex_vectors * coeff;
    }
    for (Eigen::Index i = 0; i < m; ++i) out.row(b.basis[i]) = yb.row(i);
  }
  return out;
}

DenseOperator FockSystem::propagator(double t) const {
  if (dim_ > kMaxDenseDimension) throw std::invalid_argument("dense propagator requested above the dense guard");
  const auto n = static_cast<Eigen::Index>(dim_);
  return propagate(Eigen::MatrixXcd::Identity(n, n), t);
}

DenseOperator FockSystem::heisenberg_evolve(const DenseOperator& a, double t) const {
  const DenseOperator u = propagator(t);
  return u.adjoint() * a * u;
}

Eigen::MatrixXcd FockSystem::evolve_apply(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& a,
                                          const Eigen::MatrixXcd& block, double t) const {
  return propagate(a(propagate(block, t)), -t);
}

Eigen::MatrixXcd sector_basis(const FockConfig& config, int k) {
  if (k < 0 || k > config.cutoff) throw std::invalid_argument("sector occupation must lie in [0, cutoff]");
  const auto stride = strides(config);
  const std::size_t ld = static_cast<std::size_t>(config.local_dimension());
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < config.dimension(); ++i) {
    bool inside = true;
    for (int x = 0; x < config.sites; ++x) inside = inside && static_cast<int>((i / stride[x]) % ld) <= k;
    if (inside) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(config.dimension()),
                                                static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
  return out;
}

double commutator_oracle(const FockSystem& system, const Field& f, const Field& g, double t,
                         const OracleOptions& options) {
  const FockConfig& config = system.config();
  const auto lf = fock_label(config, f);
  const auto lg = fock_label(config, g);
  if (options.check_leakage) {
    check_truncation(config, lf);
    check_truncation(config, lg);
  }
  const ProductOperator wf = weyl_product(config, lf);
  const ProductOperator wg = weyl_product(config, lg);
  const auto apply_f = [&](const Eigen::MatrixXcd& x) { return wf.apply(x); };
  const Eigen::MatrixXcd pi = sector_basis(config, options.sector_occupation);
  const Eigen::MatrixXcd first = system.evolve_apply(apply_f, wg.apply(pi), t);
  const Eigen::MatrixXcd second = wg.apply(system.evolve_apply(apply_f, pi, t));
  return operator_norm(first - second);
}

double commutator_oracle(const FockConfig& config, const Field& f, const Field& g, double t,
                         const OracleOptions& options) {
  return commutator_oracle(FockSystem(config), f, g, t, options);
}

PerturbedEvolution perturbed_evolve(const FockConfig& config, const Perturbation& perturbation, const DenseOperator& a,
                                    double t, int quad_steps) {
  require_dense(config);
  if (quad_steps < 2 || quad_steps % 2 != 0) throw std::invalid_argument("Simpson quadrature needs an even step count");
  const auto n = static_cast<Eigen::Index>(config.dimension());
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument("operator dimension does not match the Fock space");
  const FockSystem free_sys(config);
  const FockSystem pert_sys(config, perturbation);
  const DenseOperator p = perturbation_matrix(config, perturbation);

  // Everything runs in eigenbases, where both evolutions act by phases:
  // alpha_u(X)_ij = X_ij e^{i (E_i - E_j) u}.
  Eigen::MatrixXcd v0, vp;
  Eigen::VectorXd e0, ep;
  free_sys.eigensystem(v0, e0);
  pert_sys.eigensystem(vp, ep);
  const auto phased = [n](const Eigen::MatrixXcd& x, const Eigen::VectorXd& e, double u) {
    Eigen::MatrixXcd y(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) y(i, j) = x(i, j) * std::polar(1.0, (e(i) - e(j)) * u);
    }
    return y;
  };
  const Eigen::MatrixXcd a0 = v0.adjoint() * a * v0;
  const Eigen::MatrixXcd ap = vp.adjoint() * a * vp;
  const Eigen::MatrixXcd pp = vp.adjoint() * p * vp;
  const Eigen::MatrixXcd w = vp.adjoint() * v0;  // free basis -> perturbed basis

  PerturbedEvolution out;
  const Eigen::MatrixXcd pert_p = phased(ap, ep, t);
  const Eigen::MatrixXcd free_p = w * phased(a0, e0, t) * w.adjoint();
  out.perturbed = vp * pert_p * vp.adjoint();
  out.unperturbed = vp * free_p * vp.adjoint();
  out.perturbation_norm = operator_norm(p);
  out.difference_norm = operator_norm(pert_p - free_p);

  // i int_0^t alpha_s^P([P, alpha_{t-s}(A)]) ds, composite Simpson
  const double h = t / quad_steps;
  Eigen::MatrixXcd integral = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j <= quad_steps; ++j) {
    const double s = j * h;
    const double wt = (j == 0 || j == quad_steps) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    const Eigen::MatrixXcd inner = w * phased(a0, e0, t - s) * w.adjoint();
    const Eigen::MatrixXcd comm = pp * inner - inner * pp;
    integral += wt * phased(comm, ep, s);
  }
  integral *= cplx(0.0, h / 3.0);
  out.dyson_residual = operator_norm(pert_p - free_p - integral);
  return out;
}

namespace {

Perturbation restrict_perturbation(const Perturbation& p, const FockConfig& large, int small_sites) {
  const auto inside = [&](const Site& x) { return large.site_index(x) < small_sites; };
  if (const auto* fam = std::get_if<PerturbationFamily>(&p)) return fam->restricted_to(inside);
  if (const auto* inter = std::get_if<BoundedInteraction>(&p)) {
    BoundedInteraction out;
    for (const auto& term : inter->terms()) {
      if (std::all_of(term.sites.begin(), term.sites.end(), inside)) out.add(term.sites, term.op);
    }
    return out;
  }
  return std::monostate{};
}

// (A ⊗ 1) applied to columns, A on the leading `small` tensor factors.
Eigen::MatrixXcd apply_embedded(const DenseOperator& a, const Eigen::MatrixXcd& block, Eigen::Index rest) {
  Eigen::MatrixXcd out(block.rows(), block.cols());
  const Eigen::MatrixXcd at = a.transpose();
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    Eigen::Map<const Eigen::MatrixXcd> in(block.col(c).data(), rest, a.rows());
    Eigen::Map<Eigen::MatrixXcd> res(out.col(c).data(), rest, a.rows());
    res = in * at;
  }
  return out;
}

}  // namespace

VolumeComparison volume_compare(const FockConfig& small, const FockConfig& large, const Perturbation& perturbation,
                                const DenseOperator& a, const std::vector<double>& t_grid,
                                const VolumeCompareOptions& options) {
  small.validate();
  large.validate();
  if (small.sites > large.sites) throw std::invalid_argument("small volume has more sites than the large one");
  if (small.cutoff != large.cutoff) throw std::invalid_argument("volume comparison needs equal cutoffs");
  const auto ds = static_cast<Eigen::Index>(small.dimension());
  if (a.rows() != ds || a.cols() != ds) throw std::invalid_argument("operator must act on the small volume");
  if (t_grid.empty()) throw std::invalid_argument("volume comparison needs a t grid");
  const Eigen::Index rest = static_cast<Eigen::Index>(large.dimension()) / ds;
  const Perturbation restricted = restrict_perturbation(perturbation, large, small.sites);

  VolumeComparison out;
  out.t = t_grid;
  if (options.mode == VolumeMode::perturbation_region) {
    const FockSystem region_sys(large, restricted);
    const FockSystem full_sys(large, perturbation);
    const Eigen::MatrixXcd pi = sector_basis(large, options.sector_occupation);
    const auto apply_a = [&](const Eigen::MatrixXcd& x) { return apply_embedded(a, x, rest); };
    for (double t : t_grid) {
      const Eigen::MatrixXcd diff = region_sys.evolve_apply(apply_a, pi, t) - full_sys.evolve_apply(apply_a, pi, t);
      out.differences.push_back(operator_norm(diff));
    }
  } else {
    require_dense(large);
    const FockSystem small_sys(small, restricted);
    const FockSystem large_sys(large, perturbation);
    const DenseOperator id_rest = DenseOperator::Identity(rest, rest);
    const DenseOperator a_large = kron(a, id_rest);
    for (double t : t_grid) {
      const DenseOperator lhs = kron(small_sys.heisenberg_evolve(a, t), id_rest);
      out.differences.push_back(operator_norm(lhs - large_sys.heisenberg_evolve(a_large, t)));
    }
  }
  out.max_difference = *std::max_element(out.differences.begin(), out.differences.end());
  return out;
}

}  // namespace lrl
