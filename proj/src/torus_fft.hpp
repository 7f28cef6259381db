#ifndef LRLATTICE_TORUS_FFT_HPP
#define LRLATTICE_TORUS_FFT_HPP

// Unitary DFT on (-L, L]^d through FFTW. Buffers are in FFTW order: axis
// index i = x mod 2L, axis 0 slowest.

#include <fftw3.h>

#include <complex>
#include <vector>

#include "lrlattice/field.hpp"
#include "lrlattice/harmonic.hpp"

namespace lrl::detail {

class TorusFft {
 public:
  explicit TorusFft(const LatticeGeometry& torus);
  ~TorusFft();
  TorusFft(const TorusFft&) = delete;
  TorusFft& operator=(const TorusFft&) = delete;

  std::size_t size() const { return size_; }
  int side() const { return n_; }
  int dimension() const { return d_; }

  void forward(std::vector<cplx>& data) const;
  void backward(std::vector<cplx>& data) const;

  std::vector<cplx> to_buffer(const Field& f) const;
  Field from_buffer(const std::vector<cplx>& data) const;

  // Quasi-momentum of buffer position i, components 2 pi i_j / 2L.
  Momentum momentum(std::size_t i) const;
  // Buffer position of -k.
  std::size_t mirror(std::size_t i) const;

 private:
  void execute(std::vector<cplx>& data, int sign) const;

  LatticeGeometry geometry_;
  int d_;
  int n_;
  std::size_t size_;
  fftw_plan forward_plan_ = nullptr;
  fftw_plan backward_plan_ = nullptr;
};

}  // namespace lrl::detail

#endif  // LRLATTICE_TORUS_FFT_HPP
