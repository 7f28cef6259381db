#include "torus_fft.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace lrl::detail {

namespace {

// The FFTW planner is not thread-safe; execution with new-array execute is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

TorusFft::TorusFft(const LatticeGeometry& torus)
    : geometry_(torus), d_(torus.dimension()), n_(torus.side()), size_(torus.size()) {
  if (!torus.is_torus()) throw std::invalid_argument("torus DFT requires a torus geometry");
  std::vector<int> dims(static_cast<std::size_t>(d_), n_);
  std::vector<cplx> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft(d_, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  backward_plan_ = fftw_plan_dft(d_, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!forward_plan_ || !backward_plan_) throw std::runtime_error("FFTW plan creation failed");
}

TorusFft::~TorusFft() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(forward_plan_);
  if (backward_plan_) fftw_destroy_plan(backward_plan_);
}

void TorusFft::execute(std::vector<cplx>& data, int sign) const {
  if (data.size() != size_) throw std::invalid_argument("DFT buffer has wrong size");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(sign == FFTW_FORWARD ? forward_plan_ : backward_plan_, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(size_));
  for (auto& v : data) v *= scale;
}

void TorusFft::forward(std::vector<cplx>& data) const { execute(data, FFTW_FORWARD); }

void TorusFft::backward(std::vector<cplx>& data) const { execute(data, FFTW_BACKWARD); }

std::vector<cplx> TorusFft::to_buffer(const Field& f) const {
  if (!(f.geometry() == geometry_)) throw std::invalid_argument("field geometry does not match the DFT torus");
  std::vector<cplx> out(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const Site x = geometry_.site(i);
    std::size_t j = 0;
    for (int a = 0; a < d_; ++a) j = j * n_ + static_cast<std::size_t>((x[a] + n_) % n_);
    out[j] = f.values()[i];
  }
  return out;
}

Field TorusFft::from_buffer(const std::vector<cplx>& data) const {
  Field f(geometry_);
  for (std::size_t i = 0; i < size_; ++i) {
    const Site x = geometry_.site(i);
    std::size_t j = 0;
    for (int a = 0; a < d_; ++a) j = j * n_ + static_cast<std::size_t>((x[a] + n_) % n_);
    f.values()[i] = data[j];
  }
  return f;
}

Momentum TorusFft::momentum(std::size_t i) const {
  Momentum k{};
  for (int a = d_ - 1; a >= 0; --a) {
    k[a] = 2.0 * std::numbers::pi * static_cast<double>(i % n_) / n_;
    i /= n_;
  }
  return k;
}

std::size_t TorusFft::mirror(std::size_t i) const {
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int a = d_ - 1; a >= 0; --a) {
    const std::size_t c = i % n_;
    i /= n_;
    out += ((n_ - c) % n_) * stride;
    stride *= n_;
  }
  return out;
}

}  // namespace lrl::detail
