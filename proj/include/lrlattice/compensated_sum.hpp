#ifndef LRLATTICE_COMPENSATED_SUM_HPP
#define LRLATTICE_COMPENSATED_SUM_HPP

#include <cmath>
#include <complex>

namespace lrl {

// Neumaier's variant of Kahan summation. The result depends on the order of
// the additions, so every lattice sum in the library feeds terms in a fixed
// order (shell by shell, lexicographic inside a shell).
template <class T>
class NeumaierSum {
 public:
  NeumaierSum() = default;
  explicit NeumaierSum(T initial) : sum_(initial) {}

  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  NeumaierSum& operator+=(T x) {
    add(x);
    return *this;
  }

  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

template <class T>
class NeumaierSum<std::complex<T>> {
 public:
  void add(std::complex<T> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }

  NeumaierSum& operator+=(std::complex<T> x) {
    add(x);
    return *this;
  }

  std::complex<T> value() const { return {re_.value(), im_.value()}; }

 private:
  NeumaierSum<T> re_;
  NeumaierSum<T> im_;
};

}  // namespace lrl

#endif  // LRLATTICE_COMPENSATED_SUM_HPP
