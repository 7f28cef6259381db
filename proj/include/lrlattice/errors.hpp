#ifndef LRLATTICE_ERRORS_HPP
#define LRLATTICE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace lrl {

// Dispersion vanishes at the requested quasi-momentum (only omega = 0, k = 0).
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Label outside the massless domain: nonzero mean of the position part when
// omega = 0 on a torus.
class D0ViolationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Brillouin-zone quadrature did not stabilise within the refinement budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_tolerance, int points_per_axis)
      : std::runtime_error(what),
        achieved_tolerance_(achieved_tolerance),
        points_per_axis_(points_per_axis) {}

  double achieved_tolerance() const { return achieved_tolerance_; }
  int points_per_axis() const { return points_per_axis_; }

 private:
  double achieved_tolerance_;
  int points_per_axis_;
};

// Kernel truncation window cannot be certified below the requested
// tolerance without exceeding the allowed size.
class WindowTooSmallError : public std::runtime_error {
 public:
  WindowTooSmallError(const std::string& what, int minimal_window)
      : std::runtime_error(what), minimal_window_(minimal_window) {}

  int minimal_window() const { return minimal_window_; }

 private:
  int minimal_window_;
};

// Fock-space truncation too coarse for the requested operator.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario validation; carries every problem found, not only the first.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out;
    for (const auto& p : problems) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace lrl

#endif  // LRLATTICE_ERRORS_HPP
