#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace dadg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Malformed input: bad dimensions, out-of-range values, broken schedules,
// invalid configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation left the representable regime: Riccati finite escape,
// non-finite simulation state. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          double when = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), when_(when) {}

  // Time at which the failure was detected, NaN if not applicable.
  double when() const { return when_; }

 private:
  double when_;
};

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace dadg
