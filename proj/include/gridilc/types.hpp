#ifndef GRIDILC_TYPES_HPP
#define GRIDILC_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gridilc {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatX<double>;
using Vec = VecX<double>;

// Hours per cycle. The lifted representation is built around this.
inline constexpr int kHoursPerCycle = 24;

// Thrown for malformed inputs (bad parameters, bad configuration).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical procedure cannot deliver a result
// (solver step underflow, singular block, eigen-solver failure).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridilc

#endif  // GRIDILC_TYPES_HPP
