#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace numrange {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

/// Hermitian pairing <u, v> = sum_i u_i * conj(v_i).
/// Matches the duality pairing on the ball: for x on a sphere the support
/// functional is x itself, so <h(x), x*> is pairing(h(x), x).
template <typename U, typename V>
Complex pairing(const U& u, const V& v) {
  return v.dot(u);
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfiniteInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace numrange
