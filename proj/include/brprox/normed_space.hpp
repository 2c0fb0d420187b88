#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace brprox {

using Vector = Eigen::VectorXd;

/// Thrown when a vector's length does not match the space dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// R^n equipped with a smooth l_p norm, p in (1, inf).
///
/// The pairing between the space and its dual is the ordinary dot product; the
/// dual norm is the l_q norm with 1/p + 1/q = 1. Because the norm is smooth
/// and strictly convex, the duality map J = grad(1/2 ||.||^2) is single valued.
class NormedSpace {
 public:
  explicit NormedSpace(int dim, double p = 2.0);

  int dim() const { return dim_; }
  double p() const { return p_; }
  double q() const { return q_; }
  bool euclidean() const { return p_ == 2.0; }

  double norm(const Vector& x) const;
  double dual_norm(const Vector& xstar) const;

  /// j(x) = 1/2 ||x||^2
  double j_value(const Vector& x) const;

  /// J(x) = ||x||^(2-p) (|x_i|^(p-1) sign x_i)_i, the gradient of j.
  Vector duality_map(const Vector& x) const;

  /// Inverse of the duality map, i.e. the duality map of the dual space.
  Vector dual_duality_map(const Vector& xstar) const;

  double pairing(const Vector& xstar, const Vector& x) const;

  void check_dim(const Vector& x) const;

 private:
  int dim_;
  double p_;
  double q_;
};

/// l_r norm of x for r in (1, inf); scaled to avoid overflow.
double lp_norm(const Vector& x, double r);

}  // namespace brprox
