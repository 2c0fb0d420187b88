#include "brprox/normed_space.hpp"

#include <cmath>

#include <fmt/format.h>

namespace brprox {

double lp_norm(const Vector& x, double r) {
  if (x.size() == 0) return 0.0;
  if (r == 2.0) return x.norm();
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc += std::pow(std::abs(x[i]) / scale, r);
  }
  return scale * std::pow(acc, 1.0 / r);
}

NormedSpace::NormedSpace(int dim, double p) : dim_(dim), p_(p) {
  if (dim < 1) {
    throw std::invalid_argument(fmt::format("space dimension must be >= 1, got {}", dim));
  }
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument(fmt::format("norm exponent must lie in (1, inf), got {}", p));
  }
  q_ = p / (p - 1.0);
}

void NormedSpace::check_dim(const Vector& x) const {
  if (x.size() != dim_) {
    throw DimensionError(
        fmt::format("vector of length {} in a space of dimension {}", x.size(), dim_));
  }
}

double NormedSpace::norm(const Vector& x) const {
  check_dim(x);
  return lp_norm(x, p_);
}

double NormedSpace::dual_norm(const Vector& xstar) const {
  check_dim(xstar);
  return lp_norm(xstar, q_);
}

double NormedSpace::j_value(const Vector& x) const {
  const double n = norm(x);
  return 0.5 * n * n;
}

namespace {

// ||x||_r^(2-r) |x_i|^(r-1) sign(x_i), written as ||x|| (|x_i|/||x||)^(r-1) sign(x_i)
// so that no intermediate over- or underflows.
Vector duality_map_r(const Vector& x, double r) {
  const double n = lp_norm(x, r);
  Vector out = Vector::Zero(x.size());
  if (n == 0.0) return out;
  if (r == 2.0) return x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    if (a == 0.0) continue;
    out[i] = std::copysign(n * std::pow(a / n, r - 1.0), x[i]);
  }
  return out;
}

}  // namespace

Vector NormedSpace::duality_map(const Vector& x) const {
  check_dim(x);
  return duality_map_r(x, p_);
}

Vector NormedSpace::dual_duality_map(const Vector& xstar) const {
  check_dim(xstar);
  return duality_map_r(xstar, q_);
}

double NormedSpace::pairing(const Vector& xstar, const Vector& x) const {
  check_dim(xstar);
  check_dim(x);
  return xstar.dot(x);
}

}  // namespace brprox
