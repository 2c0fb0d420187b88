#include "brprox/prox_bounded.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "brprox/proximal_core.hpp"

namespace brprox {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::unbounded: return "unbounded";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

// Golden-section minimum of t -> h(base + t e_axis) on [l, r]; returns the best value seen.
double golden_axis(const std::function<double(const Vector&)>& h, Vector& base, int axis, double l,
                   double r) {
  auto at = [&](double t) {
    Vector y = base;
    y[axis] = t;
    return h(y);
  };
  double best_t = base[axis];
  double best_v = h(base);
  auto consider = [&](double t, double v) {
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  };
  double x1 = r - kInvPhi * (r - l);
  double x2 = l + kInvPhi * (r - l);
  double f1 = at(x1);
  double f2 = at(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int iter = 0; iter < 100; ++iter) {
    if (f1 <= f2) {
      r = x2;
      x2 = x1;
      f2 = f1;
      x1 = r - kInvPhi * (r - l);
      if (!(x1 > l && x1 < r)) break;
      f1 = at(x1);
      consider(x1, f1);
    } else {
      l = x1;
      x1 = x2;
      f1 = f2;
      x2 = l + kInvPhi * (r - l);
      if (!(x2 > l && x2 < r)) break;
      f2 = at(x2);
      consider(x2, f2);
    }
  }
  base[axis] = best_t;
  return best_v;
}

// min of h over a grid on the ball of radius R, refined locally.
double ball_minimum(const std::function<double(const Vector&)>& h, const NormedSpace& space,
                    const std::vector<double>& nodes, double radius) {
  const int n = space.dim();
  const int count = n == 1 ? 2001 : (n == 2 ? 101 : 31);
  double best = kInf;
  Vector arg;
  auto offer = [&](const Vector& y) {
    const double v = h(y);
    if (v < best) {
      best = v;
      arg = y;
    }
  };
  for (const auto& y : grid_points(Box::cube(n, -radius, radius), count)) {
    if (n == 1 || space.norm(y) <= radius * (1.0 + 1e-12)) offer(y);
  }
  if (n == 1) {
    for (double t : nodes) {
      if (std::abs(t) <= radius) offer(Vector::Constant(1, t));
    }
  }
  if (!is_finite_value(best)) return best;
  const double step = 2.0 * radius / (count - 1);
  for (int sweep = 0; sweep < (n == 1 ? 1 : 4); ++sweep) {
    for (int axis = 0; axis < n; ++axis) {
      const double l = std::max(-radius, arg[axis] - step);
      const double r = std::min(radius, arg[axis] + step);
      if (r > l) best = std::min(best, golden_axis(h, arg, axis, l, r));
    }
  }
  return best;
}

}  // namespace

ProbeResult probe_infimum(const std::function<double(const Vector&)>& h, const NormedSpace& space,
                          const std::vector<double>& nodes, const ProbeSettings& s) {
  ProbeResult res;
  int stable = 0;
  int decreasing = 0;
  for (double radius = s.initial_radius; radius <= s.radius_cap; radius *= 2.0) {
    const double m = ball_minimum(h, space, nodes, radius);
    res.radius_reached = radius;
    if (!res.minima.empty()) {
      const double prev = res.minima.back();
      if (is_finite_value(prev) && is_finite_value(m) && std::abs(m - prev) <= s.stable_tol) {
        ++stable;
      } else {
        stable = 0;
      }
      if (prev - m >= s.decrease_step) {
        ++decreasing;
      } else {
        decreasing = 0;
      }
    }
    res.minima.push_back(m);
    if (stable >= s.stable_doublings) {
      res.verdict = Verdict::bounded;
      return res;
    }
    if (decreasing >= s.decrease_doublings) {
      res.verdict = Verdict::unbounded;
      return res;
    }
  }
  res.verdict = Verdict::inconclusive;
  return res;
}

ProbeResult boundedness_probe(const FunctionSpec& f, const NormedSpace& space, double lambda,
                              const ProbeSettings& settings) {
  return shifted_boundedness(f, space, Vector::Zero(space.dim()), lambda, settings);
}

ProbeResult shifted_boundedness(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                                double lambda, const ProbeSettings& settings) {
  if (f.dim != space.dim()) throw DimensionError("function and space dimensions differ");
  space.check_dim(x);
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const auto fv = f.value;
  auto h = [fv, &space, &x, lambda](const Vector& y) {
    const double v = fv(x + y);
    if (!is_finite_value(v)) return kInf;
    return v + lambda * space.j_value(y);
  };
  std::vector<double> nodes;
  if (space.dim() == 1) {
    for (double b : f.breakpoints) nodes.push_back(b - x[0]);
  }
  return probe_infimum(h, space, nodes, settings);
}

ProbeResult conjugate_domain_probe(const FunctionSpec& f, const NormedSpace& space,
                                   const Vector& xstar, const ProbeSettings& settings) {
  if (f.dim != space.dim()) throw DimensionError("function and space dimensions differ");
  space.check_dim(xstar);
  const auto fv = f.value;
  auto h = [fv, &xstar](const Vector& y) {
    const double v = fv(y);
    if (!is_finite_value(v)) return kInf;
    return v - xstar.dot(y);
  };
  return probe_infimum(h, space, f.breakpoints, settings);
}

ThresholdEstimate estimate_threshold(const FunctionSpec& f, const NormedSpace& space, double tol,
                                     const ProbeSettings& settings) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  ThresholdEstimate est;
  auto probe = [&](double lambda, const ProbeSettings& s) {
    const ProbeResult r = boundedness_probe(f, space, lambda, s);
    est.probes.push_back({lambda, r.verdict, r.radius_reached});
    return r.verdict;
  };

  double max_unbounded = 0.0;
  bool any_unbounded = false;
  bool any_conclusive = false;
  std::vector<std::pair<double, Verdict>> schedule;
  for (int k = -10; k <= 10; ++k) {
    const double lambda = std::ldexp(1.0, k);
    const Verdict v = probe(lambda, settings);
    schedule.emplace_back(lambda, v);
    if (v != Verdict::inconclusive) any_conclusive = true;
    if (v == Verdict::unbounded) {
      any_unbounded = true;
      max_unbounded = lambda;
    }
  }
  if (!any_conclusive) {
    throw NumericalError(fmt::format("every boundedness probe for {} was inconclusive", f.name));
  }

  double min_bounded = kInf;
  for (const auto& [lambda, v] : schedule) {
    if (v == Verdict::bounded && lambda > max_unbounded) {
      min_bounded = std::min(min_bounded, lambda);
    }
  }
  if (!is_finite_value(min_bounded)) {
    est.prox_bounded = false;
    est.lower = max_unbounded;
    est.upper = schedule.back().first;
    return est;
  }

  est.all_bounded = !any_unbounded && std::all_of(schedule.begin(), schedule.end(), [](auto& p) {
                      return p.second == Verdict::bounded;
                    });
  est.lower = any_unbounded ? max_unbounded : 0.0;
  est.upper = min_bounded;

  ProbeSettings wide = settings;
  wide.radius_cap = settings.radius_cap * 16.0;
  while (est.upper - est.lower > tol) {
    const double mid = 0.5 * (est.lower + est.upper);
    Verdict v = probe(mid, settings);
    if (v == Verdict::inconclusive) v = probe(mid, wide);
    if (v == Verdict::bounded) {
      est.upper = mid;
    } else if (v == Verdict::unbounded) {
      est.lower = mid;
    } else {
      break;
    }
  }
  est.converged = est.upper - est.lower <= tol;
  return est;
}

}  // namespace brprox
