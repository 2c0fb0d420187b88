#include "brprox/proximal_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

namespace brprox {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

struct Incumbent {
  Vector point;
  double value = kInf;

  void offer(const Vector& p, double v) {
    if (v < value || (v == value && point.size() > 0 && lex_less(p, point)) ||
        (point.size() == 0 && !std::isnan(v))) {
      point = p;
      value = v;
    }
  }
};

Vector scalar(double t) { return Vector::Constant(1, t); }

int default_cells(int dim) {
  switch (dim) {
    case 1: return 2000;
    case 2: return 200;
    default: return 60;
  }
}

// Lower bound of g on [a, b] from node values, |g''| <= M and/or a Lipschitz constant.
double cell_lower_bound(double ga, double gb, double w, const SearchObjective& obj) {
  if (!is_finite_value(ga) || !is_finite_value(gb)) return kInf;
  double lb = -kInf;
  if (obj.curvature) {
    const double m = *obj.curvature;
    if (m <= 0.0) {
      lb = std::min(ga, gb);
    } else {
      // g(a + s w) >= ga + (gb - ga) s - (M w^2 / 2) s (1 - s)
      const double q = 0.5 * m * w * w;
      const double lin = gb - ga - q;
      const double s = std::clamp(-lin / (2.0 * q), 0.0, 1.0);
      lb = q * s * s + lin * s + ga;
    }
  }
  if (obj.lipschitz) {
    const double l = *obj.lipschitz;
    const double lb2 = std::abs(ga - gb) <= l * w ? 0.5 * (ga + gb - l * w) : std::min(ga, gb) - l * w;
    lb = std::max(lb, lb2);
  }
  return lb;
}

ProxResult minimize_1d(const SearchObjective& obj, const Box& box, double tol,
                       const ProxOptions& options) {
  const double lo = box.lo[0];
  const double hi = box.hi[0];
  const int cells = options.cells_per_axis > 0 ? options.cells_per_axis : default_cells(1);
  if (!obj.curvature && !obj.lipschitz) {
    throw PreconditionError("1-D search needs a curvature or a Lipschitz bound");
  }

  ProxResult res;
  res.search_box = box;
  std::map<double, double> nodes;
  Incumbent best;
  auto eval = [&](double t) {
    auto it = nodes.find(t);
    if (it != nodes.end()) return it->second;
    const double v = obj.value(scalar(t));
    ++res.evaluations;
    nodes.emplace(t, v);
    best.offer(scalar(t), v);
    return v;
  };

  if (lo == hi) {
    eval(lo);
    if (!is_finite_value(best.value)) {
      throw PreconditionError("objective is +inf on the whole search box");
    }
    res.minimizer = best.point;
    res.objective_value = best.value;
    return res;
  }

  const double h = (hi - lo) / cells;
  res.grid_resolution = h;
  for (int k = 0; k <= cells; ++k) eval(k == cells ? hi : lo + k * h);
  for (double t : obj.nodes) {
    if (t >= lo && t <= hi) eval(t);
  }
  if (!is_finite_value(best.value)) {
    throw PreconditionError("objective is +inf on the whole search grid");
  }

  struct Cell {
    double a, b, ga, gb;
  };
  std::vector<Cell> active;
  for (auto it = nodes.begin(); std::next(it) != nodes.end(); ++it) {
    auto nx = std::next(it);
    active.push_back({it->first, nx->first, it->second, nx->second});
  }

  double settled_lb = kInf;
  while (!active.empty()) {
    std::vector<Cell> next;
    for (const Cell& c : active) {
      const double w = c.b - c.a;
      const double lb = cell_lower_bound(c.ga, c.gb, w, obj);
      if (lb >= best.value - 0.5 * tol) {
        settled_lb = std::min(settled_lb, lb);
        continue;
      }
      const double m = c.a + 0.5 * w;
      if (!(m > c.a && m < c.b)) {
        settled_lb = std::min(settled_lb, lb);
        continue;
      }
      const double gm = eval(m);
      next.push_back({c.a, m, c.ga, gm});
      next.push_back({m, c.b, gm, c.gb});
    }
    if (res.evaluations > options.max_evaluations) {
      throw ToleranceNotReachedError(fmt::format(
          "branch and bound exceeded {} evaluations before reaching gap {}", options.max_evaluations,
          tol));
    }
    active = std::move(next);
  }

  // Local refinement inside the two cells adjacent to the incumbent node.
  // Points a few ulps off a breakpoint tie with it after rounding and would win
  // the smallest-point rule on the wrong side of the kink.
  auto off_node = [&](double t) {
    for (double b : obj.nodes) {
      if (std::abs(t - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) {
        return false;
      }
    }
    return true;
  };
  const double tb = best.point[0];
  auto it = nodes.find(tb);
  std::vector<std::pair<double, double>> brackets;
  if (it != nodes.begin()) brackets.emplace_back(std::prev(it)->first, tb);
  if (std::next(it) != nodes.end()) brackets.emplace_back(tb, std::next(it)->first);
  for (auto [a, b] : brackets) {
    if (!is_finite_value(nodes[a]) || !is_finite_value(nodes[b])) continue;
    double l = a;
    double r = b;
    if (obj.gradient) {
      for (int iter = 0; iter < 200; ++iter) {
        const double m = l + 0.5 * (r - l);
        if (!(m > l && m < r)) break;
        if (obj.gradient(scalar(m))[0] < 0.0) {
          l = m;
        } else {
          r = m;
        }
      }
      for (double t : {l, r, l + 0.5 * (r - l)}) {
        if (t > a && t < b && off_node(t)) eval(t);
      }
    } else {
      constexpr double kInvPhi = 0.6180339887498949;
      double x1 = r - kInvPhi * (r - l);
      double x2 = l + kInvPhi * (r - l);
      double f1 = eval(x1);
      double f2 = eval(x2);
      for (int iter = 0; iter < 120 && r - l > 0.0; ++iter) {
        if (f1 <= f2) {
          r = x2;
          x2 = x1;
          f2 = f1;
          x1 = r - kInvPhi * (r - l);
          if (!(x1 > l && x1 < r) || !off_node(x1)) break;
          f1 = eval(x1);
        } else {
          l = x1;
          x1 = x2;
          f1 = f2;
          x2 = l + kInvPhi * (r - l);
          if (!(x2 > l && x2 < r) || !off_node(x2)) break;
          f2 = eval(x2);
        }
      }
    }
  }

  res.minimizer = best.point;
  res.objective_value = obj.value(best.point);
  res.certified_gap = std::max(0.0, res.objective_value - settled_lb);
  if (!std::isfinite(res.certified_gap)) res.certified_gap = 0.0;
  if (res.certified_gap > tol) {
    throw ToleranceNotReachedError(
        fmt::format("certified gap {} exceeds tolerance {}", res.certified_gap, tol));
  }
  return res;
}

ProxResult minimize_nd(const SearchObjective& obj, const Box& box, double tol,
                       const ProxOptions& options) {
  const int n = obj.dim;
  const int cells = options.cells_per_axis > 0 ? options.cells_per_axis : default_cells(n);
  const bool quadratic_bound = obj.curvature.has_value() && static_cast<bool>(obj.gradient);
  if (!quadratic_bound && !obj.lipschitz) {
    throw PreconditionError("n-D search needs a gradient with a curvature bound, or a Lipschitz bound");
  }

  ProxResult res;
  res.search_box = box;
  Incumbent best;

  struct Cell {
    Vector lo, hi, center;
    double value;
  };
  auto make_cell = [&](Vector lo, Vector hi) {
    Cell c{std::move(lo), std::move(hi), Vector(), 0.0};
    c.center = 0.5 * (c.lo + c.hi);
    c.value = obj.value(c.center);
    ++res.evaluations;
    if (!is_finite_value(c.value)) {
      throw PreconditionError("n-D search requires a finite objective on the search box");
    }
    best.offer(c.center, c.value);
    return c;
  };
  auto lower_bound = [&](const Cell& c) {
    const double r = 0.5 * (c.hi - c.lo).norm();
    double lb = -kInf;
    if (quadratic_bound) {
      const double gnorm = obj.gradient(c.center).norm();
      lb = c.value - gnorm * r - 0.5 * *obj.curvature * r * r;
    }
    if (obj.lipschitz) lb = std::max(lb, c.value - *obj.lipschitz * r);
    return lb;
  };

  const Vector step = (box.hi - box.lo) / cells;
  res.grid_resolution = step.maxCoeff();
  std::vector<Cell> active;
  {
    std::vector<Vector> corners = grid_points(Box{box.lo, box.hi - step}, cells);
    active.reserve(corners.size());
    for (const auto& c : corners) active.push_back(make_cell(c, c + step));
  }

  double settled_lb = kInf;
  Vector finest = step;
  while (!active.empty()) {
    std::vector<Cell> next;
    for (const Cell& c : active) {
      const double lb = lower_bound(c);
      if (lb >= best.value - 0.5 * tol) {
        settled_lb = std::min(settled_lb, lb);
        continue;
      }
      const Vector half = 0.5 * (c.hi - c.lo);
      if ((half.array() <= 0.0).any() || (c.center.array() == c.lo.array()).any()) {
        settled_lb = std::min(settled_lb, lb);
        continue;
      }
      finest = finest.cwiseMin(half);
      for (int mask = 0; mask < (1 << n); ++mask) {
        Vector lo = c.lo;
        for (int i = 0; i < n; ++i) {
          if (mask & (1 << i)) lo[i] += half[i];
        }
        next.push_back(make_cell(lo, lo + half));
      }
    }
    if (res.evaluations > options.max_evaluations) {
      throw ToleranceNotReachedError(fmt::format(
          "branch and bound exceeded {} evaluations before reaching gap {}", options.max_evaluations,
          tol));
    }
    active = std::move(next);
  }

  // Coordinate bisection on the partial derivatives around the incumbent.
  if (obj.gradient) {
    Vector cur = best.point;
    for (int sweep = 0; sweep < 60; ++sweep) {
      const Vector before = cur;
      for (int i = 0; i < n; ++i) {
        double l = std::max(box.lo[i], cur[i] - finest[i]);
        double r = std::min(box.hi[i], cur[i] + finest[i]);
        for (int iter = 0; iter < 200; ++iter) {
          const double m = l + 0.5 * (r - l);
          if (!(m > l && m < r)) break;
          Vector probe = cur;
          probe[i] = m;
          if (obj.gradient(probe)[i] < 0.0) {
            l = m;
          } else {
            r = m;
          }
        }
        Vector cand = cur;
        cand[i] = l + 0.5 * (r - l);
        const double v = obj.value(cand);
        ++res.evaluations;
        if (v <= obj.value(cur)) cur = cand;
      }
      best.offer(cur, obj.value(cur));
      if (cur == before) break;
    }
  }

  res.minimizer = best.point;
  res.objective_value = obj.value(best.point);
  res.certified_gap = std::max(0.0, res.objective_value - settled_lb);
  if (!std::isfinite(res.certified_gap)) res.certified_gap = 0.0;
  if (res.certified_gap > tol) {
    throw ToleranceNotReachedError(
        fmt::format("certified gap {} exceeds tolerance {}", res.certified_gap, tol));
  }
  return res;
}

}  // namespace

ProxResult certified_minimize(const SearchObjective& obj, const Box& box, double tol,
                              const ProxOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (box.dim() != obj.dim) throw DimensionError("search box dimension mismatch");
  if (box.empty()) throw PreconditionError("empty search box");
  if (!box.lo.allFinite() || !box.hi.allFinite()) {
    throw PreconditionError("search box must be bounded");
  }
  if (obj.dim == 1) return minimize_1d(obj, box, tol, options);
  if (obj.dim > 3) throw PreconditionError("brute-force search supports dimensions 1 to 3");
  return minimize_nd(obj, box, tol, options);
}

namespace {

// Minimum of g over the boundary of [-w, w]^n.
double boundary_min(const std::function<double(const Vector&)>& g, int n, double w) {
  if (n == 1) return std::min(g(scalar(-w)), g(scalar(w)));
  double m = kInf;
  const auto face = grid_points(Box::cube(n - 1, -w, w), 11);
  for (int axis = 0; axis < n; ++axis) {
    for (double side : {-w, w}) {
      for (const auto& pt : face) {
        Vector y(n);
        for (int i = 0, k = 0; i < n; ++i) y[i] = i == axis ? side : pt[k++];
        m = std::min(m, g(y));
      }
    }
  }
  return m;
}

}  // namespace

ProxResult regularized_argmin(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                              const Vector& xstar, double lambda, double tol,
                              const ProxOptions& options) {
  const int n = space.dim();
  if (f.dim != n) {
    throw DimensionError(fmt::format("{} has dimension {}, space has {}", f.name, f.dim, n));
  }
  space.check_dim(x);
  space.check_dim(xstar);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(fmt::format("lambda must be positive, got {}", lambda));
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  const auto fv = f.value;
  auto g = [fv, &space, &x, &xstar, lambda](const Vector& y) {
    const double fy = fv(x + y);
    if (!is_finite_value(fy)) return kInf;
    return fy - xstar.dot(y) + lambda * space.j_value(y);
  };

  Vector y0 = Vector::Zero(n);
  if (!is_finite_value(f(x))) y0 = f.anchor - x;
  const double g0 = g(y0);
  if (!is_finite_value(g0)) {
    throw PreconditionError(fmt::format("{} has no finite value at its anchor point", f.name));
  }

  Box box;
  bool certified = false;
  const bool bounded_domain =
      f.domain_box && f.domain_box->lo.allFinite() && f.domain_box->hi.allFinite();
  if (bounded_domain) {
    box = f.domain_box->translated(-x);
    certified = true;
  } else if (f.minorant && lambda > f.minorant->curvature) {
    // g(y) >= A r^2 - B r + C' with r = ||y||; outside the larger root g > g(y0).
    const double mu = f.minorant->curvature;
    const double xn = space.norm(x);
    const double a = 0.5 * (lambda - mu);
    const double b = mu * xn + space.dual_norm(xstar);
    const double c = f.minorant->offset - 0.5 * mu * xn * xn - g0;
    const double disc = b * b - 4.0 * a * c;
    const double radius = disc > 0.0 ? (b + std::sqrt(disc)) / (2.0 * a) : 0.0;
    const double r = radius * (1.0 + 1e-9) + 1e-9;
    box = Box::cube(n, -r, r);
    certified = true;
  } else {
    double w0 = 1.0;
    w0 = std::max(w0, (f.effective_box.lo - x).cwiseAbs().maxCoeff());
    w0 = std::max(w0, (f.effective_box.hi - x).cwiseAbs().maxCoeff());
    w0 = std::max(w0, 2.0 * y0.cwiseAbs().maxCoeff());
    double prev = kInf;
    int decreases = 0;
    bool found = false;
    for (int k = 0; k <= options.max_expansions; ++k) {
      const double w = std::ldexp(w0, k);
      const double bmin = boundary_min(g, n, w);
      if (bmin < prev) {
        ++decreases;
      } else {
        decreases = 0;
      }
      if (decreases >= options.unbounded_expansions) {
        throw UnboundedBelowError(fmt::format(
            "regularized objective of {} with lambda={} decreases through {} box expansions "
            "(boundary value {} at radius {}); lambda is not above the prox threshold",
            f.name, lambda, decreases, bmin, w));
      }
      if (bmin > g0 && bmin >= prev) {
        box = Box::cube(n, -w, w);
        found = true;
        break;
      }
      prev = bmin;
    }
    if (!found) {
      throw ToleranceNotReachedError(
          fmt::format("could not bound the search box for {} with lambda={}", f.name, lambda));
    }
  }
  if (f.domain_box && !bounded_domain) box = box.intersect(f.domain_box->translated(-x));
  if (box.empty()) throw PreconditionError("search box does not meet dom f");

  SearchObjective obj;
  obj.dim = n;
  obj.value = g;
  if (f.gradient) {
    const auto fg = f.gradient;
    obj.gradient = [fg, &space, &x, &xstar, lambda](const Vector& y) -> Vector {
      return fg(x + y) - xstar + lambda * space.duality_map(y);
    };
  }
  if (n == 1) {
    for (double b : f.breakpoints) obj.nodes.push_back(b - x[0]);
    if (f.curvature_bound) obj.curvature = *f.curvature_bound + lambda;
  } else if (f.curvature_bound) {
    // lambda j is convex for every p, so only f can pull the Hessian below zero.
    obj.curvature = *f.curvature_bound;
  }
  if (f.lipschitz_bound) {
    const double rbox = std::max(box.lo.cwiseAbs().maxCoeff(), box.hi.cwiseAbs().maxCoeff());
    const double rn = std::sqrt(static_cast<double>(n));
    obj.lipschitz = f.lipschitz_bound(rn * rbox + lp_norm(x, 2.0)) + rn * xstar.norm() +
                    lambda * n * n * rbox;
  }

  ProxResult res = certified_minimize(obj, box, tol, options);
  res.box_certified = certified;
  return res;
}

EnvelopeResult moreau_envelope(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                               double lambda, double tol, const ProxOptions& options) {
  EnvelopeResult out;
  out.detail = regularized_argmin(f, space, x, Vector::Zero(space.dim()), lambda, tol, options);
  out.value = out.detail.objective_value;
  out.prox_point = x + out.detail.minimizer;
  return out;
}

}  // namespace brprox
