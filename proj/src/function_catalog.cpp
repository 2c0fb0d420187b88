#include "brprox/function_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <fmt/format.h>

namespace brprox {

// ---------------------------------------------------------------------------
// Box

Box Box::interval(double lo, double hi) {
  Box b;
  b.lo = Vector::Constant(1, lo);
  b.hi = Vector::Constant(1, hi);
  return b;
}

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.lo = Vector::Constant(dim, lo);
  b.hi = Vector::Constant(dim, hi);
  return b;
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

Box Box::expanded(double margin) const {
  Box b = *this;
  b.lo.array() -= margin;
  b.hi.array() += margin;
  return b;
}

Box Box::translated(const Vector& shift) const {
  Box b = *this;
  b.lo += shift;
  b.hi += shift;
  return b;
}

Box Box::intersect(const Box& other) const {
  Box b;
  b.lo = lo.cwiseMax(other.lo);
  b.hi = hi.cwiseMin(other.hi);
  return b;
}

bool Box::empty() const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// SubdiffDescription

SubdiffDescription SubdiffDescription::none(int dim) {
  SubdiffDescription d;
  d.kind = Kind::empty;
  d.lo = Vector::Zero(dim);
  d.hi = Vector::Zero(dim);
  return d;
}

SubdiffDescription SubdiffDescription::point(const Vector& v) {
  SubdiffDescription d;
  d.kind = Kind::singleton;
  d.lo = v;
  d.hi = v;
  return d;
}

SubdiffDescription SubdiffDescription::box(const Vector& lo, const Vector& hi) {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) return none(static_cast<int>(lo.size()));
  }
  if (lo == hi) return point(lo);
  SubdiffDescription d;
  d.lo = lo;
  d.hi = hi;
  const bool unbounded = !lo.allFinite() || !hi.allFinite();
  d.kind = unbounded ? Kind::halfline_product : Kind::interval_box;
  return d;
}

bool SubdiffDescription::contains(const Vector& xstar, double tol) const {
  if (is_empty()) return false;
  for (Eigen::Index i = 0; i < xstar.size(); ++i) {
    if (xstar[i] < lo[i] - tol || xstar[i] > hi[i] + tol) return false;
  }
  return true;
}

Vector SubdiffDescription::nearest(const Vector& xstar) const {
  if (is_empty()) throw PreconditionError("nearest point of an empty subdifferential");
  return xstar.cwiseMax(lo).cwiseMin(hi);
}

double SubdiffDescription::distance(const NormedSpace& space, const Vector& xstar) const {
  if (is_empty()) return kInf;
  return space.dual_norm(xstar - nearest(xstar));
}

// ---------------------------------------------------------------------------
// FunctionSpec

double FunctionSpec::at(double x) const {
  if (dim != 1) throw DimensionError(fmt::format("{} is not one-dimensional", name));
  return value(Vector::Constant(1, x));
}

namespace {

double eval_piece(const QuadraticPiece& pc, double t) { return pc.a0 + t * (pc.a1 + t * pc.a2); }
double slope_piece(const QuadraticPiece& pc, double t) { return pc.a1 + 2.0 * pc.a2 * t; }

struct Piecewise {
  std::vector<QuadraticPiece> pieces;

  double value(double t) const {
    double v = kInf;
    for (const auto& pc : pieces) {
      if (pc.lo <= t && t <= pc.hi) v = std::min(v, eval_piece(pc, t));
    }
    return v;
  }

  double slope(double t) const {
    double best = kInf;
    double s = 0.0;
    for (const auto& pc : pieces) {
      if (pc.lo <= t && t <= pc.hi) {
        const double v = eval_piece(pc, t);
        if (v < best) {
          best = v;
          s = slope_piece(pc, t);
        }
      }
    }
    return s;
  }

  // One-sided behavior: limit value from the side and the effective one-sided
  // derivative among the pieces that realize it.
  struct Side {
    bool present = false;
    double limit = kInf;
    double slope = 0.0;
  };

  Side left(double t) const {
    Side s;
    for (const auto& pc : pieces) {
      if (pc.lo < t && t <= pc.hi) {
        const double v = eval_piece(pc, t);
        const double d = slope_piece(pc, t);
        if (!s.present || v < s.limit || (v == s.limit && d > s.slope)) {
          s.limit = v;
          s.slope = d;
        }
        s.present = true;
      }
    }
    return s;
  }

  Side right(double t) const {
    Side s;
    for (const auto& pc : pieces) {
      if (pc.lo <= t && t < pc.hi) {
        const double v = eval_piece(pc, t);
        const double d = slope_piece(pc, t);
        if (!s.present || v < s.limit || (v == s.limit && d < s.slope)) {
          s.limit = v;
          s.slope = d;
        }
        s.present = true;
      }
    }
    return s;
  }

  // Proximal subdifferential. A one-sided jump up (or a missing side) leaves
  // that side unconstrained; otherwise the left slope bounds v from below and
  // the right slope bounds it from above.
  SubdiffDescription subdiff(double t) const {
    const double ft = value(t);
    if (!is_finite_value(ft)) return SubdiffDescription::none(1);
    const double eps = 1e-12 * (1.0 + std::abs(ft));
    double lo = -kInf;
    double hi = kInf;
    const Side l = left(t);
    if (l.present && l.limit <= ft + eps) lo = l.slope;
    const Side r = right(t);
    if (r.present && r.limit <= ft + eps) hi = r.slope;
    return SubdiffDescription::box(Vector::Constant(1, lo), Vector::Constant(1, hi));
  }
};

QuadraticMinorant piecewise_minorant(const std::vector<QuadraticPiece>& pieces) {
  double mu = 0.0;
  for (const auto& pc : pieces) mu = std::max(mu, -2.0 * pc.a2);

  auto offset_for = [&](double curvature) -> std::optional<double> {
    double offset = kInf;
    for (const auto& pc : pieces) {
      // minimize (a2 + curvature/2) t^2 + a1 t + a0 over [lo, hi]
      const double c2 = pc.a2 + 0.5 * curvature;
      double m;
      if (c2 > 1e-15) {
        const double t = std::clamp(-pc.a1 / (2.0 * c2), pc.lo, pc.hi);
        m = pc.a0 + pc.a1 * t + c2 * t * t;
      } else if (pc.a1 == 0.0) {
        m = pc.a0;
      } else if (pc.a1 > 0.0 && std::isfinite(pc.lo)) {
        m = pc.a0 + pc.a1 * pc.lo + c2 * pc.lo * pc.lo;
      } else if (pc.a1 < 0.0 && std::isfinite(pc.hi)) {
        m = pc.a0 + pc.a1 * pc.hi + c2 * pc.hi * pc.hi;
      } else {
        return std::nullopt;
      }
      offset = std::min(offset, m);
    }
    return offset;
  };

  if (auto off = offset_for(mu)) return {*off, mu};
  const double bumped = mu + 1e-2 * (1.0 + mu);
  return {*offset_for(bumped), bumped};
}

}  // namespace

FunctionSpec make_piecewise(std::string name, std::vector<QuadraticPiece> pieces, bool convex,
                            std::optional<double> known_threshold) {
  if (pieces.empty()) throw std::invalid_argument("piecewise function needs at least one piece");
  for (const auto& pc : pieces) {
    if (!(pc.lo <= pc.hi) || std::isnan(pc.a0) || std::isnan(pc.a1) || std::isnan(pc.a2) ||
        !std::isfinite(pc.a0) || !std::isfinite(pc.a1) || !std::isfinite(pc.a2)) {
      throw std::invalid_argument(
          fmt::format("invalid piece [{}, {}] in function {}", pc.lo, pc.hi, name));
    }
  }
  auto pw = std::make_shared<const Piecewise>(Piecewise{pieces});

  FunctionSpec f;
  f.name = std::move(name);
  f.dim = 1;
  f.convex = convex;
  f.known_threshold = known_threshold;
  f.value = [pw](const Vector& x) { return pw->value(x[0]); };
  f.gradient = [pw](const Vector& x) { return Vector::Constant(1, pw->slope(x[0])); };
  f.subdiff = [pw](const Vector& x) { return pw->subdiff(x[0]); };

  std::vector<double> bps;
  double dom_lo = kInf;
  double dom_hi = -kInf;
  double curvature = 0.0;
  double max_a1 = 0.0;
  double max_a2 = 0.0;
  for (const auto& pc : pieces) {
    if (std::isfinite(pc.lo)) bps.push_back(pc.lo);
    if (std::isfinite(pc.hi)) bps.push_back(pc.hi);
    dom_lo = std::min(dom_lo, pc.lo);
    dom_hi = std::max(dom_hi, pc.hi);
    curvature = std::max(curvature, 2.0 * std::abs(pc.a2));
    max_a1 = std::max(max_a1, std::abs(pc.a1));
    max_a2 = std::max(max_a2, std::abs(pc.a2));
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  f.breakpoints = bps;
  f.curvature_bound = curvature;
  f.lipschitz_bound = [max_a1, max_a2](double radius) { return max_a1 + 2.0 * max_a2 * radius; };
  f.minorant = piecewise_minorant(pieces);
  if (std::isfinite(dom_lo) || std::isfinite(dom_hi)) f.domain_box = Box::interval(dom_lo, dom_hi);

  // anchor: the point of dom f closest to the origin
  double anchor = kInf;
  for (const auto& pc : pieces) {
    const double t = std::clamp(0.0, pc.lo, pc.hi);
    if (std::abs(t) < std::abs(anchor)) anchor = t;
  }
  f.anchor = Vector::Constant(1, anchor);

  double lo = -2.0;
  double hi = 2.0;
  if (!bps.empty()) {
    lo = std::min(lo, bps.front() - 2.0);
    hi = std::max(hi, bps.back() + 2.0);
  }
  f.effective_box = Box::interval(lo, hi);
  f.box_note =
      "covers every breakpoint with margin 2; regularized searches certify their own radius "
      "from the quadratic minorant";
  return f;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_param(const std::string& s, const std::string& full) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UnknownFunctionError(fmt::format("bad parameter '{}' in function name '{}'", s, full));
  }
}

FunctionSpec make_quad2d() {
  FunctionSpec f;
  f.name = "quad2d";
  f.dim = 2;
  f.convex = true;
  f.known_threshold = 0.0;
  f.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  f.gradient = [](const Vector& x) { return x; };
  f.subdiff = [](const Vector& x) { return SubdiffDescription::point(x); };
  f.effective_box = Box::cube(2, -3.0, 3.0);
  f.anchor = Vector::Zero(2);
  f.curvature_bound = 1.0;
  f.lipschitz_bound = [](double radius) { return radius; };
  f.minorant = QuadraticMinorant{0.0, 0.0};
  f.box_note = "f >= 0 so f + lambda j is coercive for every lambda > 0";
  return f;
}

}  // namespace

FunctionSpec catalog_get(const std::string& full) {
  const auto parts = split(full, ':');
  if (parts.empty()) throw UnknownFunctionError("empty function name");
  const std::string& base = parts[0];
  const size_t nparams = parts.size() - 1;
  auto expect_params = [&](size_t lo, size_t hi) {
    if (nparams < lo || nparams > hi) {
      throw UnknownFunctionError(fmt::format("wrong number of parameters in '{}'", full));
    }
  };

  if (base == "abs") {
    expect_params(0, 0);
    auto f = make_piecewise("abs", {{-kInf, 0.0, 0.0, -1.0, 0.0}, {0.0, kInf, 0.0, 1.0, 0.0}},
                            true, 0.0);
    f.effective_box = Box::interval(-4.0, 4.0);
    f.box_note = "f >= 0; minimizers of |x+y| - x* y + lambda y^2/2 lie within (|x*|+1)/lambda";
    return f;
  }
  if (base == "quad") {
    expect_params(0, 0);
    auto f = make_piecewise("quad", {{-kInf, kInf, 0.0, 0.0, 0.5}}, true, 0.0);
    f.effective_box = Box::interval(-4.0, 4.0);
    f.box_note = "f >= 0 and strongly convex";
    return f;
  }
  if (base == "zero") {
    expect_params(0, 0);
    auto f = make_piecewise("zero", {{-kInf, kInf, 0.0, 0.0, 0.0}}, true, 0.0);
    f.box_note = "constant";
    return f;
  }
  if (base == "indicator_box") {
    expect_params(0, 2);
    double a = 0.0;
    double b = 1.0;
    if (nparams == 2) {
      a = parse_param(parts[1], full);
      b = parse_param(parts[2], full);
    } else if (nparams == 1) {
      throw UnknownFunctionError("indicator_box takes both bounds: indicator_box:a:b");
    }
    if (!(a <= b)) throw UnknownFunctionError(fmt::format("empty interval in '{}'", full));
    auto f = make_piecewise(nparams ? full : "indicator_box", {{a, b, 0.0, 0.0, 0.0}}, true, 0.0);
    f.box_note = "dom f is the interval itself";
    return f;
  }
  if (base == "neg_quad_c") {
    expect_params(0, 1);
    const double c = nparams ? parse_param(parts[1], full) : 1.0;
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw UnknownFunctionError(fmt::format("neg_quad_c needs c > 0, got {}", c));
    }
    auto f = make_piecewise(fmt::format("neg_quad_c:{}", c), {{-kInf, kInf, 0.0, 0.0, -0.5 * c}},
                            false, c);
    f.box_note = "f + lambda j = ((lambda - c)/2) x^2 is coercive exactly for lambda > c";
    return f;
  }
  if (base == "l0") {
    expect_params(0, 0);
    auto f = make_piecewise(
        "l0", {{-kInf, 0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, kInf, 1.0, 0.0, 0.0}},
        false, 0.0);
    f.box_note = "0 <= f <= 1";
    return f;
  }
  if (base == "w_shape") {
    expect_params(0, 0);
    auto f = make_piecewise("w_shape",
                            {{-kInf, -1.0, -1.0, -1.0, 0.0},
                             {-1.0, 0.0, 1.0, 1.0, 0.0},
                             {0.0, 1.0, 1.0, -1.0, 0.0},
                             {1.0, kInf, -1.0, 1.0, 0.0}},
                            false, 0.0);
    f.box_note = "f >= 0, 1-Lipschitz";
    return f;
  }
  if (base == "quad2d") {
    expect_params(0, 0);
    return make_quad2d();
  }
  throw UnknownFunctionError(fmt::format("unknown function '{}'", full));
}

std::vector<std::pair<std::string, std::string>> catalog_list() {
  return {
      {"abs", "|x|, convex, threshold 0"},
      {"quad", "x^2/2, convex, threshold 0"},
      {"indicator_box[:a:b]", "indicator of [a,b] (default [0,1]), convex, threshold 0"},
      {"neg_quad_c[:c]", "-(c/2) x^2 (default c=1), nonconvex, threshold c"},
      {"l0", "0 at x=0 and 1 elsewhere, lsc nonconvex, threshold 0"},
      {"w_shape", "min(|x-1|, |x+1|), nonconvex, threshold 0"},
      {"zero", "identically 0, convex"},
      {"quad2d", "|x|^2/2 on R^2, convex, threshold 0"},
  };
}

// ---------------------------------------------------------------------------
// combinators

FunctionSpec tilt(const FunctionSpec& f, const Vector& xstar) {
  if (xstar.size() != f.dim) throw DimensionError("tilt: dimension mismatch");
  FunctionSpec g = f;
  g.name = fmt::format("{}-tilt", f.name);
  const auto fv = f.value;
  g.value = [fv, xstar](const Vector& x) { return fv(x) - xstar.dot(x); };
  if (f.gradient) {
    const auto fg = f.gradient;
    g.gradient = [fg, xstar](const Vector& x) -> Vector { return fg(x) - xstar; };
  }
  if (f.subdiff) {
    const auto fs = f.subdiff;
    g.subdiff = [fs, xstar](const Vector& x) {
      auto d = fs(x);
      if (d.is_empty()) return d;
      return SubdiffDescription::box(d.lo - xstar, d.hi - xstar);
    };
  }
  if (f.lipschitz_bound) {
    const auto fl = f.lipschitz_bound;
    const double extra = xstar.norm() * std::sqrt(static_cast<double>(f.dim));
    g.lipschitz_bound = [fl, extra](double r) { return fl(r) + extra; };
  }
  if (f.minorant) {
    // -<x*, z> >= -|x*| |z| >= -(|x*|^2 / (2 eta) + eta |z|^2 / 2); eta = 1e-3 (1 + mu).
    // Euclidean |.| is compared to the p-norm of the caller through the dimension factor.
    const double eta = 1e-3 * (1.0 + f.minorant->curvature);
    const double s = xstar.norm() * std::sqrt(static_cast<double>(f.dim));
    g.minorant = QuadraticMinorant{f.minorant->offset - s * s / (2.0 * eta),
                                   f.minorant->curvature + eta};
  }
  return g;
}

FunctionSpec shift(const FunctionSpec& f, const Vector& x0) {
  if (x0.size() != f.dim) throw DimensionError("shift: dimension mismatch");
  FunctionSpec g = f;
  g.name = fmt::format("{}-shift", f.name);
  const auto fv = f.value;
  g.value = [fv, x0](const Vector& y) { return fv(x0 + y); };
  if (f.gradient) {
    const auto fg = f.gradient;
    g.gradient = [fg, x0](const Vector& y) { return fg(x0 + y); };
  }
  if (f.subdiff) {
    const auto fs = f.subdiff;
    g.subdiff = [fs, x0](const Vector& y) { return fs(x0 + y); };
  }
  if (f.dim == 1) {
    for (double& b : g.breakpoints) b -= x0[0];
  }
  if (f.domain_box) g.domain_box = f.domain_box->translated(-x0);
  g.effective_box = f.effective_box.translated(-x0);
  g.anchor = f.anchor - x0;
  if (f.lipschitz_bound) {
    const auto fl = f.lipschitz_bound;
    const double off = lp_norm(x0, 2.0);
    g.lipschitz_bound = [fl, off](double r) { return fl(r + off); };
  }
  if (f.minorant) {
    // f(x0 + y) >= a - mu/2 (|x0| + |y|)^2 >= a - mu |x0|^2 - mu |y|^2
    const double n = lp_norm(x0, 2.0) * std::sqrt(static_cast<double>(f.dim));
    g.minorant = QuadraticMinorant{f.minorant->offset - f.minorant->curvature * n * n,
                                   2.0 * f.minorant->curvature};
  }
  g.known_threshold = f.known_threshold;
  return g;
}

FunctionSpec sum(const FunctionSpec& f, const FunctionSpec& g) {
  if (f.dim != g.dim) throw DimensionError("sum: dimension mismatch");
  FunctionSpec h;
  h.name = fmt::format("{}+{}", f.name, g.name);
  h.dim = f.dim;
  h.convex = f.convex && g.convex;
  const auto fv = f.value;
  const auto gv = g.value;
  h.value = [fv, gv](const Vector& x) { return fv(x) + gv(x); };
  if (f.gradient && g.gradient) {
    const auto fg = f.gradient;
    const auto gg = g.gradient;
    h.gradient = [fg, gg](const Vector& x) -> Vector { return fg(x) + gg(x); };
  }
  // The sum rule is only exact in special cases; graph points for sums come
  // from the constructive producer instead.
  h.breakpoints = f.breakpoints;
  h.breakpoints.insert(h.breakpoints.end(), g.breakpoints.begin(), g.breakpoints.end());
  std::sort(h.breakpoints.begin(), h.breakpoints.end());
  h.breakpoints.erase(std::unique(h.breakpoints.begin(), h.breakpoints.end()),
                      h.breakpoints.end());
  if (f.domain_box && g.domain_box) {
    h.domain_box = f.domain_box->intersect(*g.domain_box);
  } else if (f.domain_box) {
    h.domain_box = f.domain_box;
  } else if (g.domain_box) {
    h.domain_box = g.domain_box;
  }
  h.effective_box = f.effective_box;
  h.anchor = is_finite_value(gv(f.anchor)) ? f.anchor : g.anchor;
  if (f.curvature_bound && g.curvature_bound) {
    h.curvature_bound = *f.curvature_bound + *g.curvature_bound;
  }
  if (f.lipschitz_bound && g.lipschitz_bound) {
    const auto fl = f.lipschitz_bound;
    const auto gl = g.lipschitz_bound;
    h.lipschitz_bound = [fl, gl](double r) { return fl(r) + gl(r); };
  }
  if (f.minorant && g.minorant) {
    h.minorant = QuadraticMinorant{f.minorant->offset + g.minorant->offset,
                                   f.minorant->curvature + g.minorant->curvature};
  }
  h.box_note = "inherits the first summand's box";
  return h;
}

// ---------------------------------------------------------------------------

double subgradient_residual(const FunctionSpec& f, const Vector& x, const Vector& xstar,
                            const std::vector<Vector>& testpoints) {
  if (!f.convex) {
    throw PreconditionError(fmt::format(
        "{} is not convex; the subgradient inequality does not characterize its subdifferential",
        f.name));
  }
  const double fx = f(x);
  if (!is_finite_value(fx)) {
    throw PreconditionError(fmt::format("{} is +inf at the base point", f.name));
  }
  double worst = -kInf;
  for (const auto& y : testpoints) {
    const double fy = f(y);
    if (!is_finite_value(fy)) continue;
    worst = std::max(worst, xstar.dot(y - x) + fx - fy);
  }
  return worst;
}

std::vector<Vector> grid_points(const Box& box, int count) {
  if (count < 1) throw std::invalid_argument("grid needs at least one point per axis");
  const int n = box.dim();
  std::vector<double> axis_step(n);
  for (int i = 0; i < n; ++i) {
    axis_step[i] = count == 1 ? 0.0 : (box.hi[i] - box.lo[i]) / (count - 1);
  }
  size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<size_t>(count);
  std::vector<Vector> out;
  out.reserve(total);
  std::vector<int> idx(n, 0);
  for (size_t k = 0; k < total; ++k) {
    Vector p(n);
    for (int i = 0; i < n; ++i) {
      p[i] = idx[i] == count - 1 ? box.hi[i] : box.lo[i] + idx[i] * axis_step[i];
    }
    out.push_back(std::move(p));
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < count) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace brprox
