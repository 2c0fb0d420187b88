#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "brprox/normed_space.hpp"

namespace brprox {

/// The extended-real +inf. Points outside dom f evaluate to this value; IEEE
/// arithmetic already gives a + inf = inf for every finite a.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite_value(double v) { return v < kInf; }

class UnknownFunctionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation needs a property the function does not have
/// (convexity, a finite value at the base point, analytic metadata, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  Vector lo;
  Vector hi;

  static Box interval(double lo, double hi);
  static Box cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;
  Vector center() const { return 0.5 * (lo + hi); }
  Vector width() const { return hi - lo; }
  Box expanded(double margin) const;
  Box translated(const Vector& shift) const;
  Box intersect(const Box& other) const;
  bool empty() const;
};

/// Description of a subdifferential set in R^n.
///
/// All shapes are products of intervals: a singleton, a bounded box, or a box
/// with some infinite bounds (normal cones of boxes, the whole line for the
/// proximal subdifferential of l0 at 0, ...).
struct SubdiffDescription {
  enum class Kind { empty, singleton, interval_box, halfline_product };

  Kind kind = Kind::empty;
  Vector lo;
  Vector hi;

  static SubdiffDescription none(int dim);
  static SubdiffDescription point(const Vector& v);
  /// Classifies as singleton, interval_box or halfline_product from the bounds.
  static SubdiffDescription box(const Vector& lo, const Vector& hi);

  bool is_empty() const { return kind == Kind::empty; }
  bool contains(const Vector& xstar, double tol = 0.0) const;
  /// Nearest element in any l_q norm (coordinatewise clamp). Requires non-empty.
  Vector nearest(const Vector& xstar) const;
  /// Dual-norm distance from xstar to the set; +inf when empty.
  double distance(const NormedSpace& space, const Vector& xstar) const;
};

/// Lower bound f(z) >= offset - curvature * (1/2)||z||^2 valid on all of R^n.
struct QuadraticMinorant {
  double offset = 0.0;
  double curvature = 0.0;
};

/// A proper lsc function on R^n with the metadata the numerical routines use.
///
/// Only `value` is mandatory. Optional pieces:
///  - subdiff: analytic (proximal) subdifferential, exact for convex entries;
///  - gradient: derivative valid away from `breakpoints` and outside kinks;
///  - breakpoints (1-D): every kink, jump and domain endpoint. Between two
///    consecutive breakpoints the function is C^2 with |f''| <= curvature_bound;
///  - lipschitz_bound(R): Lipschitz constant of f on the ball of radius R away
///    from breakpoints;
///  - minorant: used to certify search boxes for regularized problems;
///  - domain_box: dom f is contained in it.
struct FunctionSpec {
  std::string name;
  int dim = 1;
  std::function<double(const Vector&)> value;
  bool convex = false;
  std::function<SubdiffDescription(const Vector&)> subdiff;
  std::function<Vector(const Vector&)> gradient;
  std::optional<double> known_threshold;
  Box effective_box;
  Vector anchor;
  std::vector<double> breakpoints;
  std::optional<Box> domain_box;
  std::optional<double> curvature_bound;
  std::function<double(double)> lipschitz_bound;
  std::optional<QuadraticMinorant> minorant;
  /// Why effective_box is large enough for the problems this entry is used in.
  std::string box_note;

  double operator()(const Vector& x) const { return value(x); }
  double at(double x) const;
  bool has_subdiff() const { return static_cast<bool>(subdiff); }
  bool smooth() const { return breakpoints.empty() && static_cast<bool>(gradient); }
};

/// One piece a0 + a1 t + a2 t^2 on the closed interval [lo, hi].
struct QuadraticPiece {
  double lo;
  double hi;
  double a0;
  double a1;
  double a2;
};

/// Builds a 1-D piecewise quadratic function. Outside the union of pieces the
/// value is +inf; where closed pieces overlap the smallest value is used, which
/// makes the result lsc. Subdifferentials are the proximal ones (exact convex
/// subdifferentials whenever the function is convex).
FunctionSpec make_piecewise(std::string name, std::vector<QuadraticPiece> pieces, bool convex,
                            std::optional<double> known_threshold = std::nullopt);

/// Catalog lookup. Accepts parameterized names: "neg_quad_c:3", "indicator_box:-1:1".
FunctionSpec catalog_get(const std::string& name);

/// Names of the shipped entries with a one-line description each.
std::vector<std::pair<std::string, std::string>> catalog_list();

/// x -> f(x) - <xstar, x>
FunctionSpec tilt(const FunctionSpec& f, const Vector& xstar);
/// y -> f(x + y)
FunctionSpec shift(const FunctionSpec& f, const Vector& x);
/// x -> f(x) + g(x)
FunctionSpec sum(const FunctionSpec& f, const FunctionSpec& g);

/// max over finite-valued testpoints y of <xstar, y - x> + f(x) - f(y).
/// Requires f convex and f(x) finite.
double subgradient_residual(const FunctionSpec& f, const Vector& x, const Vector& xstar,
                            const std::vector<Vector>& testpoints);

/// Uniform grid of `count` points per axis over a box, in lexicographic order.
std::vector<Vector> grid_points(const Box& box, int count_per_axis);

}  // namespace brprox
