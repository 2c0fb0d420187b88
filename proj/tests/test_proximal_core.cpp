#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "brprox/function_catalog.hpp"
#include "brprox/proximal_core.hpp"

using namespace brprox;

namespace {

Vector s(double t) { return Vector::Constant(1, t); }

// Dense-grid minimum of t -> g(t) on [lo, hi], refined once around the best node.
std::pair<double, double> grid_min(const std::function<double(double)>& g, double lo, double hi) {
  double bt = lo, bv = g(lo);
  const int n = 200000;
  for (int k = 0; k <= n; ++k) {
    const double t = lo + (hi - lo) * k / n;
    const double v = g(t);
    if (v < bv) {
      bv = v;
      bt = t;
    }
  }
  const double h = (hi - lo) / n;
  for (int k = -1000; k <= 1000; ++k) {
    const double t = bt + h * k / 1000.0;
    const double v = g(t);
    if (v < bv) {
      bv = v;
      bt = t;
    }
  }
  return {bt, bv};
}

}  // namespace

TEST(RegularizedArgmin, AbsWorkedExample) {
  const NormedSpace sp(1);
  const auto r = regularized_argmin(catalog_get("abs"), sp, s(-0.04), s(1.0), 1.0);
  // g(y) = |y - 0.04| - y + y^2/2; for y >= 0.04 it is y^2/2 - 0.04.
  EXPECT_NEAR(r.minimizer[0], 0.04, 1e-9);
  EXPECT_NEAR(r.objective_value, -0.0392, 1e-12);
  auto g = [](double y) { return std::abs(y - 0.04) - y + 0.5 * y * y; };
  const auto [gt, gv] = grid_min(g, -3.0, 3.0);
  EXPECT_NEAR(r.minimizer[0], gt, 1e-6);
  EXPECT_LE(r.objective_value, gv + 1e-12);
}

TEST(RegularizedArgmin, QuadAtOrigin) {
  const auto r = regularized_argmin(catalog_get("quad"), NormedSpace(1), s(0.0), s(0.0), 1.0);
  EXPECT_NEAR(r.minimizer[0], 0.0, 1e-12);
  EXPECT_NEAR(r.objective_value, 0.0, 1e-15);
}

TEST(RegularizedArgmin, NegQuadAboveThreshold) {
  const auto r =
      regularized_argmin(catalog_get("neg_quad_c:2"), NormedSpace(1), s(0.0), s(1.0), 3.0);
  EXPECT_NEAR(r.minimizer[0], 1.0, 1e-8);
  EXPECT_NEAR(r.objective_value, -0.5, 1e-9);
}

TEST(RegularizedArgmin, ResultInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const NormedSpace sp(1);
  for (const char* name : {"abs", "quad", "indicator_box", "l0", "w_shape", "neg_quad_c:2"}) {
    const auto f = catalog_get(name);
    const double lambda = f.known_threshold.value() + 0.7;
    for (int k = 0; k < 20; ++k) {
      const Vector x = s(u(rng)), xs = s(u(rng));
      const auto r = regularized_argmin(f, sp, x, xs, lambda);
      EXPECT_GE(r.certified_gap, 0.0);
      EXPECT_LE(r.certified_gap, 1e-9);
      const double gy = f(x + r.minimizer) - xs.dot(r.minimizer) + lambda * sp.j_value(r.minimizer);
      EXPECT_NEAR(r.objective_value, gy, 1e-12) << name;
      // Independent dense grid over a generous window.
      auto g = [&](double y) {
        const double fy = f.at(x[0] + y);
        return is_finite_value(fy) ? fy - xs[0] * y + 0.5 * lambda * y * y : kInf;
      };
      const auto [gt, gv] = grid_min(g, -12.0, 12.0);
      EXPECT_LE(r.objective_value, gv + 1e-9) << name << " x=" << x[0] << " x*=" << xs[0];
      (void)gt;
    }
  }
}

TEST(RegularizedArgmin, TiesResolveToSmallestPoint) {
  // w_shape tilted by 0 at x = 0: f(y) + lambda y^2/2 has symmetric minima near +-1.
  const auto r = regularized_argmin(catalog_get("w_shape"), NormedSpace(1), s(0.0), s(0.0), 0.01);
  EXPECT_LT(r.minimizer[0], 0.0);
}

TEST(RegularizedArgmin, DetectsUnboundedObjective) {
  EXPECT_THROW(
      regularized_argmin(catalog_get("neg_quad_c:2"), NormedSpace(1), s(0.0), s(1.0), 1.0),
      UnboundedBelowError);
  EXPECT_THROW(
      regularized_argmin(catalog_get("neg_quad_c:2"), NormedSpace(1), s(0.0), s(0.0), 1.5),
      NumericalError);
}

TEST(RegularizedArgmin, ReportsToleranceNotReached) {
  ProxOptions o;
  o.max_evaluations = 100;
  EXPECT_THROW(
      regularized_argmin(catalog_get("abs"), NormedSpace(1), s(0.3), s(0.2), 1.0, 1e-12, o),
      ToleranceNotReachedError);
}

TEST(RegularizedArgmin, RejectsBadArguments) {
  const auto f = catalog_get("abs");
  EXPECT_THROW(regularized_argmin(f, NormedSpace(1), s(0), s(0), 0.0), std::invalid_argument);
  EXPECT_THROW(regularized_argmin(f, NormedSpace(1), s(0), s(0), 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(regularized_argmin(f, NormedSpace(2), Vector::Zero(2), Vector::Zero(2), 1.0),
               DimensionError);
}

TEST(RegularizedArgmin, StationarityOnSmoothEntries) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double tol = 1e-9;
  for (const char* name : {"quad", "neg_quad_c:2", "quad2d"}) {
    const auto f = catalog_get(name);
    for (double p : {2.0, 3.0}) {
      const NormedSpace sp(f.dim, p);
      const double lambda = f.known_threshold.value() + 1.0;
      for (int k = 0; k < 10; ++k) {
        Vector x(f.dim), xs(f.dim);
        for (int i = 0; i < f.dim; ++i) {
          x[i] = u(rng);
          xs[i] = u(rng);
        }
        const auto r = regularized_argmin(f, sp, x, xs, lambda, tol);
        const Vector res = f.gradient(x + r.minimizer) - xs + lambda * sp.duality_map(r.minimizer);
        EXPECT_LE(res.cwiseAbs().maxCoeff(), 10.0 * std::sqrt(tol)) << name << " p=" << p;
      }
    }
  }
}

TEST(RegularizedArgmin, TwoDimensionalMatchesClosedForm) {
  // 1/2|x+y|^2 - <x*, y> + lambda/2 |y|^2 is minimized at y = (x* - x)/(1 + lambda).
  const auto f = catalog_get("quad2d");
  Vector x(2), xs(2);
  x << 0.5, -1.0;
  xs << 1.0, 2.0;
  const auto r = regularized_argmin(f, NormedSpace(2), x, xs, 1.5);
  const Vector expect = (xs - x) / 2.5;
  EXPECT_NEAR((r.minimizer - expect).norm(), 0.0, 1e-6);
}

TEST(CertifiedMinimize, Preconditions) {
  SearchObjective o;
  o.dim = 1;
  o.value = [](const Vector& y) { return y[0] * y[0]; };
  EXPECT_THROW(certified_minimize(o, Box::interval(-1, 1), 1e-9), PreconditionError);
  o.curvature = 2.0;
  EXPECT_THROW(certified_minimize(o, Box::interval(-kInf, 1), 1e-9), PreconditionError);
  EXPECT_THROW(certified_minimize(o, Box::interval(1, -1), 1e-9), PreconditionError);
  const auto r = certified_minimize(o, Box::interval(-1, 2), 1e-9);
  EXPECT_NEAR(r.minimizer[0], 0.0, 1e-4);
  EXPECT_LE(r.certified_gap, 1e-9);
  SearchObjective o4;
  o4.dim = 4;
  o4.value = [](const Vector& y) { return y.squaredNorm(); };
  o4.lipschitz = 10.0;
  EXPECT_THROW(certified_minimize(o4, Box::cube(4, -1, 1), 1e-3), PreconditionError);
}

TEST(MoreauEnvelope, Examples) {
  const NormedSpace sp(1);
  const auto a = moreau_envelope(catalog_get("abs"), sp, s(2.0), 1.0);
  EXPECT_NEAR(a.value, 1.5, 1e-9);
  EXPECT_NEAR(a.prox_point[0], 1.0, 1e-8);
  const auto b = moreau_envelope(catalog_get("abs"), sp, s(0.0), 1.0);
  EXPECT_NEAR(b.value, 0.0, 1e-9);
  EXPECT_NEAR(b.prox_point[0], 0.0, 1e-8);
  const auto c = moreau_envelope(catalog_get("quad"), sp, s(1.0), 1.0);
  EXPECT_NEAR(c.value, 0.25, 1e-9);
  EXPECT_NEAR(c.prox_point[0], 0.5, 1e-8);
  // Oracle: dense grid of min_y |y| + (1/2)(2 - y)^2.
  const auto [t, v] = grid_min([](double y) { return std::abs(y) + 0.5 * (2.0 - y) * (2.0 - y); },
                               -5.0, 5.0);
  EXPECT_NEAR(a.value, v, 1e-9);
  EXPECT_NEAR(a.prox_point[0], t, 1e-5);
}

TEST(MoreauEnvelope, BelowFunctionAndMonotoneInLambda) {
  const double tol = 1e-9;
  const NormedSpace sp(1);
  for (const char* name : {"abs", "quad", "indicator_box", "l0", "w_shape", "neg_quad_c:2"}) {
    const auto f = catalog_get(name);
    const double base = f.known_threshold.value();
    for (double x : {-2.5, -1.0, -0.3, 0.0, 0.4, 1.0, 2.2}) {
      double prev = -kInf;
      for (double lambda : {base + 0.25, base + 0.5, base + 1.0, base + 4.0}) {
        const double e = moreau_envelope(f, sp, s(x), lambda, tol).value;
        if (is_finite_value(f.at(x))) EXPECT_LE(e, f.at(x) + tol) << name << " " << x;
        EXPECT_LE(prev, e + 2.0 * tol) << name << " " << x << " " << lambda;
        prev = e;
      }
    }
  }
}

TEST(MoreauEnvelope, ProxIsFirmlyNonexpansiveForConvexEntries) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const char* name : {"abs", "quad", "indicator_box", "quad2d"}) {
    const auto f = catalog_get(name);
    const NormedSpace sp(f.dim);
    for (int k = 0; k < 30; ++k) {
      Vector x(f.dim), y(f.dim);
      for (int i = 0; i < f.dim; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
      }
      const Vector px = moreau_envelope(f, sp, x, 1.0).prox_point;
      const Vector py = moreau_envelope(f, sp, y, 1.0).prox_point;
      EXPECT_LE((px - py).squaredNorm(), (px - py).dot(x - y) + 1e-6) << name;
    }
  }
}
