#pragma once

#include <functional>
#include <stdexcept>

#include "brprox/function_catalog.hpp"
#include "brprox/normed_space.hpp"

namespace brprox {

/// Base for failures of the numerical routines (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The regularized objective decreases without bound: lambda <= threshold.
class UnboundedBelowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The certified gap could not be driven below tol within the evaluation cap.
class ToleranceNotReachedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct ProxResult {
  Vector minimizer;
  double objective_value = 0.0;
  /// Upper bound on objective_value - inf over the search box.
  double certified_gap = 0.0;
  /// Initial grid spacing (max over axes).
  double grid_resolution = 0.0;
  /// Box actually searched; outside it the objective provably (or, without a
  /// minorant, heuristically) exceeds the value at the starting point.
  Box search_box;
  bool box_certified = false;
  long evaluations = 0;
};

struct ProxOptions {
  /// Grid cells per axis for the first pass. 0 selects 2000 / 200 / 60 for n = 1 / 2 / 3.
  int cells_per_axis = 0;
  long max_evaluations = 4'000'000;
  /// Consecutive boundary decreases after which the objective is declared unbounded.
  int unbounded_expansions = 6;
  int max_expansions = 60;
};

/// A scalar objective on a box, together with what is known about its regularity.
/// Used by every brute-force search in the library.
struct SearchObjective {
  int dim = 1;
  std::function<double(const Vector&)> value;
  /// Gradient valid away from `nodes` (1-D) or everywhere (n-D). Optional.
  std::function<Vector(const Vector&)> gradient;
  /// 1-D: kinks, jumps and domain endpoints, which become grid nodes.
  std::vector<double> nodes;
  /// 1-D: upper bound on g'' between nodes (chord bound).
  /// n-D: K with Hessian >= -K I (tangent bound around cell centers).
  std::optional<double> curvature;
  /// Lipschitz constant of g on the search box away from nodes.
  std::optional<double> lipschitz;
};

/// Certified global minimization of `obj` over `box` by grid + branch and bound,
/// followed by local refinement of the best point. Ties resolve to the
/// lexicographically smallest point.
ProxResult certified_minimize(const SearchObjective& obj, const Box& box, double tol,
                              const ProxOptions& options = {});

/// argmin over y of f(x + y) - <xstar, y> + lambda j(y).
ProxResult regularized_argmin(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                              const Vector& xstar, double lambda, double tol = 1e-9,
                              const ProxOptions& options = {});

struct EnvelopeResult {
  double value = 0.0;
  Vector prox_point;
  ProxResult detail;
};

/// e(x) = inf_y f(y) + lambda j(x - y) and an attaining point.
EnvelopeResult moreau_envelope(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                               double lambda, double tol = 1e-9, const ProxOptions& options = {});

}  // namespace brprox
