#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "brprox/function_catalog.hpp"
#include "brprox/monotone_analysis.hpp"
#include "brprox/normed_space.hpp"
#include "brprox/proximal_core.hpp"

namespace brprox {

/// lambda is not above the (estimated) prox-boundedness threshold; the
/// entourage inclusion is only asserted for every lambda > lambda_f.
class LambdaBelowThresholdError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Outcome of one entourage certification.
struct CertificateRecord {
  Vector x;
  Vector xstar;
  double eps = 0.0;
  double lambda = 0.0;
  /// (x + y, x* - lambda J(y)) with y the regularized minimizer.
  SubgradPair constructed;
  Vector step;
  double dx = 0.0;
  double dxstar = 0.0;
  double bound_x = 0.0;
  double bound_xstar = 0.0;
  /// (|x_n* - x*| + sqrt(|x_n* - x*|^2 + 4 eps lambda)) / (2 lambda) with x_n* = x*.
  double iterate_bound = 0.0;
  double slack = 0.0;
  double solver_gap = 0.0;
  bool pass = false;
  /// Dual distance from the constructed x* to the analytic subdifferential at
  /// the constructed point, when one is available.
  std::optional<double> analytic_residual;

  /// The three members of lambda^-1 <x* - y*, y> = |lambda^-1 (x* - y*)|^2 = |y|^2.
  double identity_pairing = 0.0;
  double identity_dual = 0.0;
  double identity_primal = 0.0;
};

struct BrOptions {
  double slack = 1e-6;
  /// Threshold estimate to guard lambda with; estimated on demand when absent.
  std::optional<double> threshold;
  ProxOptions prox;
};

/// Constructs a graph pair near (x, x*) from one regularized minimization:
/// y in argmin f(x + .) - <x*, .> + lambda j, y* = x* - lambda J(y).
/// Throws LambdaBelowThresholdError for lambda <= threshold and
/// UnboundedBelowError if the subproblem is unbounded.
CertificateRecord br_approximate(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                                 const Vector& xstar, double eps, double lambda,
                                 double tol = 1e-9, const BrOptions& options = {});

struct EkelandResult {
  Vector point;
  int iterations = 0;
};

/// Ekeland's principle on a finite grid: starting from xbar (an eps-minimizer
/// of f over the grid), repeatedly move to the minimizer of f over
/// {x : f(x) + (eps/lambda)|x - x_k| <= f(x_k)} until that minimizer is x_k.
/// xbar is added to the grid if absent.
EkelandResult ekeland_point(const FunctionSpec& f, const NormedSpace& space, const Vector& xbar,
                            double eps, double lambda, const std::vector<Vector>& grid);

struct EkelandCheck {
  bool distance_ok = false;  // |x_lambda - xbar| <= lambda
  bool descent_ok = false;   // f(x_lambda) <= f(xbar)
  bool minimum_ok = false;   // f(x_lambda) <= f(x) + (eps/lambda)|x - x_lambda| on the grid
  bool ok() const { return distance_ok && descent_ok && minimum_ok; }
};

/// Exhaustive verification of the three Ekeland conditions on a grid.
EkelandCheck check_ekeland(const FunctionSpec& f, const NormedSpace& space, const Vector& xbar,
                           double eps, double lambda, const std::vector<Vector>& grid,
                           const Vector& result);

struct RangeDensityResult {
  Vector x_eps;
  Vector f_sub;
  Vector phi_sub;
  double residual = 0.0;  // |x* - f_sub - phi_sub| in the dual norm
  Provenance f_sub_provenance = Provenance::analytic;
};

/// For x* in dom (f + phi)*, finds x_eps with f_sub in df(x_eps), phi_sub in
/// dphi(x_eps) and |x* - f_sub - phi_sub| <= eps: near-minimize f + phi - x*,
/// apply Ekeland with (eps^2, eps), then read off subgradients. One-dimensional.
RangeDensityResult range_density_probe(const FunctionSpec& f, const FunctionSpec& phi,
                                       const NormedSpace& space, const Vector& xstar, double eps);

/// Hilbert-space resolvent: minimizes f + j - <x*, .> and returns (xbar, x* - xbar)
/// with the residual of x* in xbar + df(xbar). Requires f convex and p = 2.
SubgradPair minty_surjectivity_check(const FunctionSpec& f, const NormedSpace& space,
                                     const Vector& xstar, double tol = 1e-8);

/// lambda sweep {thr*1.1 + 0.01, 0.5, 1, 2, 8} restricted to (thr, inf), sorted.
std::vector<double> default_lambda_grid(double threshold);

}  // namespace brprox
