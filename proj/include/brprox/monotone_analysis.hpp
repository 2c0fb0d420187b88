#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "brprox/function_catalog.hpp"
#include "brprox/normed_space.hpp"

namespace brprox {

enum class Provenance { analytic, constructed, declared };

std::string to_string(Provenance p);

/// A point (x, x*) of graph(df) with the residual of the check that produced it.
struct SubgradPair {
  Vector x;
  Vector xstar;
  Provenance provenance = Provenance::declared;
  double residual = 0.0;
};

/// Finite stand-in for graph(df) over a box.
struct GraphSample {
  std::string f_name;
  int dim = 1;
  std::vector<SubgradPair> pairs;
  Box box;
  /// Points per unit length along each axis (primal and dual).
  double density = 0.0;
  /// Unbounded subdifferentials are cut at |x*_i| <= dual_cap.
  double dual_cap = 0.0;

  double resolution() const { return 1.0 / density; }
  bool empty() const { return pairs.empty(); }
};

struct SampleOptions {
  double dual_cap = 10.0;
  /// Regularization weight for the constructive producer, used when the
  /// function has no analytic subdifferential. Must exceed its threshold.
  std::optional<double> construct_lambda;
  /// Dual grid points per axis for the constructive producer.
  int construct_dual_points = 21;
  double construct_tol = 1e-9;
};

class EmptySampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Samples graph(df) over `box`. Analytic entries are swept on an x grid made of
/// the multiples of 1/density, the box ends and every breakpoint; each
/// subdifferential interval is discretized the same way. Other functions get pairs from the
/// proximal rule: y minimizing f(u + y) - <v, y> + lambda j(y) yields
/// (u + y, v - lambda J(y)).
GraphSample sample_graph(const FunctionSpec& f, const NormedSpace& space, const Box& box,
                         double density, const SampleOptions& options = {});

struct Violation {
  double value = 0.0;
  size_t index = 0;
};

/// min over sampled (y, y*) of <y* - x*, y - x>.
Violation violation_witness(const GraphSample& sample, const Vector& x, const Vector& xstar);
double violation_measure(const GraphSample& sample, const Vector& x, const Vector& xstar);

/// Sampled epsilon-relatedness: violation >= -eps - slack.
bool eps_related(const GraphSample& sample, const Vector& x, const Vector& xstar, double eps,
                 double slack = 0.0);

/// Sampled test of xstar in d_eps f(x): max over finite-valued testpoints of
/// <xstar, y - x> + f(x) - f(y) <= eps + slack. Requires f convex, f(x) finite.
bool eps_subdiff_test(const FunctionSpec& f, const Vector& x, const Vector& xstar, double eps,
                      const std::vector<Vector>& testpoints, double slack = 1e-12);

struct EntourageResult {
  bool pass = false;
  SubgradPair witness;
  double dx = 0.0;
  double dxstar = 0.0;
};

/// Is some sampled pair within sqrt(eps/lambda) + slack in the primal and
/// sqrt(lambda eps) + slack in the dual norm of (x, x*)? The witness minimizes
/// the larger of the two distances, each divided by its bound plus slack.
EntourageResult entourage_check(const GraphSample& sample, const NormedSpace& space,
                                const Vector& x, const Vector& xstar, double eps, double lambda,
                                double slack);

/// CSV with columns x..., xstar..., provenance, residual.
void write_graph_csv(const GraphSample& sample, std::ostream& out);

}  // namespace brprox
