#pragma once

#include <functional>
#include <string>
#include <vector>

#include "brprox/function_catalog.hpp"
#include "brprox/normed_space.hpp"

namespace brprox {

enum class Verdict { bounded, unbounded, inconclusive };

std::string to_string(Verdict v);

/// What a boundedness probe saw: the sequence of grid minima m(R) for
/// R = r0, 2 r0, ... and the last radius examined.
struct ProbeResult {
  Verdict verdict = Verdict::inconclusive;
  double radius_reached = 0.0;
  std::vector<double> minima;
};

struct ProbeSettings {
  double radius_cap = 1048576.0;  // 2^20
  double initial_radius = 1.0;
  double stable_tol = 1e-9;
  int stable_doublings = 2;
  double decrease_step = 1.0;
  int decrease_doublings = 6;
};

/// Probes whether h is bounded below on the space by minimizing it over grids
/// on balls of doubling radius. Bounded when m(R) moves by at most stable_tol
/// over `stable_doublings` consecutive doublings; unbounded when it drops by at
/// least decrease_step over `decrease_doublings` consecutive doublings.
/// `nodes` (1-D) are always included in the grid.
ProbeResult probe_infimum(const std::function<double(const Vector&)>& h, const NormedSpace& space,
                          const std::vector<double>& nodes, const ProbeSettings& settings = {});

/// Is f + lambda j bounded below?
ProbeResult boundedness_probe(const FunctionSpec& f, const NormedSpace& space, double lambda,
                              const ProbeSettings& settings = {});

/// Is y -> f(x + y) + lambda j(y) bounded below?
ProbeResult shifted_boundedness(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                                double lambda, const ProbeSettings& settings = {});

/// Is f - <xstar, .> bounded below, i.e. xstar in dom f*?
ProbeResult conjugate_domain_probe(const FunctionSpec& f, const NormedSpace& space,
                                   const Vector& xstar, const ProbeSettings& settings = {});

struct ThresholdProbe {
  double lambda;
  Verdict verdict;
  double radius_reached;
};

/// Bracket [lower, upper] for the prox-boundedness threshold.
struct ThresholdEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<ThresholdProbe> probes;
  /// Every probe (down to the smallest lambda in the schedule) was bounded.
  bool all_bounded = false;
  /// Some lambda in the schedule gave a bounded verdict.
  bool prox_bounded = true;
  /// upper - lower <= tol was reached.
  bool converged = false;

  /// The threshold estimate: 0 when every probe was bounded, otherwise the
  /// upper end of the bracket.
  double value() const { return all_bounded ? 0.0 : upper; }
};

/// Probes lambda = 2^k, k = -10..10, then bisects between the largest
/// unbounded and the smallest bounded probe until the bracket is <= tol.
/// Throws NumericalError when every probe is inconclusive.
ThresholdEstimate estimate_threshold(const FunctionSpec& f, const NormedSpace& space,
                                     double tol = 0.05, const ProbeSettings& settings = {});

}  // namespace brprox
