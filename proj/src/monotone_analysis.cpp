#include "brprox/monotone_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "brprox/proximal_core.hpp"

namespace brprox {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::constructed: return "constructed";
    case Provenance::declared: return "declared";
  }
  return "?";
}

namespace {

// lo, hi and every multiple of 1/density strictly between them.
std::vector<double> axis_grid(double lo, double hi, double density) {
  std::vector<double> out;
  if (lo > hi) return out;
  out.push_back(lo);
  if (lo == hi) return out;
  const auto k0 = static_cast<long>(std::floor(lo * density)) + 1;
  for (long k = k0;; ++k) {
    const double t = static_cast<double>(k) / density;
    if (t >= hi) break;
    if (t > lo) out.push_back(t);
  }
  out.push_back(hi);
  return out;
}

std::vector<Vector> product_grid(const std::vector<std::vector<double>>& axes) {
  std::vector<Vector> out;
  const size_t n = axes.size();
  for (const auto& a : axes) {
    if (a.empty()) return out;
  }
  std::vector<size_t> idx(n, 0);
  while (true) {
    Vector p(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) p[static_cast<Eigen::Index>(i)] = axes[i][idx[i]];
    out.push_back(std::move(p));
    size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

std::vector<Vector> primal_grid(const FunctionSpec& f, const Box& box, double density) {
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < box.dim(); ++i) axes.push_back(axis_grid(box.lo[i], box.hi[i], density));
  if (box.dim() == 1) {
    auto& a = axes[0];
    for (double b : f.breakpoints) {
      if (b >= box.lo[0] && b <= box.hi[0]) a.push_back(b);
    }
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return product_grid(axes);
}

}  // namespace

GraphSample sample_graph(const FunctionSpec& f, const NormedSpace& space, const Box& box,
                         double density, const SampleOptions& options) {
  if (f.dim != space.dim() || box.dim() != f.dim) {
    throw DimensionError("sample_graph: dimension mismatch");
  }
  if (!(density > 0.0)) throw std::invalid_argument("sample density must be positive");
  if (!(options.dual_cap > 0.0)) throw std::invalid_argument("dual cap must be positive");

  GraphSample s;
  s.f_name = f.name;
  s.dim = f.dim;
  s.box = box;
  s.density = density;
  s.dual_cap = options.dual_cap;
  const double cap = options.dual_cap;

  if (f.has_subdiff()) {
    for (const Vector& x : primal_grid(f, box, density)) {
      const SubdiffDescription d = f.subdiff(x);
      if (d.is_empty()) continue;
      if (d.kind == SubdiffDescription::Kind::singleton) {
        if (d.lo.cwiseAbs().maxCoeff() <= cap) {
          s.pairs.push_back({x, d.lo, Provenance::analytic, 0.0});
        }
        continue;
      }
      std::vector<std::vector<double>> axes;
      for (int i = 0; i < f.dim; ++i) {
        axes.push_back(axis_grid(std::max(d.lo[i], -cap), std::min(d.hi[i], cap), density));
      }
      for (Vector& v : product_grid(axes)) {
        s.pairs.push_back({x, std::move(v), Provenance::analytic, 0.0});
      }
    }
    return s;
  }

  if (!options.construct_lambda) {
    throw PreconditionError(fmt::format(
        "{} has no analytic subdifferential and no constructive producer was configured", f.name));
  }
  const double lambda = *options.construct_lambda;
  const std::vector<Vector> duals =
      grid_points(Box::cube(f.dim, -cap, cap), options.construct_dual_points);
  for (const Vector& u : primal_grid(f, box, density)) {
    for (const Vector& v : duals) {
      const ProxResult r = regularized_argmin(f, space, u, v, lambda, options.construct_tol);
      const Vector y = r.minimizer;
      SubgradPair pr{u + y, v - lambda * space.duality_map(y), Provenance::constructed,
                     r.certified_gap};
      if (box.contains(pr.x) && pr.xstar.cwiseAbs().maxCoeff() <= cap) {
        s.pairs.push_back(std::move(pr));
      }
    }
  }
  return s;
}

Violation violation_witness(const GraphSample& sample, const Vector& x, const Vector& xstar) {
  if (sample.empty()) throw EmptySampleError("violation measure over an empty graph sample");
  Violation best{kInf, 0};
  if (sample.dim == 1) {
    const double a = x[0];
    const double as = xstar[0];
    for (size_t k = 0; k < sample.pairs.size(); ++k) {
      const auto& p = sample.pairs[k];
      const double v = (p.xstar[0] - as) * (p.x[0] - a);
      if (v < best.value) best = {v, k};
    }
    return best;
  }
  for (size_t k = 0; k < sample.pairs.size(); ++k) {
    const auto& p = sample.pairs[k];
    const double v = (p.xstar - xstar).dot(p.x - x);
    if (v < best.value) best = {v, k};
  }
  return best;
}

double violation_measure(const GraphSample& sample, const Vector& x, const Vector& xstar) {
  return violation_witness(sample, x, xstar).value;
}

bool eps_related(const GraphSample& sample, const Vector& x, const Vector& xstar, double eps,
                 double slack) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  return violation_measure(sample, x, xstar) >= -eps - slack;
}

bool eps_subdiff_test(const FunctionSpec& f, const Vector& x, const Vector& xstar, double eps,
                      const std::vector<Vector>& testpoints, double slack) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  return subgradient_residual(f, x, xstar, testpoints) <= eps + slack;
}

EntourageResult entourage_check(const GraphSample& sample, const NormedSpace& space,
                                const Vector& x, const Vector& xstar, double eps, double lambda,
                                double slack) {
  if (sample.empty()) throw EmptySampleError("entourage check against an empty graph sample");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  const double bx = std::sqrt(eps / lambda);
  const double bxs = std::sqrt(lambda * eps);
  // Normalizers are positive even for eps = 0 with zero slack.
  const double nx = std::max(bx + slack, 1e-300);
  const double nxs = std::max(bxs + slack, 1e-300);

  EntourageResult out;
  double best = kInf;
  for (const auto& p : sample.pairs) {
    const double dx = space.norm(x - p.x);
    const double dxs = space.dual_norm(xstar - p.xstar);
    const double score = std::max(dx / nx, dxs / nxs);
    if (score < best) {
      best = score;
      out.witness = p;
      out.dx = dx;
      out.dxstar = dxs;
    }
  }
  out.pass = out.dx <= bx + slack && out.dxstar <= bxs + slack;
  return out;
}

void write_graph_csv(const GraphSample& sample, std::ostream& out) {
  const int n = sample.dim;
  auto col = [n](const char* base, int i) {
    return n == 1 ? std::string(base) : fmt::format("{}{}", base, i + 1);
  };
  for (int i = 0; i < n; ++i) out << col("x", i) << ',';
  for (int i = 0; i < n; ++i) out << col("xstar", i) << ',';
  out << "provenance,residual\n";
  for (const auto& p : sample.pairs) {
    for (int i = 0; i < n; ++i) out << fmt::format("{}", p.x[i]) << ',';
    for (int i = 0; i < n; ++i) out << fmt::format("{}", p.xstar[i]) << ',';
    out << to_string(p.provenance) << ',' << fmt::format("{}", p.residual) << '\n';
  }
}

}  // namespace brprox
