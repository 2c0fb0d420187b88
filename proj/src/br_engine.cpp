#include "brprox/br_engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "brprox/prox_bounded.hpp"

namespace brprox {

CertificateRecord br_approximate(const FunctionSpec& f, const NormedSpace& space, const Vector& x,
                                 const Vector& xstar, double eps, double lambda, double tol,
                                 const BrOptions& options) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double threshold =
      options.threshold ? *options.threshold : estimate_threshold(f, space).value();
  if (!(lambda > threshold)) {
    throw LambdaBelowThresholdError(fmt::format(
        "lambda = {} is not above the threshold estimate {} for {}; the inclusion is only "
        "asserted for every lambda > lambda_f",
        lambda, threshold, f.name));
  }

  const ProxResult prox = regularized_argmin(f, space, x, xstar, lambda, tol, options.prox);
  const Vector& y = prox.minimizer;
  const Vector jy = space.duality_map(y);

  CertificateRecord rec;
  rec.x = x;
  rec.xstar = xstar;
  rec.eps = eps;
  rec.lambda = lambda;
  rec.step = y;
  rec.constructed = {x + y, xstar - lambda * jy, Provenance::constructed, prox.certified_gap};
  rec.solver_gap = prox.certified_gap;
  rec.slack = options.slack;
  rec.dx = space.norm(y);
  rec.dxstar = space.dual_norm(lambda * jy);
  rec.bound_x = std::sqrt(eps / lambda);
  rec.bound_xstar = std::sqrt(lambda * eps);
  // x_n* = x*, so the first term vanishes.
  const double gap_to_target = 0.0;
  rec.iterate_bound =
      (gap_to_target + std::sqrt(gap_to_target * gap_to_target + 4.0 * eps * lambda)) /
      (2.0 * lambda);
  rec.pass = rec.dx <= rec.bound_x + rec.slack && rec.dxstar <= rec.bound_xstar + rec.slack;

  const Vector diff = xstar - rec.constructed.xstar;
  rec.identity_pairing = diff.dot(y) / lambda;
  const double dn = space.dual_norm(diff / lambda);
  rec.identity_dual = dn * dn;
  rec.identity_primal = rec.dx * rec.dx;

  if (f.has_subdiff()) {
    rec.analytic_residual = f.subdiff(rec.constructed.x).distance(space, rec.constructed.xstar);
  }
  return rec;
}

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace

EkelandResult ekeland_point(const FunctionSpec& f, const NormedSpace& space, const Vector& xbar,
                            double eps, double lambda, const std::vector<Vector>& grid) {
  if (!(eps > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("Ekeland's principle needs eps > 0 and lambda > 0");
  }
  space.check_dim(xbar);
  std::vector<Vector> pts = grid;
  if (std::none_of(pts.begin(), pts.end(), [&](const Vector& p) { return p == xbar; })) {
    pts.push_back(xbar);
  }
  std::vector<double> vals(pts.size());
  double inf_grid = kInf;
  for (size_t i = 0; i < pts.size(); ++i) {
    vals[i] = f(pts[i]);
    inf_grid = std::min(inf_grid, vals[i]);
  }
  const double fbar = f(xbar);
  if (!is_finite_value(fbar)) throw PreconditionError("xbar is outside dom f");
  // Same relative rounding allowance as check_ekeland.
  const double round = 1e-12 * std::max({1.0, std::abs(fbar), std::abs(inf_grid)});
  if (!(fbar <= inf_grid + eps + round)) {
    throw PreconditionError(fmt::format(
        "f(xbar) = {} exceeds the grid infimum {} by more than eps = {}", fbar, inf_grid, eps));
  }

  const double slope = eps / lambda;
  size_t cur = static_cast<size_t>(
      std::find_if(pts.begin(), pts.end(), [&](const Vector& p) { return p == xbar; }) -
      pts.begin());
  EkelandResult res;
  const int cap = static_cast<int>(pts.size()) + 2;
  for (int it = 0; it < cap; ++it) {
    size_t arg = cur;
    for (size_t i = 0; i < pts.size(); ++i) {
      if (!is_finite_value(vals[i])) continue;
      if (!(vals[i] + slope * space.norm(pts[i] - pts[cur]) <= vals[cur])) continue;
      if (vals[i] < vals[arg] || (vals[i] == vals[arg] && lex_less(pts[i], pts[arg]))) arg = i;
    }
    res.iterations = it + 1;
    if (arg == cur) {
      res.point = pts[cur];
      return res;
    }
    cur = arg;
  }
  throw NumericalError("Ekeland iteration did not settle within the iteration cap");
}

EkelandCheck check_ekeland(const FunctionSpec& f, const NormedSpace& space, const Vector& xbar,
                           double eps, double lambda, const std::vector<Vector>& grid,
                           const Vector& result) {
  EkelandCheck c;
  const double fr = f(result);
  const double fbar = f(xbar);
  const double rel = 1e-12;
  c.distance_ok = space.norm(result - xbar) <= lambda * (1.0 + rel);
  c.descent_ok = fr <= fbar;
  c.minimum_ok = true;
  const double slope = eps / lambda;
  for (const auto& x : grid) {
    const double fx = f(x);
    if (!is_finite_value(fx)) continue;
    if (!(fr <= fx + slope * space.norm(x - result) + rel * (1.0 + std::abs(fr)))) {
      c.minimum_ok = false;
      break;
    }
  }
  return c;
}

namespace {

// a in A, b in B (boxes) with a + b as close as possible to t, coordinatewise.
std::pair<Vector, Vector> split_sum(const SubdiffDescription& a, const SubdiffDescription& b,
                                    const Vector& t) {
  const Vector b0 = b.nearest(Vector::Zero(t.size()));
  const Vector a1 = a.nearest(t - b0);
  const Vector b1 = b.nearest(t - a1);
  const Vector a2 = a.nearest(t - b1);
  return {a2, b1};
}

}  // namespace

RangeDensityResult range_density_probe(const FunctionSpec& f, const FunctionSpec& phi,
                                       const NormedSpace& space, const Vector& xstar, double eps) {
  if (space.dim() != 1 || f.dim != 1 || phi.dim != 1) {
    throw PreconditionError("range_density_probe is implemented for one-dimensional functions");
  }
  if (!phi.convex) throw PreconditionError(fmt::format("{} is not convex", phi.name));
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  space.check_dim(xstar);

  const FunctionSpec h = tilt(sum(f, phi), xstar);
  const ProbeResult probe = probe_infimum(h.value, space, h.breakpoints);
  if (probe.verdict != Verdict::bounded) {
    throw PreconditionError(fmt::format(
        "x* = {} is not in dom ({} + {})* at probe scale (verdict {})", xstar[0], f.name, phi.name,
        to_string(probe.verdict)));
  }

  // The probe stabilized inside the ball of this radius.
  double radius = probe.radius_reached + 1.0;
  Box box = Box::interval(-radius, radius);
  if (h.domain_box) box = box.intersect(*h.domain_box);

  SearchObjective obj;
  obj.dim = 1;
  obj.value = h.value;
  obj.gradient = h.gradient;
  obj.nodes = h.breakpoints;
  if (f.curvature_bound && phi.curvature_bound) {
    obj.curvature = *f.curvature_bound + *phi.curvature_bound;
  }
  if (f.lipschitz_bound && phi.lipschitz_bound) {
    obj.lipschitz = f.lipschitz_bound(radius) + phi.lipschitz_bound(radius) + std::abs(xstar[0]);
  }
  const double eps2 = eps * eps;
  const ProxResult near_min = certified_minimize(obj, box, 0.25 * eps2);
  const Vector xbar = near_min.minimizer;

  std::vector<Vector> grid = grid_points(box, 2001);
  for (double b : h.breakpoints) {
    if (box.contains(Vector::Constant(1, b))) grid.push_back(Vector::Constant(1, b));
  }
  const EkelandResult ek = ekeland_point(h, space, xbar, eps2, eps, grid);

  RangeDensityResult out;
  out.x_eps = ek.point;
  if (!phi.has_subdiff()) throw PreconditionError(fmt::format("{} lacks a subdifferential", phi.name));
  const SubdiffDescription dphi = phi.subdiff(out.x_eps);
  if (dphi.is_empty()) throw NumericalError("empty subdifferential of the convex part");

  if (f.has_subdiff() && !f.subdiff(out.x_eps).is_empty()) {
    auto [fs, ps] = split_sum(f.subdiff(out.x_eps), dphi, xstar);
    out.f_sub = fs;
    out.phi_sub = ps;
    out.f_sub_provenance = Provenance::analytic;
  } else {
    // Proximal rule at the Ekeland point: a strongly regularized step lands on a
    // point where x* - phi_sub - lambda J(y) is a proximal subgradient of f.
    const Vector ps0 = dphi.nearest(Vector::Zero(1));
    const double lambda_c = 1.0 / eps;
    const ProxResult r =
        regularized_argmin(f, space, out.x_eps, xstar - ps0, lambda_c, std::min(1e-9, eps2));
    out.x_eps = out.x_eps + r.minimizer;
    out.f_sub = xstar - ps0 - lambda_c * space.duality_map(r.minimizer);
    out.phi_sub = phi.subdiff(out.x_eps).nearest(xstar - out.f_sub);
    out.f_sub_provenance = Provenance::constructed;
  }
  out.residual = space.dual_norm(xstar - out.f_sub - out.phi_sub);
  if (out.residual > eps) {
    throw NumericalError(fmt::format("range density residual {} exceeds eps = {}", out.residual,
                                     eps));
  }
  return out;
}

SubgradPair minty_surjectivity_check(const FunctionSpec& f, const NormedSpace& space,
                                     const Vector& xstar, double tol) {
  if (!f.convex) throw PreconditionError(fmt::format("{} is not convex", f.name));
  if (!space.euclidean()) throw PreconditionError("the resolvent check is the Hilbert case, p = 2");
  const ProxResult r = regularized_argmin(f, space, Vector::Zero(space.dim()), xstar, 1.0,
                                          std::min(1e-9, tol));
  const Vector xbar = r.minimizer;
  SubgradPair pair{xbar, xstar - xbar, Provenance::constructed, 0.0};
  if (f.has_subdiff()) {
    pair.residual = f.subdiff(xbar).distance(space, pair.xstar);
    pair.provenance = Provenance::analytic;
  } else {
    const Box box = f.effective_box.expanded(1.0 + space.norm(xbar));
    pair.residual = std::max(0.0, subgradient_residual(f, xbar, pair.xstar, grid_points(box, 401)));
  }
  if (!(pair.residual <= tol)) {
    throw NumericalError(fmt::format("resolvent residual {} exceeds {}", pair.residual, tol));
  }
  return pair;
}

std::vector<double> default_lambda_grid(double threshold) {
  std::vector<double> out;
  for (double l : {threshold * 1.1 + 0.01, 0.5, 1.0, 2.0, 8.0}) {
    if (l > threshold) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace brprox
