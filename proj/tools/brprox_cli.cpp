#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "brprox/br_engine.hpp"
#include "brprox/function_catalog.hpp"
#include "brprox/monotone_analysis.hpp"
#include "brprox/prox_bounded.hpp"
#include "brprox/proximal_core.hpp"
#include "brprox/scenario.hpp"

using namespace brprox;

namespace {

constexpr int kOk = 0;
constexpr int kCertFail = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string show(const Vector& v) {
  if (v.size() == 1) return fmt::format("{}", v[0]);
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += fmt::format("{}{}", i ? ", " : "", v[i]);
  return s + ")";
}

struct Common {
  std::string fn;
  double p = 2.0;
  double tol = 1e-9;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("function", c.fn, "catalog name, e.g. abs or neg_quad_c:3")->required();
  sub->add_option("--p", c.p, "exponent of the l_p norm")->capture_default_str();
}

int cmd_catalog() {
  for (const auto& [name, desc] : catalog_list()) fmt::print("{:<22} {}\n", name, desc);
  return kOk;
}

int cmd_prox(const Common& c, const std::vector<double>& x, double lambda) {
  const FunctionSpec f = catalog_get(c.fn);
  const NormedSpace space(f.dim, c.p);
  const EnvelopeResult r = moreau_envelope(f, space, to_vector(x), lambda, c.tol);
  fmt::print("function: {}\nx: {}\nlambda: {}\nprox_point: {}\nenvelope: {}\ncertified_gap: {}\n",
             f.name, show(to_vector(x)), lambda, show(r.prox_point), r.value,
             r.detail.certified_gap);
  return kOk;
}

int cmd_threshold(const Common& c, double tol) {
  const FunctionSpec f = catalog_get(c.fn);
  const NormedSpace space(f.dim, c.p);
  const ThresholdEstimate est = estimate_threshold(f, space, tol);
  fmt::print("function: {}\n", f.name);
  if (!est.prox_bounded) {
    fmt::print("prox_bounded: false (unbounded up to lambda = {})\n", est.upper);
    return kNumerical;
  }
  fmt::print("bracket: [{}, {}]\nestimate: {}\nall_bounded: {}\nconverged: {}\nprobes: {}\n",
             est.lower, est.upper, est.value(), est.all_bounded, est.converged, est.probes.size());
  return est.converged ? kOk : kNumerical;
}

int cmd_certify(const Common& c, const std::vector<double>& xv, const std::vector<double>& xsv,
                double eps, double lambda, double slack, double density, bool diagnostic) {
  const FunctionSpec f = catalog_get(c.fn);
  const NormedSpace space(f.dim, c.p);
  const Vector x = to_vector(xv);
  const Vector xs = to_vector(xsv);
  space.check_dim(x);
  space.check_dim(xs);

  BrOptions opt;
  opt.slack = slack;
  if (diagnostic) opt.threshold = -kInf;
  const CertificateRecord r = br_approximate(f, space, x, xs, eps, lambda, c.tol, opt);

  fmt::print("function: {}\nquery: ({}, {})\neps: {}\nlambda: {}\n", f.name, show(x), show(xs),
             eps, lambda);
  fmt::print("constructed: ({}, {})\n", show(r.constructed.x), show(r.constructed.xstar));
  fmt::print("dx: {}\nbound_x: {}\ndxstar: {}\nbound_xstar: {}\niterate_bound: {}\n", r.dx,
             r.bound_x, r.dxstar, r.bound_xstar, r.iterate_bound);
  fmt::print("solver_gap: {}\n", r.solver_gap);
  if (r.analytic_residual) fmt::print("analytic_residual: {}\n", *r.analytic_residual);

  if (f.has_subdiff()) {
    const double margin = std::max(1.0, 1.5 * std::sqrt(eps / lambda));
    Box box = f.effective_box;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      box.lo[i] = std::min(box.lo[i], x[i]);
      box.hi[i] = std::max(box.hi[i], x[i]);
    }
    SampleOptions so;
    so.dual_cap = 10.0 * (1.0 + xs.cwiseAbs().maxCoeff() + std::sqrt(lambda * eps));
    const GraphSample sample = sample_graph(f, space, box.expanded(margin), density, so);
    if (!sample.empty()) {
      const Violation v = violation_witness(sample, x, xs);
      const auto& w = sample.pairs[v.index];
      fmt::print("nu: {}\n", v.value);
      if (v.value < -eps) {
        fmt::print(
            "non-membership certificate: <y* - x*, y - x> = {} < -eps = {} at graph pair ({}, {}); "
            "the query is not eps-monotonically related\n",
            v.value, -eps, show(w.x), show(w.xstar));
      }
    }
  }
  fmt::print("pass: {}\n", r.pass);
  return r.pass ? kOk : kCertFail;
}

int cmd_sweep(const std::string& path, const std::string& out, const std::string& summary) {
  const ScenarioConfig cfg = load_config(path);
  const RunReport rep = run_scenario(cfg);
  if (out.empty() || out == "-") {
    write_report_csv(rep, std::cout);
  } else {
    std::ofstream os(out);
    if (!os) throw ConfigError(fmt::format("cannot write '{}'", out));
    write_report_csv(rep, os);
  }
  const std::string sp = !summary.empty() ? summary : (out.empty() || out == "-" ? "" : out + ".summary.json");
  if (!sp.empty()) {
    std::ofstream js(sp);
    if (!js) throw ConfigError(fmt::format("cannot write '{}'", sp));
    js << report_summary_json(rep) << '\n';
  }
  fmt::print(stderr, "scenario {} digest {} qualifying {} passed {} pass_rate {}\n",
             rep.scenario_id, rep.digest, rep.qualifying, rep.passed, rep.pass_rate);
  return rep.passed == rep.qualifying ? kOk : kCertFail;
}

int cmd_ekeland(const Common& c, double xbar, double eps, double lambda, std::vector<double> range,
                int points) {
  const FunctionSpec f = catalog_get(c.fn);
  if (f.dim != 1) throw PreconditionError("ekeland works on one-dimensional entries");
  const NormedSpace space(1, c.p);
  if (range.empty()) range = {f.effective_box.lo[0], f.effective_box.hi[0]};
  if (range.size() != 2) throw CLI::ValidationError("--range takes lo,hi");
  const auto grid = grid_points(Box::interval(range[0], range[1]), points);
  const Vector xb = Vector::Constant(1, xbar);
  const EkelandResult r = ekeland_point(f, space, xb, eps, lambda, grid);
  const EkelandCheck chk = check_ekeland(f, space, xb, eps, lambda, grid, r.point);
  fmt::print("function: {}\nxbar: {}\nx_lambda: {}\niterations: {}\n", f.name, xbar, r.point[0],
             r.iterations);
  fmt::print("distance_ok: {}\ndescent_ok: {}\nminimum_ok: {}\n", chk.distance_ok, chk.descent_ok,
             chk.minimum_ok);
  return chk.ok() ? kOk : kCertFail;
}

int cmd_minty(const Common& c, const std::vector<double>& xs) {
  const FunctionSpec f = catalog_get(c.fn);
  const NormedSpace space(f.dim, c.p);
  const SubgradPair pr = minty_surjectivity_check(f, space, to_vector(xs), std::max(c.tol, 1e-8));
  fmt::print("function: {}\nxstar: {}\nxbar: {}\npair: ({}, {})\nresidual: {}\n", f.name,
             show(to_vector(xs)), show(pr.x), show(pr.x), show(pr.xstar), pr.residual);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subdifferential approximation and prox-bounded regularization tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* catalog = app.add_subcommand("catalog", "function catalog");
  catalog->add_subcommand("list", "list catalog entries");
  catalog->require_subcommand(1);

  Common prox_c;
  std::vector<double> prox_x;
  double prox_lambda = 1.0;
  auto* prox = app.add_subcommand("prox", "proximal point and Moreau envelope");
  add_common(prox, prox_c);
  prox->add_option("--x", prox_x, "base point (comma separated for n > 1)")->required()->delimiter(',');
  prox->add_option("--lambda", prox_lambda, "regularization weight")->required();
  prox->add_option("--tol", prox_c.tol, "certified gap")->capture_default_str();

  Common thr_c;
  double thr_tol = 0.05;
  auto* thr = app.add_subcommand("threshold", "estimate the prox-boundedness threshold");
  add_common(thr, thr_c);
  thr->add_option("--tol", thr_tol, "bracket width")->capture_default_str();

  Common cert_c;
  std::vector<double> cert_x, cert_xs;
  double cert_eps = 0.0, cert_lambda = 1.0, cert_slack = 1e-6, cert_density = 200.0;
  bool cert_diag = false;
  auto* cert = app.add_subcommand("certify", "certify one query against the entourage bounds");
  add_common(cert, cert_c);
  cert->add_option("--x", cert_x)->required()->delimiter(',');
  cert->add_option("--xstar", cert_xs)->required()->delimiter(',');
  cert->add_option("--eps", cert_eps)->required();
  cert->add_option("--lambda", cert_lambda)->required();
  cert->add_option("--slack", cert_slack)->capture_default_str();
  cert->add_option("--density", cert_density, "graph sample density for the violation measure")
      ->capture_default_str();
  cert->add_option("--tol", cert_c.tol)->capture_default_str();
  cert->add_flag("--diagnostic", cert_diag,
                 "skip the lambda > threshold guard and report what the solver does");

  std::string sweep_cfg, sweep_out, sweep_summary;
  auto* sweep = app.add_subcommand("sweep", "run a scenario config");
  sweep->add_option("--config", sweep_cfg, "JSON scenario")->required();
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep->add_option("--summary", sweep_summary, "JSON summary path (default <out>.summary.json)");

  Common ek_c;
  double ek_xbar = 0.0, ek_eps = 0.1, ek_lambda = 1.0;
  std::vector<double> ek_range;
  int ek_points = 2001;
  auto* ek = app.add_subcommand("ekeland", "Ekeland point on a grid");
  add_common(ek, ek_c);
  ek->add_option("--xbar", ek_xbar)->required();
  ek->add_option("--eps", ek_eps)->required();
  ek->add_option("--lambda", ek_lambda)->required();
  ek->add_option("--range", ek_range, "grid interval lo,hi")->delimiter(',');
  ek->add_option("--points", ek_points)->capture_default_str();

  Common mt_c;
  std::vector<double> mt_xs;
  auto* minty = app.add_subcommand("minty", "resolvent pair (I + df)^-1 in the Hilbert case");
  add_common(minty, mt_c);
  minty->add_option("--xstar", mt_xs)->required()->delimiter(',');
  minty->add_option("--tol", mt_c.tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (catalog->parsed()) return cmd_catalog();
    if (prox->parsed()) return cmd_prox(prox_c, prox_x, prox_lambda);
    if (thr->parsed()) return cmd_threshold(thr_c, thr_tol);
    if (cert->parsed()) {
      return cmd_certify(cert_c, cert_x, cert_xs, cert_eps, cert_lambda, cert_slack, cert_density,
                         cert_diag);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_cfg, sweep_out, sweep_summary);
    if (ek->parsed()) return cmd_ekeland(ek_c, ek_xbar, ek_eps, ek_lambda, ek_range, ek_points);
    if (minty->parsed()) return cmd_minty(mt_c, mt_xs);
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "failure: {}\n", e.what());
    return kNumerical;
  }
  return kUsage;
}
