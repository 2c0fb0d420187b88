// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path to brprox_cli>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <fmt/format.h>

#include "brprox/br_engine.hpp"
#include "brprox/function_catalog.hpp"
#include "brprox/monotone_analysis.hpp"
#include "brprox/normed_space.hpp"
#include "brprox/prox_bounded.hpp"
#include "brprox/scenario.hpp"

using namespace brprox;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector s(double t) { return Vector::Constant(1, t); }

double ref_norm(const Vector& x, double r) {
  double acc = 0.0;
  for (double v : x) acc += std::pow(std::abs(v), r);
  return std::pow(acc, 1.0 / r);
}

struct Shell {
  int status = -1;
  std::string out;
};

Shell run(const std::string& cmd) {
  Shell r;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// The big sweep shared by criteria 1-3.

struct SweepRun {
  std::string name;
  RunReport report;
};

std::vector<SweepRun> g_sweeps;
double g_sweep_seconds = 0.0;

void run_sweeps() {
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"abs", "quad", "indicator_box", "w_shape", "l0", "neg_quad_c:2"}) {
    ScenarioConfig c;
    c.function = name;
    c.query_count = 200;
    g_sweeps.push_back({name, run_scenario(c)});
  }
  g_sweep_seconds = seconds_since(t0);
}

// Brute-force nu for -x^2 over the lattice the sampler uses.
double neg_quad_nu(const RunReport& r, double x, double xs) {
  const double lo = r.sample_box.lo[0], hi = r.sample_box.hi[0], d = r.sample_density;
  double best = kInf;
  auto offer = [&](double y) {
    const double ys = -2.0 * y;
    if (std::abs(ys) <= r.dual_cap) best = std::min(best, (ys - xs) * (y - x));
  };
  offer(lo);
  offer(hi);
  for (long k = static_cast<long>(std::floor(lo * d)); k <= static_cast<long>(std::ceil(hi * d)); ++k) {
    const double y = k / d;
    if (y > lo && y < hi) offer(y);
  }
  return best;
}

Outcome criterion1() {
  Outcome o;
  o.require(g_sweeps.size() == 6, "sweep did not complete");
  std::vector<std::string> notes;
  for (const auto& [name, r] : g_sweeps) {
    int min_q = 1 << 30;
    for (const auto& cell : r.cells) min_q = std::min(min_q, cell.qualifying);
    int pass = 0, qual = 0;
    for (const auto& row : r.rows) {
      if (!(row.query.nu >= -row.record.eps)) continue;
      ++qual;
      const double bx = std::sqrt(row.record.eps / row.record.lambda) + r.slack_used;
      const double bxs = std::sqrt(row.record.eps * row.record.lambda) + r.slack_used;
      pass += row.record.dx <= bx && row.record.dxstar <= bxs;
    }
    o.require(std::abs(r.slack_used - (1e-6 + 2.0 / r.sample_density)) < 1e-15,
              name + ": slack is not 1e-6 + 2 resolution");
    o.require(qual == r.qualifying, name + ": qualifying count mismatch");
    o.require(pass == qual, fmt::format("{}: {} of {} qualifying queries pass", name, pass, qual));
    if (name == "neg_quad_c:2") {
      // The graph of -x^2 is a decreasing line: no pair is eps-related to it.
      int vac = 0;
      for (const auto& row : r.rows) {
        const double nu = neg_quad_nu(r, row.query.x[0], row.query.xstar[0]);
        vac += nu < -row.record.eps && std::abs(nu - row.query.nu) <= 1e-9 * (1 + std::abs(nu));
      }
      o.require(vac == static_cast<int>(r.rows.size()), "neg_quad_c:2 relatedness oracle disagrees");
      notes.push_back(fmt::format("{} 0 qualifying (empty enlargement, vacuous)", name));
    } else {
      o.require(min_q >= 100, fmt::format("{}: a cell has only {} qualifying queries", name, min_q));
      notes.push_back(fmt::format("{} >={}/cell", name, min_q));
    }
  }
  o.require(g_sweep_seconds < 300.0, fmt::format("sweep took {:.1f} s", g_sweep_seconds));
  if (o.pass) {
    o.detail = fmt::format("100% of qualifying queries pass in every cell ({:.1f} s): ", g_sweep_seconds);
    for (size_t i = 0; i < notes.size(); ++i) o.detail += (i ? ", " : "") + notes[i];
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  o.require(g_sweeps.size() == 6, "sweep did not complete");
  long checked = 0, bad = 0;
  for (const auto& [name, r] : g_sweeps) {
    for (const auto& row : r.rows) {
      if (!row.query.related) continue;
      ++checked;
      const double eps = row.record.eps, lambda = row.record.lambda;
      const double bound = (0.0 + std::sqrt(0.0 + 4.0 * eps * lambda)) / (2.0 * lambda);
      if (!(row.record.dx <= bound + r.slack_used)) ++bad;
      if (!(std::abs(bound - std::sqrt(eps / lambda)) <= 1e-12 * (1 + bound))) ++bad;
    }
  }
  o.require(bad == 0, fmt::format("{} violations", bad));
  if (o.pass) o.detail = fmt::format("0 violations over {} qualifying records", checked);
  return o;
}

Outcome criterion3() {
  Outcome o;
  o.require(g_sweeps.size() == 6, "sweep did not complete");
  double worst = 0.0;
  long n = 0;
  for (const auto& [name, r] : g_sweeps) {
    const NormedSpace sp(r.dim, r.p);
    for (const auto& row : r.rows) {
      const auto& c = row.record;
      const Vector y = c.constructed.x - c.x;
      const Vector diff = c.xstar - c.constructed.xstar;
      const double a = diff.dot(y) / c.lambda;
      const double b = std::pow(sp.norm(y), 2);
      const double d = std::pow(sp.dual_norm(diff / c.lambda), 2);
      const double scale = std::max({1.0, a, b, d});
      worst = std::max({worst, std::abs(a - b) / scale, std::abs(a - d) / scale,
                        std::abs(b - d) / scale});
      ++n;
    }
  }
  o.require(worst <= 1e-9, fmt::format("max disagreement {:.3g}", worst));
  if (o.pass) o.detail = fmt::format("max disagreement {:.3g} over {} records", worst, n);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0, worst_x = 0.0;
  for (const char* name : {"abs", "quad"}) {
    const auto f = catalog_get(name);
    const NormedSpace sp(1, 2.0);
    for (int k = 0; k < 100; ++k) {
      const double xs = u(rng);
      try {
        const auto pr = minty_surjectivity_check(f, sp, s(xs));
        worst = std::max(worst, pr.residual);
        // Closed-form resolvents: soft threshold and halving.
        const double ref = std::string(name) == "abs"
                               ? std::copysign(std::max(std::abs(xs) - 1.0, 0.0), xs)
                               : 0.5 * xs;
        worst_x = std::max(worst_x, std::abs(pr.x[0] - ref));
      } catch (const std::exception& e) {
        o.require(false, fmt::format("{} x*={}: {}", name, xs, e.what()));
      }
    }
  }
  const double t = seconds_since(t0);
  o.require(worst <= 1e-8, fmt::format("residual {:.3g}", worst));
  o.require(worst_x <= 1e-6, fmt::format("resolvent off closed form by {:.3g}", worst_x));
  o.require(t < 10.0, fmt::format("took {:.2f} s", t));
  if (o.pass) {
    o.detail = fmt::format("200 targets, max residual {:.3g}, max |xbar - closed form| {:.3g}, {:.2f} s",
                           worst, worst_x, t);
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const NormedSpace sp(1);
  std::string brackets;
  for (double c : {0.5, 2.0, 3.0}) {
    const auto est = estimate_threshold(catalog_get(fmt::format("neg_quad_c:{}", c)), sp, 0.05);
    const double width = est.upper - est.lower;
    o.require(est.lower <= c && c <= est.upper, fmt::format("c={} outside [{}, {}]", c, est.lower, est.upper));
    o.require(width <= std::max(0.05, 0.05 * c), fmt::format("c={} bracket width {}", c, width));
    brackets += fmt::format(" c={}:[{},{}]", c, est.lower, est.upper);
  }
  for (const char* name : {"abs", "quad", "indicator_box"}) {
    const auto est = estimate_threshold(catalog_get(name), sp);
    o.require(est.all_bounded && est.value() == 0.0, fmt::format("{} estimated {}", name, est.value()));
  }
  const double t = seconds_since(t0);
  o.require(t < 30.0, fmt::format("took {:.2f} s", t));
  if (o.pass) o.detail = fmt::format("{}; convex entries 0 ({:.2f} s)", brackets.substr(1), t);
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst_id = 0.0, worst_fd = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    const NormedSpace sp(3, p);
    for (int k = 0; k < 10000; ++k) {
      Vector x(3);
      for (auto& v : x) v = u(rng);
      const Vector js = sp.duality_map(x);
      const double n = ref_norm(x, p);
      worst_id = std::max(worst_id, std::abs(js.dot(x) - n * n) / (n * n));
      worst_id = std::max(worst_id, std::abs(ref_norm(js, p / (p - 1.0)) - n) / n);
      if (k < 1000) {
        const double h = 1e-6;
        for (int i = 0; i < 3; ++i) {
          Vector a = x, b = x;
          a[i] += h;
          b[i] -= h;
          worst_fd = std::max(worst_fd, std::abs((sp.j_value(a) - sp.j_value(b)) / (2 * h) - js[i]));
        }
      }
    }
  }
  o.require(worst_id <= 1e-10, fmt::format("identity error {:.3g}", worst_id));
  o.require(worst_fd <= 1e-5, fmt::format("gradient error {:.3g}", worst_fd));
  if (o.pass) {
    o.detail = fmt::format("3 x 10^4 vectors, identity error {:.3g}, gradient error {:.3g}", worst_id,
                           worst_fd);
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::vector<std::string> names = {"abs", "quad", "indicator_box", "l0", "w_shape",
                                          "neg_quad_c:2"};
  const NormedSpace sp(1);
  std::vector<Vector> grid;
  for (int k = 0; k <= 2000; ++k) grid.push_back(s(-3.0 + 6.0 * k / 2000));
  int trials = 0, failures = 0;
  while (trials < 50) {
    const auto f = catalog_get(names[trials % names.size()]);
    double inf = kInf;
    for (const auto& g : grid) inf = std::min(inf, f(g));
    const Vector xbar = grid[static_cast<size_t>(u01(rng) * 2000.0)];
    const double fb = f(xbar);
    if (!is_finite_value(fb)) continue;
    const double eps = fb - inf + 0.5 * u01(rng);
    const double lambda = 0.05 + 3.0 * u01(rng);
    ++trials;
    try {
      const auto r = ekeland_point(f, sp, xbar, eps, lambda, grid);
      const double fl = f(r.point);
      bool ok = std::abs(r.point[0] - xbar[0]) <= lambda * (1 + 1e-12) && fl <= fb;
      for (const auto& g : grid) {
        ok = ok && fl <= f(g) + eps / lambda * std::abs(g[0] - r.point[0]) + 1e-12 * (1 + std::abs(fl));
      }
      ok = ok && check_ekeland(f, sp, xbar, eps, lambda, grid, r.point).ok();
      failures += !ok;
    } catch (const std::exception& e) {
      ++failures;
      o.require(false, fmt::format("{}: {}", f.name, e.what()));
    }
  }
  const double t = seconds_since(t0);
  o.require(failures == 0, fmt::format("{} failures", failures));
  o.require(t < 30.0, fmt::format("took {:.2f} s", t));
  if (o.pass) o.detail = fmt::format("50 trials on a 2001-point grid, 0 failures ({:.2f} s)", t);
  return o;
}

Outcome criterion8(const std::string& cli) {
  Outcome o;
  const auto a = run(cli + " certify abs --x 0 --xstar 1.5 --eps 0.01 --lambda 1");
  o.require(a.status == 1, fmt::format("certify abs exit {}", a.status));
  o.require(a.out.find("non-membership certificate") != std::string::npos,
            "no non-membership certificate printed");
  const auto b = run(cli + " certify neg_quad_c:2 --x 0 --xstar 0 --eps 0.01 --lambda 1");
  o.require(b.status == 2, fmt::format("guarded lambda exit {}", b.status));
  const auto c = run(cli + " certify neg_quad_c:2 --x 0 --xstar 0 --eps 0.01 --lambda 1 --diagnostic");
  o.require(c.status == 3, fmt::format("unbounded probe exit {}", c.status));
  if (o.pass) o.detail = "abs -> exit 1 with certificate; neg_quad_c:2 lambda=1 -> exit 2, diagnostic -> exit 3";
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::vector<double> eps_grid = {0.0, 0.01, 0.1, 1.0};
  std::vector<Vector> tp;
  for (int k = 0; k <= 20000; ++k) tp.push_back(s(-10.0 + 20.0 * k / 20000));
  int members = 0, certified = 0, probes = 0;
  for (const char* name : {"abs", "quad"}) {
    const auto f = catalog_get(name);
    const NormedSpace sp(1);
    const auto lambdas = default_lambda_grid(0.0);
    for (int k = 0; k < 200; ++k, ++probes) {
      // Half the probes sit on grid points (including the kink of abs).
      const double x = k % 2 ? u(rng) : std::round(u(rng) * 10.0) / 10.0;
      const double eps = eps_grid[k % eps_grid.size()];
      const Vector g = f.subdiff(s(x)).nearest(s(u(rng)));
      const double xs = g[0] + (2.0 * u01(rng) - 1.0) * 2.0 * std::sqrt(eps);
      std::vector<Vector> pts = tp;
      pts.push_back(s(x));
      if (!eps_subdiff_test(f, s(x), s(xs), eps, pts)) continue;
      ++members;
      bool all = true;
      for (double lambda : lambdas) {
        const auto r = br_approximate(f, sp, s(x), s(xs), eps, lambda);
        all = all && r.pass;
        if (!r.pass) {
          o.require(false, fmt::format("{} x={} x*={} eps={} lambda={} dx={} bound={}", name, x, xs,
                                       eps, lambda, r.dx, r.bound_x));
        }
      }
      certified += all;
    }
  }
  o.require(members > 0, "no eps-subdifferential member found");
  if (o.pass) {
    o.detail = fmt::format("{} probes, {} members, all certified for lambda in {{0.01, 0.5, 1, 2, 8}}",
                           probes, members);
  }
  return o;
}

Outcome criterion10(const std::string& cli) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / fmt::format("brprox_accept_{}", ::getpid());
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"function": "abs", "eps_grid": [0, 0.01, 0.1], "lambda_grid": [0.5, 1, 2],
               "query_count": 100, "seed": 7})";
  }
  const std::string base = cli + " sweep --config " + (dir / "cfg.json").string() + " --out ";
  const auto a = run("BRPROX_THREADS=1 " + base + (dir / "a.csv").string());
  const auto b = run("BRPROX_THREADS=4 " + base + (dir / "b.csv").string());
  o.require(a.status == 0 && b.status == 0, fmt::format("sweep exits {} / {}", a.status, b.status));
  auto body = [](const std::string& text) {
    const auto nl = text.find('\n');
    return nl == std::string::npos ? std::string() : text.substr(nl + 1);
  };
  const std::string ta = read_file(dir / "a.csv"), tb = read_file(dir / "b.csv");
  o.require(ta.rfind("# generated ", 0) == 0, "missing timestamp header");
  o.require(!body(ta).empty() && body(ta) == body(tb), "CSV bodies differ");
  const std::string digest = sha256_hex(body(ta));
  o.require(read_file(dir / "a.csv.summary.json").find(digest) != std::string::npos,
            "summary digest does not match the CSV body");
  fs::remove_all(dir);
  if (o.pass) o.detail = fmt::format("two runs (1 and 4 threads) byte-identical, sha256 {}", digest.substr(0, 16));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <brprox_cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  int failed = 0;
  auto report = [&](int n, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail << std::endl;
    failed += !o.pass;
  };
  auto guarded = [&](int n, auto fn) {
    try {
      report(n, fn());
    } catch (const std::exception& e) {
      Outcome o;
      o.require(false, std::string("exception: ") + e.what());
      report(n, o);
    }
  };
  try {
    run_sweeps();
  } catch (const std::exception& e) {
    std::cout << "sweep failed: " << e.what() << std::endl;
  }
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, [&] { return criterion8(cli); });
  guarded(9, criterion9);
  guarded(10, [&] { return criterion10(cli); });
  std::cout << (failed ? fmt::format("{} criteria failed", failed) : std::string("all criteria pass"))
            << std::endl;
  return failed ? 1 : 0;
}
