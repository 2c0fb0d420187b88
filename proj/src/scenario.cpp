#include "brprox/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"

#include "brprox/monotone_analysis.hpp"

namespace brprox {

using nlohmann::json;

namespace {

double number_field(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(fmt::format("'{}' must be a number", key));
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw ConfigError(fmt::format("'{}' must be a non-empty list", key));
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number_field(e, key));
  return out;
}

double bound_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError("piece bounds must be numbers or \"inf\" / \"-inf\"");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(fmt::format("unknown field '{}' in {}", k, where));
  }
}

FunctionSpec inline_function(const json& j) {
  reject_unknown(j, {"name", "pieces", "convex"}, "function");
  if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty()) {
    throw ConfigError("inline function needs a non-empty 'pieces' list");
  }
  std::vector<QuadraticPiece> pieces;
  for (const auto& pc : j["pieces"]) {
    if (!pc.is_object()) throw ConfigError("each piece must be an object");
    reject_unknown(pc, {"lo", "hi", "coef"}, "piece");
    if (!pc.contains("lo") || !pc.contains("hi") || !pc.contains("coef")) {
      throw ConfigError("each piece needs lo, hi and coef");
    }
    const auto coef = number_list(pc["coef"], "coef");
    if (coef.size() > 3) throw ConfigError("coef holds at most [a0, a1, a2]");
    const double lo = bound_value(pc["lo"]);
    const double hi = bound_value(pc["hi"]);
    if (!(lo <= hi) || lo == kInf || hi == -kInf) throw ConfigError("piece with lo > hi");
    pieces.push_back({lo, hi, coef[0], coef.size() > 1 ? coef[1] : 0.0,
                      coef.size() > 2 ? coef[2] : 0.0});
  }
  const bool convex = j.value("convex", false);
  const std::string name = j.value("name", std::string("piecewise"));
  return make_piecewise(name, pieces, convex);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"function", "p", "eps_grid", "lambda_grid", "query_count", "query_box",
                  "sample_density", "slack", "seed", "tol"},
                 "config");
  ScenarioConfig c;
  try {
    if (!j.contains("function")) throw ConfigError("config needs 'function'");
    const auto& fn = j["function"];
    if (fn.is_string()) {
      c.function = fn.get<std::string>();
    } else if (fn.is_object()) {
      inline_function(fn);
      c.function = fn.value("name", std::string("piecewise"));
      c.function_json = fn.dump();
    } else {
      throw ConfigError("'function' must be a name or a piecewise definition");
    }
    if (j.contains("p")) c.p = number_field(j["p"], "p");
    if (!(c.p > 1.0) || !std::isfinite(c.p)) throw ConfigError("p must lie in (1, inf)");
    if (j.contains("eps_grid")) c.eps_grid = number_list(j["eps_grid"], "eps_grid");
    for (double e : c.eps_grid) {
      if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("eps_grid values must be >= 0");
    }
    if (j.contains("lambda_grid")) {
      const auto& lg = j["lambda_grid"];
      if (lg.is_string()) {
        if (lg.get<std::string>() != "auto") throw ConfigError("lambda_grid must be a list or \"auto\"");
      } else {
        c.lambda_grid = number_list(lg, "lambda_grid");
        for (double l : c.lambda_grid) {
          if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda_grid values must be > 0");
        }
      }
    }
    if (j.contains("query_count")) {
      if (!j["query_count"].is_number_integer() || j["query_count"].get<long long>() < 1) {
        throw ConfigError("query_count must be a positive integer");
      }
      c.query_count = j["query_count"].get<int>();
    }
    if (j.contains("query_box") && !j["query_box"].is_null()) {
      const auto& qb = j["query_box"];
      Box b;
      if (qb.is_array() && qb.size() == 2 && qb[0].is_number()) {
        b = Box::interval(qb[0].get<double>(), number_field(qb[1], "query_box"));
      } else if (qb.is_object()) {
        reject_unknown(qb, {"lo", "hi"}, "query_box");
        if (!qb.contains("lo") || !qb.contains("hi")) throw ConfigError("query_box needs lo and hi");
        const auto lo = number_list(qb["lo"], "query_box.lo");
        const auto hi = number_list(qb["hi"], "query_box.hi");
        if (lo.size() != hi.size()) throw ConfigError("query_box lo and hi differ in length");
        b.lo = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
        b.hi = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
      } else {
        throw ConfigError("query_box must be [lo, hi] or {\"lo\": [...], \"hi\": [...]}");
      }
      if (b.empty() || !b.lo.allFinite() || !b.hi.allFinite()) {
        throw ConfigError("query_box must be a bounded non-empty box");
      }
      c.query_box = b;
    }
    if (j.contains("sample_density")) c.sample_density = number_field(j["sample_density"], "sample_density");
    if (!(c.sample_density > 0.0)) throw ConfigError("sample_density must be positive");
    if (j.contains("slack")) c.slack = number_field(j["slack"], "slack");
    if (!(c.slack >= 0.0)) throw ConfigError("slack must be nonnegative");
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) {
        throw ConfigError("seed must be a nonnegative integer");
      }
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("tol")) c.tol = number_field(j["tol"], "tol");
    if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad config value: {}", e.what()));
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ScenarioConfig& c) {
  json j;
  j["function"] = c.function_json.empty() ? json(c.function) : json::parse(c.function_json);
  j["p"] = c.p;
  j["eps_grid"] = c.eps_grid;
  j["lambda_grid"] = c.lambda_grid.empty() ? json("auto") : json(c.lambda_grid);
  j["query_count"] = c.query_count;
  if (c.query_box) {
    j["query_box"] = {{"lo", std::vector<double>(c.query_box->lo.begin(), c.query_box->lo.end())},
                      {"hi", std::vector<double>(c.query_box->hi.begin(), c.query_box->hi.end())}};
  } else {
    j["query_box"] = nullptr;
  }
  j["sample_density"] = c.sample_density;
  j["slack"] = c.slack;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  return j.dump();
}

FunctionSpec config_function(const ScenarioConfig& c) {
  if (!c.function_json.empty()) return inline_function(json::parse(c.function_json));
  try {
    return catalog_get(c.function);
  } catch (const UnknownFunctionError& e) {
    throw ConfigError(e.what());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ purpose);
  h = splitmix64(h ^ a);
  return splitmix64(h ^ b);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

int thread_count() {
  if (const char* env = std::getenv("BRPROX_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vector uniform_in_cube(std::mt19937_64& rng, int n, double r) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = r * (2.0 * uniform01(rng) - 1.0);
  return v;
}

// Largest finite subdifferential bound over a grid of the box.
double subgradient_scale(const FunctionSpec& f, const Box& box, double density) {
  if (!f.has_subdiff()) {
    if (f.lipschitz_bound) {
      return f.lipschitz_bound(std::max(box.lo.cwiseAbs().maxCoeff(), box.hi.cwiseAbs().maxCoeff()));
    }
    return 10.0;
  }
  const int per_axis =
      std::clamp(static_cast<int>(std::ceil(box.width().maxCoeff() * density)) + 1, 2,
                 f.dim == 1 ? 4001 : 101);
  std::vector<Vector> pts = grid_points(box, per_axis);
  if (f.dim == 1) {
    for (double b : f.breakpoints) {
      if (box.contains(Vector::Constant(1, b))) pts.push_back(Vector::Constant(1, b));
    }
  }
  double m = 0.0;
  for (const auto& x : pts) {
    const SubdiffDescription d = f.subdiff(x);
    if (d.is_empty()) continue;
    for (Eigen::Index i = 0; i < d.lo.size(); ++i) {
      if (std::isfinite(d.lo[i])) m = std::max(m, std::abs(d.lo[i]));
      if (std::isfinite(d.hi[i])) m = std::max(m, std::abs(d.hi[i]));
    }
  }
  return m;
}

// Shortest round-trip form; -0 prints as 0.
std::string num(double v) { return fmt::format("{}", v == 0.0 ? 0.0 : v); }

std::string format_vector(const Vector& v) {
  if (v.size() == 1) return num(v[0]);
  std::string s = "\"";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += num(v[i]);
  }
  return s + "\"";
}

double identity_error(const CertificateRecord& r) {
  const double a = r.identity_pairing;
  const double b = r.identity_dual;
  const double c = r.identity_primal;
  const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
  return std::max({std::abs(a - b), std::abs(b - c), std::abs(a - c)}) / scale;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (config.eps_grid.empty()) throw ConfigError("eps_grid is empty");
  if (config.query_count < 1) throw ConfigError("query_count must be positive");
  const FunctionSpec f = config_function(config);
  const NormedSpace space(f.dim, config.p);
  Box qbox = config.query_box ? *config.query_box : f.effective_box;
  if (qbox.dim() == 1 && f.dim > 1) qbox = Box::cube(f.dim, qbox.lo[0], qbox.hi[0]);
  if (qbox.dim() != f.dim) {
    throw ConfigError(fmt::format("query_box has dimension {}, {} has {}", qbox.dim(), f.name, f.dim));
  }

  RunReport rep;
  rep.function = f.name;
  rep.dim = f.dim;
  rep.p = config.p;
  rep.eps_grid = config.eps_grid;
  rep.scenario_id = sha256_hex(canonical_config(config)).substr(0, 12);

  rep.threshold = estimate_threshold(f, space);
  if (!rep.threshold.prox_bounded) {
    throw NumericalError(fmt::format("{} is not prox-bounded at probe scale", f.name));
  }
  const double thr = rep.threshold.value();
  if (config.lambda_grid.empty()) {
    if (!rep.threshold.converged) {
      throw NumericalError("threshold estimation was inconclusive; give lambda_grid explicitly");
    }
    rep.lambdas = default_lambda_grid(thr);
  } else {
    rep.lambdas = config.lambda_grid;
    for (double l : rep.lambdas) {
      if (!(l > thr)) {
        throw LambdaBelowThresholdError(fmt::format(
            "lambda = {} is not above the threshold estimate {} for {}; the inclusion is only "
            "asserted for every lambda > lambda_f",
            l, thr, f.name));
      }
    }
  }

  const double eps_max = *std::max_element(config.eps_grid.begin(), config.eps_grid.end());
  const double lam_min = *std::min_element(rep.lambdas.begin(), rep.lambdas.end());
  const double lam_max = *std::max_element(rep.lambdas.begin(), rep.lambdas.end());
  std::vector<double> sorted_l = rep.lambdas;
  std::sort(sorted_l.begin(), sorted_l.end());
  const double lam_mid = sorted_l[sorted_l.size() / 2];

  // The sample has to extend past the query box by the largest primal radius,
  // or pairs just outside it would be missing from the relatedness test.
  const double margin = std::max(1.0, 1.5 * std::sqrt(eps_max / lam_min));
  const Box sbox = qbox.expanded(margin);
  const double m_scale = subgradient_scale(f, qbox, config.sample_density);
  SampleOptions so;
  so.dual_cap = 10.0 * (1.0 + m_scale + std::sqrt(lam_max * eps_max));
  if (!f.has_subdiff()) so.construct_lambda = std::max(2.0 * thr, thr + 1.0);
  const GraphSample sample = sample_graph(f, space, sbox, config.sample_density, so);
  rep.sample_box = sbox;
  rep.sample_density = config.sample_density;
  if (sample.empty()) throw NumericalError(fmt::format("graph sample of {} is empty", f.name));
  rep.dual_cap = so.dual_cap;
  rep.sample_size = sample.pairs.size();
  rep.resolution = sample.resolution();
  rep.slack_used = config.slack + 2.0 * rep.resolution;

  std::vector<size_t> pool;
  for (size_t i = 0; i < sample.pairs.size(); ++i) {
    const auto& pr = sample.pairs[i];
    if (qbox.contains(pr.x, 1e-12) && pr.xstar.cwiseAbs().maxCoeff() <= m_scale + 1e-12) {
      pool.push_back(i);
    }
  }
  if (pool.empty()) {
    for (size_t i = 0; i < sample.pairs.size(); ++i) {
      if (qbox.contains(sample.pairs[i].x, 1e-12)) pool.push_back(i);
    }
  }
  if (pool.empty()) throw NumericalError("no sampled graph point lies in the query box");

  const size_t ne = config.eps_grid.size();
  const size_t nl = rep.lambdas.size();
  const size_t nq = static_cast<size_t>(config.query_count);
  const int n = f.dim;

  // Pool pairs that are themselves eps-related to the whole sample. Computed
  // exactly when affordable, otherwise targeted picks test candidates lazily.
  const bool exact_core = static_cast<double>(pool.size()) * sample.pairs.size() <= 5e7;
  std::vector<std::vector<size_t>> core(ne);
  if (exact_core) {
    std::vector<double> pool_nu(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
      const auto& pr = sample.pairs[pool[i]];
      pool_nu[i] = violation_measure(sample, pr.x, pr.xstar);
    }
    for (size_t e = 0; e < ne; ++e) {
      for (size_t i = 0; i < pool.size(); ++i) {
        if (pool_nu[i] >= -config.eps_grid[e]) core[e].push_back(pool[i]);
      }
    }
  }

  // Queries: one stream picks the graph point, another draws the perturbation.
  // Even indices aim inside (df)^eps, odd ones are unconstrained.
  std::vector<Query> queries(ne * nq);
  for (size_t e = 0; e < ne; ++e) {
    const double eps = config.eps_grid[e];
    for (size_t k = 0; k < nq; ++k) {
      std::mt19937_64 pick(stream_seed(config.seed, 1, e, k));
      std::mt19937_64 pert(stream_seed(config.seed, 2, e, k));
      Query q;
      q.targeted = k % 2 == 0;
      auto draw = [&](const std::vector<size_t>& from) -> const SubgradPair& {
        return sample.pairs[from[static_cast<size_t>(uniform01(pick) * from.size())]];
      };
      if (q.targeted) {
        const SubgradPair* base = nullptr;
        if (exact_core) {
          base = core[e].empty() ? &draw(pool) : &draw(core[e]);
        } else {
          for (int attempt = 0; attempt < 64 && !base; ++attempt) {
            const SubgradPair& cand = draw(pool);
            if (eps_related(sample, cand.x, cand.xstar, eps)) base = &cand;
          }
          if (!base) base = &draw(pool);
        }
        double rx = std::sqrt(eps / lam_mid);
        double rs = std::sqrt(eps * lam_mid);
        bool found = false;
        for (int attempt = 0; attempt < 20 && !found; ++attempt) {
          const Vector x = base->x + uniform_in_cube(pert, n, rx);
          const Vector xs = base->xstar + uniform_in_cube(pert, n, rs);
          if (eps_related(sample, x, xs, eps)) {
            q.x = x;
            q.xstar = xs;
            found = true;
          }
          rx *= 0.7;
          rs *= 0.7;
        }
        if (!found) {
          q.x = base->x;
          q.xstar = base->xstar;
        }
      } else {
        const SubgradPair& base = draw(pool);
        const double e2 = std::max(eps, 0.01);
        q.x = base.x + uniform_in_cube(pert, n, 2.0 * std::sqrt(e2 / lam_mid));
        q.xstar = base.xstar + uniform_in_cube(pert, n, 2.0 * std::sqrt(e2 * lam_mid));
      }
      q.nu = violation_measure(sample, q.x, q.xstar);
      q.related = q.nu >= -eps;
      queries[e * nq + k] = std::move(q);
    }
  }

  const size_t total = ne * nl * nq;
  rep.rows.resize(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t t = next.fetch_add(1);
      if (t >= total) return;
      const size_t e = t / (nl * nq);
      const size_t l = (t / nq) % nl;
      const size_t k = t % nq;
      try {
        ReportRow row;
        row.eps_index = e;
        row.lambda_index = l;
        row.query_index = k;
        row.query = queries[e * nq + k];
        BrOptions opt;
        opt.slack = rep.slack_used;
        opt.threshold = thr;
        row.record = br_approximate(f, space, row.query.x, row.query.xstar, config.eps_grid[e],
                                    rep.lambdas[l], config.tol, opt);
        if (row.query.related) {
          row.entourage_pass = entourage_check(sample, space, row.query.x, row.query.xstar,
                                               config.eps_grid[e], rep.lambdas[l], rep.slack_used)
                                   .pass;
        }
        rep.rows[t] = std::move(row);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(thread_count(), static_cast<int>(total));
  std::vector<std::thread> pool_threads;
  for (int i = 1; i < threads; ++i) pool_threads.emplace_back(worker);
  worker();
  for (auto& th : pool_threads) th.join();
  for (const auto& ep : errors) {
    if (ep) std::rethrow_exception(ep);
  }

  rep.cells.resize(ne * nl);
  for (size_t e = 0; e < ne; ++e) {
    for (size_t l = 0; l < nl; ++l) {
      rep.cells[e * nl + l].eps = config.eps_grid[e];
      rep.cells[e * nl + l].lambda = rep.lambdas[l];
    }
  }
  std::string csv = std::string(kCsvHeader) + "\n";
  for (const auto& row : rep.rows) {
    const auto& r = row.record;
    auto& cell = rep.cells[row.eps_index * nl + row.lambda_index];
    ++cell.queries;
    rep.max_identity_error = std::max(rep.max_identity_error, identity_error(r));
    if (row.query.related) {
      ++cell.qualifying;
      ++rep.qualifying;
      if (r.pass) {
        ++cell.passed;
        ++rep.passed;
      }
      if (row.entourage_pass) ++cell.entourage_passed;
      if (r.dx > r.iterate_bound + rep.slack_used) ++rep.iterate_violations;
      if (r.bound_x > 0.0) rep.max_excess_x = std::max(rep.max_excess_x, r.dx / r.bound_x);
      if (r.bound_xstar > 0.0) {
        rep.max_excess_xstar = std::max(rep.max_excess_xstar, r.dxstar / r.bound_xstar);
      }
    }
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", rep.scenario_id,
                       rep.function, num(rep.p), num(r.eps), num(r.lambda), format_vector(r.x),
                       format_vector(r.xstar), num(row.query.nu), format_vector(r.constructed.x),
                       format_vector(r.constructed.xstar), num(r.dx), num(r.dxstar),
                       num(r.bound_x), num(r.bound_xstar), num(r.iterate_bound),
                       num(r.solver_gap), r.pass ? "true" : "false");
  }
  rep.pass_rate = rep.qualifying ? static_cast<double>(rep.passed) / rep.qualifying : 1.0;
  rep.csv_body = std::move(csv);
  rep.digest = sha256_hex(rep.csv_body);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void write_report_csv(const RunReport& report, std::ostream& out) {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "# generated " << buf << " by brprox " << report.version << '\n' << report.csv_body;
}

std::string report_summary_json(const RunReport& r) {
  json j;
  j["scenario"] = r.scenario_id;
  j["digest"] = r.digest;
  j["function"] = r.function;
  j["dim"] = r.dim;
  j["p"] = r.p;
  j["threshold"] = {{"lower", r.threshold.lower},
                    {"upper", r.threshold.upper},
                    {"estimate", r.threshold.value()},
                    {"all_bounded", r.threshold.all_bounded},
                    {"converged", r.threshold.converged}};
  j["lambda_grid"] = r.lambdas;
  j["eps_grid"] = r.eps_grid;
  j["sample_size"] = r.sample_size;
  j["sample_resolution"] = r.resolution;
  j["dual_cap"] = r.dual_cap;
  j["slack_used"] = r.slack_used;
  j["qualifying"] = r.qualifying;
  j["passed"] = r.passed;
  j["pass_rate"] = r.pass_rate;
  j["max_normalized_excess_x"] = r.max_excess_x;
  j["max_normalized_excess_xstar"] = r.max_excess_xstar;
  j["max_identity_error"] = r.max_identity_error;
  j["iterate_bound_violations"] = r.iterate_violations;
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"eps", c.eps},
                     {"lambda", c.lambda},
                     {"queries", c.queries},
                     {"qualifying", c.qualifying},
                     {"passed", c.passed},
                     {"entourage_passed", c.entourage_passed}});
  }
  j["cells"] = cells;
  j["version"] = r.version;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2);
}

}  // namespace brprox
