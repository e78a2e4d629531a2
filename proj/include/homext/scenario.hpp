#pragma once

#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "homext/catalog.hpp"
#include "homext/tempered.hpp"
#include "homext/version.hpp"

namespace homext {

/* Scenario configs: flat key = value lines, '#' comments, dotted keys for
   catalog parameters. Unknown keys and unknown scenario kinds are rejected.
   The exact grammar is documented in the repository README. */
struct Config {
  std::map<std::string, std::string> kv;

  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
      if (cfg.kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
      cfg.kv[key] = val;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
  }

  bool has(const std::string& k) const { return kv.count(k) > 0; }
  std::string str(const std::string& k, const std::string& def = "") const {
    auto it = kv.find(k);
    return it == kv.end() ? def : it->second;
  }
  std::string require(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) throw ConfigError("missing required key '" + k + "'");
    return it->second;
  }
  double real(const std::string& k, double def) const {
    auto it = kv.find(k);
    if (it == kv.end()) return def;
    try {
      size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("key '" + k + "' is not a real number");
    }
  }
  long long integer(const std::string& k, long long def) const {
    auto it = kv.find(k);
    if (it == kv.end()) return def;
    try {
      size_t pos = 0;
      long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("key '" + k + "' is not an integer");
    }
  }
  Rational rational(const std::string& k, Rational def) const {
    auto it = kv.find(k);
    if (it == kv.end()) return def;
    const std::string& v = it->second;
    try {
      auto slash = v.find('/');
      if (slash == std::string::npos) {
        if (v.find('.') == std::string::npos) return Rational(std::stoll(v));
        return Rational((long long)std::llround(std::stod(v) * 1000000.0), 1000000);
      }
      return Rational(std::stoll(v.substr(0, slash)), std::stoll(v.substr(slash + 1)));
    } catch (const Error&) {
      throw;
    } catch (...) {
      throw ConfigError("key '" + k + "' is not a rational");
    }
  }

  CatalogParams dotted(const std::string& prefix) const {
    CatalogParams out;
    for (const auto& [k, v] : kv)
      if (k.rfind(prefix + ".", 0) == 0) out.raw[k.substr(prefix.size() + 1)] = v;
    return out;
  }

  // schema validation: every present key must be known
  void validate_keys(const std::set<std::string>& known,
                     const std::vector<std::string>& dotted_prefixes) const {
    for (const auto& [k, v] : kv) {
      if (known.count(k)) continue;
      bool dotted_ok = false;
      for (const auto& p : dotted_prefixes)
        if (k.rfind(p + ".", 0) == 0) dotted_ok = true;
      if (!dotted_ok) throw ConfigError("unknown key '" + k + "'");
    }
  }
};

struct CheckRecord {
  std::string name;
  std::string target;  // the verified fact
  Cplx value{0.0, 0.0};
  double measure = 0.0;  // what is compared against the tolerance
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct Curve {
  std::string name;
  std::vector<std::pair<double, Cplx>> rows;  // (s, pairing)
};

struct ScenarioResult {
  std::vector<CheckRecord> checks;
  std::vector<Curve> curves;
  std::vector<std::string> notes;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace scenario_detail {

// index-ordered parallel map: results land in their slots, so the assembled
// report is identical no matter how many workers ran
template <class Fn>
void parallel_for(int jobs, int count, const Fn& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int m = std::min(jobs, count);
  for (int t = 0; t < m; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline const char* kJacobianNote =
    "degree bookkeeping: a function f with f(sX, t/s) = s^p f represents the density f dX dt "
    "of alpha-degree p + n - 1 (the alpha Jacobian contributes s^{n-1})";

inline CheckRecord make_check(const std::string& name, const std::string& target, Cplx value,
                              double measure, double tol, const std::string& note = "") {
  CheckRecord c;
  c.name = name;
  c.target = target;
  c.value = value;
  c.measure = measure;
  c.tolerance = tol;
  c.pass = measure <= tol;
  c.note = note;
  return c;
}

// expected-refusal check: pass iff the operation throws the right error
template <class Err, class F>
CheckRecord expect_refusal(const std::string& name, const std::string& target, const F& f) {
  CheckRecord c;
  c.name = name;
  c.target = target;
  c.tolerance = 0.0;
  try {
    f();
    c.pass = false;
    c.note = "operation unexpectedly succeeded";
  } catch (const Err& e) {
    c.pass = true;
    c.note = e.what();
  }
  return c;
}

// ---- homogeneity scenario --------------------------------------------------

inline ScenarioResult run_homogeneity(const Config& cfg, int jobs) {
  cfg.validate_keys({"kind", "n", "a", "action", "dist", "seed", "tol", "probes"}, {"dist"});
  ScenarioResult out;
  const std::string id = cfg.require("dist");
  const CatalogEntry* entry = find_entry(id);
  if (!entry)
    throw ConfigError("unknown catalog id '" + id + "'; nearest is '" + nearest_catalog_id(id) +
                      "'");
  const double tol = cfg.real("tol", 1e-8);
  const std::uint64_t seed = std::uint64_t(cfg.integer("seed", 2024));
  const int probes = int(cfg.integer("probes", 10));
  std::vector<double> sgrid = {0.25, 0.5, 2.0, 4.0};
  out.notes.push_back(kJacobianNote);

  if (entry->domain == "line") {
    LineCatalogItem item = make_line_dist(id, cfg.dotted("dist"));
    SeededRng rng(seed);
    const Cplx deg = item.dilation_degree.value();
    Curve curve;
    curve.name = "pairing_vs_s";
    for (int i = 0; i < probes; ++i) {
      TestFn phi = random_bump(rng);
      const Cplx base = item.oracle.pair(phi).value;
      for (double s : sgrid) {
        const Cplx pulled = item.oracle.pair(Fn1::from(phi).scaled_arg(1.0 / s)).value;
        Cplx defect = base - std::pow(Cplx(s), -deg) * pulled;
        if (item.anomalous && item.is_power) {
          // subtract the known log anomaly: -ln(s) phi^(-a)(0)/(-a)!
          const int k = int(-item.dilation_degree.rat.num);
          defect -= -std::log(s) * phi.derivative(0.0, k) / factorial(k);
        }
        if (i == 0) curve.rows.push_back({s, pulled});
        out.checks.push_back(make_check(
            "probe" + std::to_string(i) + "_s" + std::to_string(s),
            item.anomalous ? "log-scaling-anomaly" : "dilation-homogeneity",
            defect, std::abs(defect) / (1.0 + std::abs(base)), tol));
      }
    }
    out.curves.push_back(curve);
    return out;
  }

  if (entry->domain != "model") throw ConfigError("homogeneity scenario needs a line or model id");
  const int n = int(cfg.integer("n", 1));
  ModelCatalogItem item = make_model_dist(id, n, cfg.dotted("dist"));
  Cplx deg = cfg.has("a") ? Cplx(cfg.rational("a", Rational(0)).to_double(), 0.0)
                          : item.alpha_degree.value();
  ActionKind kind = ActionKind::alpha;
  const std::string action = cfg.str("action", "alpha");
  if (action == "beta")
    kind = ActionKind::beta;
  else if (action == "gamma")
    kind = ActionKind::gamma;
  else if (action != "alpha")
    throw ConfigError("action must be alpha|beta|gamma");

  // probes drawn sequentially (deterministic), evaluated possibly in parallel
  SeededRng rng(seed);
  std::vector<ProductTestFn> probe_fns;
  for (int i = 0; i < probes; ++i)
    probe_fns.push_back(item.punctured ? random_punctured_probe(rng, n)
                                       : random_product_probe(rng, n));
  std::vector<std::vector<CheckRecord>> slots{size_t(probes)};
  Curve curve;
  curve.name = "pairing_vs_s";
  std::vector<Cplx> curve_vals(sgrid.size());
  parallel_for(jobs, probes, [&](int i) {
    const ProductTestFn& phi = probe_fns[size_t(i)];
    const Cplx base = item.oracle.pair(phi).value;
    for (size_t k = 0; k < sgrid.size(); ++k) {
      const double s = sgrid[k];
      const Cplx pulled = item.oracle.pair(pullback(kind, s, phi)).value;
      const Cplx defect = pulled - std::pow(Cplx(s), deg) * base;
      if (i == 0) curve_vals[k] = pulled;
      slots[size_t(i)].push_back(make_check(
          "probe" + std::to_string(i) + "_s" + std::to_string(s), "zoom-homogeneity", defect,
          std::abs(defect) / (1.0 + std::abs(base)), tol));
    }
  });
  for (auto& slot : slots)
    for (auto& c : slot) out.checks.push_back(std::move(c));
  for (size_t k = 0; k < sgrid.size(); ++k) curve.rows.push_back({sgrid[k], curve_vals[k]});
  out.curves.push_back(curve);
  return out;
}

// ---- extend-polar scenario -------------------------------------------------

inline ScenarioResult run_extend_polar(const Config& cfg) {
  cfg.validate_keys({"kind", "n", "a", "trace", "seed", "tol"}, {"trace"});
  ScenarioResult out;
  const int n = int(cfg.integer("n", 1));
  const std::string id = cfg.require("trace");
  const CatalogEntry* entry = find_entry(id);
  if (!entry)
    throw ConfigError("unknown catalog id '" + id + "'; nearest is '" + nearest_catalog_id(id) +
                      "'");
  const double tol = cfg.real("tol", 1e-7);
  TraceCatalogItem item = make_trace(id, n, cfg.dotted("trace"));
  const RationalDegree a = RationalDegree::exact_rational(cfg.rational("a", Rational(-1, 2)));
  PolarTrace tr{item.oracle, item.gamma_degree, false};

  // admissibility and certification failures become failed checks
  try {
    CanonicalExtension ext(tr, a);
    out.notes.push_back("natural regularization depth k = " +
                        std::to_string(ext.natural_depth()));
    TestFn f_in = TestFn::bump(2.0, 1.0);
    TestFn f_zero = TestFn::bump(0.6, 1.0);
    SphereLineFn g = SphereLineFn::isotropic(n, TestFn::bump(0.15, 0.9));
    Pairing rec = reconstruct(tr, a, f_in, g);
    Pairing can = ext.pair(f_in, g);
    out.checks.push_back(make_check(
        "restriction", "canonical-extension-restricts-to-the-factorization",
        can.value, std::abs(can.value - rec.value) / (1.0 + std::abs(rec.value)), tol));
    PolarTensorFn probe{f_zero, g};
    const Cplx base = ext.pair(f_zero, g).value;
    Curve curve;
    curve.name = "extension_pairing_vs_s";
    for (double s : {0.25, 0.5, 2.0, 4.0}) {
      const Cplx d = extension_defect(ext, probe, s);
      curve.rows.push_back({s, d});
      out.checks.push_back(make_check("alpha_defect_s" + std::to_string(s),
                                      "extension-homogeneity-including-base-probes", d,
                                      std::abs(d) / (1.0 + std::abs(base)), tol));
    }
    out.curves.push_back(curve);
    if (ext.natural_depth() == 0) {
      Pairing forced = ext.pair(f_zero, g, 1);
      out.checks.push_back(make_check(
          "depth_consistency", "forced-depth-value-preservation", forced.value,
          std::abs(forced.value - base) / (1.0 + std::abs(base)), tol));
    }
  } catch (const ForbiddenDegreeError& e) {
    CheckRecord c;
    c.name = "admissible_degree";
    c.target = "forbidden-degree-refusal";
    c.pass = false;
    c.tolerance = 0.0;
    c.note = e.what();
    out.checks.push_back(c);
  } catch (const NotHomogeneousError& e) {
    CheckRecord c;
    c.name = "trace_certification";
    c.target = "trace-weak-degree-certificate";
    c.pass = false;
    c.tolerance = 0.0;
    c.measure = e.max_defect;
    c.note = e.what();
    out.checks.push_back(c);
  }
  return out;
}

// ---- extend-li scenario ----------------------------------------------------

inline ScenarioResult run_extend_li(const Config& cfg) {
  cfg.validate_keys({"kind", "n", "a", "b", "dist", "seed", "tol"}, {"dist"});
  ScenarioResult out;
  const int n = int(cfg.integer("n", 1));
  const std::string id = cfg.require("dist");
  if (!find_entry(id))
    throw ConfigError("unknown catalog id '" + id + "'; nearest is '" + nearest_catalog_id(id) +
                      "'");
  const double tol = cfg.real("tol", 1e-7);
  ModelCatalogItem item = make_model_dist(id, n, cfg.dotted("dist"));
  const RationalDegree a =
      cfg.has("a") ? RationalDegree::exact_rational(cfg.rational("a", Rational(0)))
                   : item.alpha_degree;
  const double b = cfg.real("b", 0.5);

  ProductTestFn phi = ProductTestFn::tensor(
      n, std::vector<TestFn>(size_t(n), TestFn::bump(0.25, 0.9)), TestFn::bump(0.2, 0.8));
  CutoffLimitResult lim = locally_integrable_extend(item.oracle, a, b, phi);
  out.checks.push_back(make_check("cauchy_convergence", "cutoff-limit-extension",
                                  lim.value, double(lim.doublings), 20.0,
                                  "doublings until the extrapolated limit settled"));
  CutoffLimitOptions alt;
  alt.ramp = SmoothRamp{1.0, 3.0};
  CutoffLimitResult lim2 = locally_integrable_extend(item.oracle, a, b, phi, alt);
  out.checks.push_back(make_check("cutoff_profile_independence", "extension-uniqueness",
                                  lim2.value,
                                  std::abs(lim.value - lim2.value) / (1.0 + std::abs(lim.value)),
                                  tol));
  const Cplx av = a.value();
  for (double s : {0.5, 2.0}) {
    CutoffLimitResult ps =
        locally_integrable_extend(item.oracle, a, b, pullback(ActionKind::alpha, s, phi));
    const Cplx d = ps.value - std::pow(Cplx(s), av) * lim.value;
    out.checks.push_back(make_check("alpha_defect_s" + std::to_string(s),
                                    "extension-homogeneity", d,
                                    std::abs(d) / (1.0 + std::abs(lim.value)), tol));
  }
  return out;
}

// ---- discrepancy scenario --------------------------------------------------

inline ScenarioResult run_discrepancy(const Config& cfg) {
  cfg.validate_keys({"kind", "n", "a", "b", "seed", "tol"}, {});
  ScenarioResult out;
  const int n = int(cfg.integer("n", 1));
  const Rational a = cfg.rational("a", Rational(-1));
  const int b = int(cfg.integer("b", 0));
  const double tol = cfg.real("tol", 1e-8);

  CaseInfo info = classify(a, b);
  out.notes.push_back("case: " + info.description);
  std::vector<int> beta(size_t(n), 0);
  beta[0] = b;

  Cplx lm, l0, lp;
  if (info.powers_linked) {
    lp = Cplx(1.0);
    lm = info.linkage;
    l0 = info.delta_admissible ? Cplx(1.0) : Cplx(0.0);
  } else {
    lm = Cplx(1.0);
    lp = Cplx(1.0);
    l0 = Cplx(0.0);
  }
  BoundaryElement e = make_element(n, a, beta, lm, l0, lp);
  const Cplx defect = measured_defect(e);
  out.checks.push_back(make_check("admissible_element_defect",
                                  "boundary-element-homogeneity", defect, std::abs(defect),
                                  tol));
  if (info.powers_linked) {
    out.checks.push_back(expect_refusal<LinkageError>(
        "flipped_sign_refused", "anomaly-cancellation-linkage",
        [&] { make_element(n, a, beta, -lm, l0, lp); }));
  }
  CheckRecord tf;
  tf.name = "transversal_filter";
  tf.target = "transversal-elements-exist-iff-a-plus-b-negative-integer";
  const Rational sum = a + Rational(b);
  tf.pass = transversal_filter(a, b) == (sum.is_integer() && sum.num < 0);
  tf.tolerance = 0.0;
  out.checks.push_back(tf);
  return out;
}

// ---- smooth scenario -------------------------------------------------------

inline ScenarioResult run_smooth(const Config& cfg) {
  cfg.validate_keys({"kind", "n", "a", "m", "coeff", "expect", "seed", "tol"}, {});
  ScenarioResult out;
  const int n = int(cfg.integer("n", 1));
  const Rational a = cfg.rational("a", Rational(1));
  const int m = int(cfg.integer("m", 1));
  const double coeff = cfg.real("coeff", 1.0);
  const double tol = cfg.real("tol", 1e-8);
  const std::string expect = cfg.str("expect", "ok");

  std::vector<int> powers(size_t(n), 0);
  powers[0] = m;
  HomSmoothSpec sp;
  sp.n = n;
  sp.a = a;
  sp.profiles.plus = {PolyN::monomial(n, powers, Cplx(coeff)), {}};
  sp.profiles.minus = sp.profiles.plus;

  SpecVerdict v = check_spec(sp);
  CheckRecord verdict;
  verdict.name = "case_verdict";
  verdict.target = "smooth-homogeneous-characterization";
  verdict.pass = (expect == "ok") == v.ok;
  verdict.tolerance = 0.0;
  verdict.note = v.ok ? "profiles satisfy the case conditions" : v.reason;
  out.checks.push_back(verdict);
  if (!v.ok) return out;

  SmoothHom g = build(sp);
  SeededRng rng(std::uint64_t(cfg.integer("seed", 2024)));
  std::vector<ProductTestFn> probes;
  for (int i = 0; i < 3; ++i) probes.push_back(random_product_probe(rng, n));
  const Cplx deg = Cplx(a.to_double() + n - 1, 0.0);
  DefectSweep sweep =
      homogeneity_sweep(g.oracle(1e-10), deg, ActionKind::alpha, probes, {0.5, 2.0});
  out.checks.push_back(make_check("built_function_homogeneity", "zoom-homogeneity",
                                  Cplx(sweep.max_normalized_defect), sweep.max_normalized_defect,
                                  tol, kJacobianNote));
  return out;
}

// ---- split scenario --------------------------------------------------------

inline ScenarioResult run_split(const Config& cfg) {
  cfg.validate_keys({"kind", "n", "a", "eps", "trace", "seed", "tol", "samples"}, {"trace"});
  ScenarioResult out;
  const int n = int(cfg.integer("n", 1));
  const double eps = cfg.real("eps", 0.31);
  const double tol = cfg.real("tol", 1e-7);
  TraceCatalogItem item = make_trace(cfg.str("trace", "bump_trace"), n, cfg.dotted("trace"));
  if (!item.density) throw ConfigError("split scenario needs a density-backed trace");
  SplitDensities sd = epsilon_split(item.density->density, SplitExponent(eps));

  SeededRng rng(std::uint64_t(cfg.integer("seed", 2024)));
  const int samples = int(cfg.integer("samples", 10000));
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double tau = rng.uniform(item.density->tau_support.lo, item.density->tau_support.hi);
    Vec om(size_t(n), 0.0);
    om[0] = rng.uniform() < 0.5 ? 1.0 : -1.0;
    if (n == 2) {
      const double th = rng.uniform(0.0, 2.0 * M_PI);
      om = {std::cos(th), std::sin(th)};
    }
    const Cplx fv = item.density->density(om, tau);
    const Cplx sum = sd.low(om, tau) + sd.high(om, tau);
    worst = std::max(worst,
                     std::abs(sum - fv) / std::max(1e-300, std::abs(fv)));
  }
  out.checks.push_back(make_check("pointwise_additivity", "epsilon-split-exact-additivity",
                                  Cplx(worst), worst,
                                  4.0 * std::numeric_limits<double>::epsilon(),
                                  std::to_string(samples) + " samples"));

  DensityOptions topt;
  TraceOracle w_low = trace_density(n, sd.low, item.density->tau_support, topt);
  TraceOracle w_high = trace_density(n, sd.high, item.density->tau_support, topt);
  const double base = item.gamma_degree.real();
  WeakDegreeReport rl = certify_trace_degree(w_low, base + eps);
  WeakDegreeReport rh = certify_trace_degree(w_high, base - eps);
  CheckRecord cl;
  cl.name = "low_piece_degree";
  cl.target = "split-piece-weak-degree";
  cl.pass = rl.holds;
  cl.measure = rl.worst_ratio;
  cl.tolerance = 0.0;
  cl.note = rl.grid_note;
  out.checks.push_back(cl);
  CheckRecord ch = cl;
  ch.name = "high_piece_degree";
  ch.pass = rh.holds;
  ch.measure = rh.worst_ratio;
  ch.note = rh.grid_note;
  out.checks.push_back(ch);

  if (cfg.has("a")) {
    const RationalDegree a = RationalDegree::exact_rational(cfg.rational("a", Rational(-1)));
    DeclaredDecomposition decomp;
    decomp.n = n;
    decomp.pieces.push_back(
        {item.oracle, item.gamma_degree, item.density->density, item.density->tau_support});
    ExtendOptions e1, e2;
    e1.forced_eps = 0.31;
    e2.forced_eps = 0.57;
    TemperedExtension x1 = extend_tempered(decomp, a, e1);
    TemperedExtension x2 = extend_tempered(decomp, a, e2);
    TestFn f_away = TestFn::bump(2.0, 1.2);
    SphereLineFn g = SphereLineFn::isotropic(n, TestFn::bump(0.15, 0.8));
    const Cplx v1 = x1.pair(f_away, g).value;
    const Cplx v2 = x2.pair(f_away, g).value;
    out.checks.push_back(make_check("split_extension_agreement",
                                    "extensions-differ-only-on-the-boundary", v1,
                                    std::abs(v1 - v2) / (1.0 + std::abs(v1)), tol));
  }
  return out;
}

}  // namespace scenario_detail

inline ScenarioResult run_scenario(const Config& cfg, int jobs = 1) {
  const std::string kind = cfg.require("kind");
  if (kind == "homogeneity") return scenario_detail::run_homogeneity(cfg, jobs);
  if (kind == "extend-polar") return scenario_detail::run_extend_polar(cfg);
  if (kind == "extend-li") return scenario_detail::run_extend_li(cfg);
  if (kind == "discrepancy") return scenario_detail::run_discrepancy(cfg);
  if (kind == "smooth") return scenario_detail::run_smooth(cfg);
  if (kind == "split") return scenario_detail::run_split(cfg);
  throw ConfigError("unknown scenario kind '" + kind + "'");
}

}  // namespace homext
