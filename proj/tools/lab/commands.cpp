#include "lab/commands.hpp"

#include <algorithm>
#include <boost/version.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "geoamp/amplifier.hpp"
#include "geoamp/errors.hpp"
#include "geoamp/order_config.hpp"
#include "geoamp/oscillatory.hpp"
#include "geoamp/parallel.hpp"
#include "geoamp/phase.hpp"
#include "geoamp/spherical.hpp"
#include "geoamp/version.hpp"
#include "lab/config.hpp"
#include "lab/output.hpp"

namespace geoamp::lab {

namespace {

using nlohmann::json;

std::ostream& log(RunContext& ctx) {
  static std::ostream null(nullptr);
  return ctx.log ? *ctx.log : null;
}

std::string rat(const Rational& r) { return to_string(r); }

constexpr std::string_view kShippedOrder = R"(
[algebra]
a = 2
b = -11
[order]
basis = [["1","0","0","0"], ["0","1","0","0"], ["1/2","0","1/2","0"], ["0","1/2","0","1/2"]]
q = 22
)";

}  // namespace

std::string RunContext::config_hash() const { return hex64(fnv1a64(config_text)); }

std::filesystem::path RunContext::output(const std::string& name) {
  outputs.push_back(name);
  return out_dir / name;
}

void load_config(RunContext& ctx, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ctx.config_path = path;
  ctx.config_text = ss.str();
  ctx.config = parse_config(ctx.config_text, path.string());
}

void run_kernel_profile(RunContext& ctx) {
  const auto& k = require_table(ctx.config, "kernel");
  const auto ts = get_doubles(k, "t");
  const WindowShape shape{get_double(k, "eps", 0.04), static_cast<int>(get_int(k, "M", 6))};
  const int power = static_cast<int>(get_int(k, "power", 2));
  const double x_max = get_double(k, "x_max", 1.2), x_step = get_double(k, "x_step", 0.005);
  SynthesisOptions so{get_double(k, "ds", 0.5), get_double(k, "tail", 1e-10)};
  if (!(x_step > 0) || !(x_max > 0) || x_max > 2.0) throw ConfigInvalid("need 0 < x_max <= 2, x_step > 0");
  if (power != 1 && power != 2) throw ConfigInvalid("power must be 1 or 2");
  std::vector<double> xs;
  for (int i = 0; i * x_step <= x_max + 1e-12; ++i) xs.push_back(i * x_step);

  json per_t = json::array();
  double sup_min = INFINITY, sup_max = 0;
  for (double t : ts) {
    SpectralWindow w = [&] {
      try {
        return two_sided_window(t, shape);
      } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(std::string("kernel: ") + e.what());
      }
    }();
    const auto prof = kernel_profile(w, power, xs, ctx.threads, so);
    std::ostringstream name;
    name << "kernel_profile_t" << t << ".csv";
    CsvWriter csv(ctx.output(name.str()), {"x", "k_t", "p_t_normalized"});
    double sup = 0, inside = 0, outside = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double norm = std::abs(prof.k[i]) * std::sqrt(1 + t * xs[i]) / t;
      sup = std::max(sup, norm);
      const double mass = std::abs(prof.k[i]) * std::sinh(xs[i]);
      (xs[i] < w.support_radius(power) ? inside : outside) += mass;
      csv.row({format_double(xs[i]), format_double(prof.k[i]), format_double(norm)});
    }
    csv.finish(kManifestName, ctx.config_hash());
    sup_min = std::min(sup_min, sup);
    sup_max = std::max(sup_max, sup);
    per_t.push_back({{"t", t},
                     {"sup_normalized", sup},
                     {"support_radius", w.support_radius(power)},
                     {"mass_outside_ratio", inside > 0 ? outside / inside : 0.0},
                     {"spectral_half_width", prof.truncation.width},
                     {"tail_bound", prof.truncation.tail_bound}});
    log(ctx) << "t=" << t << "  sup |p_t|(1+t|x|)^1/2/t = " << sup << "  support radius "
             << w.support_radius(power) << "\n";
  }
  ctx.summary["kernel"] = {{"per_t", per_t}, {"sup_variation", sup_max / sup_min}};
  write_text(ctx.output("kernel_summary.json"), ctx.summary["kernel"].dump(2) + "\n");
}

void run_critical_points(RunContext& ctx) {
  const auto& p = require_table(ctx.config, "phase");
  const Mat2 g = parse_group(p);
  const double rho = get_double(p, "rho");
  const int panels = static_cast<int>(get_int(p, "panels", 1024));
  const PhaseContext pc = [&] {
    try {
      return PhaseContext(g, rho, get_double(p, "delta", 0.05));
    } catch (const std::invalid_argument& e) {
      throw ConfigInvalid(std::string("phase: ") + e.what());
    }
  }();
  const auto label = classify_degeneracy(pc);
  const auto cs = find_critical_points(pc, panels);
  CsvWriter csv(ctx.output("critical_points.csv"),
                {"theta", "x1", "x2", "h", "kappa", "detD_analytic", "detD_numeric", "class"});
  for (const auto& cp : cs.points) {
    const double da = det3(hessian_analytic(cp, pc));
    const double dn = det3(hessian_numeric(cp, pc));
    const char* cls = std::abs(cp.h) < 1e-6 ? to_string(label.cls) : "nondegenerate";
    csv.row({format_double(cp.theta), format_double(cp.x1), format_double(cp.x2), format_double(cp.h),
             format_double(cp.kappa), format_double(da), format_double(dn), cls});
  }
  csv.finish(kManifestName, ctx.config_hash());
  json s{{"count", cs.points.size()},
         {"continuum", cs.continuum},
         {"configuration_class", to_string(label.cls)},
         {"alpha", pc.alpha()}};
  if (label.y) s["d2_y"] = *label.y;
  if (label.theta_witness) s["d2_theta_witness"] = *label.theta_witness;
  ctx.summary["critical_points"] = s;
  log(ctx) << cs.points.size() << " critical points; configuration class " << to_string(label.cls)
           << (cs.continuum ? " (continuum)" : "") << "\n";
}

void run_decay_fit(RunContext& ctx) {
  const auto& d = require_table(ctx.config, "decay");
  const Mat2 g = parse_group(d);
  const auto s_grid = parse_s_grid(d);
  const std::string rule = get_string(d, "lambda_rule", "ratio");
  const double rho = rule == "zero" ? 0.0 : get_double(d, "rho");
  if (rule != "ratio" && rule != "zero") throw ConfigInvalid("lambda_rule must be ratio or zero");
  const std::string model_name = get_string(d, "model", "pure-power");
  DecayModel model;
  if (model_name == "pure-power") model = DecayModel::pure_power;
  else if (model_name == "power-times-sqrt") model = DecayModel::power_times_sqrt;
  else throw ConfigInvalid("model must be pure-power or power-times-sqrt");
  BumpProfile bump;
  try {
    bump.kind = parse_bump_kind(get_string(d, "bump", "poly-smooth"));
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(e.what());
  }
  RestrictionOptions ro;
  ro.rel_tol = get_double(d, "rel_tol", 1e-6);
  for (double s : s_grid)
    if (s > 2000) throw ConfigInvalid("decay-fit: s beyond the desk-scale ceiling 2000");

  const double na = align_to_A(g);
  std::vector<OscResult> vals(s_grid.size());
  parallel_for(s_grid.size(), ctx.threads, [&](std::size_t i) {
    vals[i] = restriction_integral(s_grid[i], rho * s_grid[i], g, bump, bump, ro);
  });
  DecaySeries ser;
  CsvWriter csv(ctx.output("decay.csv"), {"s", "reI", "imI", "absI"});
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const cplx v = vals[i].value;
    ser.s.push_back(s_grid[i]);
    ser.magnitude.push_back(std::abs(v));
    csv.row({format_double(s_grid[i]), format_double(v.real()), format_double(v.imag()),
             format_double(std::abs(v))});
  }
  csv.finish(kManifestName, ctx.config_hash());
  const DecayFit fit = fit_decay(ser, model, na);

  json s{{"model", model_name},
         {"slope", fit.slope},
         {"intercept", fit.intercept},
         {"stderr_slope", fit.stderr_slope},
         {"residual_rms", fit.residual_rms},
         {"samples", fit.samples},
         {"n_align", na},
         {"rho", rho},
         {"lambda_rule", rule},
         {"bump", to_string(bump.kind)},
         {"threshold_eps", kThresholdEps}};
  if (const auto* e = d.get("expected_slope")) {
    const double want = e->value<double>().value_or(NAN);
    s["expected_slope"] = want;
    s["within_0_1"] = std::abs(fit.slope - want) <= 0.1;
  }
  ctx.summary["decay"] = s;
  write_text(ctx.output("decay_fit.json"), s.dump(2) + "\n");

  PlotSeries data{ser.s, ser.magnitude, "|I(s)|", false};
  PlotSeries line{{s_grid.front(), s_grid.back()}, {}, "", true};
  for (double x : line.x) {
    double v = std::exp(fit.intercept) * std::pow(x, fit.slope);
    if (model == DecayModel::power_times_sqrt) v /= std::sqrt(1 + x * na);
    line.y.push_back(v);
  }
  std::ostringstream lab;
  lab << std::setprecision(4) << "fit slope " << fit.slope << " +- " << fit.stderr_slope;
  line.label = lab.str();
  write_loglog_svg(ctx.output("decay.svg"), "restriction integral decay", "s", "|I(s)|", {data, line});
  log(ctx) << "slope " << fit.slope << " +- " << fit.stderr_slope << " (" << model_name
           << ", n_align " << na << ")\n";
}

CountSummary summarize_counts(const std::vector<CountRecord>& records) {
  CountSummary out;
  if (records.empty()) return out;
  std::int64_t n_max = 0;
  for (const auto& r : records) n_max = std::max(n_max, r.n);
  double lower = 0, upper = 0;
  bool audited = true;
  std::int64_t rejections = 0;
  for (const auto& r : records) {
    if (r.ratio > out.max_ratio) out.max_ratio = r.ratio, out.argmax_n = r.n, out.argmax_kappa = r.kappa;
    (2 * r.n <= n_max ? lower : upper) = std::max(2 * r.n <= n_max ? lower : upper, r.ratio);
    if (r.false_rejections < 0) audited = false;
    else rejections += r.false_rejections;
    out.max_statistic_ratio = std::max(out.max_statistic_ratio, r.max_statistic_ratio);
  }
  out.drift = lower > 0 ? upper / lower : INFINITY;
  out.false_rejections = audited ? rejections : -1;
  return out;
}

void run_hecke_count(RunContext& ctx) {
  const auto order_ref = get_string(ctx.config, "order", "");
  const OrderBasis R = [&] {
    if (order_ref.empty()) return parse_order_config(kShippedOrder);
    std::filesystem::path p(order_ref);
    if (p.is_relative()) p = ctx.config_path.parent_path() / p;
    return load_order_config(p);
  }();
  const auto& geo = require_table(ctx.config, "geodesic");
  const GeodesicSegment l(GroupElement(parse_group(geo)), get_double(geo, "length", 1.0));
  const auto& c = require_table(ctx.config, "count");
  const auto ns = parse_n_grid(c);
  const auto kappas = get_doubles(c, "kappa");
  for (double k : kappas)
    if (!(k > 0)) throw ConfigInvalid("kappa values must be positive");
  CountOptions opt;
  opt.prefilter.constant = get_double(c, "prefilter_constant", opt.prefilter.constant);
  opt.prefilter.enabled = get_bool(c, "prefilter", true);
  opt.audit = get_bool(c, "audit", false);
  opt.budget.max_cells = get_double(c, "max_cells", opt.budget.max_cells);

  std::vector<std::vector<CountRecord>> per_n(ns.size());
  parallel_for(ns.size(), ctx.threads, [&](std::size_t i) {
    per_n[i] = count_M_grid(l, ns[i], kappas, R, opt);
  });
  std::vector<CountRecord> all;
  CsvWriter csv(ctx.output("hecke_count.csv"),
                {"n", "kappa", "M", "bound", "ratio", "enumerated", "prefilter_passed", "false_rejections"});
  for (const auto& recs : per_n)
    for (const auto& r : recs) {
      all.push_back(r);
      csv.row({std::to_string(r.n), format_double(r.kappa), std::to_string(r.count),
               format_double(r.bound), format_double(r.ratio), std::to_string(r.enumerated),
               std::to_string(r.prefilter_passed), std::to_string(r.false_rejections)});
    }
  csv.finish(kManifestName, ctx.config_hash());
  const auto sum = summarize_counts(all);
  json s{{"max_ratio", sum.max_ratio},
         {"argmax_n", sum.argmax_n},
         {"argmax_kappa", sum.argmax_kappa},
         {"drift", sum.drift},
         {"false_rejections", sum.false_rejections},
         {"max_statistic_ratio", sum.max_statistic_ratio},
         {"prefilter_constant", opt.prefilter.constant},
         {"n_values", ns.size()},
         {"entry_bound", counting_entry_bound(l)}};
  ctx.summary["hecke_count"] = s;
  write_text(ctx.output("hecke_summary.json"), s.dump(2) + "\n");
  log(ctx) << "max M/((k^2+k^1/2)n+1) = " << sum.max_ratio << " at n=" << sum.argmax_n
           << " kappa=" << sum.argmax_kappa << "; drift " << sum.drift;
  if (sum.false_rejections >= 0) log(ctx) << "; prefilter false rejections " << sum.false_rejections;
  log(ctx) << "\n";
}

void run_exponent_opt(RunContext& ctx, const std::optional<std::string>& preset,
                      const std::optional<std::string>& theta_text,
                      const std::optional<std::string>& beta_text) {
  const toml::table empty;
  const auto* e = ctx.config["exponent"].as_table();
  const toml::table& sec = e ? *e : empty;
  const std::string name = preset ? *preset : get_string(sec, "model", "main");
  auto rational_opt = [&](const std::optional<std::string>& text, std::string_view key,
                          const Rational& fallback) {
    if (text) {
      try {
        return parse_rational(*text);
      } catch (const std::exception&) {
        throw ConfigInvalid("not a rational: " + *text);
      }
    }
    return get_rational(sec, key, fallback);
  };
  const Rational beta = rational_opt(beta_text, "beta", Rational(0));
  const Rational theta = rational_opt(theta_text, "theta", Rational(7, 64));

  ExponentModel model;
  try {
    model = name == "conditional" ? conditional_main_model(theta) : preset_model(name, beta);
  } catch (const std::invalid_argument& ex) {
    throw ConfigInvalid(ex.what());
  }
  OptimizationResult res;
  if (model.terms.size() > 1) {
    res = optimize_exponents(model);
  } else {
    res.N_exponent = model.fixed_N.value_or(0);
    res.beta_exponent = model.fixed_beta.value_or(0);
    res.value = max_term_exponent(model, res.N_exponent, res.beta_exponent);
    res.bound_exponent = model.output_scale * res.value;
    res.active = {0};
  }

  auto& out = log(ctx);
  out << "model " << name << "\n";
  out << std::left << std::setw(28) << "term" << std::setw(14) << "exponent" << "active\n";
  json terms = json::array();
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const auto& t = model.terms[i];
    const Rational v = t.et + t.eN * res.N_exponent + t.eb * res.beta_exponent;
    const bool active = std::find(res.active.begin(), res.active.end(), i) != res.active.end();
    out << std::setw(28) << t.label << std::setw(14) << rat(v) << (active ? "*" : "") << "\n";
    terms.push_back({{"label", t.label}, {"exponent", rat(v)}, {"active", active}});
  }
  out << "log_t N = " << rat(res.N_exponent) << ", log_t beta = " << rat(res.beta_exponent) << "\n";
  out << "bound exponent " << rat(res.bound_exponent) << "\n";
  json s{{"model", name},
         {"terms", terms},
         {"N_exponent", rat(res.N_exponent)},
         {"beta_exponent", rat(res.beta_exponent)},
         {"bound_exponent", rat(res.bound_exponent)}};
  if (name == "onspec" || name == "offspec") {
    const auto aff = affine_in_beta(name);
    out << "as a function of b = log_t beta: " << rat(aff.c0) << " + (" << rat(aff.c1) << ") b\n";
    s["affine"] = {{"c0", rat(aff.c0)}, {"c1", rat(aff.c1)}};
  }
  if (name == "conditional") {
    const auto ce = conditional_exponents(theta);
    out << "theta = " << rat(theta) << ": L2 exponent " << rat(ce.l2_exponent) << ", period exponents ("
        << rat(ce.period_t) << ", " << rat(ce.period_beta) << ")\n";
    s["theta"] = rat(theta);
    s["l2_exponent"] = rat(ce.l2_exponent);
    s["period_exponents"] = {rat(ce.period_t), rat(ce.period_beta)};
  }
  ctx.summary["exponent"] = s;
  write_text(ctx.output("exponent_opt.json"), s.dump(2) + "\n");
}

int run_selftest(RunContext& ctx) {
  int failures = 0;
  auto& out = log(ctx);
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    if (!ok) ++failures;
  };
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      check(name, false, std::string("threw: ") + e.what());
    }
  };
  std::mt19937_64 rng(ctx.seed);

  guarded("hecke-degrees", [&] {
    const auto R = parse_order_config(kShippedOrder);
    bool ok = true;
    for (std::int64_t m : {1, 2, 3, 5, 7, 9, 13})
      if (std::gcd(m, R.q()) == 1)
        ok = ok && coset_reps(R, m).reps.size() == static_cast<std::size_t>(sigma1(m));
    check("hecke-degrees", ok, "coset counts equal sigma1(m) for small m");
  });
  guarded("spherical-origin", [&] {
    const double err = std::abs(spherical_phi(20, 0) - 1.0) + std::abs(spherical_phi(20, 1e-12) - 1.0);
    check("spherical-origin", err < 1e-10, "phi_s(0) = 1");
  });
  guarded("exponent-main", [&] {
    const auto r = optimize_exponents(preset_model("main"));
    check("exponent-main", r.bound_exponent == Rational(3, 14), "main model gives " + rat(r.bound_exponent));
  });
  guarded("fit-synthetic", [&] {
    DecaySeries s;
    for (double v = 100; v <= 1600; v *= 1.5) s.s.push_back(v), s.magnitude.push_back(7 * std::pow(v, -4.0 / 3));
    const auto f = fit_decay(s, DecayModel::pure_power);
    check("fit-synthetic", std::abs(f.slope + 4.0 / 3) < 1e-10, "slope " + format_double(f.slope));
  });
  guarded("amplifier-sums", [&] {
    std::normal_distribution<double> nd;
    std::vector<cplx> a(200);
    for (auto& v : a) v = {nd(rng), nd(rng)};
    const auto rep = amplifier_sum_checks(a);
    check("amplifier-sums", rep.holds, "constants " + format_double(rep.constant1) + ", " +
                                           format_double(rep.constant2));
  });
  guarded("restriction-symmetry", [&] {
    const auto v = restriction_integral(20, 0, Mat2{}, BumpProfile{}, BumpProfile{}).value;
    check("restriction-symmetry", std::abs(v.imag()) < 1e-8 * std::abs(v), "Im/|I| at g = e, lambda = 0");
  });
  ctx.summary["selftest_failures"] = failures;
  return failures;
}

void write_manifest(const RunContext& ctx, double wall_seconds, int exit_code) {
  json m{{"tool", "geodesic-amp-lab"},
         {"subcommand", ctx.subcommand},
         {"config", ctx.config_path.string()},
         {"config_hash_fnv1a64", ctx.config_hash()},
         {"seed", ctx.seed},
         {"threads", ctx.threads},
         {"wall_time_s", wall_seconds},
         {"exit_code", exit_code},
         {"threshold_eps", kThresholdEps},
         {"outputs", ctx.outputs},
         {"summary", ctx.summary},
         {"versions",
          {{"geoamp", kVersion},
           {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                         "." + std::to_string(BOOST_VERSION % 100)},
           {"tomlplusplus", std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." +
                                std::to_string(TOML_LIB_PATCH)},
           {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
           {"compiler", __VERSION__}}}};
  write_text(ctx.out_dir / kManifestName, m.dump(2) + "\n");
}

}  // namespace geoamp::lab
