#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <toml.hpp>

#include "geoamp/errors.hpp"
#include "geoamp/version.hpp"
#include "lab/commands.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kBudget = 3, kAccuracy = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace geoamp;
  CLI::App app{"Numerical laboratory for amplified geodesic restriction bounds"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  lab::RunContext ctx;
  ctx.log = &std::cout;
  std::string config;
  std::string out_dir = ".";
  std::optional<std::string> preset, theta, beta;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "TOML experiment spec");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", ctx.seed, "seed for randomized choices")->capture_default_str();
    sub->add_option("--threads", ctx.threads, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
  };
  auto* kp = app.add_subcommand("kernel-profile", "synthesize k_t and the normalized flat trace");
  auto* cp = app.add_subcommand("critical-points", "critical points and Hessians of the phase");
  auto* df = app.add_subcommand("decay-fit", "decay exponent of the restriction integral");
  auto* hc = app.add_subcommand("hecke-count", "counting function M(l, n, kappa)");
  auto* eo = app.add_subcommand("exponent-opt", "exact exponent balancing for a model preset");
  auto* st = app.add_subcommand("selftest", "quick internal consistency checks");
  for (auto* s : {kp, cp, df, hc}) common(s, true);
  common(eo, false);
  common(st, false);
  eo->add_option("model", preset, "period-a | period-b | onspec | offspec | main | conditional");
  eo->add_option("--theta", theta, "Ramanujan parameter for conditional, e.g. 7/64");
  eo->add_option("--beta", beta, "log_t beta for onspec / offspec");

  CLI11_PARSE(app, argc, argv);
  ctx.subcommand = app.get_subcommands().front()->get_name();
  ctx.out_dir = out_dir;

  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    std::filesystem::create_directories(ctx.out_dir);
    if (!config.empty()) lab::load_config(ctx, config);
    if (kp->parsed()) lab::run_kernel_profile(ctx);
    else if (cp->parsed()) lab::run_critical_points(ctx);
    else if (df->parsed()) lab::run_decay_fit(ctx);
    else if (hc->parsed()) lab::run_hecke_count(ctx);
    else if (eo->parsed()) lab::run_exponent_opt(ctx, preset, theta, beta);
    else if (st->parsed()) code = lab::run_selftest(ctx) == 0 ? kOk : kFailure;
  } catch (const ConfigInvalid& e) {
    std::cerr << "config-invalid: " << e.what() << "\n";
    code = kConfig;
  } catch (const toml::parse_error& e) {
    std::cerr << "config-invalid: " << e.description() << "\n";
    code = kConfig;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget-exceeded: " << e.what() << "\n";
    code = kBudget;
  } catch (const IncompleteEnumeration& e) {
    std::cerr << "incomplete-enumeration: " << e.what() << "\n";
    code = kBudget;
  } catch (const AccuracyNotReached& e) {
    std::cerr << "accuracy-not-reached: " << e.what() << " (achieved " << e.achieved() << ")\n";
    code = kAccuracy;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kFailure;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    lab::write_manifest(ctx, wall, code);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    if (code == kOk) code = kFailure;
  }
  return code;
}
