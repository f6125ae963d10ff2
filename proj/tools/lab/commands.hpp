#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>
#include <json.hpp>
#include <toml.hpp>

#include "geoamp/counting.hpp"

namespace geoamp::lab {

struct RunContext {
  std::string subcommand;
  std::filesystem::path config_path;  // empty when the subcommand ran without a config
  std::string config_text;
  toml::table config;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  std::ostream* log = nullptr;  // human-readable summary

  std::vector<std::string> outputs;  // files written, relative to out_dir
  nlohmann::json summary = nlohmann::json::object();

  std::string config_hash() const;
  std::filesystem::path output(const std::string& name);
};

inline constexpr const char* kManifestName = "run_manifest.json";
inline constexpr double kThresholdEps = 0.1;

// Reads and parses the config file into ctx (ConfigInvalid on failure).
void load_config(RunContext& ctx, const std::filesystem::path& path);

void run_kernel_profile(RunContext& ctx);
void run_critical_points(RunContext& ctx);
void run_decay_fit(RunContext& ctx);
void run_hecke_count(RunContext& ctx);
// preset overrides [exponent] model when given.
void run_exponent_opt(RunContext& ctx, const std::optional<std::string>& preset,
                      const std::optional<std::string>& theta, const std::optional<std::string>& beta);
// Returns the number of failed checks.
int run_selftest(RunContext& ctx);

void write_manifest(const RunContext& ctx, double wall_seconds, int exit_code);

struct CountSummary {
  double max_ratio = 0;
  std::int64_t argmax_n = 0;
  double argmax_kappa = 0;
  // max ratio over n in (N/2, N] divided by max ratio over n <= N/2.
  double drift = 0;
  std::int64_t false_rejections = -1;  // -1 when not audited
  double max_statistic_ratio = 0;
};
CountSummary summarize_counts(const std::vector<CountRecord>& records);

}  // namespace geoamp::lab
