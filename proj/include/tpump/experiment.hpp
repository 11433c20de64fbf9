#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpump/drive.hpp"
#include "tpump/evolution.hpp"
#include "tpump/invariants.hpp"
#include "tpump/lattice.hpp"

namespace tpump {

inline constexpr int kSchemaVersion = 1;

/// Either a named preset ("fig1c", "bethe", "single-chain", "ring") or an explicit
/// list of chains and couplings.
struct TopologySpec {
  std::string preset = "fig1c";
  int depth = 2;       // bethe
  int length = 6;      // bethe, single-chain, ring
  double coupling = 1.0;
  std::vector<ChainSpec> chains;
  std::vector<EdgeCoupling> couplings;

  bool is_explicit() const { return preset.empty(); }
};

/// A region is the union of whole chains and individual sites.
struct RegionDef {
  std::string name;
  std::vector<int> chains;
  std::vector<SiteRef> sites;
};

struct ExperimentConfig {
  TopologySpec topology;
  DriveParams drive;
  std::optional<double> phase;  // overrides theta of every chain when set

  double disorder_strength = 0.0;
  std::vector<std::uint64_t> seeds{1};       // sorted, unique
  std::optional<std::vector<double>> offsets;  // fixed offsets instead of sampling

  SiteRef initial{1, 1};
  double duration_periods = 3.0;
  double t0 = 0.0;
  IntegratorConfig integrator;
  std::vector<RegionDef> regions;

  BlochModel chern_model;
  int chern_grid = 60;
  int winding_samples = 256;

  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
};

/// Canonical JSON: every field written, keys sorted.
nlohmann::json to_json(const ExperimentConfig& config);

/// Strict parse. Unknown keys, wrong types, bad ranges and a missing or
/// unsupported schema_version all raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Reads a config file, or the "config" member of a run manifest.
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical JSON without seeds, output_dir and threads; 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Parses "7", "1-20" or "1,3,5-8" into a sorted, de-duplicated list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<std::uint64_t> normalize_seeds(std::vector<std::uint64_t> seeds);

ArrayTopology build_topology(const ExperimentConfig& config);
std::vector<RegionSpec> build_regions(const ExperimentConfig& config, const ArrayTopology& topology);
DisorderRealization realize_disorder(const ExperimentConfig& config, const ArrayTopology& topology,
                                     std::uint64_t seed);

/// Checks everything that can be checked without running dynamics.
void validate(const ExperimentConfig& config);

Trajectory run_trajectory(const ExperimentConfig& config, std::uint64_t seed);

struct WindingRow {
  int chain = 0;
  int trimer = 0;
  std::uint64_t seed = 0;
  double strength = 0.0;
  std::optional<int> winding;  // empty on gap closing
  bool certificate = false;
  std::string status = "ok";
};

std::vector<WindingRow> winding_rows(const ExperimentConfig& config, std::uint64_t seed);

struct SweepRow {
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::string message;
  std::vector<double> final_regions;
  std::optional<int> min_abs_winding;
  bool certified = false;
};

/// One trajectory plus winding diagnostics per seed, on `threads` workers.
/// Rows come back in seed order whatever the scheduling.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const std::vector<std::uint64_t>& seeds, int threads);

struct ColumnSummary {
  std::string column;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

std::vector<ColumnSummary> summarize(const std::vector<SweepRow>& rows,
                                     const std::vector<std::string>& region_names);

/// Runs task(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

int resolve_threads(int requested);

}  // namespace tpump
