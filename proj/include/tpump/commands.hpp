#pragma once

#include <iosfwd>

#include "tpump/experiment.hpp"

namespace tpump {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Each command validates the config, writes its data files and a run manifest
// under config.output_dir, and reports progress on `log`. Data files carry the
// config hash in their name and are byte-identical across reruns; only the
// manifest records wall time and a timestamp.
//
// The return value is the process exit code. ConfigError escapes to the caller.

/// trajectory_seed<s>_<hash>.csv and manifest_seed<s>_<hash>.json per seed.
int cmd_simulate(const ExperimentConfig& config, std::ostream& log);

/// sweep_<hash>.csv, sweep_summary_<hash>.csv, manifest_sweep_<hash>.json.
int cmd_sweep(const ExperimentConfig& config, std::ostream& log);

/// chern_<hash>.json and manifest_chern_<hash>.json.
int cmd_chern(const ExperimentConfig& config, std::ostream& log);

/// winding_<hash>.csv and manifest_winding_<hash>.json.
int cmd_winding(const ExperimentConfig& config, std::ostream& log);

}  // namespace tpump
