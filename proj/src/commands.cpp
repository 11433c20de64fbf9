#include "tpump/commands.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "tpump/output.hpp"

namespace tpump {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json manifest(const std::string& command, const ExperimentConfig& config, const std::string& hash,
              const std::vector<std::string>& outputs, double wall) {
  return {{"command", command},
          {"config", to_json(config)},
          {"config_hash", hash},
          {"seeds", config.seeds},
          {"code_version", code_version()},
          {"outputs", outputs},
          {"wall_time_seconds", wall},
          {"timestamp_utc", utc_timestamp()}};
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace

int cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const auto hash = config_hash(config);
  const fs::path dir = config.output_dir;

  struct Outcome {
    std::optional<Trajectory> trajectory;
    std::string error;
    double wall = 0.0;
  };
  std::vector<Outcome> outcomes(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads, [&](std::size_t i) {
    Stopwatch clock;
    try {
      outcomes[i].trajectory = run_trajectory(config, config.seeds[i]);
    } catch (const NumericalError& e) {
      outcomes[i].error = e.what();
    }
    outcomes[i].wall = clock.seconds();
  });

  int status = kExitOk;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto seed = config.seeds[i];
    if (!outcomes[i].trajectory) {
      log << "seed " << seed << ": " << outcomes[i].error << '\n';
      status = kExitNumerical;
      continue;
    }
    const auto& tr = *outcomes[i].trajectory;
    std::ostringstream csv;
    write_trajectory_csv(csv, tr);
    const auto name = trajectory_filename(seed, hash);
    write_text_file(dir / name, csv.str());

    ExperimentConfig single = config;
    single.seeds = {seed};
    auto m = manifest("simulate", single, hash, {name}, outcomes[i].wall);
    m["seed"] = seed;
    m["steps"] = tr.steps;
    m["samples"] = tr.times.size();
    const auto mname = "manifest_seed" + std::to_string(seed) + "_" + hash + ".json";
    write_json(dir / mname, m);
    log << "seed " << seed << ": " << tr.steps << " steps, wrote " << (dir / name).string() << '\n';
  }
  return status;
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  Stopwatch clock;
  const auto hash = config_hash(config);
  const fs::path dir = config.output_dir;
  const auto rows = run_sweep(config, config.seeds, config.threads);

  std::vector<std::string> names;
  for (const auto& r : config.regions) names.push_back(r.name);
  std::ostringstream csv, summary;
  write_sweep_csv(csv, rows, names);
  write_summary_csv(summary, summarize(rows, names));
  const std::string rows_name = "sweep_" + hash + ".csv";
  const std::string summary_name = "sweep_summary_" + hash + ".csv";
  write_text_file(dir / rows_name, csv.str());
  write_text_file(dir / summary_name, summary.str());
  write_json(dir / ("manifest_sweep_" + hash + ".json"),
             manifest("sweep", config, hash, {rows_name, summary_name}, clock.seconds()));

  int failures = 0;
  for (const auto& r : rows)
    if (r.status != "ok") {
      ++failures;
      log << "seed " << r.seed << ": " << r.status << (r.message.empty() ? "" : ": " + r.message) << '\n';
    }
  log << rows.size() << " seeds, " << failures << " failed, wrote " << (dir / rows_name).string() << '\n';
  return failures == 0 ? kExitOk : kExitNumerical;
}

int cmd_chern(const ExperimentConfig& config, std::ostream& log) {
  config.chern_model.validate();
  Stopwatch clock;
  const auto hash = config_hash(config);
  const fs::path dir = config.output_dir;
  ChernResult result;
  try {
    result = fhs_chern(config.chern_model, config.chern_grid, config.chern_grid);
  } catch (const NumericalError& e) {
    log << e.what() << '\n';
    return kExitNumerical;
  }
  const std::string name = "chern_" + hash + ".json";
  write_json(dir / name, chern_json(config.chern_model, result, hash));
  write_json(dir / ("manifest_chern_" + hash + ".json"),
             manifest("chern", config, hash, {name}, clock.seconds()));
  log << "C =";
  for (int c : result.chern) log << ' ' << c;
  log << " (residual " << result.residual << "), wrote " << (dir / name).string() << '\n';
  return kExitOk;
}

int cmd_winding(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  Stopwatch clock;
  const auto hash = config_hash(config);
  const fs::path dir = config.output_dir;

  std::vector<std::vector<WindingRow>> per_seed(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads,
               [&](std::size_t i) { per_seed[i] = winding_rows(config, config.seeds[i]); });
  std::vector<WindingRow> rows;
  for (auto& v : per_seed) rows.insert(rows.end(), v.begin(), v.end());

  std::ostringstream csv;
  write_winding_csv(csv, rows);
  const std::string name = "winding_" + hash + ".csv";
  write_text_file(dir / name, csv.str());
  write_json(dir / ("manifest_winding_" + hash + ".json"),
             manifest("winding", config, hash, {name}, clock.seconds()));

  std::size_t gaps = 0, unprotected = 0;
  for (const auto& r : rows) {
    if (!r.winding) ++gaps;
    else if (*r.winding == 0) ++unprotected;
  }
  log << rows.size() << " trimer curves, " << unprotected << " with winding 0, " << gaps
      << " gap closings, wrote " << (dir / name).string() << '\n';
  return kExitOk;
}

}  // namespace tpump
