#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tpump/commands.hpp"
#include "tpump/experiment.hpp"
#include "tpump/output.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  std::optional<int> threads;
  std::optional<double> dt;
  std::optional<int> grid;
  std::optional<double> chern_amplitude;
};

tpump::ExperimentConfig resolve(const Flags& f, const std::string& verb) {
  using namespace tpump;
  if (!f.config_path.empty() && !f.preset.empty())
    throw ConfigError("--config and --preset are mutually exclusive");
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    c = load_config(f.config_path);
  } else if (!f.preset.empty()) {
    c = preset_config(f.preset);
  } else if (verb == "chern") {
    c = ExperimentConfig{};
  } else {
    throw ConfigError("give --config PATH or --preset NAME");
  }
  if (f.seed && !f.seeds.empty()) throw ConfigError("--seed and --seeds are mutually exclusive");
  if (f.seed) c.seeds = {*f.seed};
  if (!f.seeds.empty()) c.seeds = parse_seed_list(f.seeds);
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.dt) c.integrator.dt = *f.dt;
  if (f.grid) c.chern_grid = *f.grid;
  if (f.chern_amplitude) c.chern_model.amplitude = *f.chern_amplitude;
  if (c.chern_grid < 6) throw ConfigError("chern grid " + std::to_string(c.chern_grid) + " is below the 6x6 minimum");
  if (c.threads < 0) throw ConfigError("--threads must be >= 0");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thouless pumping in arrays of trimerized spin chains"};
  app.set_version_flag("--version", tpump::code_version());
  app.require_subcommand(1);

  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "Config JSON or run manifest")->check(CLI::ExistingFile);
    sub->add_option("--preset", flags.preset, "Built-in preset: fig2, single-chain, bethe");
    sub->add_option("--seed", flags.seed, "Single disorder seed");
    sub->add_option("--seeds", flags.seeds, "Seed list, e.g. 1-20 or 1,4,9");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
    sub->add_option("--dt", flags.dt, "Integrator time step");
  };

  auto* simulate = app.add_subcommand("simulate", "Propagate one trajectory per seed");
  auto* sweep = app.add_subcommand("sweep", "Disorder ensemble with per-seed summary");
  auto* chern = app.add_subcommand("chern", "Chern numbers of the clean periodic model");
  auto* winding = app.add_subcommand("winding", "Winding number and certificate for every trimer");
  for (auto* s : {simulate, sweep, chern, winding}) add_common(s);
  chern->add_option("--grid", flags.grid, "Grid points per torus direction");
  chern->add_option("--delta", flags.chern_amplitude, "Modulation amplitude Delta / J");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return tpump::kExitConfig;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    const auto config = resolve(flags, verb);
    if (verb == "simulate") return tpump::cmd_simulate(config, std::cerr);
    if (verb == "sweep") return tpump::cmd_sweep(config, std::cerr);
    if (verb == "chern") return tpump::cmd_chern(config, std::cerr);
    return tpump::cmd_winding(config, std::cerr);
  } catch (const tpump::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tpump::kExitConfig;
  } catch (const tpump::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return tpump::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
