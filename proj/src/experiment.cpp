#include "tpump/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace tpump {

using nlohmann::json;

namespace {

// Strict view over one JSON object: every key must be consumed exactly once.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) fail(key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key + " must be finite");
    return x;
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(key + " must be an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(key + " is out of range");
    return static_cast<int>(x);
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_string()) fail(key + " must be a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) fail(key + " must be an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail("unknown key '" + it.key() + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config error at " + path_ + ": " + msg);
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::uint64_t seed_value(const json& v, const std::string& where) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw ConfigError("config error at " + where + ": seeds must be non-negative integers");
  return v.get<std::uint64_t>();
}

SiteRef read_site(const json& j, const std::string& path) {
  Reader r(j, path);
  SiteRef s;
  s.chain = r.integer("chain", 1);
  s.site = r.integer("site", 1);
  r.finish();
  return s;
}

EdgeRef read_edge(const json& j, const std::string& path) {
  Reader r(j, path);
  EdgeRef e;
  e.chain = r.integer("chain", 1);
  try {
    e.edge = parse_edge(r.string("edge", "A"));
  } catch (const ConfigError& err) {
    r.fail(err.what());
  }
  r.finish();
  return e;
}

TopologySpec read_topology(const json& j) {
  Reader r(j, "topology");
  TopologySpec t;
  if (r.has("chains") || r.has("couplings")) {
    t.preset.clear();
    if (r.has("preset")) r.fail("give either a preset or explicit chains, not both");
    const auto& chains = r.array("chains");
    for (std::size_t i = 0; i < chains.size(); ++i) {
      Reader c(chains[i], "topology.chains[" + std::to_string(i) + "]");
      ChainSpec spec;
      spec.id = c.integer("id", static_cast<int>(i) + 1);
      spec.length = c.integer("length", 6);
      spec.phase = c.number("phase", 0.0);
      c.finish();
      t.chains.push_back(spec);
    }
    if (r.has("couplings")) {
      const auto& couplings = r.array("couplings");
      for (std::size_t i = 0; i < couplings.size(); ++i) {
        const std::string where = "topology.couplings[" + std::to_string(i) + "]";
        Reader c(couplings[i], where);
        EdgeCoupling ec;
        if (!c.has("from") || !c.has("to")) c.fail("needs 'from' and 'to'");
        ec.from = read_edge(c.raw("from"), where + ".from");
        ec.to = read_edge(c.raw("to"), where + ".to");
        ec.strength = c.number("strength", 1.0);
        c.finish();
        t.couplings.push_back(ec);
      }
    }
    r.finish();
    return t;
  }

  t.preset = r.string("preset", "fig1c");
  if (t.preset == "fig1c") {
    // fixed geometry
  } else if (t.preset == "bethe") {
    t.depth = r.integer("depth", 2);
    t.length = r.integer("length", 6);
    t.coupling = r.number("coupling", 1.0);
  } else if (t.preset == "single-chain") {
    t.length = r.integer("length", 30);
  } else if (t.preset == "ring") {
    t.length = r.integer("length", 6);
    t.coupling = r.number("coupling", 1.0);
  } else {
    r.fail("unknown topology preset '" + t.preset + "'");
  }
  r.finish();
  return t;
}

json topology_json(const TopologySpec& t) {
  if (t.is_explicit()) {
    json chains = json::array();
    for (const auto& c : t.chains) chains.push_back({{"id", c.id}, {"length", c.length}, {"phase", c.phase}});
    json couplings = json::array();
    for (const auto& c : t.couplings)
      couplings.push_back({{"from", {{"chain", c.from.chain}, {"edge", to_string(c.from.edge)}}},
                           {"to", {{"chain", c.to.chain}, {"edge", to_string(c.to.edge)}}},
                           {"strength", c.strength}});
    return {{"chains", chains}, {"couplings", couplings}};
  }
  json out = {{"preset", t.preset}};
  if (t.preset == "bethe") {
    out["depth"] = t.depth;
    out["length"] = t.length;
    out["coupling"] = t.coupling;
  } else if (t.preset == "single-chain") {
    out["length"] = t.length;
  } else if (t.preset == "ring") {
    out["length"] = t.length;
    out["coupling"] = t.coupling;
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::uint64_t parse_u64(const std::string& s, const std::string& context) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty())
    throw ConfigError("bad seed '" + s + "' in '" + context + "'");
  return v;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json drive = {{"amplitude", c.drive.amplitude}, {"frequency", c.drive.frequency}, {"b", c.drive.b}};
  if (c.phase) drive["phase"] = *c.phase;

  json disorder = {{"strength", c.disorder_strength}, {"seeds", c.seeds}};
  if (c.offsets) disorder["offsets"] = *c.offsets;

  json regions = json::array();
  for (const auto& r : c.regions) {
    json sites = json::array();
    for (const auto& s : r.sites) sites.push_back({{"chain", s.chain}, {"site", s.site}});
    regions.push_back({{"name", r.name}, {"chains", r.chains}, {"sites", sites}});
  }

  return {
      {"schema_version", kSchemaVersion},
      {"topology", topology_json(c.topology)},
      {"drive", drive},
      {"disorder", disorder},
      {"initial_state", {{"chain", c.initial.chain}, {"site", c.initial.site}}},
      {"duration_periods", c.duration_periods},
      {"t0", c.t0},
      {"integrator",
       {{"dt", c.integrator.dt},
        {"stride", c.integrator.stride},
        {"method", to_string(c.integrator.method)},
        {"backend", to_string(c.integrator.backend)}}},
      {"regions", regions},
      {"chern",
       {{"p", c.chern_model.p},
        {"q", c.chern_model.q},
        {"amplitude", c.chern_model.amplitude},
        {"hopping", c.chern_model.hopping},
        {"grid", c.chern_grid}}},
      {"winding", {{"samples", c.winding_samples}}},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
  };
}

ExperimentConfig config_from_json(const json& j) {
  try {
    Reader root(j, "root");
    if (!root.has("schema_version")) root.fail("missing schema_version");
    if (root.integer("schema_version", 0) != kSchemaVersion)
      root.fail("unsupported schema_version (this build reads " + std::to_string(kSchemaVersion) + ")");

    ExperimentConfig c;
    if (root.has("topology")) c.topology = read_topology(root.raw("topology"));

    if (root.has("drive")) {
      Reader r(root.raw("drive"), "drive");
      c.drive.amplitude = r.number("amplitude", c.drive.amplitude);
      c.drive.frequency = r.number("frequency", c.drive.frequency);
      c.drive.b = r.number("b", c.drive.b);
      if (r.has("phase")) c.phase = r.number("phase", 0.0);
      r.finish();
    }

    if (root.has("disorder")) {
      Reader r(root.raw("disorder"), "disorder");
      c.disorder_strength = r.number("strength", 0.0);
      if (r.has("seed") && r.has("seeds")) r.fail("give seed or seeds, not both");
      if (r.has("seed")) c.seeds = {seed_value(r.raw("seed"), "disorder.seed")};
      if (r.has("seeds")) {
        const auto& v = r.raw("seeds");
        if (v.is_string()) {
          c.seeds = parse_seed_list(v.get<std::string>());
        } else if (v.is_array()) {
          c.seeds.clear();
          for (const auto& s : v) c.seeds.push_back(seed_value(s, "disorder.seeds"));
        } else {
          r.fail("seeds must be an array of integers or a range string");
        }
      }
      if (r.has("offsets")) {
        std::vector<double> offsets;
        for (const auto& x : r.array("offsets")) {
          if (!x.is_number()) r.fail("offsets must be numbers");
          offsets.push_back(x.get<double>());
        }
        c.offsets = std::move(offsets);
      }
      r.finish();
      c.seeds = normalize_seeds(c.seeds);
      if (c.seeds.empty()) r.fail("at least one seed is required");
    }

    if (root.has("initial_state")) c.initial = read_site(root.raw("initial_state"), "initial_state");
    c.duration_periods = root.number("duration_periods", c.duration_periods);
    c.t0 = root.number("t0", c.t0);

    if (root.has("integrator")) {
      Reader r(root.raw("integrator"), "integrator");
      c.integrator.dt = r.number("dt", c.integrator.dt);
      c.integrator.stride = r.integer("stride", c.integrator.stride);
      c.integrator.method = parse_integrator(r.string("method", to_string(c.integrator.method)));
      c.integrator.backend = parse_backend(r.string("backend", to_string(c.integrator.backend)));
      r.finish();
    }

    if (root.has("regions")) {
      const auto& regions = root.array("regions");
      for (std::size_t i = 0; i < regions.size(); ++i) {
        const std::string where = "regions[" + std::to_string(i) + "]";
        Reader r(regions[i], where);
        RegionDef def;
        def.name = r.string("name", "");
        if (def.name.empty()) r.fail("region needs a non-empty name");
        if (r.has("chains"))
          for (const auto& x : r.array("chains")) {
            if (!x.is_number_integer()) r.fail("chains must be integers");
            def.chains.push_back(x.get<int>());
          }
        if (r.has("sites")) {
          const auto& sites = r.array("sites");
          for (std::size_t k = 0; k < sites.size(); ++k)
            def.sites.push_back(read_site(sites[k], where + ".sites[" + std::to_string(k) + "]"));
        }
        r.finish();
        c.regions.push_back(std::move(def));
      }
    }

    if (root.has("chern")) {
      Reader r(root.raw("chern"), "chern");
      c.chern_model.p = r.integer("p", c.chern_model.p);
      c.chern_model.q = r.integer("q", c.chern_model.q);
      c.chern_model.amplitude = r.number("amplitude", c.chern_model.amplitude);
      c.chern_model.hopping = r.number("hopping", c.chern_model.hopping);
      c.chern_grid = r.integer("grid", c.chern_grid);
      r.finish();
    }

    if (root.has("winding")) {
      Reader r(root.raw("winding"), "winding");
      c.winding_samples = r.integer("samples", c.winding_samples);
      r.finish();
    }

    c.output_dir = root.string("output_dir", c.output_dir);
    c.threads = root.integer("threads", c.threads);
    root.finish();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("config") && !j.contains("schema_version"))
    return config_from_json(j.at("config"));
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  j.erase("threads");
  j["disorder"].erase("seeds");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

std::vector<std::string> preset_names() { return {"fig2", "single-chain", "bethe"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig2") {
    c.topology.preset = "fig1c";
    c.disorder_strength = 20.0;
    c.seeds = {1};
    c.duration_periods = 3.0;
    c.regions = {{"I", {1}, {}}, {"II", {2, 3}, {}}, {"III", {4, 5, 6, 7}, {}}};
    c.output_dir = "out/fig2";
  } else if (name == "single-chain") {
    c.topology.preset = "single-chain";
    c.topology.length = 30;
    c.phase = std::numbers::pi / 3.0;
    c.disorder_strength = 0.0;
    c.duration_periods = 1.0;
    c.output_dir = "out/single-chain";
  } else if (name == "bethe") {
    c.topology.preset = "bethe";
    c.topology.depth = 2;
    c.topology.length = 6;
    c.phase = std::numbers::pi / 3.0;
    c.disorder_strength = 20.0;
    c.duration_periods = 3.0;
    c.regions = {{"root", {1}, {}}, {"inner", {2, 3}, {}}, {"outer", {6, 7, 8, 9}, {}}};
    c.output_dir = "out/bethe";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

std::vector<std::uint64_t> normalize_seeds(std::vector<std::uint64_t> seeds) {
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = trim(token);
    if (token.empty()) throw ConfigError("empty entry in seed list '" + text + "'");
    const auto dash = token.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_u64(token, text));
      continue;
    }
    const auto lo = parse_u64(trim(token.substr(0, dash)), text);
    const auto hi = parse_u64(trim(token.substr(dash + 1)), text);
    if (hi < lo) throw ConfigError("descending seed range '" + token + "'");
    if (hi - lo >= 1000000) throw ConfigError("seed range '" + token + "' is too large");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return normalize_seeds(std::move(out));
}

ArrayTopology build_topology(const ExperimentConfig& config) {
  const auto& t = config.topology;
  ArrayTopology topo = [&] {
    if (t.is_explicit()) return ArrayTopology::build(t.chains, t.couplings);
    if (t.preset == "fig1c") return fig1c_topology();
    if (t.preset == "bethe") return bethe_topology(t.depth, t.length, 0.0, t.coupling);
    if (t.preset == "single-chain") return ArrayTopology::build({{1, t.length, 0.0}}, {});
    if (t.preset == "ring") return ring_topology(t.length, 0.0, t.coupling);
    throw ConfigError("unknown topology preset '" + t.preset + "'");
  }();
  if (!config.phase) return topo;
  auto chains = topo.chains();
  for (auto& c : chains) c.phase = *config.phase;
  return ArrayTopology::build(std::move(chains), topo.couplings());
}

std::vector<RegionSpec> build_regions(const ExperimentConfig& config, const ArrayTopology& topology) {
  std::vector<RegionSpec> out;
  std::set<std::string> names;
  for (const auto& def : config.regions) {
    if (!names.insert(def.name).second) throw ConfigError("duplicate region name '" + def.name + "'");
    for (int id : def.chains)
      if (!topology.has_chain(id))
        throw ConfigError("region '" + def.name + "' names unknown chain " + std::to_string(id));
    RegionSpec r = topology.region_of_chains(def.name, def.chains);
    for (const auto& s : def.sites) r.sites.push_back(topology.flatten(s));
    out.push_back(std::move(r));
  }
  validate_regions(topology, out);
  return out;
}

DisorderRealization realize_disorder(const ExperimentConfig& config, const ArrayTopology& topology,
                                     std::uint64_t seed) {
  if (!config.offsets) return sample_disorder(topology, config.disorder_strength, seed);
  const auto& o = *config.offsets;
  if (o.size() != topology.num_sites())
    throw ConfigError("disorder.offsets has " + std::to_string(o.size()) + " entries but the array has " +
                      std::to_string(topology.num_sites()) + " sites");
  for (std::size_t i = 0; i < o.size(); ++i)
    if (!(std::abs(o[i]) <= config.disorder_strength))
      throw ConfigError("disorder.offsets[" + std::to_string(i) + "] lies outside [-W, W]");
  return {config.disorder_strength, seed, o};
}

void validate(const ExperimentConfig& config) {
  config.drive.validate();
  config.integrator.validate(config.drive);
  if (!(config.disorder_strength >= 0.0)) throw ConfigError("disorder strength must be >= 0");
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(config.duration_periods >= 0.0) || !std::isfinite(config.duration_periods))
    throw ConfigError("duration_periods must be finite and >= 0");
  if (config.winding_samples < 16) throw ConfigError("winding.samples must be >= 16");
  if (config.threads < 0) throw ConfigError("threads must be >= 0");
  config.chern_model.validate();
  if (config.chern_grid < 6) throw ConfigError("chern.grid must be >= 6");
  const auto topo = build_topology(config);
  if (!topo.has_chain(config.initial.chain))
    throw ConfigError("initial_state names unknown chain " + std::to_string(config.initial.chain));
  topo.flatten(config.initial);
  build_regions(config, topo);
  realize_disorder(config, topo, config.seeds.front());
}

Trajectory run_trajectory(const ExperimentConfig& config, std::uint64_t seed) {
  const auto topo = build_topology(config);
  const auto regions = build_regions(config, topo);
  const auto disorder = realize_disorder(config, topo, seed);
  const auto psi0 = localized_state(topo, config.initial);
  const double t1 = config.t0 + config.duration_periods * config.drive.period();
  return propagate(topo, config.drive, disorder, psi0, config.t0, t1, config.integrator, regions);
}

std::vector<WindingRow> winding_rows(const ExperimentConfig& config, std::uint64_t seed) {
  const auto topo = build_topology(config);
  const auto disorder = realize_disorder(config, topo, seed);
  std::vector<WindingRow> rows;
  for (const auto& chain : topo.chains())
    for (int r = 1; r <= chain.length / 3; ++r) {
      WindingRow row;
      row.chain = chain.id;
      row.trimer = r;
      row.seed = seed;
      row.strength = config.disorder_strength;
      const auto curve = trimer_curve(config.drive, topo, disorder, chain.id, r, config.winding_samples);
      try {
        row.winding = winding_number(curve, config.drive);
      } catch (const NumericalError&) {
        row.status = "gap_closing";
      }
      row.certificate = config.drive.amplitude > 0.0 &&
                        protection_certificate(config.drive.amplitude,
                                               trimer_offset(topo, disorder, chain.id, r));
      rows.push_back(row);
    }
  return rows;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  if (workers > 0) work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                const std::vector<std::uint64_t>& seeds, int threads) {
  const auto unique = normalize_seeds(seeds);
  std::vector<SweepRow> rows(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.seed = unique[i];
    try {
      const auto tr = run_trajectory(config, row.seed);
      row.final_regions = tr.region_populations.back();
      const auto w = winding_rows(config, row.seed);
      row.certified = std::all_of(w.begin(), w.end(), [](const auto& x) { return x.certificate; });
      const bool gap = std::any_of(w.begin(), w.end(), [](const auto& x) { return !x.winding; });
      if (gap) {
        row.status = "gap_closing";
        row.message = "winding undefined for at least one trimer";
      } else {
        int m = std::numeric_limits<int>::max();
        for (const auto& x : w) m = std::min(m, std::abs(*x.winding));
        row.min_abs_winding = m;
      }
    } catch (const std::exception& e) {
      row.status = "failed";
      row.message = e.what();
    }
  });
  return rows;
}

std::vector<ColumnSummary> summarize(const std::vector<SweepRow>& rows,
                                     const std::vector<std::string>& region_names) {
  std::vector<ColumnSummary> out;
  auto column = [&](const std::string& name, auto value) {
    ColumnSummary s;
    s.column = name;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& r : rows) {
      const std::optional<double> v = value(r);
      if (!v) continue;
      sum += *v;
      s.min = std::min(s.min, *v);
      s.max = std::max(s.max, *v);
      ++s.count;
    }
    if (s.count == 0) {
      s.min = s.max = s.mean = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean = sum / static_cast<double>(s.count);
    }
    out.push_back(s);
  };
  for (std::size_t k = 0; k < region_names.size(); ++k)
    column("region_" + region_names[k], [k](const SweepRow& r) -> std::optional<double> {
      if (k >= r.final_regions.size()) return std::nullopt;
      return r.final_regions[k];
    });
  column("min_abs_winding", [](const SweepRow& r) -> std::optional<double> {
    if (!r.min_abs_winding) return std::nullopt;
    return static_cast<double>(*r.min_abs_winding);
  });
  column("certified", [](const SweepRow& r) -> std::optional<double> {
    if (r.status == "failed") return std::nullopt;
    return r.certified ? 1.0 : 0.0;
  });
  return out;
}

}  // namespace tpump
