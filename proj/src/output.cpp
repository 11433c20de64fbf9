#include "tpump/output.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include "tpump/format.hpp"

#ifndef TPUMP_VERSION
#define TPUMP_VERSION "unknown"
#endif

namespace tpump {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const std::size_t n_sites = tr.site_populations.empty() ? 0 : tr.site_populations.front().size();
  os << 't';
  for (std::size_t i = 0; i < n_sites; ++i) os << ",site_" << i;
  for (const auto& name : tr.region_names) os << ',' << csv_field("region_" + name);
  for (int id : tr.chain_ids) os << ",com_chain_" << id;
  os << '\n';
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << format_double(tr.times[k]);
    for (double p : tr.site_populations[k]) os << ',' << format_double(p);
    for (double p : tr.region_populations[k]) os << ',' << format_double(p);
    for (const auto& c : tr.centers_of_mass[k]) {
      os << ',';
      if (c) os << format_double(*c);
    }
    os << '\n';
  }
}

void write_winding_csv(std::ostream& os, const std::vector<WindingRow>& rows) {
  os << "mu,r,seed,W,winding,certificate,status\n";
  for (const auto& r : rows) {
    os << r.chain << ',' << r.trimer << ',' << r.seed << ',' << format_double(r.strength) << ',';
    if (r.winding) os << *r.winding;
    os << ',' << (r.certificate ? "true" : "false") << ',' << r.status << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& region_names) {
  os << "seed,status";
  for (const auto& name : region_names) os << ',' << csv_field("region_" + name);
  os << ",min_abs_winding,certified,message\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << r.status;
    for (std::size_t k = 0; k < region_names.size(); ++k) {
      os << ',';
      if (k < r.final_regions.size()) os << format_double(r.final_regions[k]);
    }
    os << ',';
    if (r.min_abs_winding) os << *r.min_abs_winding;
    os << ',';
    if (r.status != "failed") os << (r.certified ? "true" : "false");
    os << ',' << csv_field(r.message) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<ColumnSummary>& summary) {
  os << "column,mean,min,max,count\n";
  for (const auto& s : summary) {
    os << csv_field(s.column);
    for (double v : {s.mean, s.min, s.max}) {
      os << ',';
      if (s.count > 0) os << format_double(v);
    }
    os << ',' << s.count << '\n';
  }
}

nlohmann::json chern_json(const BlochModel& model, const ChernResult& result,
                          const std::string& config_hash) {
  return {{"p", model.p},
          {"q", model.q},
          {"Delta", model.amplitude},
          {"J", model.hopping},
          {"grid", {result.n_k, result.n_phi}},
          {"C", result.chern},
          {"residual", result.residual},
          {"min_gap", result.min_gap},
          {"config_hash", config_hash}};
}

std::string trajectory_filename(std::uint64_t seed, const std::string& hash) {
  return "trajectory_seed" + std::to_string(seed) + "_" + hash + ".csv";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string code_version() { return TPUMP_VERSION; }

}  // namespace tpump
