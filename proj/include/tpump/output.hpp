#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpump/evolution.hpp"
#include "tpump/experiment.hpp"
#include "tpump/invariants.hpp"

namespace tpump {

// CSV files: UTF-8, comma separated, '.' decimal point, one header row.
// Floating point values use the shortest representation that round-trips.

std::string csv_field(const std::string& s);

/// Header: t, site_0 .. site_{N-1}, region_<name>..., com_chain_<id>...
/// An undefined centre of mass is an empty field.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// Header: mu, r, seed, W, winding, certificate, status.
void write_winding_csv(std::ostream& os, const std::vector<WindingRow>& rows);

/// Header: seed, status, region_<name>..., min_abs_winding, certified, message.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& region_names);

/// Header: column, mean, min, max, count.
void write_summary_csv(std::ostream& os, const std::vector<ColumnSummary>& summary);

nlohmann::json chern_json(const BlochModel& model, const ChernResult& result,
                          const std::string& config_hash);

std::string trajectory_filename(std::uint64_t seed, const std::string& hash);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

std::string code_version();

}  // namespace tpump
