#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hjump/orchestrator.hpp"
#include "hjump/verify.hpp"

namespace hjump {

/// Parses and validates a scenario document. Schema violations raise
/// InputError naming the offending field path (e.g. `hamiltonian.lip`).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& s);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string scenario_fingerprint(const Scenario& s);

/// `t,x,u`; an active jump contributes two rows at its node (left then right).
void write_snapshots_csv(const Solution& sol, std::ostream& out);
/// `t,left_trace,right_trace` for initial interval k.
void write_interval_traces_csv(const Solution& sol, std::size_t k, std::ostream& out);
/// `t,left_trace,right_trace,J` for jump j.
void write_jump_traces_csv(const Solution& sol, std::size_t j, std::ostream& out);

/// Per-jump summary, merge log and config echo.
nlohmann::json solution_report(const Solution& sol, const Scenario& s);

/// Non-finite measurements are written as the strings "inf" / "-inf" / "nan".
nlohmann::json report_to_json(const CheckReport& r);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

}  // namespace hjump
