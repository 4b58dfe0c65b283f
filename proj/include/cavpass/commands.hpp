// commands.hpp — command bodies behind the CLI front end.  Each returns the
// process exit code: 0 success, 2 config error, 3 numerical failure, 4
// threshold violation under --assert.
#pragma once

#include "cavpass/config.hpp"

#include <iosfwd>

namespace cavpass {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitAssert = 4;

// Trajectory CSV (trajectory.csv) + gate report JSON (gate.json).
int simulate_cmd(const RunConfig& config, const std::filesystem::path& out_dir,
                 bool assert_mode, std::ostream& log, std::ostream& err);

// Scan CSV (scan.csv), one row per grid point.
int scan_cmd(const RunConfig& config, const std::filesystem::path& out_dir, bool assert_mode,
             std::ostream& log, std::ostream& err);

// Per-step dark-state report JSON (darkstates.json).
int darkstates_cmd(const RunConfig& config, const std::filesystem::path& out_dir,
                   bool assert_mode, std::ostream& log, std::ostream& err);

// Prints the metastable-Helium estimate; optionally also writes it as JSON.
int estimate_cmd(double intensity, double t_p, double gamma,
                 const std::optional<std::filesystem::path>& json_path, std::ostream& log,
                 std::ostream& err);

}  // namespace cavpass
