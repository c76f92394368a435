#pragma once

/// Deterministic table output for the ellspec CLI.
///
/// Every primary output embeds a metadata block (version, command, full
/// config echo, tolerances) so a file is self-describing; the block is part
/// of the deterministic byte stream.  Wall-clock time, which must not
/// perturb byte-identical reruns, goes into a JSON sidecar `<out>.meta.json`
/// instead.

#include <string>
#include <utility>
#include <vector>

namespace ellspec {

inline constexpr const char* kVersion = "1.0.0";

/// Format a double with 17 significant digits ('%.17g', '.' decimal point,
/// locale independent).
std::string fmt17(double v);

/// A rectangular table with key/value metadata and optional trailer notes
/// (e.g. detected eigenvalue crossings) that belong to the results rather
/// than to the configuration.
struct OutputTable {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;  // ordered echo
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> trailer;  // result annotations, one per line
};

/// Serialize as CSV: '#'-prefixed metadata block, header row, data rows,
/// '#'-prefixed trailer lines.
std::string to_csv(const OutputTable& table);

/// Serialize the same content as JSON (stable key order, rows as arrays of
/// the exact strings used in the CSV).
std::string to_json(const OutputTable& table);

/// Write `content` to `path` ("-" writes to stdout).  Throws
/// esp::numerical_error on I/O failure.
void write_file(const std::string& path, const std::string& content);

/// Write `<path>.meta.json` holding the wall time of the producing command.
/// Skipped when the primary output went to stdout.
void write_sidecar(const std::string& path, const std::string& command,
                   double wall_ms);

/// JSON string escaping for the serializers above.
std::string json_escape(const std::string& s);

}  // namespace ellspec
