#include "output.hpp"

#include <cstdio>
#include <cstring>

#include "esp/errors.hpp"

namespace ellspec {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string to_csv(const OutputTable& table) {
  std::string out;
  out += "# ellspec ";
  out += kVersion;
  out += "\n# command: " + table.command + "\n";
  for (const auto& [key, value] : table.meta) {
    out += "# " + key + ": " + value + "\n";
  }
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  for (const std::string& line : table.trailer) {
    out += "# " + line + "\n";
  }
  return out;
}

std::string to_json(const OutputTable& table) {
  std::string out = "{\n";
  out += "  \"tool\": \"ellspec\",\n";
  out += "  \"version\": \"" + std::string(kVersion) + "\",\n";
  out += "  \"command\": \"" + json_escape(table.command) + "\",\n";
  out += "  \"meta\": {\n";
  for (size_t i = 0; i < table.meta.size(); ++i) {
    out += "    \"" + json_escape(table.meta[i].first) + "\": \"" +
           json_escape(table.meta[i].second) + "\"";
    out += (i + 1 < table.meta.size()) ? ",\n" : "\n";
  }
  out += "  },\n  \"columns\": [";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + json_escape(table.columns[i]) + "\"";
  }
  out += "],\n  \"rows\": [\n";
  for (size_t r = 0; r < table.rows.size(); ++r) {
    out += "    [";
    for (size_t i = 0; i < table.rows[r].size(); ++i) {
      if (i) out += ", ";
      out += "\"" + json_escape(table.rows[r][i]) + "\"";
    }
    out += (r + 1 < table.rows.size()) ? "],\n" : "]\n";
  }
  out += "  ],\n  \"trailer\": [";
  for (size_t i = 0; i < table.trailer.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + json_escape(table.trailer[i]) + "\"";
  }
  out += "]\n}\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    throw esp::numerical_error("cannot open output file " + path);
  }
  const size_t written = std::fwrite(content.data(), 1, content.size(), f);
  if (std::fclose(f) != 0 || written != content.size()) {
    throw esp::numerical_error("short write on output file " + path);
  }
}

void write_sidecar(const std::string& path, const std::string& command,
                   double wall_ms) {
  if (path == "-") return;
  std::string out = "{\n";
  out += "  \"command\": \"" + json_escape(command) + "\",\n";
  out += "  \"output\": \"" + json_escape(path) + "\",\n";
  out += "  \"wall_ms\": " + fmt17(wall_ms) + "\n}\n";
  write_file(path + ".meta.json", out);
}

}  // namespace ellspec
