#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "stripneg/config.hpp"

namespace stripneg {

inline constexpr const char* kToolVersion = "1.0.0";

/// One named table; cells are JSON scalars or arrays of scalars.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::ordered_json>> rows;
};

struct Report {
  std::string command;
  RunConfig config;
  std::vector<Table> tables;
};

/// "stripneg 1.0.0; eigen a.b.c; boost a.b.c; fmt a.b.c".
std::string tool_versions();

/// Numbers use 17 significant digits; arrays are joined with ';'.
std::string format_cell(const nlohmann::ordered_json& cell);

/// Header lines start with '#': tool, command, config digest, seed and the
/// resolved config. Several tables are separated by '# table: <name>' lines.
std::string render_csv(const Report& report);
std::string render_json(const Report& report);
std::string render(const Report& report);

/// The report without its '#' header lines (CSV) or its metadata (JSON).
std::string report_body(const std::string& rendered);

}  // namespace stripneg
