#include "stripneg/report.hpp"

#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>

namespace stripneg {

using nlohmann::ordered_json;

std::string tool_versions() {
  return fmt::format("stripneg {}; eigen {}.{}.{}; boost {}.{}.{}; fmt {}.{}.{}", kToolVersion,
                     EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION,
                     BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000, BOOST_VERSION % 100,
                     FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
}

std::string format_cell(const ordered_json& cell) {
  if (cell.is_null()) {
    return "";
  }
  if (cell.is_boolean()) {
    return cell.get<bool>() ? "true" : "false";
  }
  if (cell.is_number_integer()) {
    return std::to_string(cell.get<long long>());
  }
  if (cell.is_number()) {
    return fmt::format("{:.17g}", cell.get<double>());
  }
  if (cell.is_array()) {
    std::string joined;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      joined += (i ? ";" : "") + format_cell(cell[i]);
    }
    return joined;
  }
  std::string text = cell.get<std::string>();
  if (text.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : text) {
      quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return quoted + "\"";
  }
  return text;
}

std::string render_csv(const Report& report) {
  const std::string config = to_json(report.config).dump();
  std::ostringstream out;
  out << "# tool: " << tool_versions() << '\n';
  out << "# command: " << report.command << '\n';
  out << "# config_digest: fnv1a64:" << fnv1a_digest(config) << '\n';
  out << "# seed: " << report.config.seed << '\n';
  out << "# config: " << config << '\n';
  for (const Table& table : report.tables) {
    if (report.tables.size() > 1) {
      out << "# table: " << table.name << '\n';
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << format_cell(row[i]);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string render_json(const Report& report) {
  const std::string config = to_json(report.config).dump();
  ordered_json doc;
  doc["tool"] = tool_versions();
  doc["command"] = report.command;
  doc["config_digest"] = "fnv1a64:" + fnv1a_digest(config);
  doc["seed"] = report.config.seed;
  doc["config"] = ordered_json::parse(config);
  ordered_json tables = ordered_json::object();
  for (const Table& table : report.tables) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
      ordered_json object = ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) {
        object[table.columns[i]] = row[i];
      }
      rows.push_back(std::move(object));
    }
    tables[table.name] = std::move(rows);
  }
  doc["tables"] = std::move(tables);
  return doc.dump(2) + "\n";
}

std::string render(const Report& report) {
  return report.config.output.format == "json" ? render_json(report) : render_csv(report);
}

std::string report_body(const std::string& rendered) {
  if (rendered.starts_with("{")) {
    return ordered_json::parse(rendered).at("tables").dump();
  }
  std::istringstream in(rendered);
  std::string line;
  std::string body;
  while (std::getline(in, line)) {
    if (!line.starts_with("# tool:") && !line.starts_with("# command:") &&
        !line.starts_with("# config") && !line.starts_with("# seed:")) {
      body += line + '\n';
    }
  }
  return body;
}

}  // namespace stripneg
