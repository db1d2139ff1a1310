#include "stripneg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

using nlohmann::json;

namespace {

void reject_unknown(const json& node, const std::string& where, std::set<std::string> known) {
  if (!node.is_object()) {
    throw ConfigError(fmt::format("'{}' must be an object", where));
  }
  for (const auto& [key, value] : node.items()) {
    if (!known.contains(key)) {
      throw ConfigError(fmt::format("unknown key '{}{}'", where.empty() ? "" : where + ".", key));
    }
  }
}

template <typename T>
void read(const json& node, const char* key, T& target, const std::string& where) {
  if (!node.contains(key)) {
    return;
  }
  try {
    target = node.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("'{}.{}' has the wrong type", where, key));
  }
}

template <typename T>
void read_optional(const json& node, const char* key, std::optional<T>& target,
                   const std::string& where) {
  if (!node.contains(key) || node.at(key).is_null()) {
    return;
  }
  T value{};
  read(node, key, value, where);
  target = value;
}

}  // namespace

RunConfig parse_config(const json& tree) {
  RunConfig config;
  reject_unknown(tree, "", {"geometry", "flux", "potential", "grid", "solver", "seed", "output",
                            "inequalities"});
  if (tree.contains("geometry")) {
    const json& g = tree.at("geometry");
    reject_unknown(g, "geometry", {"width"});
    read(g, "width", config.width, "geometry");
  }
  if (tree.contains("flux")) {
    const json& f = tree.at("flux");
    reject_unknown(f, "flux", {"psi"});
    if (f.contains("psi")) {
      const json& psi = f.at("psi");
      if (psi.is_number()) {
        config.psi = {psi.get<double>()};
      } else {
        read(f, "psi", config.psi, "flux");
      }
    }
  }
  if (tree.contains("potential")) {
    const json& p = tree.at("potential");
    reject_unknown(p, "potential", {"family", "params", "csv"});
    const bool has_family = p.contains("family");
    const bool has_csv = p.contains("csv") && !p.at("csv").is_null();
    if (has_family == has_csv) {
      throw ConfigError("potential needs exactly one of 'family' or 'csv'");
    }
    config.potential = {};
    read(p, "family", config.potential.family, "potential");
    read(p, "params", config.potential.params, "potential");
    read_optional(p, "csv", config.potential.csv, "potential");
  }
  if (tree.contains("grid")) {
    const json& g = tree.at("grid");
    reject_unknown(g, "grid", {"x1_extent", "x1_points", "x2_points"});
    read(g, "x1_extent", config.grid.x1_extent, "grid");
    read(g, "x1_points", config.grid.x1_points, "grid");
    read(g, "x2_points", config.grid.x2_points, "grid");
  }
  if (tree.contains("solver")) {
    const json& s = tree.at("solver");
    reject_unknown(s, "solver",
                   {"truncation", "absolute_tolerance", "relative_tolerance", "max_subdivisions",
                    "step_factor", "max_step", "max_refinements", "lattice_points",
                    "lattice_refinements", "grid_cap", "use_prufer", "use_lattice", "tau_counts"});
    SolverSettings& v = config.solver;
    read(s, "truncation", v.truncation, "solver");
    read(s, "absolute_tolerance", v.absolute_tolerance, "solver");
    read(s, "relative_tolerance", v.relative_tolerance, "solver");
    read(s, "max_subdivisions", v.max_subdivisions, "solver");
    read(s, "step_factor", v.step_factor, "solver");
    read(s, "max_step", v.max_step, "solver");
    read(s, "max_refinements", v.max_refinements, "solver");
    read(s, "lattice_points", v.lattice_points, "solver");
    read(s, "lattice_refinements", v.lattice_refinements, "solver");
    read(s, "grid_cap", v.grid_cap, "solver");
    read(s, "use_prufer", v.use_prufer, "solver");
    read(s, "use_lattice", v.use_lattice, "solver");
    read(s, "tau_counts", v.tau_counts, "solver");
  }
  read(tree, "seed", config.seed, "");
  if (tree.contains("output")) {
    const json& o = tree.at("output");
    reject_unknown(o, "output", {"format", "path", "dump_operator", "transverse"});
    read(o, "format", config.output.format, "output");
    read_optional(o, "path", config.output.path, "output");
    read_optional(o, "dump_operator", config.output.dump_operator, "output");
    read(o, "transverse", config.output.transverse, "output");
  }
  if (tree.contains("inequalities")) {
    const json& q = tree.at("inequalities");
    reject_unknown(q, "inequalities", {"p_values", "functions", "alphas", "m_min", "m_max", "cutoffs"});
    InequalitySettings& v = config.inequalities;
    read(q, "p_values", v.p_values, "inequalities");
    read(q, "functions", v.functions, "inequalities");
    read(q, "alphas", v.alphas, "inequalities");
    read(q, "m_min", v.m_min, "inequalities");
    read(q, "m_max", v.m_max, "inequalities");
    read(q, "cutoffs", v.cutoffs, "inequalities");
  }
  config.validate();
  return config;
}

void RunConfig::validate() const {
  if (!(width > 0.0)) {
    throw InvalidParams(fmt::format("geometry.width must be positive, got {}", width));
  }
  for (double p : psi) {
    if (!std::isfinite(p)) {
      throw InvalidParams("flux.psi values must be finite");
    }
  }
  if (!(grid.x1_extent > 0.0) || grid.x1_points < 2 || grid.x2_points < 1) {
    throw InvalidParams("grid needs x1_extent > 0, x1_points >= 2 and x2_points >= 1");
  }
  if (!(solver.truncation > 0.0) || !(solver.step_factor > 0.0) || !(solver.max_step > 0.0) ||
      solver.max_refinements < 0 || solver.lattice_refinements < 0) {
    throw InvalidParams("solver settings must be positive");
  }
  if (!solver.use_prufer && !solver.use_lattice) {
    throw InvalidParams("at least one of solver.use_prufer and solver.use_lattice must be set");
  }
  if (solver.lattice_points < 16) {
    throw InvalidParams("solver.lattice_points must be at least 16");
  }
  const auto finest = static_cast<std::size_t>(solver.lattice_points + 1)
                      << static_cast<unsigned>(solver.lattice_refinements);
  if (finest > solver.grid_cap) {
    throw GridCap(fmt::format("fiber lattice may reach {} points, above grid_cap {}", finest,
                              solver.grid_cap));
  }
  const auto sites = static_cast<std::size_t>(grid.x1_points) * static_cast<std::size_t>(grid.x2_points);
  if (output.dump_operator && sites > solver.grid_cap) {
    throw GridCap(fmt::format("{} x {} lattice exceeds grid_cap {}", grid.x1_points, grid.x2_points,
                              solver.grid_cap));
  }
  quadrature().validate();
  if (output.format != "csv" && output.format != "json") {
    throw ConfigError(fmt::format("output.format must be csv or json, got '{}'", output.format));
  }
  if (output.transverse != "neumann" && output.transverse != "flux_ring") {
    throw ConfigError(fmt::format("output.transverse must be neumann or flux_ring, got '{}'",
                                  output.transverse));
  }
  if (potential.csv && !std::filesystem::exists(*potential.csv)) {
    throw ConfigError(fmt::format("potential file '{}' does not exist", *potential.csv));
  }
  for (double p : inequalities.p_values) {
    if (!(p > 1.0)) {
      throw InvalidParams(fmt::format("Hardy exponent must exceed 1, got {}", p));
    }
  }
  if (inequalities.functions < 0 || inequalities.m_min > inequalities.m_max) {
    throw InvalidParams("inequalities needs functions >= 0 and m_min <= m_max");
  }
  for (double eps : inequalities.cutoffs) {
    if (!(eps > 0.0 && eps < std::exp(-1.0))) {
      throw InvalidParams(fmt::format("cutoff {} is outside (0, 1/e)", eps));
    }
  }
}

QuadratureConfig RunConfig::quadrature() const {
  return {solver.absolute_tolerance, solver.relative_tolerance, solver.max_subdivisions};
}

AuditConfig RunConfig::audit_config(unsigned workers) const {
  AuditConfig audit;
  audit.quad = quadrature();
  audit.x1_extent = grid.x1_extent;
  audit.x1_points = grid.x1_points;
  audit.tau_counts = solver.tau_counts;
  ModeCountConfig& c = audit.counting;
  c.truncation = solver.truncation;
  c.prufer.step_factor = solver.step_factor;
  c.prufer.max_step = solver.max_step;
  c.prufer.max_refinements = solver.max_refinements;
  c.use_prufer = solver.use_prufer;
  c.use_lattice = solver.use_lattice;
  c.lattice_points = solver.lattice_points;
  c.lattice_refinements = solver.lattice_refinements;
  c.lattice_cap = solver.grid_cap;
  c.workers = workers;
  return audit;
}

LatticeGrid RunConfig::lattice_grid() const {
  LatticeGrid g;
  g.extent = grid.x1_extent;
  g.n1 = grid.x1_points;
  g.n2 = grid.x2_points;
  g.transverse = output.transverse == "flux_ring" ? TransverseModel::flux_ring : TransverseModel::neumann;
  g.cap = solver.grid_cap;
  return g;
}

json to_json(const RunConfig& c) {
  json potential = json::object();
  if (c.potential.csv) {
    potential["csv"] = *c.potential.csv;
  } else {
    potential["family"] = c.potential.family;
    potential["params"] = c.potential.params;
  }
  const SolverSettings& s = c.solver;
  const InequalitySettings& q = c.inequalities;
  json output = {{"format", c.output.format}, {"transverse", c.output.transverse}};
  output["path"] = c.output.path ? json(*c.output.path) : json(nullptr);
  output["dump_operator"] = c.output.dump_operator ? json(*c.output.dump_operator) : json(nullptr);
  return {
      {"geometry", {{"width", c.width}}},
      {"flux", {{"psi", c.psi}}},
      {"potential", potential},
      {"grid",
       {{"x1_extent", c.grid.x1_extent}, {"x1_points", c.grid.x1_points}, {"x2_points", c.grid.x2_points}}},
      {"solver",
       {{"truncation", s.truncation},
        {"absolute_tolerance", s.absolute_tolerance},
        {"relative_tolerance", s.relative_tolerance},
        {"max_subdivisions", s.max_subdivisions},
        {"step_factor", s.step_factor},
        {"max_step", s.max_step},
        {"max_refinements", s.max_refinements},
        {"lattice_points", s.lattice_points},
        {"lattice_refinements", s.lattice_refinements},
        {"grid_cap", s.grid_cap},
        {"use_prufer", s.use_prufer},
        {"use_lattice", s.use_lattice},
        {"tau_counts", s.tau_counts}}},
      {"seed", c.seed},
      {"output", output},
      {"inequalities",
       {{"p_values", q.p_values},
        {"functions", q.functions},
        {"alphas", q.alphas},
        {"m_min", q.m_min},
        {"m_max", q.m_max},
        {"cutoffs", q.cutoffs}}},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::string source = text;
  if (text.starts_with("#")) {
    // An earlier CSV report: the resolved config sits on a header line.
    std::istringstream lines(text);
    std::string line;
    bool found = false;
    while (std::getline(lines, line) && line.starts_with("#")) {
      if (line.starts_with("# config: ")) {
        source = line.substr(10);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError(fmt::format("'{}' has no embedded config line", path.string()));
    }
  }
  json tree;
  try {
    tree = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
  if (tree.is_object() && tree.contains("config") && tree.contains("config_digest")) {
    tree = tree.at("config");  // an earlier JSON report
  }
  return parse_config(tree);
}

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : text) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

Potential2D make_potential(const RunConfig& config) {
  if (config.potential.csv) {
    return load_potential_csv(*config.potential.csv);
  }
  return builtin_family(config.potential.family, config.potential.params);
}

}  // namespace stripneg
