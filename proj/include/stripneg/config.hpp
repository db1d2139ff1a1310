#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stripneg/audit.hpp"
#include "stripneg/lattice.hpp"

namespace stripneg {

struct PotentialSource {
  std::string family;
  std::map<std::string, double> params;
  std::optional<std::string> csv;
};

struct GridSettings {
  double x1_extent = 20.0;
  int x1_points = 4001;
  int x2_points = 8;
};

struct SolverSettings {
  double truncation = 20.0;
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-8;
  int max_subdivisions = 4096;
  double step_factor = 0.1;
  double max_step = 0.02;
  int max_refinements = 3;
  int lattice_points = 4000;
  int lattice_refinements = 3;
  std::size_t grid_cap = 200000;
  bool use_prufer = true;
  bool use_lattice = true;
  bool tau_counts = false;
};

struct OutputSettings {
  std::string format = "csv";
  std::optional<std::string> path;
  /// Writes the assembled Peierls operator of the first flux here.
  std::optional<std::string> dump_operator;
  std::string transverse = "neumann";
};

struct InequalitySettings {
  std::vector<double> p_values{2.0};
  int functions = 100;
  std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5};
  int m_min = -5;
  int m_max = 5;
  std::vector<double> cutoffs{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
};

struct RunConfig {
  double width = 1.0;
  std::vector<double> psi{0.5};
  PotentialSource potential{"gaussian_ridge", {{"amplitude", 1.0}, {"sigma", 1.0}}, std::nullopt};
  GridSettings grid;
  SolverSettings solver;
  std::uint64_t seed = 0;
  OutputSettings output;
  InequalitySettings inequalities;

  /// Throws InvalidParams, GridCap or ConfigError.
  void validate() const;

  QuadratureConfig quadrature() const;
  AuditConfig audit_config(unsigned workers) const;
  LatticeGrid lattice_grid() const;
};

/// Parses a config tree. Unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const nlohmann::json& tree);

/// The fully resolved tree: every field present, defaults filled in.
nlohmann::json to_json(const RunConfig& config);

/// Reads a JSON config file, or the `# config:` line of an earlier report.
RunConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_digest(const std::string& text);

Potential2D make_potential(const RunConfig& config);

}  // namespace stripneg
