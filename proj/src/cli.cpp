#include "stripneg/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stripneg/audit.hpp"
#include "stripneg/bounds.hpp"
#include "stripneg/errors.hpp"
#include "stripneg/inequalities.hpp"
#include "stripneg/lattice.hpp"

namespace stripneg {

using nlohmann::ordered_json;

namespace {

// Runs f(0..n-1) on up to `workers` threads; results keep index order.
template <typename F>
auto parallel_map(std::size_t n, unsigned workers, F f) {
  using Result = decltype(f(std::size_t{0}));
  std::vector<Result> results(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      results[i] = f(i);
    }
    return results;
  }
  for (std::size_t start = 0; start < n; start += workers) {
    std::vector<std::future<Result>> batch;
    for (std::size_t i = start; i < std::min<std::size_t>(n, start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, f, i));
    }
    for (std::size_t j = 0; j < batch.size(); ++j) {
      results[start + j] = batch[j].get();
    }
  }
  return results;
}

Profile1D width_profile(const RunConfig& config) {
  const Potential2D v = make_potential(config);
  const std::vector<double> x1 = uniform_grid(config.grid.x1_extent, config.grid.x1_points);
  return sup_over_width(v, StripGeometry(config.width), x1, config.quadrature());
}

void maybe_dump(const RunConfig& config, const Profile1D& w) {
  if (!config.output.dump_operator || config.psi.empty()) {
    return;
  }
  const LatticeOperator op = assemble_peierls(reduced_flux(config.psi.front()), w,
                                              StripGeometry(config.width), config.lattice_grid());
  std::ofstream out(*config.output.dump_operator);
  if (!out) {
    throw ConfigError(fmt::format("cannot write '{}'", *config.output.dump_operator));
  }
  op.dump(out);
}

ordered_json ints(const std::vector<int>& values) { return ordered_json(values); }

}  // namespace

unsigned workers_from_environment() {
  const char* value = std::getenv("STRIPNEG_WORKERS");
  if (value == nullptr || *value == '\0') {
    return 1;
  }
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (*end != '\0' || parsed < 0) {
    throw ConfigError(fmt::format("STRIPNEG_WORKERS must be a nonnegative integer, got '{}'", value));
  }
  return parsed == 0 ? std::max(1u, std::thread::hardware_concurrency())
                     : static_cast<unsigned>(parsed);
}

Report run_bound(const RunConfig& config) {
  Report report{"bound", config, {}};
  Table table{"bound", {"psi", "phi", "norm_x", "bound", "retained_modes", "omitted"}, {}};
  const Profile1D w = width_profile(config);
  const double nx = norm_x(w, config.quadrature());
  for (double psi : config.psi) {
    const FluxSpec flux = reduced_flux(psi);
    const BoundResult bound = strip_clr_bound(flux, nx);
    table.rows.push_back({psi, flux.phi, nx, bound.value, ints(mode_window(flux, nx)),
                          bound.omitted_below_one});
  }
  report.tables.push_back(std::move(table));
  return report;
}

Report run_count(const RunConfig& config, unsigned workers) {
  Report report{"count", config, {}};
  Table table{"count", {"psi", "phi", "mode_k", "count", "borderline", "method"}, {}};
  const Profile1D w = width_profile(config);
  maybe_dump(config, w);
  const AuditConfig audit = config.audit_config(workers);
  const std::string method = audit.counting.use_prufer && audit.counting.use_lattice
                                 ? "prufer+lattice_fiber"
                             : audit.counting.use_prufer ? "prufer"
                                                         : "lattice_fiber";
  for (double psi : config.psi) {
    const FluxSpec flux = reduced_flux(psi);
    const WindowCount counted = count_extended_window(flux, w, audit);
    std::vector<double> all_borderline;
    for (int k : counted.modes) {
      const std::vector<double> borderline = counted.borderline(k);
      all_borderline.insert(all_borderline.end(), borderline.begin(), borderline.end());
      table.rows.push_back(
          {psi, flux.phi, k, counted.per_mode.at(k).count(), ordered_json(borderline), method});
    }
    table.rows.push_back(
        {psi, flux.phi, "total", counted.total, ordered_json(all_borderline), method});
  }
  report.tables.push_back(std::move(table));
  return report;
}

Report run_audit(const RunConfig& config, unsigned workers, bool sorted_by_phi, bool& unsatisfied) {
  Report report{sorted_by_phi ? "sweep" : "audit", config, {}};
  const Profile1D w = width_profile(config);
  maybe_dump(config, w);
  // Rows run concurrently; fibers inside a row stay sequential.
  const AuditConfig audit = config.audit_config(1);
  std::vector<AuditRow> rows = parallel_map(config.psi.size(), workers, [&](std::size_t i) {
    const double psi = config.psi[i];
    try {
      return audit_strip_row(reduced_flux(psi), w, audit);
    } catch (const Error& e) {
      AuditRow row;
      row.psi = psi;
      row.satisfied_main = false;
      row.error = AuditError{e.name(), e.what(), e.category() == Error::Category::numerical};
      row.notes = e.what();
      return row;
    }
  });
  if (sorted_by_phi) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const AuditRow& a, const AuditRow& b) { return a.phi < b.phi; });
  }
  Table table{"audit", {"psi", "phi", "norm_x", "bound", "total_count", "satisfied", "notes"}, {}};
  Table modes{"audit_modes",
              {"psi", "phi", "mode_k", "retained", "count", "bargmann_term", "satisfied", "tau_count"},
              {}};
  unsatisfied = false;
  for (const AuditRow& row : rows) {
    if (row.error) {
      table.rows.push_back({row.psi, row.phi, row.norm_x, nullptr, nullptr, "error", row.notes});
      continue;
    }
    unsatisfied = unsatisfied || !row.satisfied_main;
    table.rows.push_back({row.psi, row.phi, row.norm_x, row.bound_value, row.total_count,
                          row.satisfied_main, row.notes});
    for (int k : row.audited_modes) {
      const bool retained =
          std::find(row.retained_modes.begin(), row.retained_modes.end(), k) != row.retained_modes.end();
      ordered_json tau = nullptr;
      if (row.per_mode_tau_count) {
        tau = row.per_mode_tau_count->at(k);
      }
      modes.rows.push_back({row.psi, row.phi, k, retained, row.per_mode_count.at(k),
                            row.per_mode_bargmann.at(k), row.satisfied_per_mode.at(k), tau});
    }
  }
  report.tables.push_back(std::move(table));
  if (config.output.format == "json") {
    report.tables.push_back(std::move(modes));
  }
  return report;
}

Report run_inequalities(const RunConfig& config, unsigned workers, bool& unsatisfied) {
  Report report{"ineq", config, {}};
  const InequalitySettings& s = config.inequalities;
  const QuadratureConfig quad = config.quadrature();
  unsatisfied = false;

  auto spec_for = [&](int i, Interval support) {
    TestFunctionSpec spec;
    spec.seed = config.seed + static_cast<std::uint64_t>(i);
    spec.kind = i % 3 == 2 ? TestFunctionSpec::Kind::polynomial_decay
                           : TestFunctionSpec::Kind::bump_superposition;
    spec.support = support;
    return spec;
  };
  auto kind_name = [](const TestFunctionSpec& spec) {
    return spec.kind == TestFunctionSpec::Kind::polynomial_decay ? "polynomial_decay"
                                                                 : "bump_superposition";
  };

  Table hardy{"hardy_1d",
              {"seed", "kind", "p", "lhs", "rhs", "ratio", "admissible_constant", "satisfied"},
              {}};
  for (double p : s.p_values) {
    auto reports = parallel_map(static_cast<std::size_t>(s.functions), workers, [&](std::size_t i) {
      return hardy_1d_ratio(spec_for(static_cast<int>(i), {0.0, 4.0}), p, quad);
    });
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto spec = spec_for(static_cast<int>(i), {0.0, 4.0});
      const RatioReport& r = reports[i];
      unsatisfied = unsatisfied || !r.satisfied;
      hardy.rows.push_back({spec.seed, kind_name(spec), p, r.lhs, r.rhs, r.ratio,
                            r.admissible_constant, r.satisfied});
    }
  }

  Table magnetic{"magnetic_hardy",
                 {"seed", "kind", "m", "alpha", "lhs", "rhs", "ratio", "admissible_constant",
                  "satisfied"},
                 {}};
  for (double alpha : s.alphas) {
    for (int m = s.m_min; m <= s.m_max; ++m) {
      auto reports = parallel_map(static_cast<std::size_t>(s.functions), workers, [&](std::size_t i) {
        return magnetic_hardy_mode_ratio(spec_for(static_cast<int>(i), {0.05, 4.0}), m, alpha, quad);
      });
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto spec = spec_for(static_cast<int>(i), {0.05, 4.0});
        const RatioReport& r = reports[i];
        unsatisfied = unsatisfied || !r.satisfied;
        magnetic.rows.push_back({spec.seed, kind_name(spec), m, alpha, r.lhs, r.rhs, r.ratio,
                                 r.admissible_constant, r.satisfied});
      }
    }
  }

  Table curve{"failure_curve",
              {"cutoff", "ratio", "unweighted_ratio", "numerator", "denominator"},
              {}};
  for (const FailurePoint& point : hardy_2d_failure_curve(s.cutoffs, quad)) {
    curve.rows.push_back({point.cutoff, point.ratio, point.unweighted_ratio, point.numerator,
                          point.denominator});
  }
  report.tables.push_back(std::move(hardy));
  report.tables.push_back(std::move(magnetic));
  report.tables.push_back(std::move(curve));
  return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Negative-eigenvalue bounds and audits for magnetic Schrodinger operators on a strip",
               "stripneg"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_path;
  std::string format;
  bool strict = false;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"bound", "evaluate the strip estimate for each flux"},
      {"count", "count negative eigenvalues fiber by fiber"},
      {"audit", "compare counts with the estimate, one row per flux"},
      {"sweep", "audit over the flux list, rows sorted by reduced flux"},
      {"ineq", "Hardy-type inequality checks and the two-dimensional failure curve"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config, or a report produced earlier")
        ->required();
    sub->add_option("--out", out_path, "output file (default: output.path, else stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (name == "audit" || name == "sweep" || name == "ineq") {
      sub->add_flag("--strict", strict, "exit 3 when some row is unsatisfied");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig config = load_config(config_path);
    if (!format.empty()) {
      config.output.format = format;
    }
    if (!out_path.empty()) {
      config.output.path = out_path;
    }
    const unsigned workers = workers_from_environment();
    bool unsatisfied = false;
    Report report;
    if (command == "bound") {
      report = run_bound(config);
    } else if (command == "count") {
      report = run_count(config, workers);
    } else if (command == "audit" || command == "sweep") {
      report = run_audit(config, workers, command == "sweep", unsatisfied);
    } else {
      report = run_inequalities(config, workers, unsatisfied);
    }
    const std::string text = render(report);
    if (config.output.path) {
      std::ofstream file(*config.output.path, std::ios::binary);
      if (!file || !(file << text)) {
        throw ConfigError(fmt::format("cannot write '{}'", *config.output.path));
      }
    } else {
      out << text;
    }
    return strict && unsatisfied ? exit_unsatisfied : exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.category() == Error::Category::config ? exit_config : exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace stripneg
