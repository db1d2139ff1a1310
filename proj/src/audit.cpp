#include "stripneg/audit.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <fmt/format.h>

#include "stripneg/errors.hpp"

namespace stripneg {

std::vector<double> WindowCount::borderline(int k) const {
  const ModeCount& mode = per_mode.at(k);
  const auto& primary = mode.prufer ? mode.prufer : mode.lattice;
  return primary ? primary->borderline : std::vector<double>{};
}

WindowCount count_extended_window(const FluxSpec& flux, const Profile1D& w,
                                  const AuditConfig& config, std::size_t min_modes) {
  WindowCount out;
  int empty_levels = 0;
  for (int n = 0;; ++n) {
    const int ks[2] = {n, -n - 1};
    ModeCount counts[2];
    auto solve = [&](int i) {
      try {
        counts[i] = count_mode(build_mode_operator(ks[i], flux, w), config.counting);
      } catch (const Error& e) {
        throw e.with_context(fmt::format("mode k={}", ks[i]));
      }
    };
    if (config.counting.workers > 1) {
      auto other = std::async(std::launch::async, solve, 1);
      solve(0);
      other.get();
    } else {
      solve(0);
      solve(1);
    }
    int level_total = 0;
    for (int i = 0; i < 2; ++i) {
      int c = 0;
      try {
        c = counts[i].count();
      } catch (const Error& e) {
        throw e.with_context(fmt::format("mode k={}", ks[i]));
      }
      out.modes.push_back(ks[i]);
      out.per_mode[ks[i]] = counts[i];
      level_total += c;
    }
    out.total += level_total;
    empty_levels = level_total == 0 ? empty_levels + 1 : 0;
    if (empty_levels >= 2 && out.modes.size() >= min_modes) {
      return out;
    }
  }
}

AuditRow audit_strip_profile(const FluxSpec& flux, const Profile1D& w, const AuditConfig& config) {
  AuditRow row;
  row.psi = flux.psi;
  row.phi = flux.phi;
  row.norm_x = norm_x(w, config.quad);

  const BoundResult bound = strip_clr_bound(flux, row.norm_x);
  row.bound_value = bound.value;
  row.retained_modes = mode_window(flux, row.norm_x);

  const WindowCount counted =
      count_extended_window(flux, w, config, row.retained_modes.size());
  row.audited_modes = counted.modes;
  row.total_count = counted.total;
  for (const auto& [k, mode] : counted.per_mode) {
    row.per_mode_count[k] = mode.count();
    const auto extra = counted.borderline(k);
    row.borderline.insert(row.borderline.end(), extra.begin(), extra.end());
  }

  ModeCountConfig doubled = config.counting;
  doubled.truncation *= 2.0;
  doubled.use_prufer = true;
  doubled.use_lattice = false;
  for (int k : row.audited_modes) {
    row.doubled_truncation_count += count_mode(build_mode_operator(k, flux, w), doubled).count();
  }

  row.per_mode_bargmann = per_mode_bargmann_terms(flux, row.norm_x, row.audited_modes);
  for (int k : row.audited_modes) {
    row.satisfied_per_mode[k] = row.per_mode_count[k] <= row.per_mode_bargmann[k];
  }
  row.satisfied_main = row.total_count <= row.bound_value;

  if (config.tau_counts) {
    row.per_mode_tau_count.emplace();
    for (int k : row.audited_modes) {
      const SLProblem tau = reduce_to_sl(build_mode_operator(k, flux, w), config.counting.truncation);
      (*row.per_mode_tau_count)[k] = count_negative_prufer(tau, 0.0, config.counting.prufer).count;
    }
  }

  std::vector<std::string> notes;
  int outside = 0;
  for (int k : row.audited_modes) {
    if (!bound.per_mode_terms.contains(k)) {
      outside += row.per_mode_count[k];
    }
  }
  if (outside > 0) {
    notes.push_back(fmt::format("{} bound states in fibers outside the retained window", outside));
  }
  if (row.doubled_truncation_count != row.total_count) {
    notes.push_back(fmt::format("count {} at truncation {}", row.doubled_truncation_count,
                                doubled.truncation));
  }
  if (!row.borderline.empty()) {
    notes.push_back(fmt::format("{} borderline eigenvalues excluded", row.borderline.size()));
  }
  for (std::size_t i = 0; i < notes.size(); ++i) {
    row.notes += (i ? "; " : "") + notes[i];
  }
  return row;
}

AuditRow audit_strip(const FluxSpec& flux, const Potential2D& v, const StripGeometry& geometry,
                     const AuditConfig& config) {
  const std::vector<double> x1 = uniform_grid(config.x1_extent, config.x1_points);
  return audit_strip_profile(flux, sup_over_width(v, geometry, x1, config.quad), config);
}

AuditRow audit_strip_row(const FluxSpec& flux, const Profile1D& w, const AuditConfig& config) {
  try {
    return audit_strip_profile(flux, w, config);
  } catch (const Error& e) {
    AuditRow row;
    row.psi = flux.psi;
    row.phi = flux.phi;
    row.satisfied_main = false;
    row.error = AuditError{e.name(), e.what(), e.category() == Error::Category::numerical};
    row.notes = e.what();
    try {
      row.norm_x = norm_x(w, config.quad);
    } catch (const Error&) {
    }
    return row;
  }
}

std::vector<AuditRow> flux_sweep(std::span<const double> psi_values, const Potential2D& v,
                                 const StripGeometry& geometry, const AuditConfig& config) {
  std::vector<AuditRow> rows;
  if (psi_values.empty()) {
    return rows;
  }
  const std::vector<double> x1 = uniform_grid(config.x1_extent, config.x1_points);
  const Profile1D w = sup_over_width(v, geometry, x1, config.quad);
  for (double psi : psi_values) {
    FluxSpec flux;
    try {
      flux = reduced_flux(psi);
    } catch (const Error& e) {
      AuditRow row;
      row.psi = psi;
      row.satisfied_main = false;
      row.error = AuditError{e.name(), e.what(), false};
      row.notes = e.what();
      rows.push_back(std::move(row));
      continue;
    }
    rows.push_back(audit_strip_row(flux, w, config));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const AuditRow& a, const AuditRow& b) { return a.phi < b.phi; });
  return rows;
}

BargmannReport audit_bargmann_family(std::span<const SLProblem> instances,
                                     const QuadratureConfig& quad, const PruferOptions& options) {
  BargmannReport report;
  int satisfied = 0;
  for (const SLProblem& problem : instances) {
    BargmannRow row;
    row.c = problem.c;
    row.integral_m = norm_x(problem.M, quad);
    row.count = count_negative_prufer(problem, 0.0, options).count;
    row.rhs = bargmann_rhs(problem.c, row.integral_m);
    row.satisfied = row.count <= row.rhs;
    satisfied += row.satisfied ? 1 : 0;
    report.rows.push_back(row);
  }
  if (!instances.empty()) {
    report.satisfied_fraction = static_cast<double>(satisfied) / static_cast<double>(instances.size());
  }
  return report;
}

}  // namespace stripneg
