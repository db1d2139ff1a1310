#include "stripneg/modes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <future>
#include <thread>

#include <fmt/format.h>

#include "stripneg/errors.hpp"
#include "stripneg/lattice.hpp"

namespace stripneg {

FluxSpec reduced_flux(double psi) {
  if (!std::isfinite(psi)) {
    throw InvalidParams(fmt::format("flux must be finite, got {}", psi));
  }
  const double nearest = std::round(psi);
  FluxSpec flux;
  flux.psi = psi;
  flux.phi = std::min(std::abs(psi - nearest), 0.5);
  flux.is_integer_flux = flux.phi <= kIntegerFluxTolerance;
  if (flux.is_integer_flux) {
    flux.phi = 0.0;
  }
  return flux;
}

ModeOperator build_mode_operator(int k, const FluxSpec& flux, Profile1D W) {
  ModeOperator mode;
  mode.k = k;
  mode.phi = flux.phi;
  mode.profile = std::move(W);
  const double shifted = k + flux.phi;
  mode.transverse_energy = shifted * shifted;
  return mode;
}

SLProblem reduce_to_sl(const ModeOperator& mode, double truncation) {
  return SLProblem::make(4.0 * mode.transverse_energy, mode.profile.scaled(4.0), truncation, 0.25);
}

std::vector<int> modes_by_level(double phi, int levels) {
  // For phi in [0, 1/2], |k + phi| increases along 0, -1, 1, -2, 2, ...
  std::vector<int> ks;
  ks.reserve(static_cast<std::size_t>(2 * levels));
  for (int n = 0; n < levels; ++n) {
    const int a = n;
    const int b = -n - 1;
    if (std::abs(b + phi) < std::abs(a + phi)) {
      ks.push_back(b);
      ks.push_back(a);
    } else {
      ks.push_back(a);
      ks.push_back(b);
    }
  }
  return ks;
}

namespace {

double bound_term(int k, double phi, double norm_x) {
  const double shifted = k + phi;
  return norm_x / std::sqrt(16.0 * shifted * shifted + 1.0);
}

}  // namespace

std::vector<int> mode_window(const FluxSpec& flux, double norm_x) {
  if (flux.is_integer_flux) {
    throw IntegerFlux(fmt::format("psi = {} is an integer; the estimate needs non-integer flux",
                                  flux.psi));
  }
  if (norm_x < 0.0) {
    throw InvalidParams("normX must be nonnegative");
  }
  std::vector<int> window;
  for (int n = 0;; ++n) {
    bool any = false;
    for (int k : {n, -n - 1}) {
      if (bound_term(k, flux.phi, norm_x) >= 1.0) {
        window.push_back(k);
        any = true;
      }
    }
    if (!any) {
      break;
    }
  }
  std::stable_sort(window.begin(), window.end(), [&](int a, int b) {
    return std::abs(a + flux.phi) < std::abs(b + flux.phi);
  });
  return window;
}

int ModeCount::count() const {
  if (prufer && lattice && prufer->count != lattice->count) {
    throw CounterDisagreement(fmt::format("mode k={}: Prufer counts {} but the lattice fiber counts {}",
                                          k, prufer->count, lattice->count));
  }
  if (prufer) {
    return prufer->count;
  }
  if (lattice) {
    return lattice->count;
  }
  throw InvalidParams("no counter enabled");
}

namespace {

CountResult lattice_fiber_count(const ModeOperator& mode, const ModeCountConfig& config) {
  int points = config.lattice_points;
  int previous = -1;
  InertiaReport report;
  for (int level = 0; level <= config.lattice_refinements; ++level) {
    const LatticeOperator fiber =
        gauge_conjugate_real(assemble_fiber(mode, config.truncation, points, config.lattice_cap));
    report = count_negative_inertia(fiber, {.path = InertiaOptions::Path::factorization,
                                            .factorization_cap = config.lattice_cap});
    if (report.negative == previous) {
      CountResult result;
      result.count = report.negative;
      result.method = "lattice_fiber";
      result.resolution = {{"grid_points", points},
                           {"h", 2.0 * config.truncation / (points + 1)},
                           {"truncation", config.truncation},
                           {"eps_num", report.eps_num}};
      if (report.zero_cluster > 0) {
        Tridiagonal t;
        for (int i = 0; i < fiber.dimension(); ++i) {
          t.diagonal.push_back(fiber(i, i).real());
          if (i + 1 < fiber.dimension()) {
            t.off_diagonal.push_back(fiber(i, i + 1).real());
          }
        }
        for (double value : bisect_eigenvalues(t, -report.eps_num, report.eps_num, 1e-15)) {
          if (value < 0.0) {
            result.borderline.push_back(value);
          }
        }
      }
      return result;
    }
    previous = report.negative;
    if (level < config.lattice_refinements) {
      points = 2 * points + 1;
    }
  }
  throw NonConvergence(fmt::format("lattice fiber count for k={} still changing at {} points",
                                   mode.k, points));
}

}  // namespace

ModeCount count_mode(const ModeOperator& mode, const ModeCountConfig& config) {
  ModeCount out;
  out.k = mode.k;
  if (config.use_prufer) {
    // e^{-i phi x1} H_k e^{i phi x1} = -d^2/dx1^2 + gauge_offset - W.
    const SLProblem real_form = SLProblem::make(0.0, mode.profile, config.truncation);
    out.prufer = count_negative_prufer(real_form, -mode.gauge_offset(), config.prufer);
  }
  if (config.use_lattice) {
    out.lattice = lattice_fiber_count(mode, config);
  }
  return out;
}

CountResult total_mode_count(const FluxSpec& flux, const Profile1D& W, std::span<const int> window,
                             const ModeCountConfig& config) {
  const unsigned workers =
      config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
  std::vector<ModeCount> counts(window.size());
  std::vector<std::exception_ptr> failures(window.size());

  auto solve = [&](std::size_t index) {
    try {
      counts[index] = count_mode(build_mode_operator(window[index], flux, W), config);
      counts[index].count();
    } catch (...) {
      failures[index] = std::current_exception();
    }
  };
  if (workers <= 1 || window.size() <= 1) {
    for (std::size_t i = 0; i < window.size(); ++i) {
      solve(i);
    }
  } else {
    std::vector<std::jthread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < std::min<std::size_t>(workers, window.size()); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < window.size(); i = next++) {
          solve(i);
        }
      });
    }
  }

  CountResult total;
  total.method = config.use_prufer && config.use_lattice ? "prufer+lattice_fiber"
                 : config.use_prufer                     ? "prufer"
                                                         : "lattice_fiber";
  total.per_mode.emplace();
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (const Error& e) {
        throw e.with_context(fmt::format("mode k={}", window[i]));
      }
    }
    const int c = counts[i].count();
    (*total.per_mode)[window[i]] = c;
    total.count += c;
    const auto& primary = counts[i].prufer ? counts[i].prufer : counts[i].lattice;
    total.borderline.insert(total.borderline.end(), primary->borderline.begin(),
                            primary->borderline.end());
  }
  total.resolution = {{"modes", static_cast<double>(window.size())},
                      {"truncation", config.truncation}};
  return total;
}

}  // namespace stripneg
