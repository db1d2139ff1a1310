#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stripneg/modes.hpp"
#include "stripneg/potential.hpp"

namespace stripneg {

/// Transverse realization of the x2 direction.
///  neumann: cell-centred sites on [0, d] with mirrored ghost points.
///  flux_ring: periodic ring of circumference 2 pi threaded by the flux, so
///             transverse mode k has energy (k + psi)^2 in the continuum limit.
enum class TransverseModel { neumann, flux_ring };
enum class LongitudinalBoundary { dirichlet, neumann };

struct LatticeGrid {
  double extent = 10.0;  // x1 in [-extent, extent]
  int n1 = 40;
  int n2 = 8;
  TransverseModel transverse = TransverseModel::neumann;
  LongitudinalBoundary x1_boundary = LongitudinalBoundary::dirichlet;
  std::size_t cap = 200000;

  double h1() const;
  std::vector<double> x1_nodes() const;
};

/// Banded Hermitian lattice operator, sites ordered (i1, i2) with i2 fastest.
class LatticeOperator {
 public:
  using Complex = std::complex<double>;

  LatticeOperator(int n1, int n2, double h1, double h2, int bandwidth);

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  double h1() const noexcept { return h1_; }
  double h2() const noexcept { return h2_; }
  int dimension() const noexcept { return n1_ * n2_; }
  int bandwidth() const noexcept { return bandwidth_; }

  Complex operator()(int row, int col) const;
  void set(int row, int col, Complex value);
  void add(int row, int col, Complex value);

  /// max |H - H^dagger| over stored entries.
  double hermiticity_defect() const;
  double max_abs_diagonal() const;
  bool is_real(double tol = 0.0) const;

  Eigen::MatrixXcd to_dense() const;
  /// Coordinate listing "row col re im", one nonzero per line.
  void dump(std::ostream& out) const;

  /// Flux and boundary data carried along for gauge conjugation.
  double psi = 0.0;
  TransverseModel transverse = TransverseModel::neumann;

 private:
  int n1_, n2_;
  double h1_, h2_;
  int bandwidth_;
  std::vector<Complex> band_;  // (2 * bandwidth + 1) diagonals
};

/// Magnetic lattice Laplacian minus W for the strip: Peierls phases
/// e^{i psi h} on every hop. Throws GridCap when n1 * n2 exceeds the cap.
LatticeOperator assemble_peierls(const FluxSpec& flux, const Profile1D& W,
                                 const StripGeometry& geometry, const LatticeGrid& grid);

/// Fiber H_k as a chain: Peierls hops e^{i phi h}, on-site
/// 2/h^2 + (k+phi)^2 - phi_lat^2 - W with phi_lat^2 = (2 - 2 cos(phi h)) / h^2,
/// Dirichlet at +-extent.
LatticeOperator assemble_fiber(const ModeOperator& mode, double extent, int n1,
                               std::size_t cap = 200000);

/// (2 - 2 cos(phi h)) / h^2.
double lattice_symbol_constant(double phi, double h);

/// U H U^dagger with U = diag(e^{i psi (x1 + x2)}), which removes every
/// open-chain Peierls phase. On the flux ring the seam bond keeps
/// e^{2 pi i psi}, so the result is real only for psi in Z/2.
LatticeOperator gauge_conjugate_real(const LatticeOperator& op);

struct InertiaReport {
  int negative = 0;
  int zero_cluster = 0;
  int positive = 0;
  std::string method;
  double eps_num = 0.0;
};

struct InertiaOptions {
  enum class Path { automatic, factorization, eigensolve };
  Path path = Path::automatic;
  std::size_t factorization_cap = 200000;
  std::size_t eigensolve_cap = 5000;
  /// Run the eigensolve as well when the size allows it and require agreement.
  bool cross_check = false;
  double zero_cluster_relative = 1e-9;
};

/// Negative/zero/positive eigenvalue counts with eps_num =
/// zero_cluster_relative * max |diagonal|. The factorization path uses an
/// LDL^H band factorization of H -+ eps_num I; a zero pivot falls back to
/// the eigensolve.
InertiaReport count_negative_inertia(const LatticeOperator& op, const InertiaOptions& options = {});

/// Band LDL^H inertia: number of eigenvalues below `shift`.
int band_count_below(const LatticeOperator& op, double shift);

/// All eigenvalues, ascending (dense eigensolve; throws GridCap above cap).
std::vector<double> lattice_eigenvalues(const LatticeOperator& op, std::size_t cap = 5000);

/// Smallest eigenvalue: dense below eigensolve_cap, inertia bisection above.
double smallest_eigenvalue(const LatticeOperator& op, const InertiaOptions& options = {});

struct DiamagneticResult {
  double e0_magnetic = 0.0;
  double e0_plain = 0.0;
  double scale = 1.0;  // max |diagonal| of the plain operator

  double margin() const noexcept { return e0_magnetic - e0_plain; }
  bool holds(double relative = 1e-10) const noexcept { return margin() >= -relative * scale; }
};

/// Ground energies of the Peierls operator and of its psi = 0 twin.
DiamagneticResult diamagnetic_check(const FluxSpec& flux, const Profile1D& W,
                                    const StripGeometry& geometry, const LatticeGrid& grid,
                                    const InertiaOptions& options = {});

/// Complex samples on an n1 x n2 grid with spacings h1, h2 (i2 fastest).
struct ComplexField {
  int n1 = 0;
  int n2 = 0;
  double h1 = 1.0;
  double h2 = 1.0;
  std::vector<std::complex<double>> values;

  std::complex<double> at(int i1, int i2) const { return values[static_cast<std::size_t>(i1 * n2 + i2)]; }
};

enum class FieldKind { real_positive, gauge_phase, random_phase };

/// Smooth test field on [0, 1]^2 sampled with n points per side: a positive
/// bump envelope g times a phase (none, e^{i phi x1}, or a random smooth
/// phase), all parameters drawn from `seed`.
ComplexField seeded_field(std::uint64_t seed, int n, FieldKind kind, double phi);

struct PointwiseDiamagneticReport {
  double max_violation = 0.0;  // max over interior points of |grad|f|| - |(-i grad + A) f|
  double max_lhs = 0.0;
  double max_rhs = 0.0;
  int points = 0;
};

/// Gauge-covariant difference check of |grad|f|| <= |(-i grad + A) f| with the
/// constant vector potential A = (phi, phi).
PointwiseDiamagneticReport pointwise_diamagnetic_sample(const ComplexField& f,
                                                        const FluxSpec& flux);

}  // namespace stripneg
