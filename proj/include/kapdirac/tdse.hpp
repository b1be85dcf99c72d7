#ifndef KAPDIRAC_TDSE_HPP_
#define KAPDIRAC_TDSE_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "kapdirac/model.hpp"
#include "kapdirac/numeric.hpp"

namespace kapdirac::tdse {

/// Uniform periodic grid. Index (i, j) sits at (x_min + i dx, y_min + j dy).
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double x_min = 0.0;
  double y_min = 0.0;

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  double x(int i) const { return x_min + i * dx; }
  double y(int j) const { return y_min + j * dy; }
  /// Angular wavenumber of FFT bin m (FFT ordering).
  double kx(int m) const;
  double ky(int m) const;

  /// Throws unless pi/dx >= 2 kmax_x and pi/dy >= 2 kmax_y.
  void check_nyquist(double kmax_x, double kmax_y) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Complex field on a Grid2D, row-major with x as the slow index.
///
/// The physical wavefunction is
///   psi(x, y, t) = exp(i K x - i hbar K^2 t / 2 m0) phi(x - V t, y, t),
/// with carrier wavenumber K = carrier_kx and Galilean frame velocity
/// V = hbar K / m0. K = 0 is the lab frame. `amplitudes` hold phi, so the grid
/// moves with the packet and only the envelope has to be resolved.
struct Wavefunction2D {
  Grid2D grid;
  std::vector<cdouble> amplitudes;
  double time = 0.0;
  double carrier_kx = 0.0;
  double absorbed = 0.0;  // probability removed by the absorbing mask

  double frame_velocity() const;
  /// Physical x of grid column i at the current time.
  double physical_x(int i) const { return grid.x(i) + frame_velocity() * time; }
  double norm() const;
  cdouble& at(int i, int j) { return amplitudes[static_cast<std::size_t>(i) * grid.ny + j]; }
  const cdouble& at(int i, int j) const {
    return amplitudes[static_cast<std::size_t>(i) * grid.ny + j];
  }
};

/// Momentum-space amplitudes on the physical wavevector grid (ascending kx,
/// ky), unitary normalization: sum |a|^2 dkx dky = sum |psi|^2 dx dy.
struct MomentumWavefunction {
  std::vector<double> kx;
  std::vector<double> ky;
  double dkx = 0.0;
  double dky = 0.0;
  std::vector<cdouble> amplitudes;  // index i * ky.size() + j
  double time = 0.0;

  double density(int i, int j) const {
    return std::norm(amplitudes[static_cast<std::size_t>(i) * ky.size() + j]);
  }
  double total() const;
};

struct MaskOff {};
struct CosineRampMask {
  double width = 0.0;  // m
};
using AbsorbingMask = std::variant<MaskOff, CosineRampMask>;

struct PropagatorConfig {
  double dt = 0.0;  // s
  int krylov_dim = 16;
  double krylov_tol = 1e-12;
  AbsorbingMask mask = MaskOff{};

  void validate(const BeamConfig& beam) const;
};

enum class HamiltonianMode { Full, PonderomotiveOnly };

/// Gaussian packet exp(-(x-x0)^2/2Wx^2 - (y-y0)^2/2Wy^2) exp(i k_el x),
/// normalized to 1. With carrier_kx = K the grid stores the envelope times
/// exp(i (k_el - K) x).
Wavefunction2D init_gaussian(const ElectronConfig& electron, const Grid2D& grid,
                             double carrier_kx = 0.0);

MomentumWavefunction to_momentum(const Wavefunction2D& psi);

/// Matrix-free midpoint Hamiltonian H(t) for one grid, field and frame.
/// Kinetic and gradient terms are pseudospectral; the A.p coupling is applied
/// in the symmetric form (A.p + p.A)/2, which keeps the discrete operator
/// Hermitian.
class Hamiltonian {
 public:
  Hamiltonian(const Grid2D& grid, const BeamConfig& beam, HamiltonianMode mode,
              double carrier_kx);
  ~Hamiltonian();
  Hamiltonian(Hamiltonian&&) noexcept;
  Hamiltonian& operator=(Hamiltonian&&) noexcept;

  /// Freeze the vector potential at time t (frame position included).
  void set_time(double t);
  double time() const;

  /// out = H in, in joules times the input units.
  void apply(std::span<const cdouble> in, std::span<cdouble> out) const;

  /// Exact kinetic propagation exp(-i T tau / hbar) in place.
  void free_propagate(std::span<cdouble> psi, double tau) const;

  const Grid2D& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience one-shot application at time t.
std::vector<cdouble> apply_hamiltonian(const Wavefunction2D& psi, const BeamConfig& beam,
                                       double t, HamiltonianMode mode);

/// Lanczos short-time propagator with a midpoint-frozen Hamiltonian.
class Propagator {
 public:
  Propagator(const Grid2D& grid, const BeamConfig& beam, const PropagatorConfig& config,
             HamiltonianMode mode, double carrier_kx);

  /// Advances psi by config.dt. Throws ConvergenceError when the Krylov
  /// error estimate exceeds krylov_tol at the maximum dimension.
  void step(Wavefunction2D& psi);

  /// Field-free exact propagation by tau (post-interaction drift).
  void drift(Wavefunction2D& psi, double tau) const;

  int last_krylov_dim() const { return last_dim_; }

  /// Hold the vector potential at time t for every later step (static-field
  /// studies). Time still advances.
  void freeze_field(double t) { frozen_time_ = t; }

 private:
  void apply_mask(Wavefunction2D& psi) const;

  PropagatorConfig config_;
  Hamiltonian hamiltonian_;
  std::vector<double> mask_;
  int last_dim_ = 0;
  std::optional<double> frozen_time_;
};

Wavefunction2D step(const Wavefunction2D& psi, const BeamConfig& beam,
                    const PropagatorConfig& config,
                    HamiltonianMode mode = HamiltonianMode::Full);

struct RunSchedule {
  double t_end = 0.0;           // s
  double snapshot_every = 0.0;  // s; <= 0 keeps only the first and last
  double free_flight = 0.0;     // field-free drift appended after t_end, s
};

struct Snapshot {
  int index = 0;
  Wavefunction2D psi;
  bool after_free_flight = false;
};

struct RunOptions {
  HamiltonianMode mode = HamiltonianMode::Full;
  bool comoving = true;  // carrier_kx = k_el
  /// Largest photon-momentum multiple the grid must resolve, per axis; the
  /// setup check is pi/d >= 2 (|k_el - K| + N k_ph) along x, pi/d >= 2 N k_ph along y.
  int expected_orders_x = 8;
  int expected_orders_y = 8;
  std::function<void(const Snapshot&)> on_snapshot;  // optional streaming hook
  bool keep_snapshots = true;
};

/// Propagate from t = 0 to schedule.t_end. Aborts with ConvergenceError if
/// the norm drifts by more than 1e-6 beyond what the mask absorbed.
std::vector<Snapshot> run(const ElectronConfig& electron, const BeamConfig& beam,
                          const Grid2D& grid, const PropagatorConfig& config,
                          const RunSchedule& schedule, const RunOptions& options = {});

}  // namespace kapdirac::tdse

#endif  // KAPDIRAC_TDSE_HPP_
