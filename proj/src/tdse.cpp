#include "kapdirac/tdse.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft2d.hpp"
#include "kapdirac/errors.hpp"
#include "kapdirac/fields.hpp"

namespace kapdirac::tdse {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

double fft_wavenumber(int m, int n, double d) {
  const int s = m < n / 2 ? m : m - n;
  return 2.0 * kPi * s / (n * d);
}

double dot_norm2(std::span<const cdouble> v) {
  CompensatedSum acc;
  for (const auto& z : v) acc.add(std::norm(z));
  return acc.value();
}

}  // namespace

// ---------------------------------------------------------------- Grid2D

void Grid2D::validate() const {
  if (nx < 16 || ny < 16 || !is_pow2(nx) || !is_pow2(ny))
    throw PreconditionError("grid: nx and ny must be powers of two >= 16");
  if (!(dx > 0.0) || !(dy > 0.0)) throw PreconditionError("grid: spacing must be > 0");
}

double Grid2D::kx(int m) const { return fft_wavenumber(m, nx, dx); }
double Grid2D::ky(int m) const { return fft_wavenumber(m, ny, dy); }

void Grid2D::check_nyquist(double kmax_x, double kmax_y) const {
  if (kPi / dx < 2.0 * kmax_x)
    throw PreconditionError("grid: x Nyquist wavenumber " + std::to_string(kPi / dx) +
                            " is below twice the expected maximum " +
                            std::to_string(kmax_x));
  if (kPi / dy < 2.0 * kmax_y)
    throw PreconditionError("grid: y Nyquist wavenumber " + std::to_string(kPi / dy) +
                            " is below twice the expected maximum " +
                            std::to_string(kmax_y));
}

// -------------------------------------------------------- Wavefunction2D

double Wavefunction2D::frame_velocity() const {
  return kConstants.hbar * carrier_kx / kConstants.m0;
}

double Wavefunction2D::norm() const { return dot_norm2(amplitudes) * grid.dx * grid.dy; }

double MomentumWavefunction::total() const {
  CompensatedSum acc;
  for (const auto& z : amplitudes) acc.add(std::norm(z));
  return acc.value() * dkx * dky;
}

Wavefunction2D init_gaussian(const ElectronConfig& electron, const Grid2D& grid,
                             double carrier_kx) {
  grid.validate();
  electron.validate();
  if (electron.plane_wave)
    throw PreconditionError("init_gaussian: electron is configured as a plane wave");
  if (electron.W_x < 4.0 * grid.dx || electron.W_y < 4.0 * grid.dy)
    throw PreconditionError("init_gaussian: widths must span at least 4 grid cells");
  const double k_rel = electron.k_el() - carrier_kx;
  // Carrier plus five momentum widths must sit below the Nyquist wavenumber.
  if (std::abs(k_rel) + 5.0 / electron.W_x > kPi / grid.dx)
    throw PreconditionError("init_gaussian: carrier wavenumber beyond grid Nyquist margin");

  Wavefunction2D psi;
  psi.grid = grid;
  psi.carrier_kx = carrier_kx;
  psi.amplitudes.resize(grid.size());
  const double x0 = electron.center.x, y0 = electron.center.y;
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double gx = -(x - x0) * (x - x0) / (2.0 * electron.W_x * electron.W_x);
    const cdouble carrier = std::polar(1.0, k_rel * x);
    for (int j = 0; j < grid.ny; ++j) {
      const double y = grid.y(j);
      const double gy = -(y - y0) * (y - y0) / (2.0 * electron.W_y * electron.W_y);
      psi.at(i, j) = std::exp(gx + gy) * carrier;
    }
  }
  const double scale = 1.0 / std::sqrt(psi.norm());
  for (auto& z : psi.amplitudes) z *= scale;
  return psi;
}

MomentumWavefunction to_momentum(const Wavefunction2D& psi) {
  const Grid2D& g = psi.grid;
  detail::Fft2D fft(g.nx, g.ny);
  std::vector<cdouble> spec(g.size());
  fft.forward(psi.amplitudes, spec);

  MomentumWavefunction out;
  out.time = psi.time;
  out.dkx = 2.0 * kPi / (g.nx * g.dx);
  out.dky = 2.0 * kPi / (g.ny * g.dy);
  out.kx.resize(g.nx);
  out.ky.resize(g.ny);
  out.amplitudes.resize(g.size());
  const double scale = g.dx * g.dy / (2.0 * kPi);
  // Physical x origin of the grid at this time.
  const double x_origin = psi.physical_x(0);
  for (int a = 0; a < g.nx; ++a) {
    const int m = (a + g.nx / 2) % g.nx;  // ascending order
    const double kgrid = g.kx(m);
    out.kx[a] = kgrid + psi.carrier_kx;
    for (int b = 0; b < g.ny; ++b) {
      const int n = (b + g.ny / 2) % g.ny;
      const double ky = g.ky(n);
      if (a == 0) out.ky[b] = ky;
      const double phase = -(kgrid * x_origin + ky * g.y_min);
      out.amplitudes[static_cast<std::size_t>(a) * g.ny + b] =
          scale * spec[static_cast<std::size_t>(m) * g.ny + n] * std::polar(1.0, phase);
    }
  }
  return out;
}

// ------------------------------------------------------------ Hamiltonian

struct Hamiltonian::Impl {
  Grid2D grid;
  BeamConfig beam;
  HamiltonianMode mode;
  double carrier_kx;
  double frame_velocity;
  double time = 0.0;

  detail::Fft2D fft;
  std::vector<double> kx, ky;          // FFT-ordered wavenumbers
  std::vector<double> kx_d, ky_d;      // first-derivative multipliers, Nyquist zeroed
  std::vector<double> kinetic;         // hbar^2 k^2 / 2 m0, J
  std::vector<double> Ax, Ay;          // vector potential at current time
  std::vector<double> scalar;          // diagonal part of the interaction, J

  mutable std::vector<cdouble> w0, w1, w2, w3;

  Impl(const Grid2D& g, const BeamConfig& b, HamiltonianMode m, double K)
      : grid(g), beam(b), mode(m), carrier_kx(K),
        frame_velocity(kConstants.hbar * K / kConstants.m0), fft(g.nx, g.ny) {
    const std::size_t n = g.size();
    kx.resize(g.nx);
    ky.resize(g.ny);
    kx_d.resize(g.nx);
    ky_d.resize(g.ny);
    for (int i = 0; i < g.nx; ++i) {
      kx[i] = g.kx(i);
      kx_d[i] = (i == g.nx / 2) ? 0.0 : kx[i];
    }
    for (int j = 0; j < g.ny; ++j) {
      ky[j] = g.ky(j);
      ky_d[j] = (j == g.ny / 2) ? 0.0 : ky[j];
    }
    kinetic.resize(n);
    const double c = kConstants.hbar * kConstants.hbar / (2.0 * kConstants.m0);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        kinetic[static_cast<std::size_t>(i) * g.ny + j] = c * (kx[i] * kx[i] + ky[j] * ky[j]);
    Ax.assign(n, 0.0);
    Ay.assign(n, 0.0);
    scalar.assign(n, 0.0);
    w0.resize(n);
    w1.resize(n);
    w2.resize(n);
    w3.resize(n);
  }

  void update_field(double t) {
    time = t;
    const auto& K = kConstants;
    const double shift = frame_velocity * t;
    if (beam.is_plane_wave() && beam.turn_on_cycles == 0) {
      // Separable closed form of the plane pair.
      const double s = beam.phi.sin(), c = beam.phi.cos();
      const double k = beam.k_ph(), omega = beam.omega();
      const double A0 = beam.E0 / omega;
      std::vector<double> cy(grid.ny), sy(grid.ny);
      for (int j = 0; j < grid.ny; ++j) {
        cy[j] = std::cos(k * s * grid.y(j));
        sy[j] = std::sin(k * s * grid.y(j));
      }
      for (int i = 0; i < grid.nx; ++i) {
        const double theta = omega * t + k * c * (grid.x(i) + shift) + beam.carrier_phase;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int j = 0; j < grid.ny; ++j) {
          const std::size_t q = static_cast<std::size_t>(i) * grid.ny + j;
          Ax[q] = -2.0 * A0 * s * cy[j] * ct;
          Ay[q] = -2.0 * A0 * c * sy[j] * st;
        }
      }
    } else {
      for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
          const auto f = fields::eval_field(beam, grid.x(i) + shift, grid.y(j), t);
          const std::size_t q = static_cast<std::size_t>(i) * grid.ny + j;
          Ax[q] = f.A.x;
          Ay[q] = f.A.y;
        }
    }
    const double quad = K.e * K.e / (2.0 * K.m0);
    const double lin = K.e * K.hbar * carrier_kx / K.m0;
    for (std::size_t q = 0; q < scalar.size(); ++q) {
      scalar[q] = quad * (Ax[q] * Ax[q] + Ay[q] * Ay[q]);
      if (mode == HamiltonianMode::Full) scalar[q] += lin * Ax[q];
    }
  }

  void apply(std::span<const cdouble> in, std::span<cdouble> out) const {
    const std::size_t n = grid.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    fft.forward(in, w0);  // phi~
    if (mode == HamiltonianMode::PonderomotiveOnly) {
      for (std::size_t q = 0; q < n; ++q) w1[q] = w0[q] * (kinetic[q] * inv_n);
      fft.backward(w1, out);
      for (std::size_t q = 0; q < n; ++q) out[q] += scalar[q] * in[q];
      return;
    }
    const auto& K = kConstants;
    const cdouble I(0.0, 1.0);
    // Gradient of phi in real space.
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; ++j) {
        const std::size_t q = static_cast<std::size_t>(i) * grid.ny + j;
        w1[q] = I * kx_d[i] * inv_n * w0[q];
        w2[q] = I * ky_d[j] * inv_n * w0[q];
      }
    fft.backward(w1, w1);
    fft.backward(w2, w2);
    // term1 = A . grad phi (kept in w3)
    for (std::size_t q = 0; q < n; ++q) w3[q] = Ax[q] * w1[q] + Ay[q] * w2[q];
    // div(A phi) in momentum space, plus kinetic term.
    for (std::size_t q = 0; q < n; ++q) {
      w1[q] = Ax[q] * in[q];
      w2[q] = Ay[q] * in[q];
    }
    fft.forward(w1, w1);
    fft.forward(w2, w2);
    const cdouble c2 = -I * K.hbar * K.e / (2.0 * K.m0);
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; ++j) {
        const std::size_t q = static_cast<std::size_t>(i) * grid.ny + j;
        const cdouble div = I * (kx_d[i] * w1[q] + ky_d[j] * w2[q]);
        w0[q] = (kinetic[q] * w0[q] + c2 * div) * inv_n;
      }
    fft.backward(w0, out);
    for (std::size_t q = 0; q < n; ++q) out[q] += c2 * w3[q] + scalar[q] * in[q];
  }
};

Hamiltonian::Hamiltonian(const Grid2D& grid, const BeamConfig& beam, HamiltonianMode mode,
                         double carrier_kx)
    : impl_(std::make_unique<Impl>(grid, beam, mode, carrier_kx)) {
  grid.validate();
  beam.validate();
  impl_->update_field(0.0);
}

Hamiltonian::~Hamiltonian() = default;
Hamiltonian::Hamiltonian(Hamiltonian&&) noexcept = default;
Hamiltonian& Hamiltonian::operator=(Hamiltonian&&) noexcept = default;

void Hamiltonian::set_time(double t) { impl_->update_field(t); }
double Hamiltonian::time() const { return impl_->time; }
const Grid2D& Hamiltonian::grid() const { return impl_->grid; }

void Hamiltonian::apply(std::span<const cdouble> in, std::span<cdouble> out) const {
  impl_->apply(in, out);
}

void Hamiltonian::free_propagate(std::span<cdouble> psi, double tau) const {
  auto& w = impl_->w0;
  const std::size_t n = impl_->grid.size();
  impl_->fft.forward(psi, w);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double rate = tau / kConstants.hbar;
  for (std::size_t q = 0; q < n; ++q) w[q] *= std::polar(inv_n, -impl_->kinetic[q] * rate);
  impl_->fft.backward(w, psi);
}

std::vector<cdouble> apply_hamiltonian(const Wavefunction2D& psi, const BeamConfig& beam,
                                       double t, HamiltonianMode mode) {
  Hamiltonian h(psi.grid, beam, mode, psi.carrier_kx);
  h.set_time(t);
  std::vector<cdouble> out(psi.grid.size());
  h.apply(psi.amplitudes, out);
  return out;
}

// ------------------------------------------------------------- Propagator

void PropagatorConfig::validate(const BeamConfig& beam) const {
  if (!(dt > 0.0)) throw PreconditionError("propagator: dt must be > 0");
  if (beam.omega() * dt > 2.0 * kPi / 40.0 * (1.0 + 1e-12))
    throw PreconditionError("propagator: need at least 40 steps per optical cycle");
  if (krylov_dim < 4 || krylov_dim > 64)
    throw PreconditionError("propagator: krylov_dim must lie in [4, 64]");
  if (!(krylov_tol > 0.0)) throw PreconditionError("propagator: krylov_tol must be > 0");
  if (const auto* m = std::get_if<CosineRampMask>(&mask); m && !(m->width > 0.0))
    throw PreconditionError("propagator: mask width must be > 0");
}

Propagator::Propagator(const Grid2D& grid, const BeamConfig& beam,
                       const PropagatorConfig& config, HamiltonianMode mode, double carrier_kx)
    : config_(config), hamiltonian_(grid, beam, mode, carrier_kx) {
  config.validate(beam);
  if (const auto* m = std::get_if<CosineRampMask>(&config.mask)) {
    auto ramp = [&](double d) {
      if (d >= m->width) return 1.0;
      if (d <= 0.0) return 0.0;
      return std::pow(std::cos(0.5 * kPi * (m->width - d) / m->width), 0.125);
    };
    const double Lx = grid.nx * grid.dx, Ly = grid.ny * grid.dy;
    mask_.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i) {
      const double dxe = std::min((i + 0.5) * grid.dx, Lx - (i + 0.5) * grid.dx);
      for (int j = 0; j < grid.ny; ++j) {
        const double dye = std::min((j + 0.5) * grid.dy, Ly - (j + 0.5) * grid.dy);
        mask_[static_cast<std::size_t>(i) * grid.ny + j] = ramp(dxe) * ramp(dye);
      }
    }
  }
}

void Propagator::step(Wavefunction2D& psi) {
  const std::size_t n = psi.amplitudes.size();
  const int m = config_.krylov_dim;
  const double tau = config_.dt / kConstants.hbar;
  hamiltonian_.set_time(frozen_time_ ? *frozen_time_ : psi.time + 0.5 * config_.dt);

  const double beta0 = std::sqrt(dot_norm2(psi.amplitudes));
  if (beta0 == 0.0) {
    psi.time += config_.dt;
    return;
  }
  std::vector<std::vector<cdouble>> basis;
  basis.reserve(static_cast<std::size_t>(m) + 1);
  basis.emplace_back(psi.amplitudes);
  for (auto& z : basis[0]) z /= beta0;

  std::vector<double> alpha, beta;
  std::vector<cdouble> w(n);
  Eigen::VectorXcd coeffs;
  bool converged = false;
  for (int j = 0; j < m; ++j) {
    hamiltonian_.apply(basis[j], w);
    for (auto& z : w) z *= tau;
    if (j > 0)
      for (std::size_t q = 0; q < n; ++q) w[q] -= beta[j - 1] * basis[j - 1][q];
    CompensatedSum a;
    for (std::size_t q = 0; q < n; ++q) a.add((std::conj(basis[j][q]) * w[q]).real());
    alpha.push_back(a.value());
    for (std::size_t q = 0; q < n; ++q) w[q] -= alpha[j] * basis[j][q];
    // Full reorthogonalization against the basis so far.
    for (int k = 0; k <= j; ++k) {
      CompensatedComplexSum c;
      for (std::size_t q = 0; q < n; ++q) c.add(std::conj(basis[k][q]) * w[q]);
      const cdouble ck = c.value();
      for (std::size_t q = 0; q < n; ++q) w[q] -= ck * basis[k][q];
    }
    const double b = std::sqrt(dot_norm2(w));

    // exp(-i T) e1 in the (j+1)-dimensional subspace.
    const int dim = j + 1;
    Eigen::VectorXd diag(dim), sub(std::max(dim - 1, 0));
    for (int k = 0; k < dim; ++k) diag(k) = alpha[k];
    for (int k = 0; k + 1 < dim; ++k) sub(k) = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& Q = es.eigenvectors();
    Eigen::VectorXcd phase(dim);
    for (int k = 0; k < dim; ++k)
      phase(k) = std::polar(Q(0, k), -es.eigenvalues()(k));
    coeffs = Q.cast<cdouble>() * phase;

    const double err = b * std::abs(coeffs(dim - 1));
    if (err < config_.krylov_tol || b < 1e-14) {
      converged = true;
      last_dim_ = dim;
      break;
    }
    if (j + 1 == m) break;
    beta.push_back(b);
    basis.emplace_back(w);
    for (auto& z : basis.back()) z /= b;
  }
  if (!converged)
    throw ConvergenceError("Krylov propagator did not reach tolerance " +
                           std::to_string(config_.krylov_tol) + " within dimension " +
                           std::to_string(m));

  for (std::size_t q = 0; q < n; ++q) {
    cdouble acc = 0.0;
    for (int k = 0; k < coeffs.size(); ++k) acc += coeffs(k) * basis[k][q];
    psi.amplitudes[q] = beta0 * acc;
  }
  psi.time += config_.dt;
  apply_mask(psi);
}

void Propagator::apply_mask(Wavefunction2D& psi) const {
  if (mask_.empty()) return;
  const double before = psi.norm();
  for (std::size_t q = 0; q < mask_.size(); ++q) psi.amplitudes[q] *= mask_[q];
  psi.absorbed += before - psi.norm();
}

void Propagator::drift(Wavefunction2D& psi, double tau) const {
  hamiltonian_.free_propagate(psi.amplitudes, tau);
  psi.time += tau;
}

Wavefunction2D step(const Wavefunction2D& psi, const BeamConfig& beam,
                    const PropagatorConfig& config, HamiltonianMode mode) {
  Propagator prop(psi.grid, beam, config, mode, psi.carrier_kx);
  Wavefunction2D out = psi;
  prop.step(out);
  return out;
}

// -------------------------------------------------------------------- run

std::vector<Snapshot> run(const ElectronConfig& electron, const BeamConfig& beam,
                          const Grid2D& grid, const PropagatorConfig& config,
                          const RunSchedule& schedule, const RunOptions& options) {
  const auto dq = derive_kinematics(beam, electron);
  grid.validate();
  config.validate(beam);
  if (!(schedule.t_end >= 0.0) || !(schedule.free_flight >= 0.0))
    throw PreconditionError("run: schedule times must be >= 0");
  const double carrier = options.comoving ? dq.k_el : 0.0;
  grid.check_nyquist(std::abs(dq.k_el - carrier) + options.expected_orders_x * dq.k_ph,
                     options.expected_orders_y * dq.k_ph);

  Wavefunction2D psi = init_gaussian(electron, grid, carrier);
  const int steps = static_cast<int>(std::ceil(schedule.t_end / config.dt - 1e-9));
  PropagatorConfig cfg = config;
  if (steps > 0) cfg.dt = schedule.t_end / steps;
  Propagator prop(grid, beam, cfg, options.mode, carrier);
  const int every = schedule.snapshot_every > 0.0
                        ? std::max(1, static_cast<int>(std::lround(schedule.snapshot_every / cfg.dt)))
                        : 0;

  std::vector<Snapshot> out;
  int index = 0;
  auto emit = [&](bool after_flight) {
    Snapshot s{index++, psi, after_flight};
    if (options.on_snapshot) options.on_snapshot(s);
    if (options.keep_snapshots) out.push_back(std::move(s));
  };

  emit(false);
  const double norm0 = psi.norm();
  for (int s = 1; s <= steps; ++s) {
    prop.step(psi);
    const double drift = std::abs(psi.norm() + psi.absorbed - norm0);
    if (drift > 1e-6)
      throw ConvergenceError("run: norm drift " + std::to_string(drift) +
                             " exceeds 1e-6; configuration is unstable");
    if ((every > 0 && s % every == 0) || s == steps) {
      if (s == steps || s % every == 0) emit(false);
    }
  }
  if (schedule.free_flight > 0.0) {
    prop.drift(psi, schedule.free_flight);
    emit(true);
  }
  return out;
}

}  // namespace kapdirac::tdse
