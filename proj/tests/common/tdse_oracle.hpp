// Dense reference operators for checking the matrix-free propagator.
#ifndef KAPDIRAC_TESTS_TDSE_ORACLE_HPP_
#define KAPDIRAC_TESTS_TDSE_ORACLE_HPP_

#include <Eigen/Dense>
#include <cmath>

#include "kapdirac/fields.hpp"
#include "kapdirac/tdse.hpp"

namespace kapdirac::testing {

using tdse::Grid2D;
using tdse::HamiltonianMode;
using tdse::Wavefunction2D;
using cd = std::complex<double>;

inline double fft_k(int m, int n, double d) { return 2 * M_PI * (m < n / 2 ? m : m - n) / (n * d); }

/// Spectral operator F^-1 diag(mult) F on one axis, as a dense matrix.
inline Eigen::MatrixXcd spectral_1d(int n, double d, bool derivative) {
  Eigen::MatrixXcd F(n, n), Fi(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      F(a, b) = std::polar(1.0, -2 * M_PI * a * b / n);
      Fi(a, b) = std::polar(1.0 / n, 2 * M_PI * a * b / n);
    }
  Eigen::VectorXcd mult(n);
  for (int m = 0; m < n; ++m) {
    const double k = fft_k(m, n, d);
    mult(m) = derivative ? cd(0, m == n / 2 ? 0.0 : k) : cd(k * k, 0);
  }
  return Fi * mult.asDiagonal() * F;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Dense Hamiltonian built directly from the operator definition.
inline Eigen::MatrixXcd dense_reference(const Grid2D& g, const BeamConfig& b, double t, double K,
                                 HamiltonianMode mode) {
  const auto& C = kConstants;
  const int n = static_cast<int>(g.size());
  const Eigen::MatrixXcd Ix = Eigen::MatrixXcd::Identity(g.nx, g.nx);
  const Eigen::MatrixXcd Iy = Eigen::MatrixXcd::Identity(g.ny, g.ny);
  const Eigen::MatrixXcd Dx = kron(spectral_1d(g.nx, g.dx, true), Iy);
  const Eigen::MatrixXcd Dy = kron(Ix, spectral_1d(g.ny, g.dy, true));
  const Eigen::MatrixXcd Lap = kron(spectral_1d(g.nx, g.dx, false), Iy) + kron(Ix, spectral_1d(g.ny, g.dy, false));
  Eigen::MatrixXcd H = C.hbar * C.hbar / (2 * C.m0) * Lap;
  Eigen::VectorXcd ax(n), ay(n);
  const double V = C.hbar * K / C.m0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const auto f = fields::eval_field(b, g.x(i) + V * t, g.y(j), t);
      ax(i * g.ny + j) = f.A.x;
      ay(i * g.ny + j) = f.A.y;
    }
  const Eigen::MatrixXcd Ax = ax.asDiagonal(), Ay = ay.asDiagonal();
  H += C.e * C.e / (2 * C.m0) * (Ax * Ax + Ay * Ay);
  if (mode == HamiltonianMode::Full) {
    H += C.e * C.hbar * K / C.m0 * Ax;
    const cd c2(0, -C.hbar * C.e / (2 * C.m0));
    H += c2 * (Ax * Dx + Ay * Dy + Dx * Ax + Dy * Ay);
  }
  return H;
}

struct Moments {
  double mx, my, vx, vy;
};

inline Moments moments(const Wavefunction2D& psi) {
  double w = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < psi.grid.nx; ++i)
    for (int j = 0; j < psi.grid.ny; ++j) {
      const double d = std::norm(psi.at(i, j));
      const double x = psi.physical_x(i), y = psi.grid.y(j);
      w += d, sx += d * x, sy += d * y, sxx += d * x * x, syy += d * y * y;
    }
  const double mx = sx / w, my = sy / w;
  return {mx, my, sxx / w - mx * mx, syy / w - my * my};
}

}  // namespace kapdirac::testing

#endif  // KAPDIRAC_TESTS_TDSE_ORACLE_HPP_
